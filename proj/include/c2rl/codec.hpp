#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <span>
#include <stdexcept>
#include <vector>

#include "c2rl/bloom.hpp"

namespace c2rl {

class DecodeError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

// 10-byte opaque certificate identifier.
using CertificateId = std::array<std::uint8_t, 10>;

// One revocation entry: id plus expiry (seconds, 4-byte big-endian on the
// wire). 14 bytes per entry.
struct CrlEntry {
  CertificateId id{};
  std::uint32_t expiry = 0;

  friend auto operator<=>(const CrlEntry&, const CrlEntry&) = default;
};

enum class EntryKind : std::uint8_t {
  explicit_ids = 0,  // standard CRL: 14-byte entries
  bloom = 1,         // compressed CRL: one filter payload
};

// Fixed 230-byte header shared by both list formats.
//
// Wire layout: version (1) | signer (96) | signature (64) | unsigned
// meta (69). The unsigned meta packs serial, issue time, next issue time,
// entry kind and entry count big-endian, followed by 52 reserved bytes
// that must be zero. The signature covers every header and body byte
// except the signature field itself.
struct CrlHeader {
  std::uint8_t version = 1;
  std::array<std::uint8_t, 96> signer{};
  std::array<std::uint8_t, 64> signature{};
  std::uint32_t serial = 0;  // issue counter; strictly increases per issuer
  std::uint32_t issue_time = 0;
  std::uint32_t next_issue_time = 0;
  EntryKind kind = EntryKind::explicit_ids;
  std::uint32_t entry_count = 0;

  friend bool operator==(const CrlHeader&, const CrlHeader&) = default;
};

inline constexpr std::size_t kHeaderBytes = 230;
inline constexpr std::size_t kEntryBytes = 14;
// m and k travel in-band ahead of the filter bits (4 + 2 bytes). The
// analytic size model below intentionally omits them; wire sizes do not.
inline constexpr std::size_t kFilterPreambleBytes = 6;

struct Crl {
  CrlHeader header;
  std::vector<CrlEntry> entries;

  friend bool operator==(const Crl&, const Crl&) = default;
};

struct C2rl {
  CrlHeader header;
  BloomFilter filter;

  friend bool operator==(const C2rl&, const C2rl&) = default;
};

// encode length = 230 + 14 * entries. decode rejects wrong version, wrong
// entry kind, truncated input, trailing bytes, nonzero reserved bytes and
// entry-count mismatch.
std::vector<std::uint8_t> encode_crl(const Crl& crl);
Crl decode_crl(std::span<const std::uint8_t> bytes);

// encode length = 230 + 6 + ceil(m/8). decode additionally rejects m == 0,
// k == 0 and payload length not matching the declared m. The header's
// entry_count carries the filter's insert count.
std::vector<std::uint8_t> encode_c2rl(const C2rl& c2rl);
C2rl decode_c2rl(std::span<const std::uint8_t> bytes);

// Signature seam. Real deployments plug an asymmetric scheme in here; the
// default is a deterministic keyed tag so the formats and the revocation
// flow are testable without a crypto dependency.
class Signer {
 public:
  virtual ~Signer() = default;
  // 96-byte identity blob placed in the header's signer field.
  [[nodiscard]] virtual std::array<std::uint8_t, 96> signer_info() const = 0;
  [[nodiscard]] virtual std::array<std::uint8_t, 64> sign(
      std::span<const std::uint8_t> message) const = 0;
  [[nodiscard]] virtual bool verify(
      std::span<const std::uint8_t> message,
      const std::array<std::uint8_t, 64>& signature) const = 0;
};

// FNV-based keyed tag over the message. Any single-byte change to the
// message or a different key yields a different tag.
class TagSigner final : public Signer {
 public:
  explicit TagSigner(const std::array<std::uint8_t, 32>& key);

  [[nodiscard]] std::array<std::uint8_t, 96> signer_info() const override;
  [[nodiscard]] std::array<std::uint8_t, 64> sign(
      std::span<const std::uint8_t> message) const override;
  [[nodiscard]] bool verify(
      std::span<const std::uint8_t> message,
      const std::array<std::uint8_t, 64>& signature) const override;

 private:
  std::array<std::uint8_t, 32> key_;
};

// Sets the signer field and recomputes the signature over everything but
// the signature bytes. Calling it again with a different signer re-signs
// the same body (the PCA -> RSU hop).
void sign(Crl& crl, const Signer& signer);
void sign(C2rl& c2rl, const Signer& signer);

// Byte-level check against an encoded list. Works on arbitrary bytes: a
// mutated or truncated message returns false rather than throwing.
bool verify(std::span<const std::uint8_t> encoded, const Signer& signer);

// Size model used for compression-gain figures: a standard CRL is
// 230 + 14n bytes, a compressed one 230 + ceil(m/8).
std::uint64_t crl_size(std::uint64_t n);
std::uint64_t c2rl_size(std::uint64_t m);
// Actual encoded size, including the 6-byte m/k preamble.
std::uint64_t c2rl_wire_size(std::uint64_t m);

// G = (230 + 14n) / (230 + ceil(m/8)).
double compression_gain(std::uint64_t n, std::uint64_t m);

}  // namespace c2rl
