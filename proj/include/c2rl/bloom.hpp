#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace c2rl {

// 64-bit FNV-1a over `data`. `basis` is the running hash state, so calls
// can be chained; the default is the standard offset basis.
std::uint64_t fnv1a64(std::span<const std::uint8_t> data,
                      std::uint64_t basis = 0xcbf29ce484222325ULL);

// Index of the seed-th hash function for `element`, in [0, m).
//
// The digest input is the 4-byte big-endian seed followed by the element
// bytes; the index is the 64-bit FNV-1a digest reduced modulo m. Plain
// modulo reduction is used: the bias for m far below 2^64 is negligible.
// Deterministic across platforms; this construction is part of the wire
// contract (every receiver must compute the same indices).
std::uint32_t hash_index(std::span<const std::uint8_t> element,
                         std::uint32_t seed, std::uint32_t m);

// Analytic false-positive probability [1 - (1 - 1/m)^{kn}]^k of an m-bit
// filter with k hash functions holding n elements.
//
// Accepts real-valued arguments so the relaxed optimization model can be
// evaluated with the exact same arithmetic. (1 - 1/m)^{kn} is computed as
// exp(kn * log1p(-1/m)), which stays accurate for m up to 2^32 and
// kn up to 1e9. Throws std::invalid_argument for m < 1 or k < 1.
double false_positive_prob(double m, double k, double n);

// Target parameters a filter is built from: m bits, k hash functions,
// design load n and the false-positive budget delta_hat they were
// optimized for.
struct FilterParams {
  std::uint32_t m = 0;
  std::uint16_t k = 0;
  std::uint64_t n = 0;
  double delta_hat = 0.0;
};

// Plain Bloom filter over byte-string elements.
//
// Bit j lives in byte j/8 at position j%8 (LSB first); trailing pad bits
// of the last byte stay zero. That byte layout is the serialized payload,
// so the in-memory representation is already wire order.
//
// Single writer during construction; immutable afterwards and safe to
// share across threads for queries.
class BloomFilter {
 public:
  // Rejects m == 0 or k == 0.
  BloomFilter(std::uint32_t m, std::uint16_t k);
  explicit BloomFilter(const FilterParams& params);

  void insert(std::span<const std::uint8_t> element);
  [[nodiscard]] bool contains(std::span<const std::uint8_t> element) const;

  [[nodiscard]] std::uint32_t bit_size() const { return m_; }
  [[nodiscard]] std::uint16_t hash_count() const { return k_; }
  [[nodiscard]] std::uint64_t insert_count() const { return insert_count_; }
  [[nodiscard]] std::size_t popcount() const;
  [[nodiscard]] bool bit(std::uint32_t index) const;

  // ceil(m/8) bytes in wire order.
  [[nodiscard]] const std::vector<std::uint8_t>& payload() const { return bytes_; }

  // 4-byte big-endian m (bits), 2-byte big-endian k, then the payload.
  // This exact layout is embedded in the C2RL `entries` field.
  [[nodiscard]] std::vector<std::uint8_t> serialize() const;
  static BloomFilter deserialize(std::span<const std::uint8_t> bytes);

  // Reconstructs a filter from its wire payload. `insert_count` is not
  // part of the payload and is carried out of band (the CRL header).
  static BloomFilter from_payload(std::uint32_t m, std::uint16_t k,
                                  std::span<const std::uint8_t> payload,
                                  std::uint64_t insert_count = 0);

  friend bool operator==(const BloomFilter&, const BloomFilter&) = default;

 private:
  std::uint32_t m_;
  std::uint16_t k_;
  std::uint64_t insert_count_ = 0;
  std::vector<std::uint8_t> bytes_;
};

}  // namespace c2rl
