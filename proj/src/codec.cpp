#include "c2rl/codec.hpp"

#include <algorithm>
#include <cmath>

namespace c2rl {

namespace {

// Offsets inside the 230-byte header.
constexpr std::size_t kVersionOff = 0;
constexpr std::size_t kSignerOff = 1;
constexpr std::size_t kSignatureOff = 97;
constexpr std::size_t kMetaOff = 161;
constexpr std::size_t kMetaBytes = 69;
constexpr std::size_t kMetaUsedBytes = 17;  // serial, times, kind, count

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  out.push_back(static_cast<std::uint8_t>(v >> 24));
  out.push_back(static_cast<std::uint8_t>(v >> 16));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v));
}

std::uint32_t get_u32(std::span<const std::uint8_t> in, std::size_t off) {
  return (static_cast<std::uint32_t>(in[off]) << 24) |
         (static_cast<std::uint32_t>(in[off + 1]) << 16) |
         (static_cast<std::uint32_t>(in[off + 2]) << 8) |
         static_cast<std::uint32_t>(in[off + 3]);
}

void encode_header(std::vector<std::uint8_t>& out, const CrlHeader& h) {
  out.push_back(h.version);
  out.insert(out.end(), h.signer.begin(), h.signer.end());
  out.insert(out.end(), h.signature.begin(), h.signature.end());
  put_u32(out, h.serial);
  put_u32(out, h.issue_time);
  put_u32(out, h.next_issue_time);
  out.push_back(static_cast<std::uint8_t>(h.kind));
  put_u32(out, h.entry_count);
  out.insert(out.end(), kMetaBytes - kMetaUsedBytes, 0);
}

CrlHeader decode_header(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kHeaderBytes) {
    throw DecodeError("list shorter than the 230-byte header");
  }
  CrlHeader h;
  h.version = bytes[kVersionOff];
  if (h.version != 1) {
    throw DecodeError("unsupported version field");
  }
  std::copy_n(bytes.begin() + kSignerOff, h.signer.size(), h.signer.begin());
  std::copy_n(bytes.begin() + kSignatureOff, h.signature.size(), h.signature.begin());
  h.serial = get_u32(bytes, kMetaOff);
  h.issue_time = get_u32(bytes, kMetaOff + 4);
  h.next_issue_time = get_u32(bytes, kMetaOff + 8);
  const std::uint8_t kind = bytes[kMetaOff + 12];
  if (kind > static_cast<std::uint8_t>(EntryKind::bloom)) {
    throw DecodeError("unknown entry-kind tag");
  }
  h.kind = static_cast<EntryKind>(kind);
  h.entry_count = get_u32(bytes, kMetaOff + 13);
  for (std::size_t i = kMetaOff + kMetaUsedBytes; i < kHeaderBytes; ++i) {
    if (bytes[i] != 0) {
      throw DecodeError("nonzero reserved header bytes");
    }
  }
  return h;
}

}  // namespace

std::vector<std::uint8_t> encode_crl(const Crl& crl) {
  if (crl.header.kind != EntryKind::explicit_ids) {
    throw std::invalid_argument("encode_crl: header kind is not explicit_ids");
  }
  if (crl.header.entry_count != crl.entries.size()) {
    throw std::invalid_argument("encode_crl: entry_count does not match entries");
  }
  std::vector<std::uint8_t> out;
  out.reserve(kHeaderBytes + kEntryBytes * crl.entries.size());
  encode_header(out, crl.header);
  for (const CrlEntry& e : crl.entries) {
    out.insert(out.end(), e.id.begin(), e.id.end());
    put_u32(out, e.expiry);
  }
  return out;
}

Crl decode_crl(std::span<const std::uint8_t> bytes) {
  Crl crl;
  crl.header = decode_header(bytes);
  if (crl.header.kind != EntryKind::explicit_ids) {
    throw DecodeError("decode_crl: entry kind is not explicit_ids");
  }
  const std::size_t body = bytes.size() - kHeaderBytes;
  if (body % kEntryBytes != 0) {
    throw DecodeError("decode_crl: entries field is not a whole number of entries");
  }
  if (body / kEntryBytes != crl.header.entry_count) {
    throw DecodeError("decode_crl: entry count does not match entries length");
  }
  crl.entries.reserve(crl.header.entry_count);
  for (std::size_t off = kHeaderBytes; off < bytes.size(); off += kEntryBytes) {
    CrlEntry e;
    std::copy_n(bytes.begin() + static_cast<std::ptrdiff_t>(off), e.id.size(), e.id.begin());
    e.expiry = get_u32(bytes, off + e.id.size());
    crl.entries.push_back(e);
  }
  return crl;
}

std::vector<std::uint8_t> encode_c2rl(const C2rl& c2rl) {
  if (c2rl.header.kind != EntryKind::bloom) {
    throw std::invalid_argument("encode_c2rl: header kind is not bloom");
  }
  if (c2rl.header.entry_count != c2rl.filter.insert_count()) {
    throw std::invalid_argument("encode_c2rl: entry_count does not match the filter load");
  }
  std::vector<std::uint8_t> out;
  out.reserve(kHeaderBytes + kFilterPreambleBytes + c2rl.filter.payload().size());
  encode_header(out, c2rl.header);
  const std::vector<std::uint8_t> filter_bytes = c2rl.filter.serialize();
  out.insert(out.end(), filter_bytes.begin(), filter_bytes.end());
  return out;
}

C2rl decode_c2rl(std::span<const std::uint8_t> bytes) {
  const CrlHeader header = decode_header(bytes);
  if (header.kind != EntryKind::bloom) {
    throw DecodeError("decode_c2rl: entry kind is not bloom");
  }
  const std::span<const std::uint8_t> entries = bytes.subspan(kHeaderBytes);
  if (entries.size() < kFilterPreambleBytes) {
    throw DecodeError("decode_c2rl: truncated filter preamble");
  }
  const std::uint32_t m = get_u32(entries, 0);
  const std::uint16_t k = static_cast<std::uint16_t>(
      (static_cast<std::uint16_t>(entries[4]) << 8) | entries[5]);
  if (m == 0 || k == 0) {
    throw DecodeError("decode_c2rl: m and k must be >= 1");
  }
  const std::size_t expect = (static_cast<std::size_t>(m) + 7) / 8;
  const std::span<const std::uint8_t> payload = entries.subspan(kFilterPreambleBytes);
  if (payload.size() != expect) {
    throw DecodeError("decode_c2rl: payload length does not match declared m");
  }
  try {
    return C2rl{header, BloomFilter::from_payload(m, k, payload, header.entry_count)};
  } catch (const std::invalid_argument& e) {
    throw DecodeError(e.what());
  }
}

TagSigner::TagSigner(const std::array<std::uint8_t, 32>& key) : key_(key) {}

std::array<std::uint8_t, 96> TagSigner::signer_info() const {
  // Identity blob: 8 tag words derived from the key alone, repeated to
  // fill 96 bytes. Purely an identifier; it reveals a digest of the key,
  // which is fine for a test signer.
  std::array<std::uint8_t, 96> info{};
  for (std::size_t block = 0; block < 12; ++block) {
    std::uint64_t h = fnv1a64(key_, 0x9e3779b97f4a7c15ULL + block);
    for (std::size_t i = 0; i < 8; ++i) {
      info[block * 8 + i] = static_cast<std::uint8_t>(h >> (56 - 8 * i));
    }
  }
  return info;
}

std::array<std::uint8_t, 64> TagSigner::sign(std::span<const std::uint8_t> message) const {
  // One pass over the message, then eight keyed expansions of the digest.
  std::uint64_t h = fnv1a64(key_);
  const std::uint64_t len = message.size();
  for (int shift = 56; shift >= 0; shift -= 8) {
    h = (h ^ static_cast<std::uint8_t>(len >> shift)) * 0x100000001b3ULL;
  }
  h = fnv1a64(message, h);

  std::array<std::uint8_t, 64> tag{};
  for (std::size_t block = 0; block < 8; ++block) {
    std::uint64_t t = fnv1a64(key_, h + 0x100000001b3ULL * (block + 1));
    for (std::size_t i = 0; i < 8; ++i) {
      tag[block * 8 + i] = static_cast<std::uint8_t>(t >> (56 - 8 * i));
    }
  }
  return tag;
}

bool TagSigner::verify(std::span<const std::uint8_t> message,
                       const std::array<std::uint8_t, 64>& signature) const {
  return sign(message) == signature;
}

namespace {

// The signed view is the whole encoding with the signature bytes zeroed.
std::vector<std::uint8_t> signed_view(std::span<const std::uint8_t> encoded) {
  std::vector<std::uint8_t> v(encoded.begin(), encoded.end());
  std::fill_n(v.begin() + kSignatureOff, 64, 0);
  return v;
}

template <typename List, typename EncodeFn>
void sign_list(List& list, const Signer& signer, EncodeFn encode) {
  list.header.signer = signer.signer_info();
  list.header.signature = {};
  const std::vector<std::uint8_t> body = encode(list);
  list.header.signature = signer.sign(body);
}

}  // namespace

void sign(Crl& crl, const Signer& signer) {
  sign_list(crl, signer, encode_crl);
}

void sign(C2rl& c2rl, const Signer& signer) {
  sign_list(c2rl, signer, encode_c2rl);
}

bool verify(std::span<const std::uint8_t> encoded, const Signer& signer) {
  if (encoded.size() < kHeaderBytes) {
    return false;
  }
  std::array<std::uint8_t, 64> stored{};
  std::copy_n(encoded.begin() + kSignatureOff, stored.size(), stored.begin());
  return signer.verify(signed_view(encoded), stored);
}

std::uint64_t crl_size(std::uint64_t n) {
  return kHeaderBytes + kEntryBytes * n;
}

std::uint64_t c2rl_size(std::uint64_t m) {
  return kHeaderBytes + (m + 7) / 8;
}

std::uint64_t c2rl_wire_size(std::uint64_t m) {
  return c2rl_size(m) + kFilterPreambleBytes;
}

double compression_gain(std::uint64_t n, std::uint64_t m) {
  return static_cast<double>(crl_size(n)) / static_cast<double>(c2rl_size(m));
}

}  // namespace c2rl
