#include "c2rl/bloom.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>

namespace c2rl {

namespace {

constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;

inline std::uint64_t fnv1a64_step(std::uint64_t h, std::uint8_t byte) {
  return (h ^ byte) * kFnvPrime;
}

}  // namespace

std::uint64_t fnv1a64(std::span<const std::uint8_t> data, std::uint64_t basis) {
  std::uint64_t h = basis;
  for (std::uint8_t b : data) {
    h = fnv1a64_step(h, b);
  }
  return h;
}

std::uint32_t hash_index(std::span<const std::uint8_t> element,
                         std::uint32_t seed, std::uint32_t m) {
  if (m == 0) {
    throw std::invalid_argument("hash_index: m must be >= 1");
  }
  std::uint64_t h = 0xcbf29ce484222325ULL;
  h = fnv1a64_step(h, static_cast<std::uint8_t>(seed >> 24));
  h = fnv1a64_step(h, static_cast<std::uint8_t>(seed >> 16));
  h = fnv1a64_step(h, static_cast<std::uint8_t>(seed >> 8));
  h = fnv1a64_step(h, static_cast<std::uint8_t>(seed));
  h = fnv1a64(element, h);
  return static_cast<std::uint32_t>(h % m);
}

double false_positive_prob(double m, double k, double n) {
  if (!(m >= 1.0) || !(k >= 1.0)) {
    throw std::invalid_argument("false_positive_prob: need m >= 1 and k >= 1");
  }
  if (n < 0.0) {
    throw std::invalid_argument("false_positive_prob: need n >= 0");
  }
  if (n == 0.0) {
    return 0.0;
  }
  // (1 - 1/m)^{kn} = exp(kn * log1p(-1/m)), so the bracket is
  // -expm1(kn * log1p(-1/m)). m == 1 degenerates via log1p(-1) = -inf to
  // delta = 1, as it should.
  const double bracket = -std::expm1(k * n * std::log1p(-1.0 / m));
  return std::pow(bracket, k);
}

BloomFilter::BloomFilter(std::uint32_t m, std::uint16_t k)
    : m_(m), k_(k), bytes_((static_cast<std::size_t>(m) + 7) / 8, 0) {
  if (m == 0 || k == 0) {
    throw std::invalid_argument("BloomFilter: need m >= 1 and k >= 1");
  }
}

BloomFilter::BloomFilter(const FilterParams& params)
    : BloomFilter(params.m, params.k) {}

void BloomFilter::insert(std::span<const std::uint8_t> element) {
  for (std::uint32_t seed = 0; seed < k_; ++seed) {
    const std::uint32_t j = hash_index(element, seed, m_);
    bytes_[j >> 3] |= static_cast<std::uint8_t>(1u << (j & 7u));
  }
  ++insert_count_;
}

bool BloomFilter::contains(std::span<const std::uint8_t> element) const {
  for (std::uint32_t seed = 0; seed < k_; ++seed) {
    const std::uint32_t j = hash_index(element, seed, m_);
    if ((bytes_[j >> 3] & (1u << (j & 7u))) == 0) {
      return false;
    }
  }
  return true;
}

std::size_t BloomFilter::popcount() const {
  std::size_t count = 0;
  for (std::uint8_t b : bytes_) {
    count += static_cast<std::size_t>(std::popcount(b));
  }
  return count;
}

bool BloomFilter::bit(std::uint32_t index) const {
  if (index >= m_) {
    throw std::out_of_range("BloomFilter::bit: index past m");
  }
  return (bytes_[index >> 3] & (1u << (index & 7u))) != 0;
}

std::vector<std::uint8_t> BloomFilter::serialize() const {
  std::vector<std::uint8_t> out;
  out.reserve(6 + bytes_.size());
  out.push_back(static_cast<std::uint8_t>(m_ >> 24));
  out.push_back(static_cast<std::uint8_t>(m_ >> 16));
  out.push_back(static_cast<std::uint8_t>(m_ >> 8));
  out.push_back(static_cast<std::uint8_t>(m_));
  out.push_back(static_cast<std::uint8_t>(k_ >> 8));
  out.push_back(static_cast<std::uint8_t>(k_));
  out.insert(out.end(), bytes_.begin(), bytes_.end());
  return out;
}

BloomFilter BloomFilter::deserialize(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 6) {
    throw std::invalid_argument("BloomFilter::deserialize: truncated preamble");
  }
  const std::uint32_t m = (static_cast<std::uint32_t>(bytes[0]) << 24) |
                          (static_cast<std::uint32_t>(bytes[1]) << 16) |
                          (static_cast<std::uint32_t>(bytes[2]) << 8) |
                          static_cast<std::uint32_t>(bytes[3]);
  const std::uint16_t k = static_cast<std::uint16_t>(
      (static_cast<std::uint16_t>(bytes[4]) << 8) | bytes[5]);
  return from_payload(m, k, bytes.subspan(6));
}

BloomFilter BloomFilter::from_payload(std::uint32_t m, std::uint16_t k,
                                      std::span<const std::uint8_t> payload,
                                      std::uint64_t insert_count) {
  if (m == 0 || k == 0) {
    throw std::invalid_argument("BloomFilter: need m >= 1 and k >= 1");
  }
  // validate before the ctor so a bogus m cannot trigger a huge allocation
  if (payload.size() != (static_cast<std::size_t>(m) + 7) / 8) {
    throw std::invalid_argument("BloomFilter::from_payload: payload length does not match m");
  }
  BloomFilter filter(m, k);
  const unsigned pad_bits = static_cast<unsigned>(filter.bytes_.size() * 8 - m);
  if (pad_bits != 0 &&
      (payload.back() & ~static_cast<std::uint8_t>(0xffu >> pad_bits)) != 0) {
    throw std::invalid_argument("BloomFilter::from_payload: nonzero pad bits");
  }
  filter.bytes_.assign(payload.begin(), payload.end());
  filter.insert_count_ = insert_count;
  return filter;
}

}  // namespace c2rl
