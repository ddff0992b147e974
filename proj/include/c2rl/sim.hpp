#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace c2rl {

// Scenario parameters. Defaults mirror the reference urban setup: 3x2 km
// area, 1024-bit UDP packets, one list broadcast every 300 s, 1000
// pseudonyms per vehicle, delta_hat 1e-3.
//
// The radio is a unit disk with independent per-packet Bernoulli loss;
// packets inside a broadcast burst go out every packet_tx_s seconds and
// vehicle positions are re-evaluated every range_recheck_s during a burst.
struct SimConfig {
  double area_width_m = 3000.0;
  double area_height_m = 2000.0;
  std::uint32_t rsu_count = 28;
  std::uint32_t vehicle_count = 100;
  double radio_range_m = 300.0;
  std::uint32_t packet_payload_bits = 1024;
  double crl_tx_interval_s = 300.0;
  double duration_s = 3600.0;
  double per_packet_loss = 0.0;
  std::uint64_t seed = 1;
  std::uint32_t revoked_per_hour = 50;
  std::uint32_t pseudonyms_per_vehicle = 1000;
  double delta_hat = 1e-3;
  double speed_min_mps = 5.0;
  double speed_max_mps = 15.0;
  double packet_tx_s = 0.001;
  double range_recheck_s = 0.5;
  // Optimizer load override; unset means the exact revoked-certificate
  // count. Setting it to e.g. the vehicle density reproduces the
  // undersized-filter variant.
  std::optional<std::uint64_t> filter_load;
};

enum class ListFormat { standard, compressed };

struct SimMetrics {
  ListFormat format = ListFormat::standard;
  std::uint64_t list_bytes = 0;
  std::uint32_t fragments_per_list = 0;
  std::uint64_t total_crls_received = 0;
  std::uint32_t vehicles_completed = 0;
  double coverage = 0.0;              // fraction of vehicles with >= 1 full list
  double mean_download_time_s = 0.0;  // first fragment heard -> first completion
};

struct PairedMetrics {
  SimMetrics standard;
  SimMetrics compressed;

  // received/coverage gains are compressed over standard; time gain is
  // standard over compressed.
  [[nodiscard]] double gain_received() const;
  [[nodiscard]] double gain_coverage() const;
  [[nodiscard]] double gain_download_time() const;
};

// One UDP-sized fragment of an encoded list. Wire layout: epoch, index,
// total and checksum as 16-bit big-endian words, then the body.
struct Fragment {
  std::uint16_t epoch = 0;
  std::uint16_t index = 0;
  std::uint16_t total = 0;
  std::uint16_t checksum = 0;
  std::vector<std::uint8_t> body;

  friend bool operator==(const Fragment&, const Fragment&) = default;
};

inline constexpr std::size_t kFragmentHeaderBytes = 8;

// Splits an encoded list into ceil(size / (capacity - 8)) fragments, each
// at most `capacity_bytes` on the wire. An empty list still produces one
// body-less fragment so receivers see the epoch. Rejects capacities of 8
// bytes or less and lists needing more than 65535 fragments.
std::vector<Fragment> fragment(std::span<const std::uint8_t> list_bytes,
                               std::uint16_t epoch,
                               std::size_t capacity_bytes = 128);

std::vector<std::uint8_t> encode_fragment(const Fragment& f);
Fragment decode_fragment(std::span<const std::uint8_t> bytes);

// Collects fragments of one epoch, in any order, duplicates allowed.
// Fragments of a newer epoch reset the buffer; stale ones are dropped.
// Completing a list restarts collection, so repeated broadcasts of the
// same epoch assemble again.
class FragmentAssembler {
 public:
  // Returns the reassembled list once the last missing fragment arrives.
  std::optional<std::vector<std::uint8_t>> add(const Fragment& f);

  [[nodiscard]] std::size_t held() const { return held_; }

 private:
  std::uint16_t epoch_ = 0;
  std::uint16_t total_ = 0;
  std::size_t held_ = 0;
  bool active_ = false;
  std::vector<std::optional<std::vector<std::uint8_t>>> parts_;
};

// Runs one deterministic scenario: RSUs placed uniformly at random, the
// authority revokes revoked_per_hour vehicles' worth of certificates and
// issues one list; every crl_tx_interval_s each RSU broadcasts all of its
// fragments; vehicles follow seeded random waypoints and assemble what
// they hear. Rejects zero-duration or zero-area configs.
SimMetrics run(const SimConfig& config, ListFormat format);

// Same topology and mobility for both formats (identical seed).
PairedMetrics run_paired(const SimConfig& config);

// One CSV row per config per format, gains repeated on both rows of a
// pair. Byte-identical for identical (config, seed) lists.
std::string sweep_csv(std::span<const SimConfig> configs);
std::string sweep_csv_header();

// Reads a flat key=value scenario file ('#' starts a comment; keys match
// the SimConfig field names). Unknown keys are rejected.
SimConfig parse_sim_config(std::istream& in);

}  // namespace c2rl
