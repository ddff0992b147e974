#include "c2rl/sim.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <random>
#include <stdexcept>

#include "c2rl/codec.hpp"
#include "c2rl/optimizer.hpp"
#include "c2rl/revocation.hpp"

namespace c2rl {

double PairedMetrics::gain_received() const {
  return static_cast<double>(compressed.total_crls_received) /
         static_cast<double>(standard.total_crls_received);
}

double PairedMetrics::gain_coverage() const {
  return compressed.coverage / standard.coverage;
}

double PairedMetrics::gain_download_time() const {
  return standard.mean_download_time_s / compressed.mean_download_time_s;
}

namespace {

std::uint16_t fragment_checksum(std::uint16_t epoch, std::uint16_t index,
                                std::uint16_t total, std::span<const std::uint8_t> body) {
  const std::uint8_t head[6] = {
      static_cast<std::uint8_t>(epoch >> 8), static_cast<std::uint8_t>(epoch),
      static_cast<std::uint8_t>(index >> 8), static_cast<std::uint8_t>(index),
      static_cast<std::uint8_t>(total >> 8), static_cast<std::uint8_t>(total),
  };
  const std::uint64_t h = fnv1a64(body, fnv1a64(head));
  return static_cast<std::uint16_t>(h ^ (h >> 16) ^ (h >> 32) ^ (h >> 48));
}

}  // namespace

std::vector<Fragment> fragment(std::span<const std::uint8_t> list_bytes,
                               std::uint16_t epoch, std::size_t capacity_bytes) {
  if (capacity_bytes <= kFragmentHeaderBytes) {
    throw std::invalid_argument("fragment: capacity must exceed the 8-byte header");
  }
  const std::size_t chunk = capacity_bytes - kFragmentHeaderBytes;
  const std::size_t count =
      list_bytes.empty() ? 1 : (list_bytes.size() + chunk - 1) / chunk;
  if (count > 0xffff) {
    throw std::invalid_argument("fragment: list needs more than 65535 fragments");
  }
  std::vector<Fragment> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t off = i * chunk;
    const std::size_t len = std::min(chunk, list_bytes.size() - off);
    Fragment f;
    f.epoch = epoch;
    f.index = static_cast<std::uint16_t>(i);
    f.total = static_cast<std::uint16_t>(count);
    f.body.assign(list_bytes.begin() + static_cast<std::ptrdiff_t>(off),
                  list_bytes.begin() + static_cast<std::ptrdiff_t>(off + len));
    f.checksum = fragment_checksum(f.epoch, f.index, f.total, f.body);
    out.push_back(std::move(f));
  }
  return out;
}

std::vector<std::uint8_t> encode_fragment(const Fragment& f) {
  std::vector<std::uint8_t> out;
  out.reserve(kFragmentHeaderBytes + f.body.size());
  for (std::uint16_t v : {f.epoch, f.index, f.total, f.checksum}) {
    out.push_back(static_cast<std::uint8_t>(v >> 8));
    out.push_back(static_cast<std::uint8_t>(v));
  }
  out.insert(out.end(), f.body.begin(), f.body.end());
  return out;
}

Fragment decode_fragment(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kFragmentHeaderBytes) {
    throw DecodeError("fragment: truncated header");
  }
  auto u16 = [&bytes](std::size_t off) {
    return static_cast<std::uint16_t>((static_cast<std::uint16_t>(bytes[off]) << 8) |
                                      bytes[off + 1]);
  };
  Fragment f;
  f.epoch = u16(0);
  f.index = u16(2);
  f.total = u16(4);
  f.checksum = u16(6);
  f.body.assign(bytes.begin() + kFragmentHeaderBytes, bytes.end());
  if (f.checksum != fragment_checksum(f.epoch, f.index, f.total, f.body)) {
    throw DecodeError("fragment: checksum mismatch");
  }
  return f;
}

std::optional<std::vector<std::uint8_t>> FragmentAssembler::add(const Fragment& f) {
  if (f.total == 0 || f.index >= f.total) {
    return std::nullopt;
  }
  if (active_ && f.epoch == epoch_) {
    if (f.total != total_) {
      return std::nullopt;  // inconsistent sender; ignore
    }
  } else if (!active_ || static_cast<std::int16_t>(f.epoch - epoch_) > 0) {
    // First fragment, or a newer epoch: start over.
    active_ = true;
    epoch_ = f.epoch;
    total_ = f.total;
    held_ = 0;
    parts_.assign(total_, std::nullopt);
  } else {
    return std::nullopt;  // stale epoch
  }

  if (!parts_[f.index].has_value()) {
    parts_[f.index] = f.body;
    ++held_;
  }
  if (held_ < total_) {
    return std::nullopt;
  }
  std::vector<std::uint8_t> assembled;
  for (const auto& part : parts_) {
    assembled.insert(assembled.end(), part->begin(), part->end());
  }
  // Completed: restart collection so repeated broadcasts of this epoch
  // count as fresh copies.
  held_ = 0;
  parts_.assign(total_, std::nullopt);
  return assembled;
}

namespace {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

double dist2(Vec2 a, Vec2 b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return dx * dx + dy * dy;
}

// One straight random-waypoint leg.
struct Leg {
  double t_start = 0.0;
  double t_end = 0.0;
  Vec2 from;
  Vec2 to;
};

// Piecewise-linear trajectory precomputed for the whole run.
class Trajectory {
 public:
  Trajectory(const SimConfig& cfg, std::uint64_t vehicle_seed) {
    std::mt19937_64 rng(vehicle_seed);
    std::uniform_real_distribution<double> ux(0.0, cfg.area_width_m);
    std::uniform_real_distribution<double> uy(0.0, cfg.area_height_m);
    std::uniform_real_distribution<double> uspeed(cfg.speed_min_mps, cfg.speed_max_mps);

    Vec2 pos{ux(rng), uy(rng)};
    double t = 0.0;
    while (t < cfg.duration_s) {
      const Vec2 target{ux(rng), uy(rng)};
      const double speed = uspeed(rng);
      const double len = std::sqrt(dist2(pos, target));
      if (speed <= 0.0 || len == 0.0) {
        // Degenerate leg (static vehicle): park until the end of the run.
        legs_.push_back(Leg{t, cfg.duration_s, pos, pos});
        break;
      }
      const double t_end = t + len / speed;
      legs_.push_back(Leg{t, t_end, pos, target});
      pos = target;
      t = t_end;
    }
  }

  [[nodiscard]] Vec2 at(double t) const {
    // Bursts are processed in time order, so a cursor beats binary search.
    while (cursor_ + 1 < legs_.size() && legs_[cursor_].t_end < t) ++cursor_;
    while (cursor_ > 0 && legs_[cursor_].t_start > t) --cursor_;
    const Leg& leg = legs_[cursor_];
    if (leg.t_end <= leg.t_start) {
      return leg.from;
    }
    const double frac = std::clamp((t - leg.t_start) / (leg.t_end - leg.t_start), 0.0, 1.0);
    return Vec2{leg.from.x + frac * (leg.to.x - leg.from.x),
                leg.from.y + frac * (leg.to.y - leg.from.y)};
  }

 private:
  std::vector<Leg> legs_;
  mutable std::size_t cursor_ = 0;
};

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

void validate(const SimConfig& cfg) {
  if (cfg.duration_s <= 0.0) {
    throw std::invalid_argument("sim: duration must be positive");
  }
  if (cfg.area_width_m <= 0.0 || cfg.area_height_m <= 0.0) {
    throw std::invalid_argument("sim: area must be positive");
  }
  if (cfg.per_packet_loss < 0.0 || cfg.per_packet_loss > 1.0) {
    throw std::invalid_argument("sim: per_packet_loss must be in [0,1]");
  }
  if (cfg.packet_payload_bits / 8 <= kFragmentHeaderBytes) {
    throw std::invalid_argument("sim: packet payload too small for the fragment header");
  }
  if (cfg.packet_tx_s <= 0.0 || cfg.range_recheck_s <= 0.0) {
    throw std::invalid_argument("sim: packet_tx_s and range_recheck_s must be positive");
  }
  if (cfg.speed_min_mps < 0.0 || cfg.speed_max_mps < cfg.speed_min_mps) {
    throw std::invalid_argument("sim: bad speed range");
  }
}

// Builds the broadcast list for the scenario: revoked_per_hour vehicles,
// each holding pseudonyms_per_vehicle certificates, revoked and issued as
// one list of the requested format.
std::vector<std::uint8_t> build_list(const SimConfig& cfg, ListFormat format) {
  std::array<std::uint8_t, 32> key{};
  for (std::size_t i = 0; i < key.size(); ++i) {
    key[i] = static_cast<std::uint8_t>(mix_seed(cfg.seed, 77) >> ((i % 8) * 8));
  }
  RevocationAuthority authority(key);
  authority.issue_interval_s = static_cast<std::uint32_t>(cfg.crl_tx_interval_s);
  for (std::uint32_t vid = 1; vid <= cfg.revoked_per_hour; ++vid) {
    // Backups are folded into the per-vehicle pseudonym budget here; the
    // list size depends only on the total certificate count.
    authority.register_vehicle(
        make_vehicle(vid, std::max<std::size_t>(1, cfg.pseudonyms_per_vehicle), 0,
                     0xffffffffu, mix_seed(cfg.seed, 1000 + vid)));
    authority.revoke_vehicle(vid);
  }
  if (format == ListFormat::standard) {
    return encode_crl(authority.issue_crl(0));
  }
  return encode_c2rl(authority.issue_c2rl(cfg.delta_hat, 0, cfg.filter_load));
}

}  // namespace

SimMetrics run(const SimConfig& cfg, ListFormat format) {
  validate(cfg);

  const std::vector<std::uint8_t> list = build_list(cfg, format);
  const std::size_t capacity = cfg.packet_payload_bits / 8;
  const std::uint32_t total_fragments =
      static_cast<std::uint32_t>(fragment(list, 1, capacity).size());

  SimMetrics metrics;
  metrics.format = format;
  metrics.list_bytes = list.size();
  metrics.fragments_per_list = total_fragments;

  // Topology and mobility come from format-independent substreams so a
  // paired run sees the same world.
  std::mt19937_64 topo_rng(mix_seed(cfg.seed, 1));
  std::uniform_real_distribution<double> ux(0.0, cfg.area_width_m);
  std::uniform_real_distribution<double> uy(0.0, cfg.area_height_m);
  std::vector<Vec2> rsus;
  rsus.reserve(cfg.rsu_count);
  for (std::uint32_t i = 0; i < cfg.rsu_count; ++i) {
    rsus.push_back(Vec2{ux(topo_rng), uy(topo_rng)});
  }

  std::vector<Trajectory> trajectories;
  trajectories.reserve(cfg.vehicle_count);
  for (std::uint32_t v = 0; v < cfg.vehicle_count; ++v) {
    trajectories.emplace_back(cfg, mix_seed(cfg.seed, 2000000 + v));
  }

  std::mt19937_64 loss_rng(
      mix_seed(cfg.seed, format == ListFormat::standard ? 3 : 4));
  std::uniform_real_distribution<double> uloss(0.0, 1.0);

  // Per-vehicle reassembly state, index bitmap form.
  struct VehicleState {
    std::vector<bool> have;
    std::uint32_t held = 0;
    double first_heard = -1.0;
    double first_completed = -1.0;
    std::uint64_t completions = 0;
  };
  std::vector<VehicleState> vehicles(cfg.vehicle_count);
  for (auto& v : vehicles) {
    v.have.assign(total_fragments, false);
  }

  const double range2 = cfg.radio_range_m * cfg.radio_range_m;
  const double burst_len = total_fragments * cfg.packet_tx_s;

  for (double burst_start = 0.0; burst_start < cfg.duration_s;
       burst_start += cfg.crl_tx_interval_s) {
    const std::uint32_t steps = static_cast<std::uint32_t>(
        std::ceil(burst_len / cfg.range_recheck_s));
    for (std::uint32_t step = 0; step < steps; ++step) {
      const double t_step = burst_start + step * cfg.range_recheck_s;
      // Fragment indices transmitted during this step.
      const std::uint32_t p_begin = static_cast<std::uint32_t>(
          std::min<double>(total_fragments, std::ceil(step * cfg.range_recheck_s / cfg.packet_tx_s)));
      const std::uint32_t p_end = static_cast<std::uint32_t>(std::min<double>(
          total_fragments, std::ceil((step + 1) * cfg.range_recheck_s / cfg.packet_tx_s)));
      if (p_begin >= p_end) continue;

      std::vector<Vec2> positions;
      positions.reserve(cfg.vehicle_count);
      for (std::uint32_t v = 0; v < cfg.vehicle_count; ++v) {
        positions.push_back(trajectories[v].at(t_step));
      }

      for (const Vec2& rsu : rsus) {
        for (std::uint32_t v = 0; v < cfg.vehicle_count; ++v) {
          if (dist2(positions[v], rsu) > range2) continue;
          VehicleState& vs = vehicles[v];
          for (std::uint32_t p = p_begin; p < p_end; ++p) {
            if (cfg.per_packet_loss > 0.0 && uloss(loss_rng) < cfg.per_packet_loss) {
              continue;
            }
            const double t_arrive = burst_start + (p + 1) * cfg.packet_tx_s;
            if (vs.first_heard < 0.0) {
              vs.first_heard = t_arrive;
            }
            if (!vs.have[p]) {
              vs.have[p] = true;
              if (++vs.held == total_fragments) {
                // Full list: count the copy, restart collection.
                vs.completions += 1;
                if (vs.first_completed < 0.0) {
                  vs.first_completed = t_arrive;
                }
                vs.have.assign(total_fragments, false);
                vs.held = 0;
              }
            }
          }
        }
      }
    }
  }

  double download_sum = 0.0;
  for (const VehicleState& vs : vehicles) {
    metrics.total_crls_received += vs.completions;
    if (vs.completions > 0) {
      metrics.vehicles_completed += 1;
      download_sum += vs.first_completed - vs.first_heard;
    }
  }
  metrics.coverage = cfg.vehicle_count == 0
                         ? 0.0
                         : static_cast<double>(metrics.vehicles_completed) /
                               static_cast<double>(cfg.vehicle_count);
  metrics.mean_download_time_s =
      metrics.vehicles_completed == 0 ? 0.0
                                      : download_sum / metrics.vehicles_completed;
  return metrics;
}

PairedMetrics run_paired(const SimConfig& cfg) {
  return PairedMetrics{
      .standard = run(cfg, ListFormat::standard),
      .compressed = run(cfg, ListFormat::compressed),
  };
}

std::string sweep_csv_header() {
  return "seed,rsu_count,vehicle_count,revoked_per_hour,pseudonyms_per_vehicle,"
         "delta_hat,duration_s,format,list_bytes,fragments,total_received,"
         "coverage,mean_download_s,gain_received,gain_coverage,gain_download\n";
}

SimConfig parse_sim_config(std::istream& in) {
  SimConfig cfg;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    while (!line.empty() && (line.back() == ' ' || line.back() == '\t' || line.back() == '\r')) {
      line.pop_back();
    }
    std::size_t start = line.find_first_not_of(" \t");
    if (start == std::string::npos) continue;
    const std::size_t eq = line.find('=', start);
    if (eq == std::string::npos) {
      throw std::invalid_argument("config line " + std::to_string(lineno) + ": expected key=value");
    }
    std::string key = line.substr(start, eq - start);
    while (!key.empty() && (key.back() == ' ' || key.back() == '\t')) key.pop_back();
    std::string value = line.substr(eq + 1);
    while (!value.empty() && (value.front() == ' ' || value.front() == '\t')) {
      value.erase(value.begin());
    }

    auto as_f64 = [&]() {
      try {
        std::size_t used = 0;
        const double v = std::stod(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return v;
      } catch (const std::exception&) {
        throw std::invalid_argument("config line " + std::to_string(lineno) + ": bad number '" + value + "'");
      }
    };
    auto as_u64 = [&]() {
      std::uint64_t v = 0;
      const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
      if (ec != std::errc{} || ptr != value.data() + value.size()) {
        throw std::invalid_argument("config line " + std::to_string(lineno) + ": bad integer '" + value + "'");
      }
      return v;
    };

    if (key == "area_width_m") cfg.area_width_m = as_f64();
    else if (key == "area_height_m") cfg.area_height_m = as_f64();
    else if (key == "rsu_count") cfg.rsu_count = static_cast<std::uint32_t>(as_u64());
    else if (key == "vehicle_count") cfg.vehicle_count = static_cast<std::uint32_t>(as_u64());
    else if (key == "radio_range_m") cfg.radio_range_m = as_f64();
    else if (key == "packet_payload_bits") cfg.packet_payload_bits = static_cast<std::uint32_t>(as_u64());
    else if (key == "crl_tx_interval_s") cfg.crl_tx_interval_s = as_f64();
    else if (key == "duration_s") cfg.duration_s = as_f64();
    else if (key == "per_packet_loss") cfg.per_packet_loss = as_f64();
    else if (key == "seed") cfg.seed = as_u64();
    else if (key == "revoked_per_hour") cfg.revoked_per_hour = static_cast<std::uint32_t>(as_u64());
    else if (key == "pseudonyms_per_vehicle") cfg.pseudonyms_per_vehicle = static_cast<std::uint32_t>(as_u64());
    else if (key == "delta_hat") cfg.delta_hat = as_f64();
    else if (key == "speed_min_mps") cfg.speed_min_mps = as_f64();
    else if (key == "speed_max_mps") cfg.speed_max_mps = as_f64();
    else if (key == "packet_tx_s") cfg.packet_tx_s = as_f64();
    else if (key == "range_recheck_s") cfg.range_recheck_s = as_f64();
    else if (key == "filter_load") cfg.filter_load = as_u64();
    else {
      throw std::invalid_argument("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
  }
  return cfg;
}

std::string sweep_csv(std::span<const SimConfig> configs) {
  std::string csv = sweep_csv_header();
  char buf[512];
  for (const SimConfig& cfg : configs) {
    const PairedMetrics pair = run_paired(cfg);
    for (const SimMetrics* m : {&pair.standard, &pair.compressed}) {
      std::snprintf(buf, sizeof(buf),
                    "%llu,%u,%u,%u,%u,%g,%g,%s,%llu,%u,%llu,%.6g,%.6g,%.6g,%.6g,%.6g\n",
                    static_cast<unsigned long long>(cfg.seed), cfg.rsu_count,
                    cfg.vehicle_count, cfg.revoked_per_hour,
                    cfg.pseudonyms_per_vehicle, cfg.delta_hat, cfg.duration_s,
                    m->format == ListFormat::standard ? "standard" : "c2rl",
                    static_cast<unsigned long long>(m->list_bytes),
                    m->fragments_per_list,
                    static_cast<unsigned long long>(m->total_crls_received),
                    m->coverage, m->mean_download_time_s, pair.gain_received(),
                    pair.gain_coverage(), pair.gain_download_time());
      csv += buf;
    }
  }
  return csv;
}

}  // namespace c2rl
