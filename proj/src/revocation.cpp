#include "c2rl/revocation.hpp"

#include <algorithm>
#include <charconv>
#include <istream>
#include <ostream>
#include <random>
#include <set>
#include <sstream>

#include "c2rl/hex.hpp"
#include "c2rl/optimizer.hpp"

namespace c2rl {

RevocationAuthority::RevocationAuthority(const std::array<std::uint8_t, 32>& signer_key)
    : key_(signer_key), signer_(signer_key) {}

void RevocationAuthority::register_vehicle(VehicleRecord vehicle) {
  if (registry_.contains(vehicle.vid)) {
    throw std::invalid_argument("register_vehicle: vid already registered");
  }
  if (vehicle.pseudonyms.empty() || vehicle.current >= vehicle.pseudonyms.size()) {
    throw std::invalid_argument("register_vehicle: current must index a pseudonym");
  }
  std::set<CertificateId> seen;
  for (const CrlEntry& e : vehicle.pseudonyms) seen.insert(e.id);
  for (const CrlEntry& e : vehicle.backups) {
    if (!seen.insert(e.id).second) {
      throw std::invalid_argument("register_vehicle: pseudonym pools overlap");
    }
  }
  if (seen.size() != vehicle.pseudonyms.size() + vehicle.backups.size()) {
    throw std::invalid_argument("register_vehicle: duplicate certificate ids");
  }
  registry_.emplace(vehicle.vid, std::move(vehicle));
}

void RevocationAuthority::revoke_vehicle(std::uint64_t vid) {
  if (!registry_.contains(vid)) {
    throw std::invalid_argument("revoke_vehicle: unknown vid");
  }
  revoked_vids_.insert(vid);  // idempotent by construction
}

bool RevocationAuthority::is_revoked(std::uint64_t vid) const {
  return revoked_vids_.contains(vid);
}

bool RevocationAuthority::is_registered(std::uint64_t vid) const {
  return registry_.contains(vid);
}

std::vector<CrlEntry> RevocationAuthority::revoked_entries(std::uint32_t at_time) const {
  std::vector<CrlEntry> live;
  for (std::uint64_t vid : revoked_vids_) {
    const VehicleRecord& v = registry_.at(vid);
    for (const CrlEntry& e : v.pseudonyms) {
      if (e.expiry >= at_time) live.push_back(e);
    }
    for (const CrlEntry& e : v.backups) {
      if (e.expiry >= at_time) live.push_back(e);
    }
  }
  return live;
}

const C2rl& RevocationAuthority::issue_c2rl(double delta_hat, std::uint32_t issue_time,
                                            std::optional<std::uint64_t> load) {
  const std::vector<CrlEntry> live = revoked_entries(issue_time);

  BloomFilter filter = [&]() -> BloomFilter {
    if (live.empty() && !load.has_value()) {
      // Nothing revoked: a fixed minimal all-zero filter keeps the
      // protocol uniform and answers every query negative.
      return BloomFilter(8, 1);
    }
    const std::uint64_t n = std::max<std::uint64_t>(1, load.value_or(live.size()));
    const FoSolution sol = solve_fo(FoProblem{.n = n, .delta_hat = delta_hat});
    if (sol.m_star > 0xffffffffULL || sol.k_star > 0xffffU) {
      throw InfeasibleError("issue_c2rl: optimal filter does not fit the wire format");
    }
    return BloomFilter(static_cast<std::uint32_t>(sol.m_star),
                       static_cast<std::uint16_t>(sol.k_star));
  }();

  for (const CrlEntry& e : live) {
    filter.insert(e.id);
  }

  C2rl c2rl{
      .header =
          CrlHeader{
              .serial = epoch_ + 1,
              .issue_time = issue_time,
              .next_issue_time = issue_time + issue_interval_s,
              .kind = EntryKind::bloom,
              .entry_count = static_cast<std::uint32_t>(filter.insert_count()),
          },
      .filter = std::move(filter),
  };
  sign(c2rl, signer_);
  epoch_ += 1;
  latest_ = std::move(c2rl);
  return *latest_;
}

Crl RevocationAuthority::issue_crl(std::uint32_t issue_time) const {
  std::vector<CrlEntry> live = revoked_entries(issue_time);
  std::sort(live.begin(), live.end());
  Crl crl{
      .header =
          CrlHeader{
              .serial = epoch_ + 1,
              .issue_time = issue_time,
              .next_issue_time = issue_time + issue_interval_s,
              .kind = EntryKind::explicit_ids,
              .entry_count = static_cast<std::uint32_t>(live.size()),
          },
      .entries = std::move(live),
  };
  sign(crl, signer_);
  return crl;
}

SenderStatus check_sender(const C2rl& c2rl, const CertificateId& cert_id) {
  return c2rl.filter.contains(cert_id) ? SenderStatus::revoked : SenderStatus::trusted;
}

void self_check_and_swap(VehicleRecord& vehicle, const C2rl& c2rl) {
  const std::uint32_t epoch = c2rl.header.serial;
  if (epoch <= vehicle.last_epoch_checked) {
    return;
  }
  vehicle.last_epoch_checked = epoch;
  if (!c2rl.filter.contains(vehicle.current_pseudonym().id)) {
    return;
  }
  // Current pseudonym is a false positive: swap in the first clean backup.
  for (auto it = vehicle.backups.begin(); it != vehicle.backups.end(); ++it) {
    if (!c2rl.filter.contains(it->id)) {
      vehicle.pseudonyms[vehicle.current] = *it;
      vehicle.backups.erase(it);
      return;
    }
  }
  vehicle.needs_refill = true;
}

VehicleRecord make_vehicle(std::uint64_t vid, std::size_t pseudonym_count,
                           std::size_t backup_count, std::uint32_t expiry,
                           std::uint64_t seed) {
  if (pseudonym_count == 0) {
    throw std::invalid_argument("make_vehicle: need at least one pseudonym");
  }
  std::mt19937_64 rng(seed ^ (vid * 0x9e3779b97f4a7c15ULL + 0x2545f4914f6cdd1dULL));
  auto next_id = [&rng]() {
    CertificateId id{};
    std::uint64_t a = rng();
    std::uint64_t b = rng();
    for (int i = 0; i < 8; ++i) id[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(a >> (8 * i));
    id[8] = static_cast<std::uint8_t>(b);
    id[9] = static_cast<std::uint8_t>(b >> 8);
    return id;
  };
  VehicleRecord v;
  v.vid = vid;
  v.pseudonyms.reserve(pseudonym_count);
  v.backups.reserve(backup_count);
  for (std::size_t i = 0; i < pseudonym_count; ++i) {
    v.pseudonyms.push_back(CrlEntry{next_id(), expiry});
  }
  for (std::size_t i = 0; i < backup_count; ++i) {
    v.backups.push_back(CrlEntry{next_id(), expiry});
  }
  return v;
}

void save_state(std::ostream& out, const RevocationAuthority& authority) {
  out << "c2rlstate v1\n";
  out << "epoch," << authority.epoch() << "\n";
  out << "interval," << authority.issue_interval_s << "\n";
  out << "key," << to_hex(authority.signer_key()) << "\n";
  for (const auto& [vid, v] : authority.registry()) {
    out << "vehicle," << vid << "," << (authority.is_revoked(vid) ? 1 : 0) << ","
        << v.current << "," << v.last_epoch_checked << "," << (v.needs_refill ? 1 : 0)
        << "\n";
    for (const CrlEntry& e : v.pseudonyms) {
      out << "pseud," << vid << "," << to_hex(e.id) << "," << e.expiry << "\n";
    }
    for (const CrlEntry& e : v.backups) {
      out << "backup," << vid << "," << to_hex(e.id) << "," << e.expiry << "\n";
    }
  }
}

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    if (pos == std::string::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

std::uint64_t parse_u64(const std::string& s) {
  std::uint64_t value = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw std::invalid_argument("state file: bad integer '" + s + "'");
  }
  return value;
}

CrlEntry parse_entry(const std::string& hex, const std::string& expiry) {
  const std::vector<std::uint8_t> raw = from_hex(hex);
  if (raw.size() != std::tuple_size_v<CertificateId>) {
    throw std::invalid_argument("state file: certificate id must be 10 bytes");
  }
  CrlEntry e;
  std::copy(raw.begin(), raw.end(), e.id.begin());
  e.expiry = static_cast<std::uint32_t>(parse_u64(expiry));
  return e;
}

}  // namespace

RevocationAuthority load_state(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "c2rlstate v1") {
    throw std::invalid_argument("state file: missing 'c2rlstate v1' banner");
  }

  std::uint32_t epoch = 0;
  std::uint32_t interval = 300;
  std::array<std::uint8_t, 32> key{};
  bool have_key = false;

  // Vehicle records are accumulated first; registration order follows vid
  // order, matching save_state output.
  std::map<std::uint64_t, VehicleRecord> vehicles;
  std::set<std::uint64_t> revoked;

  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const std::vector<std::string> f = split(line, ',');
    if (f[0] == "epoch" && f.size() == 2) {
      epoch = static_cast<std::uint32_t>(parse_u64(f[1]));
    } else if (f[0] == "interval" && f.size() == 2) {
      interval = static_cast<std::uint32_t>(parse_u64(f[1]));
    } else if (f[0] == "key" && f.size() == 2) {
      const std::vector<std::uint8_t> raw = from_hex(f[1]);
      if (raw.size() != key.size()) {
        throw std::invalid_argument("state file: signer key must be 32 bytes");
      }
      std::copy(raw.begin(), raw.end(), key.begin());
      have_key = true;
    } else if (f[0] == "vehicle" && f.size() == 6) {
      VehicleRecord v;
      v.vid = parse_u64(f[1]);
      v.current = parse_u64(f[3]);
      v.last_epoch_checked = static_cast<std::uint32_t>(parse_u64(f[4]));
      v.needs_refill = parse_u64(f[5]) != 0;
      if (parse_u64(f[2]) != 0) revoked.insert(v.vid);
      if (!vehicles.emplace(v.vid, std::move(v)).second) {
        throw std::invalid_argument("state file: duplicate vehicle line");
      }
    } else if ((f[0] == "pseud" || f[0] == "backup") && f.size() == 4) {
      const auto it = vehicles.find(parse_u64(f[1]));
      if (it == vehicles.end()) {
        throw std::invalid_argument("state file: certificate before its vehicle line");
      }
      CrlEntry e = parse_entry(f[2], f[3]);
      (f[0] == "pseud" ? it->second.pseudonyms : it->second.backups).push_back(e);
    } else {
      throw std::invalid_argument("state file: unrecognized line '" + line + "'");
    }
  }
  if (!have_key) {
    throw std::invalid_argument("state file: missing key line");
  }

  RevocationAuthority authority(key);
  authority.issue_interval_s = interval;
  authority.set_epoch(epoch);
  for (auto& [vid, v] : vehicles) {
    authority.register_vehicle(std::move(v));
  }
  for (std::uint64_t vid : revoked) {
    authority.revoke_vehicle(vid);
  }
  return authority;
}

}  // namespace c2rl
