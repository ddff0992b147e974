#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include "c2rl/codec.hpp"

namespace c2rl {

// A vehicle's certificate pools as the issuing authority (and the vehicle
// itself) sees them. `current` indexes the pseudonym in use inside
// `pseudonyms`; `backups` holds the spares swapped in when the current
// pseudonym trips a filter false positive.
struct VehicleRecord {
  std::uint64_t vid = 0;
  std::vector<CrlEntry> pseudonyms;
  std::vector<CrlEntry> backups;
  std::size_t current = 0;
  std::uint32_t last_epoch_checked = 0;
  bool needs_refill = false;

  [[nodiscard]] const CrlEntry& current_pseudonym() const { return pseudonyms.at(current); }
};

enum class SenderStatus { trusted, revoked };

// How the filter load n is chosen at issue time.
//   exact_count  -- n = number of live revoked certificates (guarantees
//                   the delta_hat budget; the default)
//   override     -- caller-provided n, e.g. an expected vehicle density;
//                   under-sizing the filter raises the realized rate
enum class FilterLoad { exact_count, override_n };

// Issuer-side state: the vehicle registry, the set of evicted vehicles,
// and the latest issued list. Single-writer; issued lists are immutable
// snapshots safe to hand out.
class RevocationAuthority {
 public:
  explicit RevocationAuthority(const std::array<std::uint8_t, 32>& signer_key);

  // Rejects duplicate vids and vehicles whose pools overlap.
  void register_vehicle(VehicleRecord vehicle);

  // Marks every certificate of the vehicle (pseudonyms and backups) as
  // revoked. Unknown vid throws std::invalid_argument; revoking an
  // already-revoked vehicle is a no-op. The epoch does not move until the
  // next issue.
  void revoke_vehicle(std::uint64_t vid);

  [[nodiscard]] bool is_revoked(std::uint64_t vid) const;
  [[nodiscard]] bool is_registered(std::uint64_t vid) const;

  // Revoked entries that have not expired by `at_time`.
  [[nodiscard]] std::vector<CrlEntry> revoked_entries(std::uint32_t at_time) const;

  // Builds, signs and stores a compressed list over the live revoked set:
  // solve_fo picks (m, k), every live revoked id is inserted, the epoch is
  // bumped. An empty revoked set issues an 8-bit, one-hash all-zero filter
  // so every query stays negative. `load` overrides the optimizer's n
  // (FilterLoad::override_n); entries are inserted regardless, so an
  // undersized filter still has no false negatives.
  const C2rl& issue_c2rl(double delta_hat, std::uint32_t issue_time,
                         std::optional<std::uint64_t> load = std::nullopt);

  // Standard-format counterpart, one 14-byte entry per live revoked cert.
  Crl issue_crl(std::uint32_t issue_time) const;

  [[nodiscard]] std::uint32_t epoch() const { return epoch_; }
  [[nodiscard]] const C2rl* latest_c2rl() const { return latest_ ? &*latest_ : nullptr; }
  [[nodiscard]] const std::map<std::uint64_t, VehicleRecord>& registry() const { return registry_; }
  [[nodiscard]] const std::set<std::uint64_t>& revoked_vids() const { return revoked_vids_; }
  [[nodiscard]] const std::array<std::uint8_t, 32>& signer_key() const { return key_; }

  void set_epoch(std::uint32_t epoch) { epoch_ = epoch; }

  // Interval between issues, used to stamp next_issue_time.
  std::uint32_t issue_interval_s = 300;

 private:
  std::array<std::uint8_t, 32> key_;
  TagSigner signer_;
  std::map<std::uint64_t, VehicleRecord> registry_;
  std::set<std::uint64_t> revoked_vids_;
  std::map<CertificateId, std::uint32_t> revoked_certs_;  // id -> expiry
  std::optional<C2rl> latest_;
  std::uint32_t epoch_ = 0;
};

// revoked iff the filter reports the id. False positives happen with
// probability <= delta_hat; misses never do.
SenderStatus check_sender(const C2rl& c2rl, const CertificateId& cert_id);

// Vehicle-side reaction to a list update. Only a strictly newer epoch is
// acted on. If the current pseudonym tests positive it is discarded and
// replaced with the first backup that tests negative; if every backup
// also tests positive the record is flagged needs_refill.
void self_check_and_swap(VehicleRecord& vehicle, const C2rl& c2rl);

// Deterministic synthetic vehicle: ids are derived from (seed, vid, slot).
VehicleRecord make_vehicle(std::uint64_t vid, std::size_t pseudonym_count,
                           std::size_t backup_count, std::uint32_t expiry,
                           std::uint64_t seed);

// Flat text persistence for the authority state (one record per line,
// ids hex-encoded). See docs/wire-format.md.
void save_state(std::ostream& out, const RevocationAuthority& authority);
RevocationAuthority load_state(std::istream& in);

}  // namespace c2rl
