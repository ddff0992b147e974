#include <doctest.h>

#include <cstdint>
#include <random>
#include <sstream>

#include "c2rl/codec.hpp"
#include "c2rl/optimizer.hpp"
#include "c2rl/revocation.hpp"

using namespace c2rl;

namespace {

const std::array<std::uint8_t, 32> kKey = {0xaa, 0xbb, 0xcc};
constexpr std::uint32_t kFarFuture = 0xffffffffu;

RevocationAuthority small_authority(std::size_t vehicles, std::size_t pseudonyms = 20,
                                    std::size_t backups = 5) {
  RevocationAuthority authority(kKey);
  for (std::uint64_t vid = 1; vid <= vehicles; ++vid) {
    authority.register_vehicle(make_vehicle(vid, pseudonyms, backups, kFarFuture, 99));
  }
  return authority;
}

}  // namespace

TEST_CASE("registration enforces the pool invariants") {
  RevocationAuthority authority(kKey);
  VehicleRecord v = make_vehicle(1, 5, 2, kFarFuture, 1);
  authority.register_vehicle(v);
  CHECK(authority.is_registered(1));
  CHECK_THROWS_AS(authority.register_vehicle(v), std::invalid_argument);

  VehicleRecord overlap = make_vehicle(2, 5, 2, kFarFuture, 2);
  overlap.backups[0] = overlap.pseudonyms[0];
  CHECK_THROWS_AS(authority.register_vehicle(overlap), std::invalid_argument);

  VehicleRecord bad_current = make_vehicle(3, 5, 2, kFarFuture, 3);
  bad_current.current = 5;
  CHECK_THROWS_AS(authority.register_vehicle(bad_current), std::invalid_argument);
}

TEST_CASE("revocation expands to the whole certificate pool") {
  RevocationAuthority authority(kKey);
  authority.register_vehicle(make_vehicle(1, 1000, 5, kFarFuture, 7));
  authority.register_vehicle(make_vehicle(2, 1000, 5, kFarFuture, 7));

  CHECK(authority.revoked_entries(0).empty());
  authority.revoke_vehicle(1);
  CHECK(authority.revoked_entries(0).size() == 1005);

  // idempotent
  authority.revoke_vehicle(1);
  CHECK(authority.revoked_entries(0).size() == 1005);
  CHECK(authority.revoked_vids().size() == 1);

  CHECK_THROWS_AS(authority.revoke_vehicle(42), std::invalid_argument);
}

TEST_CASE("fifty evictions load the filter with 50000 certificates") {
  RevocationAuthority authority(kKey);
  for (std::uint64_t vid = 1; vid <= 50; ++vid) {
    authority.register_vehicle(make_vehicle(vid, 1000, 0, kFarFuture, 123));
    authority.revoke_vehicle(vid);
  }
  const C2rl& c2rl = authority.issue_c2rl(1e-3, 0);
  CHECK(c2rl.filter.insert_count() == 50000);
  CHECK(c2rl.header.entry_count == 50000);
}

TEST_CASE("issue_c2rl uses the optimizer and signs the result") {
  RevocationAuthority authority = small_authority(15);  // 15 * 25 = 375 certs
  for (std::uint64_t vid = 1; vid <= 12; ++vid) {
    authority.revoke_vehicle(vid);
  }
  // 12 * 25 = 300 revoked certificates, the reference scenario load
  const C2rl& c2rl = authority.issue_c2rl(1e-3, 1000);
  const FoSolution expect = solve_fo({.n = 300, .delta_hat = 1e-3});
  CHECK(c2rl.filter.bit_size() == expect.m_star);
  CHECK(c2rl.filter.hash_count() == expect.k_star);
  CHECK(c2rl.filter.insert_count() == 300);

  const auto wire = encode_c2rl(c2rl);
  CHECK(wire.size() == 230 + 6 + expect.payload_bytes());
  CHECK(verify(wire, TagSigner(kKey)));

  // completeness: every revoked certificate tests revoked
  for (std::uint64_t vid = 1; vid <= 12; ++vid) {
    const VehicleRecord& v = authority.registry().at(vid);
    for (const CrlEntry& e : v.pseudonyms) {
      CHECK(check_sender(c2rl, e.id) == SenderStatus::revoked);
    }
    for (const CrlEntry& e : v.backups) {
      CHECK(check_sender(c2rl, e.id) == SenderStatus::revoked);
    }
  }
}

TEST_CASE("non-revoked certificates stay trusted within the budget") {
  RevocationAuthority authority(kKey);
  for (std::uint64_t vid = 1; vid <= 12; ++vid) {
    authority.register_vehicle(make_vehicle(vid, 25, 0, kFarFuture, 31));
    authority.revoke_vehicle(vid);
  }
  const C2rl& c2rl = authority.issue_c2rl(1e-3, 0);  // n = 300

  std::mt19937_64 rng(0xfacadeULL);
  const int probes = 100000;
  int flagged = 0;
  for (int i = 0; i < probes; ++i) {
    CertificateId id{};
    for (auto& b : id) b = static_cast<std::uint8_t>(rng());
    if (check_sender(c2rl, id) == SenderStatus::revoked) ++flagged;
  }
  // expected rate delta(4314, 10, 300) ~ 1e-3; same 1.2e-3 allowance the
  // million-probe acceptance run uses
  CHECK(static_cast<double>(flagged) / probes <= 1.2e-3);
}

TEST_CASE("epochs increase strictly with each issue") {
  RevocationAuthority authority = small_authority(3);
  CHECK(authority.epoch() == 0);
  authority.issue_c2rl(1e-2, 0);
  CHECK(authority.epoch() == 1);
  CHECK(authority.latest_c2rl()->header.serial == 1);
  authority.revoke_vehicle(1);
  authority.issue_c2rl(1e-2, 300);
  CHECK(authority.epoch() == 2);
  CHECK(authority.latest_c2rl()->header.serial == 2);
}

TEST_CASE("an empty revocation set issues the minimal all-negative filter") {
  RevocationAuthority authority = small_authority(2);
  const C2rl& c2rl = authority.issue_c2rl(1e-3, 0);
  CHECK(c2rl.filter.bit_size() == 8);
  CHECK(c2rl.filter.hash_count() == 1);
  CHECK(c2rl.filter.popcount() == 0);
  CHECK(check_sender(c2rl, authority.registry().at(1).pseudonyms[0].id) ==
        SenderStatus::trusted);
}

TEST_CASE("expired certificates are left out of the filter") {
  RevocationAuthority authority(kKey);
  authority.register_vehicle(make_vehicle(1, 10, 0, 400, 5));        // expires at 400
  authority.register_vehicle(make_vehicle(2, 10, 0, kFarFuture, 5)); // never expires
  authority.revoke_vehicle(1);
  authority.revoke_vehicle(2);

  const C2rl& c2rl = authority.issue_c2rl(1e-3, 500);
  CHECK(c2rl.filter.insert_count() == 10);  // only vehicle 2's pool
  for (const CrlEntry& e : authority.registry().at(2).pseudonyms) {
    CHECK(check_sender(c2rl, e.id) == SenderStatus::revoked);
  }

  // at issue time 400 the expiring pool is still live (expiry is inclusive)
  RevocationAuthority fresh(kKey);
  fresh.register_vehicle(make_vehicle(1, 10, 0, 400, 5));
  fresh.revoke_vehicle(1);
  CHECK(fresh.issue_c2rl(1e-3, 400).filter.insert_count() == 10);
}

TEST_CASE("filter load can be overridden") {
  RevocationAuthority authority = small_authority(4);  // 4 * 25 = 100 certs
  for (std::uint64_t vid = 1; vid <= 4; ++vid) authority.revoke_vehicle(vid);

  const C2rl& exact = authority.issue_c2rl(1e-3, 0);
  const FoSolution for_100 = solve_fo({.n = 100, .delta_hat = 1e-3});
  CHECK(exact.filter.bit_size() == for_100.m_star);

  const C2rl& undersized = authority.issue_c2rl(1e-3, 0, 10);
  const FoSolution for_10 = solve_fo({.n = 10, .delta_hat = 1e-3});
  CHECK(undersized.filter.bit_size() == for_10.m_star);
  // entries still all inserted: no false negatives even when undersized
  CHECK(undersized.filter.insert_count() == 100);
  for (const CrlEntry& e : authority.revoked_entries(0)) {
    CHECK(check_sender(undersized, e.id) == SenderStatus::revoked);
  }
}

TEST_CASE("self check swaps a false-positive pseudonym for a clean backup") {
  VehicleRecord vehicle = make_vehicle(77, 3, 2, kFarFuture, 11);
  const CertificateId original = vehicle.current_pseudonym().id;

  // list whose filter does not contain the pseudonym: nothing changes
  BloomFilter clean(256, 3);
  clean.insert(make_vehicle(1, 1, 0, kFarFuture, 1).pseudonyms[0].id);
  C2rl benign{CrlHeader{.serial = 1, .kind = EntryKind::bloom, .entry_count = 1}, clean};
  self_check_and_swap(vehicle, benign);
  CHECK(vehicle.current_pseudonym().id == original);
  CHECK_FALSE(vehicle.needs_refill);

  // epoch 2 list that (falsely) contains the current pseudonym
  BloomFilter fp(256, 3);
  fp.insert(original);
  C2rl trap{CrlHeader{.serial = 2, .kind = EntryKind::bloom, .entry_count = 1}, fp};
  const CertificateId first_backup = vehicle.backups[0].id;
  self_check_and_swap(vehicle, trap);
  CHECK(vehicle.current_pseudonym().id == first_backup);
  CHECK(vehicle.backups.size() == 1);
  CHECK_FALSE(vehicle.needs_refill);

  // stale epoch: ignored even though the filter still matches
  VehicleRecord replay = vehicle;
  self_check_and_swap(replay, trap);
  CHECK(replay.current_pseudonym().id == vehicle.current_pseudonym().id);
}

TEST_CASE("self check flags exhaustion when every candidate tests positive") {
  VehicleRecord vehicle = make_vehicle(5, 1, 2, kFarFuture, 3);
  BloomFilter all(512, 2);
  all.insert(vehicle.current_pseudonym().id);
  all.insert(vehicle.backups[0].id);
  all.insert(vehicle.backups[1].id);
  C2rl trap{CrlHeader{.serial = 9, .kind = EntryKind::bloom, .entry_count = 3}, all};

  self_check_and_swap(vehicle, trap);
  CHECK(vehicle.needs_refill);
  CHECK(vehicle.backups.size() == 2);  // positives are skipped, not consumed
}

TEST_CASE("state files round-trip the authority") {
  RevocationAuthority authority = small_authority(6, 8, 3);
  authority.revoke_vehicle(2);
  authority.revoke_vehicle(5);
  authority.issue_c2rl(1e-2, 700);

  std::stringstream buffer;
  save_state(buffer, authority);
  RevocationAuthority loaded = load_state(buffer);

  CHECK(loaded.epoch() == authority.epoch());
  CHECK(loaded.revoked_vids() == authority.revoked_vids());
  CHECK(loaded.registry().size() == authority.registry().size());
  for (const auto& [vid, v] : authority.registry()) {
    const VehicleRecord& w = loaded.registry().at(vid);
    CHECK(w.pseudonyms == v.pseudonyms);
    CHECK(w.backups == v.backups);
    CHECK(w.current == v.current);
  }

  // both issue byte-identical next lists
  const auto a = encode_c2rl(authority.issue_c2rl(1e-2, 1000));
  const auto b = encode_c2rl(loaded.issue_c2rl(1e-2, 1000));
  CHECK(a == b);
}

TEST_CASE("state parser rejects garbage") {
  std::stringstream missing_banner("epoch,1\n");
  CHECK_THROWS_AS(load_state(missing_banner), std::invalid_argument);

  std::stringstream orphan_cert(
      "c2rlstate v1\nkey," + std::string(64, '0') +
      "\npseud,1,00112233445566778899,5\n");
  CHECK_THROWS_AS(load_state(orphan_cert), std::invalid_argument);

  std::stringstream no_key("c2rlstate v1\nepoch,3\n");
  CHECK_THROWS_AS(load_state(no_key), std::invalid_argument);
}
