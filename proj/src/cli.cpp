#include "c2rl/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "c2rl/codec.hpp"
#include "c2rl/hex.hpp"
#include "c2rl/optimizer.hpp"
#include "c2rl/revocation.hpp"
#include "c2rl/sim.hpp"

namespace c2rl::cli {

namespace {

constexpr std::array<std::uint8_t, 32> kDefaultKey = {
    0x6b, 0x65, 0x79, 0x2d, 0x63, 0x32, 0x72, 0x6c, 0x2d, 0x64, 0x65,
    0x66, 0x61, 0x75, 0x6c, 0x74, 0x2d, 0x74, 0x65, 0x73, 0x74, 0x2d,
    0x73, 0x69, 0x67, 0x6e, 0x65, 0x72, 0x2d, 0x30, 0x30, 0x31};

double default_delta() {
  if (const char* env = std::getenv("C2RL_DELTA")) {
    try {
      std::size_t used = 0;
      const double v = std::stod(env, &used);
      if (used == std::strlen(env) && v > 0.0 && v < 1.0) {
        return v;
      }
    } catch (const std::exception&) {
      // fall through to the built-in default
    }
  }
  return 1e-3;
}

std::string fmt(const char* format, ...) __attribute__((format(printf, 1, 2)));

std::string fmt(const char* format, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, format);
  std::vsnprintf(buf, sizeof(buf), format, ap);
  va_end(ap);
  return buf;
}

std::array<std::uint8_t, 32> parse_key(const std::string& hex) {
  const std::vector<std::uint8_t> raw = from_hex(hex);
  if (raw.size() != 32) {
    throw std::invalid_argument("signer key must be 32 bytes (64 hex characters)");
  }
  std::array<std::uint8_t, 32> key{};
  std::copy(raw.begin(), raw.end(), key.begin());
  return key;
}

CertificateId parse_cert(const std::string& hex) {
  const std::vector<std::uint8_t> raw = from_hex(hex);
  if (raw.size() != std::tuple_size_v<CertificateId>) {
    throw std::invalid_argument("certificate id must be 10 bytes (20 hex characters)");
  }
  CertificateId id{};
  std::copy(raw.begin(), raw.end(), id.begin());
  return id;
}

std::vector<std::uint8_t> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::invalid_argument("cannot open '" + path + "'");
  }
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return bytes;
}

void write_file(const std::string& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw std::invalid_argument("cannot create '" + path + "'");
  }
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) {
    throw std::invalid_argument("write to '" + path + "' failed");
  }
}

// Revoked-id input for `build`: one id per line as 20 hex characters,
// optionally followed by ,expiry-seconds. Blank lines and '#' comments ok.
std::vector<CrlEntry> read_revoked_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::invalid_argument("cannot open '" + path + "'");
  }
  std::vector<CrlEntry> entries;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    while (!line.empty() && (line.back() == ' ' || line.back() == '\r' || line.back() == '\t')) {
      line.pop_back();
    }
    const std::size_t start = line.find_first_not_of(" \t");
    if (start == std::string::npos) continue;
    line = line.substr(start);

    CrlEntry e;
    e.expiry = 0xffffffffu;
    const std::size_t comma = line.find(',');
    std::string id_hex = comma == std::string::npos ? line : line.substr(0, comma);
    if (comma != std::string::npos) {
      try {
        e.expiry = static_cast<std::uint32_t>(std::stoul(line.substr(comma + 1)));
      } catch (const std::exception&) {
        throw std::invalid_argument(path + ":" + std::to_string(lineno) +
                                    ": bad expiry value");
      }
    }
    try {
      e.id = parse_cert(id_hex);
    } catch (const std::invalid_argument&) {
      throw std::invalid_argument(path + ":" + std::to_string(lineno) +
                                  ": expected 20 hex characters");
    }
    entries.push_back(e);
  }
  return entries;
}

struct OptimizeOpts {
  std::uint64_t n = 0;
  double delta = 1e-3;
  bool csv = false;
};

int cmd_optimize(const OptimizeOpts& o, std::ostream& out) {
  const FoSolution sol = solve_fo(FoProblem{.n = o.n, .delta_hat = o.delta});
  if (o.csv) {
    out << "n,delta,m_star,k_star,k_tilde,m_tilde,delta_achieved,payload_bytes\n";
    out << fmt("%llu,%.10g,%llu,%u,%.10g,%.10g,%.10g,%llu\n",
               static_cast<unsigned long long>(o.n), o.delta,
               static_cast<unsigned long long>(sol.m_star), sol.k_star,
               sol.k_tilde_star, sol.m_tilde_star, sol.delta_at_solution,
               static_cast<unsigned long long>(sol.payload_bytes()));
  } else {
    out << fmt("n                %llu\n", static_cast<unsigned long long>(o.n));
    out << fmt("delta_hat        %.10g\n", o.delta);
    out << fmt("k_tilde*         %.10g\n", sol.k_tilde_star);
    out << fmt("m_tilde*         %.10g\n", sol.m_tilde_star);
    out << fmt("k*               %u\n", sol.k_star);
    out << fmt("m*               %llu bits\n", static_cast<unsigned long long>(sol.m_star));
    out << fmt("achieved delta   %.10g\n", sol.delta_at_solution);
    out << fmt("filter payload   %llu bytes\n",
               static_cast<unsigned long long>(sol.payload_bytes()));
  }
  return kOk;
}

struct GainOpts {
  std::uint64_t n = 0;
  double delta = 1e-3;
  bool sweep = false;
  std::string delta_sweep;
  std::uint32_t steps = 13;
  bool csv = false;
};

int cmd_gain(const GainOpts& o, std::ostream& out) {
  double lo = o.delta;
  double hi = o.delta;
  bool sweeping = o.sweep || !o.delta_sweep.empty();
  if (!o.delta_sweep.empty()) {
    const std::size_t colon = o.delta_sweep.find(':');
    if (colon == std::string::npos) {
      throw std::invalid_argument("--delta-sweep expects LO:HI");
    }
    lo = std::stod(o.delta_sweep.substr(0, colon));
    hi = std::stod(o.delta_sweep.substr(colon + 1));
  } else if (o.sweep) {
    lo = 1e-3;
    hi = 1e-1;
  }
  if (!(lo > 0.0) || !(hi < 1.0) || lo > hi) {
    throw std::invalid_argument("delta sweep bounds must satisfy 0 < LO <= HI < 1");
  }
  const std::uint32_t points = sweeping ? std::max<std::uint32_t>(2, o.steps) : 1;

  if (o.csv) {
    out << "n,delta,m,k,crl_bytes,c2rl_bytes,gain\n";
  }
  for (std::uint32_t i = 0; i < points; ++i) {
    const double delta =
        points == 1
            ? lo
            : std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) * i / (points - 1));
    const FoSolution sol = solve_fo(FoProblem{.n = o.n, .delta_hat = delta});
    const std::uint64_t crl_bytes = crl_size(o.n);
    const std::uint64_t c2rl_bytes = c2rl_size(sol.m_star);
    const double gain = compression_gain(o.n, sol.m_star);
    if (o.csv) {
      out << fmt("%llu,%.10g,%llu,%u,%llu,%llu,%.10g\n",
                 static_cast<unsigned long long>(o.n), delta,
                 static_cast<unsigned long long>(sol.m_star), sol.k_star,
                 static_cast<unsigned long long>(crl_bytes),
                 static_cast<unsigned long long>(c2rl_bytes), gain);
    } else {
      out << fmt(
          "n=%llu delta=%.4g m*=%llu k*=%u crl=%llu B c2rl=%llu B (wire %llu B) "
          "gain=%.4g\n",
          static_cast<unsigned long long>(o.n), delta,
          static_cast<unsigned long long>(sol.m_star), sol.k_star,
          static_cast<unsigned long long>(crl_bytes),
          static_cast<unsigned long long>(c2rl_bytes),
          static_cast<unsigned long long>(c2rl_wire_size(sol.m_star)), gain);
    }
  }
  return kOk;
}

struct BuildOpts {
  std::string revoked_path;
  std::string out_path;
  bool bloom = false;
  double delta = 1e-3;
  std::uint32_t serial = 1;
  std::uint32_t issue_time = 0;
  std::string key_hex;
};

int cmd_build(const BuildOpts& o, std::ostream& out) {
  const std::vector<CrlEntry> entries = read_revoked_file(o.revoked_path);
  const TagSigner signer(o.key_hex.empty() ? kDefaultKey : parse_key(o.key_hex));

  CrlHeader header{
      .serial = o.serial,
      .issue_time = o.issue_time,
      .next_issue_time = o.issue_time + 300,
  };

  std::vector<std::uint8_t> encoded;
  if (o.bloom) {
    const FoSolution sol = solve_fo(
        FoProblem{.n = std::max<std::uint64_t>(1, entries.size()), .delta_hat = o.delta});
    BloomFilter filter(static_cast<std::uint32_t>(sol.m_star),
                       static_cast<std::uint16_t>(sol.k_star));
    for (const CrlEntry& e : entries) {
      filter.insert(e.id);
    }
    header.kind = EntryKind::bloom;
    header.entry_count = static_cast<std::uint32_t>(filter.insert_count());
    C2rl c2rl{header, std::move(filter)};
    sign(c2rl, signer);
    encoded = encode_c2rl(c2rl);
  } else {
    header.kind = EntryKind::explicit_ids;
    header.entry_count = static_cast<std::uint32_t>(entries.size());
    Crl crl{header, entries};
    sign(crl, signer);
    encoded = encode_crl(crl);
  }
  write_file(o.out_path, encoded);
  out << fmt("wrote %s (%zu bytes, %zu entries)\n", o.out_path.c_str(), encoded.size(),
             entries.size());
  return kOk;
}

struct InspectOpts {
  std::string path;
  std::string key_hex;
  bool csv = false;
};

int cmd_inspect(const InspectOpts& o, std::ostream& out) {
  const std::vector<std::uint8_t> bytes = read_file(o.path);
  if (bytes.size() < kHeaderBytes) {
    throw DecodeError("file shorter than the 230-byte header");
  }
  const std::uint8_t kind = bytes[161 + 12];

  std::string sig_status = "unchecked";
  if (!o.key_hex.empty()) {
    const TagSigner signer(parse_key(o.key_hex));
    sig_status = verify(bytes, signer) ? "valid" : "INVALID";
  }

  if (kind == static_cast<std::uint8_t>(EntryKind::bloom)) {
    const C2rl c2rl = decode_c2rl(bytes);
    const BloomFilter& f = c2rl.filter;
    if (o.csv) {
      out << "format,serial,issue_time,entries,m,k,bytes,signature\n";
      out << fmt("c2rl,%u,%u,%u,%u,%u,%zu,%s\n", c2rl.header.serial,
                 c2rl.header.issue_time, c2rl.header.entry_count, f.bit_size(),
                 f.hash_count(), bytes.size(), sig_status.c_str());
    } else {
      out << fmt("format        c2rl (bloom entries)\n");
      out << fmt("serial        %u\n", c2rl.header.serial);
      out << fmt("issue time    %u\n", c2rl.header.issue_time);
      out << fmt("next issue    %u\n", c2rl.header.next_issue_time);
      out << fmt("inserted ids  %u\n", c2rl.header.entry_count);
      out << fmt("filter        m=%u bits, k=%u, %zu payload bytes, popcount %zu\n",
                 f.bit_size(), f.hash_count(), f.payload().size(), f.popcount());
      out << fmt("total size    %zu bytes (model size %llu)\n", bytes.size(),
                 static_cast<unsigned long long>(c2rl_size(f.bit_size())));
      out << fmt("signature     %s\n", sig_status.c_str());
    }
  } else {
    const Crl crl = decode_crl(bytes);
    if (o.csv) {
      out << "format,serial,issue_time,entries,m,k,bytes,signature\n";
      out << fmt("crl,%u,%u,%u,,,%zu,%s\n", crl.header.serial, crl.header.issue_time,
                 crl.header.entry_count, bytes.size(), sig_status.c_str());
    } else {
      out << fmt("format        standard crl (explicit ids)\n");
      out << fmt("serial        %u\n", crl.header.serial);
      out << fmt("issue time    %u\n", crl.header.issue_time);
      out << fmt("next issue    %u\n", crl.header.next_issue_time);
      out << fmt("entries       %u (14 bytes each)\n", crl.header.entry_count);
      out << fmt("total size    %zu bytes\n", bytes.size());
      out << fmt("signature     %s\n", sig_status.c_str());
      const std::size_t show = std::min<std::size_t>(crl.entries.size(), 5);
      for (std::size_t i = 0; i < show; ++i) {
        out << fmt("  entry %zu     %s expiry=%u\n", i, to_hex(crl.entries[i].id).c_str(),
                   crl.entries[i].expiry);
      }
      if (crl.entries.size() > show) {
        out << fmt("  ... %zu more\n", crl.entries.size() - show);
      }
    }
  }
  return kOk;
}

struct VerifyOpts {
  std::string c2rl_path;
  std::string cert_hex;
  bool csv = false;
};

int cmd_verify(const VerifyOpts& o, std::ostream& out) {
  const std::vector<std::uint8_t> bytes = read_file(o.c2rl_path);
  const C2rl c2rl = decode_c2rl(bytes);
  const CertificateId id = parse_cert(o.cert_hex);
  const char* status =
      check_sender(c2rl, id) == SenderStatus::revoked ? "revoked" : "trusted";
  if (o.csv) {
    out << "cert,status\n" << o.cert_hex << "," << status << "\n";
  } else {
    out << status << "\n";
  }
  return kOk;
}

struct InitStateOpts {
  std::string out_path;
  std::uint64_t vehicles = 10;
  std::uint32_t pseudonyms = 1000;
  std::uint32_t backups = 5;
  std::uint32_t expiry = 0xffffffffu;
  std::uint64_t seed = 1;
  std::string key_hex;
};

int cmd_init_state(const InitStateOpts& o, std::ostream& out) {
  RevocationAuthority authority(o.key_hex.empty() ? kDefaultKey : parse_key(o.key_hex));
  for (std::uint64_t vid = 1; vid <= o.vehicles; ++vid) {
    authority.register_vehicle(
        make_vehicle(vid, o.pseudonyms, o.backups, o.expiry, o.seed));
  }
  std::ofstream file(o.out_path);
  if (!file) {
    throw std::invalid_argument("cannot create '" + o.out_path + "'");
  }
  save_state(file, authority);
  out << fmt("wrote %s (%llu vehicles, %u+%u certificates each)\n", o.out_path.c_str(),
             static_cast<unsigned long long>(o.vehicles), o.pseudonyms, o.backups);
  return kOk;
}

struct RevokeOpts {
  std::string state_path;
  std::uint64_t vid = 0;
};

int cmd_revoke(const RevokeOpts& o, std::ostream& out) {
  std::ifstream in(o.state_path);
  if (!in) {
    throw std::invalid_argument("cannot open '" + o.state_path + "'");
  }
  RevocationAuthority authority = load_state(in);
  in.close();
  authority.revoke_vehicle(o.vid);
  std::ofstream file(o.state_path, std::ios::trunc);
  if (!file) {
    throw std::invalid_argument("cannot rewrite '" + o.state_path + "'");
  }
  save_state(file, authority);
  out << fmt("revoked vid %llu (%zu vehicles revoked in total)\n",
             static_cast<unsigned long long>(o.vid), authority.revoked_vids().size());
  return kOk;
}

struct IssueOpts {
  std::string state_path;
  std::string out_path;
  double delta = 1e-3;
  std::uint32_t issue_time = 0;
  std::optional<std::uint64_t> load;
};

int cmd_issue(const IssueOpts& o, std::ostream& out) {
  std::ifstream in(o.state_path);
  if (!in) {
    throw std::invalid_argument("cannot open '" + o.state_path + "'");
  }
  RevocationAuthority authority = load_state(in);
  in.close();
  const C2rl& c2rl = authority.issue_c2rl(o.delta, o.issue_time, o.load);
  const std::vector<std::uint8_t> encoded = encode_c2rl(c2rl);
  write_file(o.out_path, encoded);
  std::ofstream file(o.state_path, std::ios::trunc);
  if (!file) {
    throw std::invalid_argument("cannot rewrite '" + o.state_path + "'");
  }
  save_state(file, authority);
  out << fmt("epoch %u: %s (%zu bytes, m=%u k=%u over %u ids)\n", authority.epoch(),
             o.out_path.c_str(), encoded.size(), c2rl.filter.bit_size(),
             c2rl.filter.hash_count(), c2rl.header.entry_count);
  return kOk;
}

struct SimulateOpts {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string format = "both";
  std::string csv_path;
};

void print_metrics(std::ostream& out, const SimMetrics& m) {
  out << fmt("%-9s %8llu bytes  %5u fragments  %6llu received  coverage %.3f  "
             "download %.3f s\n",
             m.format == ListFormat::standard ? "standard" : "c2rl",
             static_cast<unsigned long long>(m.list_bytes), m.fragments_per_list,
             static_cast<unsigned long long>(m.total_crls_received), m.coverage,
             m.mean_download_time_s);
}

int cmd_simulate(const SimulateOpts& o, std::ostream& out) {
  std::ifstream in(o.config_path);
  if (!in) {
    throw std::invalid_argument("cannot open '" + o.config_path + "'");
  }
  SimConfig cfg = parse_sim_config(in);
  if (o.seed.has_value()) {
    cfg.seed = *o.seed;
  }
  if (o.format != "both" && o.format != "standard" && o.format != "c2rl") {
    throw std::invalid_argument("--format must be both, standard or c2rl");
  }

  if (o.csv_path.empty()) {
    // human summary
    if (o.format == "both") {
      const PairedMetrics pair = run_paired(cfg);
      print_metrics(out, pair.standard);
      print_metrics(out, pair.compressed);
      out << fmt("gains: received %.3f, coverage %.3f, download time %.3f\n",
                 pair.gain_received(), pair.gain_coverage(),
                 pair.gain_download_time());
    } else {
      print_metrics(out, run(cfg, o.format == "standard" ? ListFormat::standard
                                                         : ListFormat::compressed));
    }
    return kOk;
  }

  std::string csv;
  if (o.format == "both") {
    const SimConfig configs[1] = {cfg};
    csv = sweep_csv(configs);
  } else {
    const SimMetrics m =
        run(cfg, o.format == "standard" ? ListFormat::standard : ListFormat::compressed);
    csv = sweep_csv_header();
    csv += fmt("%llu,%u,%u,%u,%u,%g,%g,%s,%llu,%u,%llu,%.6g,%.6g,,,\n",
               static_cast<unsigned long long>(cfg.seed), cfg.rsu_count,
               cfg.vehicle_count, cfg.revoked_per_hour, cfg.pseudonyms_per_vehicle,
               cfg.delta_hat, cfg.duration_s, o.format.c_str(),
               static_cast<unsigned long long>(m.list_bytes), m.fragments_per_list,
               static_cast<unsigned long long>(m.total_crls_received), m.coverage,
               m.mean_download_time_s);
  }

  if (o.csv_path == "-") {
    out << csv;
  } else {
    std::ofstream file(o.csv_path, std::ios::trunc);
    if (!file) {
      throw std::invalid_argument("cannot create '" + o.csv_path + "'");
    }
    file << csv;
    out << fmt("wrote %s\n", o.csv_path.c_str());
  }
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"compressed certificate revocation list toolkit"};
  app.require_subcommand(1);
  const double delta_default = default_delta();

  OptimizeOpts opt;
  opt.delta = delta_default;
  CLI::App* optimize = app.add_subcommand(
      "optimize", "jointly minimize the filter size m and pick k for a load n");
  optimize->add_option("--n", opt.n, "number of elements the filter must hold")->required();
  optimize->add_option("--delta", opt.delta, "false-positive budget in (0,1)");
  optimize->add_flag("--csv", opt.csv, "emit one CSV row instead of text");

  GainOpts gain;
  gain.delta = delta_default;
  CLI::App* gain_cmd =
      app.add_subcommand("gain", "compression gain of a compressed list vs a standard one");
  gain_cmd->add_option("--n", gain.n, "number of revoked certificates")->required();
  gain_cmd->add_option("--delta", gain.delta, "false-positive budget");
  gain_cmd->add_flag("--sweep", gain.sweep, "sweep delta over [1e-3, 1e-1]");
  gain_cmd->add_option("--delta-sweep", gain.delta_sweep, "sweep delta over LO:HI (log-spaced)");
  gain_cmd->add_option("--steps", gain.steps, "sweep points (default 13)");
  gain_cmd->add_flag("--csv", gain.csv, "CSV output");

  BuildOpts build;
  build.delta = delta_default;
  CLI::App* build_cmd = app.add_subcommand("build", "encode a revocation list file");
  build_cmd->add_option("--revoked", build.revoked_path, "file of revoked ids (hex[,expiry] lines)")
      ->required();
  build_cmd->add_option("-o,--out", build.out_path, "output path")->required();
  build_cmd->add_flag("--bloom", build.bloom, "compress entries into a Bloom filter");
  build_cmd->add_option("--delta", build.delta, "false-positive budget (with --bloom)");
  build_cmd->add_option("--serial", build.serial, "list serial number");
  build_cmd->add_option("--issue-time", build.issue_time, "issue timestamp (seconds)");
  build_cmd->add_option("--key", build.key_hex, "signer key (64 hex chars)");

  InspectOpts inspect;
  CLI::App* inspect_cmd = app.add_subcommand("inspect", "print the fields of an encoded list");
  inspect_cmd->add_option("file", inspect.path, "encoded .crl or .c2rl file")->required();
  inspect_cmd->add_option("--key", inspect.key_hex, "check the signature with this key");
  inspect_cmd->add_flag("--csv", inspect.csv, "CSV output");

  VerifyOpts verify_opts;
  CLI::App* verify_cmd =
      app.add_subcommand("verify", "check one certificate id against a compressed list");
  verify_cmd->add_option("--c2rl", verify_opts.c2rl_path, "compressed list file")->required();
  verify_cmd->add_option("--cert", verify_opts.cert_hex, "certificate id (20 hex chars)")
      ->required();
  verify_cmd->add_flag("--csv", verify_opts.csv, "CSV output");

  InitStateOpts init_state;
  CLI::App* init_cmd = app.add_subcommand("init-state", "create an authority state file");
  init_cmd->add_option("-o,--out", init_state.out_path, "state file path")->required();
  init_cmd->add_option("--vehicles", init_state.vehicles, "registered vehicle count");
  init_cmd->add_option("--pseudonyms", init_state.pseudonyms, "pseudonyms per vehicle");
  init_cmd->add_option("--backups", init_state.backups, "backup pseudonyms per vehicle");
  init_cmd->add_option("--expiry", init_state.expiry, "certificate expiry timestamp");
  init_cmd->add_option("--seed", init_state.seed, "id-generation seed");
  init_cmd->add_option("--key", init_state.key_hex, "signer key (64 hex chars)");

  RevokeOpts revoke;
  CLI::App* revoke_cmd = app.add_subcommand("revoke", "evict a vehicle in a state file");
  revoke_cmd->add_option("--state", revoke.state_path, "state file")->required();
  revoke_cmd->add_option("--vid", revoke.vid, "vehicle identity to revoke")->required();

  IssueOpts issue;
  issue.delta = delta_default;
  CLI::App* issue_cmd =
      app.add_subcommand("issue", "issue the next compressed list from a state file");
  issue_cmd->add_option("--state", issue.state_path, "state file")->required();
  issue_cmd->add_option("-o,--out", issue.out_path, "output .c2rl path")->required();
  issue_cmd->add_option("--delta", issue.delta, "false-positive budget");
  issue_cmd->add_option("--time", issue.issue_time, "issue timestamp (seconds)");
  std::uint64_t issue_load = 0;
  CLI::Option* load_opt =
      issue_cmd->add_option("--load", issue_load, "override the optimizer load n");

  SimulateOpts simulate;
  CLI::App* sim_cmd =
      app.add_subcommand("simulate", "run the broadcast scenario from a config file");
  sim_cmd->add_option("--config", simulate.config_path, "key=value scenario file")->required();
  std::uint64_t sim_seed = 0;
  CLI::Option* seed_opt = sim_cmd->add_option("--seed", sim_seed, "override the config seed");
  sim_cmd->add_option("--format", simulate.format, "both|standard|c2rl (default both)");
  sim_cmd->add_option("--csv", simulate.csv_path, "CSV destination path, '-' for stdout");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    err << app.help();
    return kUsage;
  }

  try {
    if (optimize->parsed()) return cmd_optimize(opt, out);
    if (gain_cmd->parsed()) return cmd_gain(gain, out);
    if (build_cmd->parsed()) return cmd_build(build, out);
    if (inspect_cmd->parsed()) return cmd_inspect(inspect, out);
    if (verify_cmd->parsed()) return cmd_verify(verify_opts, out);
    if (init_cmd->parsed()) return cmd_init_state(init_state, out);
    if (revoke_cmd->parsed()) return cmd_revoke(revoke, out);
    if (issue_cmd->parsed()) {
      if (load_opt->count() > 0) issue.load = issue_load;
      return cmd_issue(issue, out);
    }
    if (sim_cmd->parsed()) {
      if (seed_opt->count() > 0) simulate.seed = sim_seed;
      return cmd_simulate(simulate, out);
    }
    err << "error: no subcommand\n";
    return kUsage;
  } catch (const InfeasibleError& e) {
    err << "infeasible: " << e.what() << "\n";
    return kInfeasible;
  } catch (const DecodeError& e) {
    err << "error: " << e.what() << "\n";
    return kDataError;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kDataError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kDataError;
  }
}

}  // namespace c2rl::cli
