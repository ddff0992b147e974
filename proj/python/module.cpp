#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <algorithm>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "c2rl/bloom.hpp"
#include "c2rl/codec.hpp"
#include "c2rl/optimizer.hpp"
#include "c2rl/revocation.hpp"
#include "c2rl/sim.hpp"

namespace py = pybind11;
using namespace c2rl;

namespace {

std::vector<std::uint8_t> to_bytes(const py::bytes& data) {
  const std::string s = data;
  return std::vector<std::uint8_t>(s.begin(), s.end());
}

py::bytes from_bytes(std::span<const std::uint8_t> data) {
  return py::bytes(reinterpret_cast<const char*>(data.data()), data.size());
}

CertificateId to_cert(const py::bytes& data) {
  const std::vector<std::uint8_t> raw = to_bytes(data);
  if (raw.size() != std::tuple_size_v<CertificateId>) {
    throw std::invalid_argument("certificate ids are exactly 10 bytes");
  }
  CertificateId id{};
  std::copy(raw.begin(), raw.end(), id.begin());
  return id;
}

SimConfig config_from_kwargs(const py::kwargs& kwargs) {
  SimConfig cfg;
  for (const auto& item : kwargs) {
    const std::string key = py::cast<std::string>(item.first);
    if (key == "area_width_m") cfg.area_width_m = py::cast<double>(item.second);
    else if (key == "area_height_m") cfg.area_height_m = py::cast<double>(item.second);
    else if (key == "rsu_count") cfg.rsu_count = py::cast<std::uint32_t>(item.second);
    else if (key == "vehicle_count") cfg.vehicle_count = py::cast<std::uint32_t>(item.second);
    else if (key == "radio_range_m") cfg.radio_range_m = py::cast<double>(item.second);
    else if (key == "packet_payload_bits") cfg.packet_payload_bits = py::cast<std::uint32_t>(item.second);
    else if (key == "crl_tx_interval_s") cfg.crl_tx_interval_s = py::cast<double>(item.second);
    else if (key == "duration_s") cfg.duration_s = py::cast<double>(item.second);
    else if (key == "per_packet_loss") cfg.per_packet_loss = py::cast<double>(item.second);
    else if (key == "seed") cfg.seed = py::cast<std::uint64_t>(item.second);
    else if (key == "revoked_per_hour") cfg.revoked_per_hour = py::cast<std::uint32_t>(item.second);
    else if (key == "pseudonyms_per_vehicle") cfg.pseudonyms_per_vehicle = py::cast<std::uint32_t>(item.second);
    else if (key == "delta_hat") cfg.delta_hat = py::cast<double>(item.second);
    else if (key == "speed_min_mps") cfg.speed_min_mps = py::cast<double>(item.second);
    else if (key == "speed_max_mps") cfg.speed_max_mps = py::cast<double>(item.second);
    else if (key == "packet_tx_s") cfg.packet_tx_s = py::cast<double>(item.second);
    else if (key == "range_recheck_s") cfg.range_recheck_s = py::cast<double>(item.second);
    else if (key == "filter_load") cfg.filter_load = py::cast<std::uint64_t>(item.second);
    else throw std::invalid_argument("unknown SimConfig field '" + key + "'");
  }
  return cfg;
}

py::dict metrics_dict(const SimMetrics& m) {
  py::dict d;
  d["format"] = m.format == ListFormat::standard ? "standard" : "c2rl";
  d["list_bytes"] = m.list_bytes;
  d["fragments_per_list"] = m.fragments_per_list;
  d["total_crls_received"] = m.total_crls_received;
  d["vehicles_completed"] = m.vehicles_completed;
  d["coverage"] = m.coverage;
  d["mean_download_time_s"] = m.mean_download_time_s;
  return d;
}

}  // namespace

PYBIND11_MODULE(_c2rl, m) {
  m.doc() = "Bloom-compressed certificate revocation lists: filter optimization, "
            "wire codec and broadcast simulation";

  m.def("fnv1a64",
        [](const py::bytes& data) { return fnv1a64(to_bytes(data)); },
        py::arg("data"));
  m.def("hash_index",
        [](const py::bytes& element, std::uint32_t seed, std::uint32_t m_bits) {
          return hash_index(to_bytes(element), seed, m_bits);
        },
        py::arg("element"), py::arg("seed"), py::arg("m"));
  m.def("false_positive_prob", &false_positive_prob, py::arg("m"), py::arg("k"),
        py::arg("n"));
  m.def("optimal_k_reference", &optimal_k_reference, py::arg("delta_hat"));

  py::class_<RelaxedSolution>(m, "RelaxedSolution")
      .def_readonly("m_tilde", &RelaxedSolution::m_tilde)
      .def_readonly("k_tilde", &RelaxedSolution::k_tilde)
      .def("__repr__", [](const RelaxedSolution& s) {
        return "RelaxedSolution(m_tilde=" + std::to_string(s.m_tilde) +
               ", k_tilde=" + std::to_string(s.k_tilde) + ")";
      });
  m.def("solve_relaxed",
        [](std::uint64_t n, double delta_hat) {
          return solve_relaxed({.n = n, .delta_hat = delta_hat});
        },
        py::arg("n"), py::arg("delta_hat"));

  py::class_<FoSolution>(m, "FoSolution")
      .def_readonly("m_star", &FoSolution::m_star)
      .def_readonly("k_star", &FoSolution::k_star)
      .def_readonly("m_tilde_star", &FoSolution::m_tilde_star)
      .def_readonly("k_tilde_star", &FoSolution::k_tilde_star)
      .def_readonly("delta_at_solution", &FoSolution::delta_at_solution)
      .def_property_readonly("payload_bytes", &FoSolution::payload_bytes)
      .def("__repr__", [](const FoSolution& s) {
        return "FoSolution(m_star=" + std::to_string(s.m_star) +
               ", k_star=" + std::to_string(s.k_star) + ")";
      });
  m.def("solve_fo",
        [](std::uint64_t n, double delta_hat) {
          return solve_fo({.n = n, .delta_hat = delta_hat});
        },
        py::arg("n"), py::arg("delta_hat"),
        "Minimize the filter size m and pick k subject to the false-positive budget.");

  py::class_<BloomFilter>(m, "BloomFilter")
      .def(py::init<std::uint32_t, std::uint16_t>(), py::arg("m"), py::arg("k"))
      .def("insert",
           [](BloomFilter& f, const py::bytes& e) { f.insert(to_bytes(e)); },
           py::arg("element"))
      .def("contains",
           [](const BloomFilter& f, const py::bytes& e) { return f.contains(to_bytes(e)); },
           py::arg("element"))
      .def("__contains__",
           [](const BloomFilter& f, const py::bytes& e) { return f.contains(to_bytes(e)); })
      .def("serialize", [](const BloomFilter& f) { return from_bytes(f.serialize()); })
      .def_static("deserialize",
                  [](const py::bytes& wire) { return BloomFilter::deserialize(to_bytes(wire)); },
                  py::arg("wire"))
      .def_property_readonly("m", &BloomFilter::bit_size)
      .def_property_readonly("k", &BloomFilter::hash_count)
      .def_property_readonly("insert_count", &BloomFilter::insert_count)
      .def_property_readonly("popcount", &BloomFilter::popcount);

  m.def("crl_size", &crl_size, py::arg("n"));
  m.def("c2rl_size", &c2rl_size, py::arg("m"));
  m.def("c2rl_wire_size", &c2rl_wire_size, py::arg("m"));
  m.def("compression_gain", &compression_gain, py::arg("n"), py::arg("m"));

  m.def("make_c2rl",
        [](const std::vector<py::bytes>& ids, double delta_hat, std::uint32_t serial,
           std::uint32_t issue_time) {
          const FoSolution sol = solve_fo(
              {.n = std::max<std::uint64_t>(1, ids.size()), .delta_hat = delta_hat});
          BloomFilter filter(static_cast<std::uint32_t>(sol.m_star),
                             static_cast<std::uint16_t>(sol.k_star));
          for (const auto& id : ids) {
            filter.insert(to_cert(id));
          }
          C2rl c2rl{CrlHeader{.serial = serial,
                              .issue_time = issue_time,
                              .next_issue_time = issue_time + 300,
                              .kind = EntryKind::bloom,
                              .entry_count = static_cast<std::uint32_t>(ids.size())},
                    std::move(filter)};
          sign(c2rl, TagSigner(std::array<std::uint8_t, 32>{}));
          return from_bytes(encode_c2rl(c2rl));
        },
        py::arg("ids"), py::arg("delta_hat") = 1e-3, py::arg("serial") = 1,
        py::arg("issue_time") = 0,
        "Encode a signed compressed list over the given 10-byte ids.");
  m.def("c2rl_contains",
        [](const py::bytes& encoded, const py::bytes& id) {
          const C2rl c2rl = decode_c2rl(to_bytes(encoded));
          return check_sender(c2rl, to_cert(id)) == SenderStatus::revoked;
        },
        py::arg("encoded"), py::arg("id"),
        "True when the encoded compressed list reports the id as revoked.");

  m.def("fragment_count",
        [](std::uint64_t list_bytes, std::uint64_t capacity_bytes) {
          if (capacity_bytes <= kFragmentHeaderBytes) {
            throw std::invalid_argument("capacity must exceed the 8-byte header");
          }
          const std::uint64_t chunk = capacity_bytes - kFragmentHeaderBytes;
          return list_bytes == 0 ? std::uint64_t{1} : (list_bytes + chunk - 1) / chunk;
        },
        py::arg("list_bytes"), py::arg("capacity_bytes") = 128);

  m.def("run_sim",
        [](const std::string& format, const py::kwargs& kwargs) {
          const SimConfig cfg = config_from_kwargs(kwargs);
          if (format == "both") {
            const PairedMetrics pair = run_paired(cfg);
            py::dict d;
            d["standard"] = metrics_dict(pair.standard);
            d["c2rl"] = metrics_dict(pair.compressed);
            d["gain_received"] = pair.gain_received();
            d["gain_coverage"] = pair.gain_coverage();
            d["gain_download_time"] = pair.gain_download_time();
            return d;
          }
          if (format == "standard") {
            return metrics_dict(run(cfg, ListFormat::standard));
          }
          if (format == "c2rl") {
            return metrics_dict(run(cfg, ListFormat::compressed));
          }
          throw std::invalid_argument("format must be both, standard or c2rl");
        },
        py::arg("format") = "both",
        "Run the deterministic broadcast scenario; SimConfig fields as kwargs.");
}
