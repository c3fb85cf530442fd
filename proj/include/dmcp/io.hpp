#pragma once

// Serialization: CSV for scans and traces, JSON for designs, grids and devices.
// Floats in CSV carry 17 significant digits so every value round-trips.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include "json.hpp"

#include "dmcp/core.hpp"
#include "dmcp/design.hpp"
#include "dmcp/error.hpp"
#include "dmcp/robustness.hpp"
#include "dmcp/waveguide.hpp"

namespace dmcp {

using json = nlohmann::json;

inline std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace detail {

inline void csv_row(std::ostringstream& os, std::initializer_list<double> cells) {
  bool first = true;
  for (double c : cells) {
    if (!first) os << ',';
    os << format_double(c);
    first = false;
  }
  os << '\n';
}

}  // namespace detail

// 1-D: epsilon,fidelity,infidelity. 2-D: long-form u,v,fidelity with u fastest.
inline std::string to_csv(const FidelityGrid& grid) {
  std::ostringstream os;
  if (!grid.axis2) {
    os << "epsilon,fidelity,infidelity\n";
    for (std::size_t i = 0; i < grid.n1(); ++i) {
      detail::csv_row(os, {grid.axis1.range.at(i), grid.values[i], 1.0 - grid.values[i]});
    }
    return os.str();
  }
  os << "u,v,fidelity\n";
  for (std::size_t j = 0; j < grid.n2(); ++j) {
    for (std::size_t i = 0; i < grid.n1(); ++i) {
      detail::csv_row(os, {grid.axis1.range.at(i), grid.axis2->range.at(j), grid.at(i, j)});
    }
  }
  return os.str();
}

inline std::string to_csv(const MonteCarloCurve& curve) {
  std::ostringstream os;
  os << "epsilon,fidelity,infidelity\n";
  for (std::size_t i = 0; i < curve.mean_infidelity.size(); ++i) {
    detail::csv_row(os, {curve.axis.at(i), 1.0 - curve.mean_infidelity[i], curve.mean_infidelity[i]});
  }
  return os.str();
}

inline std::string to_csv(const std::vector<TracePoint>& trace) {
  std::ostringstream os;
  os << "time,p1,p2\n";
  for (const auto& r : trace) detail::csv_row(os, {r.time, r.p1, r.p2});
  return os.str();
}

inline std::string to_csv(const std::vector<IntensityPoint>& trace) {
  std::ostringstream os;
  os << "z,i1,i2\n";
  for (const auto& r : trace) detail::csv_row(os, {r.z, r.i1, r.i2});
  return os.str();
}

inline void to_json(json& j, const ScanRange& r) { j = json{{"lo", r.lo}, {"hi", r.hi}, {"n_points", r.n_points}}; }

inline void from_json(const json& j, ScanRange& r) {
  j.at("lo").get_to(r.lo);
  j.at("hi").get_to(r.hi);
  j.at("n_points").get_to(r.n_points);
}

inline void to_json(json& j, const Pulse& p) {
  j = json{{"rabi", p.rabi()}, {"detuning", p.detuning()}, {"nominal_area", p.nominal_area()}};
}

inline void to_json(json& j, const CompositeSequence& s) {
  j = json{{"label", s.label()}, {"pulses", json::array()}};
  for (const Pulse& p : s) j["pulses"].push_back(p);
}

inline CompositeSequence sequence_from_json(const json& j) {
  std::vector<Pulse> pulses;
  for (const auto& p : j.at("pulses")) {
    pulses.emplace_back(p.at("rabi").get<double>(), p.at("detuning").get<double>(),
                        p.value("nominal_area", pi));
  }
  return CompositeSequence(std::move(pulses), j.value("label", std::string{}));
}

inline void to_json(json& j, const DesignResult& r) {
  json diag = json::object();
  for (const auto& [k, v] : r.diagnostics) diag[std::to_string(k)] = v;
  json candidates = json::array();
  for (const auto& [root, score] : r.candidates) candidates.push_back({{"delta_over_omega", root}, {"score", score}});
  j = json{{"delta_over_omega", r.delta_over_omega},
           {"detunings", r.sequence.detunings()},
           {"sequence", r.sequence},
           {"derivatives", diag},
           {"candidates", candidates},
           {"selection_rules_agree", r.selection_rules_agree},
           {"table_ref", r.table_ref}};
}

inline void to_json(json& j, const FidelityGrid& g) {
  j = json{{"axis1", {{"label", to_string(g.axis1.label)}, {"range", g.axis1.range}}}, {"values", g.values}};
  if (g.axis2) j["axis2"] = {{"label", to_string(g.axis2->label)}, {"range", g.axis2->range}};
  if (g.fixed_coordinate) j["fixed_coordinate"] = *g.fixed_coordinate;
  if (g.snap_distance) j["snap_distance"] = *g.snap_distance;
}

inline void to_json(json& j, const MonteCarloCurve& c) {
  j = json{{"axis", c.axis},          {"label", to_string(ErrorAxis::AreaError)},
           {"sigma", c.sigma},        {"n_trials", c.n_trials},
           {"seed", c.seed},          {"mean_infidelity", c.mean_infidelity}};
}

inline void to_json(json& j, const DispersionModel& m) {
  j = json{{"a", m.a}, {"b", m.b}, {"dbeta_dw", m.dbeta_dw}, {"w1", m.w1}};
}

inline void from_json(const json& j, DispersionModel& m) {
  j.at("a").get_to(m.a);
  j.at("b").get_to(m.b);
  j.at("dbeta_dw").get_to(m.dbeta_dw);
  j.at("w1").get_to(m.w1);
  m.validate();
}

inline void to_json(json& j, const Segment& s) { j = json{{"width_ratio", s.width_ratio}, {"length", s.length}}; }

inline void from_json(const json& j, Segment& s) {
  j.at("width_ratio").get_to(s.width_ratio);
  j.at("length").get_to(s.length);
}

// Device geometry together with the calibration it was laid out for.
inline json device_to_json(const WaveguideDevice& dev, const DispersionModel& m) {
  return json{{"label", dev.label},
              {"gap", dev.gap},
              {"w1", m.w1},
              {"coupling", coupling_from_gap(m, dev.gap)},
              {"calibration", m},
              {"segments", dev.segments}};
}

struct DeviceFile {
  WaveguideDevice device;
  DispersionModel model;
};

inline DeviceFile device_from_json(const json& j) {
  DeviceFile out;
  out.model = j.at("calibration").get<DispersionModel>();
  out.device.gap = j.at("gap").get<double>();
  out.device.label = j.value("label", std::string{});
  out.device.segments = j.at("segments").get<std::vector<Segment>>();
  out.device.validate();
  return out;
}

// Writes via a sibling temporary file and rename, so readers never see a partial file.
inline void write_atomic(const std::filesystem::path& path, const std::string& content) {
  namespace fs = std::filesystem;
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
    out << content;
    out.flush();
    if (!out) {
      std::error_code ignored;
      fs::remove(tmp, ignored);
      throw IoError("write failed for " + tmp.string());
    }
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    std::error_code ignored;
    fs::remove(tmp, ignored);
    throw IoError("cannot rename " + tmp.string() + " to " + path.string() + ": " + ec.message());
  }
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace dmcp
