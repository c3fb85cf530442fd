#pragma once

// Command-line front end. One invocation runs one job:
//
//   dmcp <command> [--config job.json] [options] [--out path] [--format csv|json]
//
// A JSON header (tool, version, command, resolved configuration, seed) is
// printed to stdout before any data. Results go to --out (written atomically)
// or, without --out, to stdout after the header.
//
// Exit codes: 0 success, 2 invalid configuration, 3 numeric failure, 4 I/O failure.

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "dmcp/core.hpp"
#include "dmcp/design.hpp"
#include "dmcp/error.hpp"
#include "dmcp/io.hpp"
#include "dmcp/robustness.hpp"
#include "dmcp/waveguide.hpp"

namespace dmcp::cli {

inline constexpr const char* kToolVersion = "0.1.0";

enum ExitCode : int { kOk = 0, kValidation = 2, kNumeric = 3, kIo = 4 };

inline const std::vector<std::string>& commands() {
  static const std::vector<std::string> names{"design",        "scan-area",     "scan-2d",       "monte-carlo",
                                              "waveguide-map", "waveguide-sim", "waveguide-scan"};
  return names;
}

struct JobConfig {
  std::string command;

  // sequence selection
  std::string order = "first";  // first | second | resonant
  int n = 2;
  double coupling = 1.0;

  // 1-D scans (scan-area, monte-carlo)
  double lo = -0.5;
  double hi = 0.5;
  int points = 1001;
  double threshold = 1e-4;

  // 2-D grids: u along axis1, v along axis2
  double u_lo = -1.0;
  double u_hi = 1.0;
  int u_points = 201;
  // v = -1 would switch the coupling off, so the default stops one step short
  double v_lo = -0.99;
  double v_hi = 1.0;
  int v_points = 200;
  std::string zero_detuning = "hold";  // hold | offset
  std::optional<std::string> cut;      // axis1 | axis2
  std::optional<double> at;

  // monte-carlo
  double sigma = 0.10;
  int trials = 100;
  std::uint64_t seed = 20170101;

  // waveguide
  double a = 1.0;
  double b = 1.0;
  double gap = 0.0;
  double w1 = 1.0;
  std::optional<double> dbeta_dw;
  std::optional<double> calibrate_ratio;
  std::optional<std::string> device;
  int steps = 100;
  double length_scale = 1.0;
  double mismatch_scale = 1.0;

  // output
  std::optional<std::string> out;
  std::string format;  // empty: command default
  std::optional<std::string> config;
  std::optional<unsigned> threads;
};

namespace detail {

using dmcp::detail::require;

inline void add_options(CLI::App& sub, JobConfig& c, const std::string& cmd) {
  const std::vector<std::string> seq_cmds{"design",        "scan-area",     "scan-2d",       "monte-carlo",
                                          "waveguide-map", "waveguide-sim", "waveguide-scan"};
  const std::vector<std::string> scan1{"scan-area", "monte-carlo"};
  const std::vector<std::string> wg{"waveguide-map", "waveguide-sim", "waveguide-scan"};
  const std::vector<std::string> wg_run{"waveguide-sim", "waveguide-scan"};
  const std::vector<std::string> grid2{"scan-2d", "waveguide-scan"};

  auto on = [&](const std::vector<std::string>& cmds) {
    return cmds.empty() || std::find(cmds.begin(), cmds.end(), cmd) != cmds.end();
  };

  sub.add_option("--config", c.config, "JSON job file with the same keys as the flags; flags override");
  sub.add_option("--out", c.out, "output path (atomic write); stdout when omitted");
  sub.add_option("--format", c.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  sub.add_option("--threads", c.threads, "worker threads (default: DMCP_THREADS or hardware concurrency)");

  if (on(seq_cmds)) {
    sub.add_option("--order", c.order, "first, second or resonant")
        ->check(CLI::IsMember({"first", "second", "resonant"}));
    sub.add_option("--n", c.n, "number of pulses");
    sub.add_option("--coupling", c.coupling, "reference coupling Ω");
  }
  if (on(scan1)) {
    sub.add_option("--lo", c.lo, "smallest area error");
    sub.add_option("--hi", c.hi, "largest area error");
    sub.add_option("--points", c.points, "grid points");
  }
  if (cmd == "scan-area" || cmd == "monte-carlo") {
    sub.add_option("--threshold", c.threshold, "infidelity threshold for the flat-top width");
  }
  if (on(grid2)) {
    sub.add_option("--u-lo", c.u_lo, "axis1 lower bound (detuning / mismatch error)");
    sub.add_option("--u-hi", c.u_hi, "axis1 upper bound");
    sub.add_option("--u-points", c.u_points, "axis1 points");
    sub.add_option("--v-lo", c.v_lo, "axis2 lower bound (coupling / length error)");
    sub.add_option("--v-hi", c.v_hi, "axis2 upper bound");
    sub.add_option("--v-points", c.v_points, "axis2 points");
    sub.add_option("--zero-detuning", c.zero_detuning, "hold or offset")
        ->check(CLI::IsMember({"hold", "offset"}));
  }
  if (cmd == "scan-2d") {
    sub.add_option("--cut", c.cut, "emit a cut keeping axis1 or axis2")->check(CLI::IsMember({"axis1", "axis2"}));
    sub.add_option("--at", c.at, "fixed coordinate of the cut");
  }
  if (cmd == "monte-carlo") {
    sub.add_option("--sigma", c.sigma, "relative Gaussian width of per-pulse area errors");
    sub.add_option("--trials", c.trials, "trials per grid point");
    sub.add_option("--seed", c.seed, "64-bit seed");
  }
  if (on(wg)) {
    sub.add_option("--a", c.a, "coupling prefactor");
    sub.add_option("--b", c.b, "gap decay constant");
    sub.add_option("--gap", c.gap, "waveguide separation");
    sub.add_option("--w1", c.w1, "width of waveguide 1");
    sub.add_option("--dbeta-dw", c.dbeta_dw, "propagation-constant slope vs width");
    sub.add_option("--calibrate-ratio", c.calibrate_ratio,
                   "width ratio w2/w1 realizing the first detuned segment (sets dbeta-dw)");
  }
  if (on(wg_run)) {
    sub.add_option("--device", c.device, "device JSON written by waveguide-map");
  }
  if (cmd == "waveguide-sim") {
    sub.add_option("--steps", c.steps, "samples per segment");
    sub.add_option("--length-scale", c.length_scale, "multiplies every segment length");
    sub.add_option("--mismatch-scale", c.mismatch_scale, "multiplies every phase mismatch");
  }
}

// Turns config-file entries into flag arguments placed before the real ones,
// so explicit flags win under the take-last policy.
inline std::vector<std::string> config_as_args(const std::filesystem::path& path, const std::string& cmd) {
  json doc;
  try {
    doc = json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw InvalidArgument(std::string("config: ") + e.what());
  }
  require(doc.is_object(), "config: top level must be a JSON object");
  std::vector<std::string> args;
  for (const auto& [key, value] : doc.items()) {
    require(key != "config", "config: key 'config' is not allowed in a config file");
    if (key == "command") {
      require(value == cmd, "config: written for a different command than '" + cmd + "'");
      continue;
    }
    // header keys use underscores, flags use dashes
    std::string flag = key;
    std::replace(flag.begin(), flag.end(), '_', '-');
    args.push_back("--" + flag);
    if (value.is_string()) {
      args.push_back(value.get<std::string>());
    } else if (value.is_number_unsigned()) {
      args.push_back(std::to_string(value.get<std::uint64_t>()));
    } else if (value.is_number_integer()) {
      args.push_back(std::to_string(value.get<std::int64_t>()));
    } else if (value.is_number()) {
      args.push_back(format_double(value.get<double>()));
    } else {
      throw InvalidArgument("config: key '" + key + "' must be a string or number");
    }
  }
  return args;
}

}  // namespace detail

// Parses argv-style arguments (without the program name). Throws InvalidArgument.
inline JobConfig parse_job(const std::vector<std::string>& args) {
  detail::require(!args.empty(), "missing command; expected one of: design, scan-area, scan-2d, monte-carlo, "
                                 "waveguide-map, waveguide-sim, waveguide-scan");
  const std::string& cmd = args.front();
  const auto& names = commands();
  detail::require(std::find(names.begin(), names.end(), cmd) != names.end(), "unknown command '" + cmd + "'");

  std::vector<std::string> rest(args.begin() + 1, args.end());
  // locate --config before the real parse
  std::vector<std::string> merged;
  for (std::size_t i = 0; i < rest.size(); ++i) {
    std::string path;
    if (rest[i] == "--config" && i + 1 < rest.size()) {
      path = rest[i + 1];
    } else if (rest[i].rfind("--config=", 0) == 0) {
      path = rest[i].substr(9);
    }
    if (!path.empty()) {
      auto extra = detail::config_as_args(path, cmd);
      merged.insert(merged.end(), extra.begin(), extra.end());
    }
  }
  merged.insert(merged.end(), rest.begin(), rest.end());

  JobConfig c;
  c.command = cmd;
  CLI::App app{"dmcp " + cmd};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.allow_extras(false);
  detail::add_options(app, c, cmd);

  std::vector<std::string> reversed(merged.rbegin(), merged.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    throw InvalidArgument(cmd + ": " + e.what());
  }
  return c;
}

inline json config_to_json(const JobConfig& c) {
  json j{{"command", c.command}, {"order", c.order},         {"n", c.n},
         {"coupling", c.coupling}, {"format", c.format}};
  if (c.command == "scan-area" || c.command == "monte-carlo") {
    j["lo"] = c.lo;
    j["hi"] = c.hi;
    j["points"] = c.points;
    j["threshold"] = c.threshold;
  }
  if (c.command == "scan-2d" || c.command == "waveguide-scan") {
    j["u_lo"] = c.u_lo;
    j["u_hi"] = c.u_hi;
    j["u_points"] = c.u_points;
    j["v_lo"] = c.v_lo;
    j["v_hi"] = c.v_hi;
    j["v_points"] = c.v_points;
    j["zero_detuning"] = c.zero_detuning;
    if (c.cut) j["cut"] = *c.cut;
    if (c.at) j["at"] = *c.at;
  }
  if (c.command == "monte-carlo") {
    j["sigma"] = c.sigma;
    j["trials"] = c.trials;
    j["seed"] = c.seed;
  }
  if (c.command.rfind("waveguide-", 0) == 0) {
    j["a"] = c.a;
    j["b"] = c.b;
    j["gap"] = c.gap;
    j["w1"] = c.w1;
    if (c.dbeta_dw) j["dbeta_dw"] = *c.dbeta_dw;
    if (c.calibrate_ratio) j["calibrate_ratio"] = *c.calibrate_ratio;
    if (c.device) j["device"] = *c.device;
  }
  if (c.command == "waveguide-sim") {
    j["steps"] = c.steps;
    j["length_scale"] = c.length_scale;
    j["mismatch_scale"] = c.mismatch_scale;
  }
  if (c.out) j["out"] = *c.out;
  if (c.config) j["config"] = *c.config;
  if (c.threads) j["threads"] = *c.threads;
  return j;
}

namespace detail {

inline DesignOrder parse_order(const std::string& s) {
  return s == "second" ? DesignOrder::Second : DesignOrder::First;
}

inline ZeroDetuningError parse_zero_model(const std::string& s) {
  return s == "offset" ? ZeroDetuningError::Offset : ZeroDetuningError::Hold;
}

// Everything a job needs, built and validated before any heavy computation.
struct PreparedJob {
  std::string format;
  std::optional<DesignSpec> design;  // empty for the resonant reference
  ScanRange range1;
  ScanRange range2;
  std::optional<DeviceFile> device_file;
  std::optional<DispersionModel> model;
};

inline PreparedJob prepare(const JobConfig& c) {
  PreparedJob p;
  const bool structured = c.command == "design" || c.command == "waveguide-map";
  p.format = c.format.empty() ? (structured ? "json" : "csv") : c.format;

  const bool needs_sequence = !(c.device && (c.command == "waveguide-sim" || c.command == "waveguide-scan"));
  if (needs_sequence) {
    if (c.order == "resonant") {
      require(c.command != "design", "design: --order must be first or second");
      require(std::isfinite(c.coupling) && c.coupling > 0.0, "--coupling must be > 0");
    } else {
      DesignSpec spec{c.n, parse_order(c.order), c.coupling};
      spec.validate();
      p.design = spec;
    }
  }
  if (c.command == "scan-area" || c.command == "monte-carlo") {
    p.range1 = ScanRange{c.lo, c.hi, c.points};
    p.range1.validate();
    require(c.lo > -1.0, "--lo must be > -1 so every area stays positive");
    require(c.threshold > 0.0, "--threshold must be > 0");
  }
  if (c.command == "monte-carlo") {
    require(std::isfinite(c.sigma) && c.sigma >= 0.0, "--sigma must be >= 0");
    require(c.trials >= 1, "--trials must be >= 1");
  }
  if (c.command == "scan-2d" || c.command == "waveguide-scan") {
    p.range1 = ScanRange{c.u_lo, c.u_hi, c.u_points};
    p.range2 = ScanRange{c.v_lo, c.v_hi, c.v_points};
    p.range1.validate();
    p.range2.validate();
    require(c.v_lo > -1.0, "--v-lo must be > -1");
  }
  if (c.command == "scan-2d") {
    require(c.cut.has_value() == c.at.has_value(), "--cut and --at must be given together");
    if (c.at) {
      const ScanRange& fixed = *c.cut == "axis1" ? p.range2 : p.range1;
      require(*c.at >= fixed.lo && *c.at <= fixed.hi, "--at lies outside the fixed axis range");
    }
  }
  if (c.command == "waveguide-sim") {
    require(c.steps >= 1, "--steps must be >= 1");
    require(std::isfinite(c.length_scale) && c.length_scale > 0.0, "--length-scale must be > 0");
    require(std::isfinite(c.mismatch_scale), "--mismatch-scale must be finite");
  }
  if (c.command.rfind("waveguide-", 0) == 0) {
    if (c.device) {
      p.device_file = device_from_json(json::parse(read_file(*c.device)));
    } else {
      require(c.dbeta_dw.has_value() != c.calibrate_ratio.has_value(),
              "waveguide commands need exactly one of --dbeta-dw or --calibrate-ratio");
      DispersionModel m{c.a, c.b, c.dbeta_dw.value_or(1.0), c.w1};
      require(std::isfinite(c.gap) && c.gap >= 0.0, "--gap must be >= 0");
      if (c.calibrate_ratio) {
        require(*c.calibrate_ratio > 0.0 && *c.calibrate_ratio != 1.0, "--calibrate-ratio must be > 0 and != 1");
        require(p.design.has_value(), "--calibrate-ratio needs a detuned design (first or second order)");
      }
      m.validate();
      p.model = m;
    }
  }
  return p;
}

inline CompositeSequence build_sequence(const JobConfig& c, const PreparedJob& p, std::optional<DesignResult>& design) {
  if (!p.design) return resonant_pi_pulse(c.coupling);
  design = solve(*p.design);
  return design->sequence;
}

inline std::string emit(const std::string& format, const json& header, const json& payload, const std::string& csv) {
  if (format == "json") {
    json doc = payload;
    doc["header"] = header;
    return doc.dump(2) + "\n";
  }
  return csv;
}

}  // namespace detail

// Executes one job and returns the process exit code.
inline int run(const JobConfig& c, std::ostream& out, std::ostream& err) {
  detail::PreparedJob p;
  try {
    p = detail::prepare(c);
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << '\n';
    return kValidation;
  } catch (const InvalidGeometry& e) {
    err << "error: " << e.what() << '\n';
    return kValidation;
  } catch (const json::exception& e) {
    err << "error: device file: " << e.what() << '\n';
    return kValidation;
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kIo;
  }

  if (c.threads) {
    // parallel_for reads the worker count from the environment
    ::setenv("DMCP_THREADS", std::to_string(*c.threads).c_str(), 1);
  }

  json header{{"tool", "dmcp"}, {"version", kToolVersion}, {"command", c.command}, {"config", config_to_json(c)}};
  header["seed"] = c.command == "monte-carlo" ? json(c.seed) : json(nullptr);
  header["config"]["format"] = p.format;

  std::string body;
  try {
    std::optional<DesignResult> design;
    json payload = json::object();
    std::string csv;

    if (c.command == "design") {
      design = solve(*p.design);
      payload = *design;
      std::ostringstream os;
      os << "pulse,rabi,detuning,duration\n";
      for (std::size_t i = 0; i < design->sequence.size(); ++i) {
        const Pulse& pl = design->sequence[i];
        os << i + 1 << ',' << format_double(pl.rabi()) << ',' << format_double(pl.detuning()) << ','
           << format_double(pi_duration(pl)) << '\n';
      }
      csv = os.str();
    } else if (c.command == "scan-area") {
      const CompositeSequence seq = detail::build_sequence(c, p, design);
      const FidelityGrid grid = scan_area_error(seq, p.range1);
      const ThresholdWidth w = threshold_width(grid, c.threshold);
      payload = {{"sequence", seq}, {"grid", grid}, {"threshold_width", w.width}};
      csv = to_csv(grid);
    } else if (c.command == "scan-2d") {
      const CompositeSequence seq = detail::build_sequence(c, p, design);
      FidelityGrid grid = scan_2d(seq, p.range1, p.range2, detail::parse_zero_model(c.zero_detuning));
      if (c.cut) grid = extract_cut(grid, *c.cut == "axis1" ? CutAlong::Axis1 : CutAlong::Axis2, *c.at);
      payload = {{"sequence", seq}, {"grid", grid}, {"count_above_0.9", grid.count_above(0.9)}};
      csv = to_csv(grid);
    } else if (c.command == "monte-carlo") {
      const CompositeSequence seq = detail::build_sequence(c, p, design);
      const MonteCarloCurve curve = monte_carlo_infidelity(seq, p.range1, c.sigma, c.trials, c.seed);
      payload = {{"sequence", seq}, {"curve", curve}};
      csv = to_csv(curve);
    } else {
      WaveguideDevice dev;
      DispersionModel model;
      if (p.device_file) {
        dev = p.device_file->device;
        model = p.device_file->model;
      } else {
        const CompositeSequence seq = detail::build_sequence(c, p, design);
        model = *p.model;
        if (c.calibrate_ratio) {
          const double omega = coupling_from_gap(model, c.gap);
          double first = 0.0;
          for (const Pulse& pl : seq) {
            if (pl.detuning() != 0.0) {
              first = pl.detuning() / pl.rabi() * omega;
              break;
            }
          }
          model.dbeta_dw = calibrate_dbeta_dw(first, *c.calibrate_ratio, model.w1);
        }
        dev = device_from_sequence(seq, model, c.gap);
      }
      if (c.command == "waveguide-map") {
        payload = device_to_json(dev, model);
        std::ostringstream os;
        os << "segment,width_ratio,length\n";
        for (std::size_t i = 0; i < dev.segments.size(); ++i) {
          os << i + 1 << ',' << format_double(dev.segments[i].width_ratio) << ','
             << format_double(dev.segments[i].length) << '\n';
        }
        csv = os.str();
      } else if (c.command == "waveguide-sim") {
        const auto trace = simulate_device(dev, model, c.steps, c.length_scale, c.mismatch_scale);
        json rows = json::array();
        for (const auto& r : trace) rows.push_back({r.z, r.i1, r.i2});
        payload = {{"device", device_to_json(dev, model)}, {"trace", rows}, {"fidelity", trace.back().i2}};
        csv = to_csv(trace);
      } else {
        const FidelityGrid grid =
            device_error_map(dev, model, p.range1, p.range2, detail::parse_zero_model(c.zero_detuning));
        payload = {{"device", device_to_json(dev, model)}, {"grid", grid}, {"count_above_0.99", grid.count_above(0.99)}};
        csv = to_csv(grid);
      }
    }
    if (design && c.command != "design") payload["design"] = *design;
    body = detail::emit(p.format, header, payload, csv);
  } catch (const InvalidGeometry& e) {
    err << "error: " << e.what() << '\n';
    return kValidation;
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << '\n';
    return kValidation;
  } catch (const NumericError& e) {
    err << "numeric failure: " << e.what() << '\n';
    return kNumeric;
  }

  out << header.dump() << '\n';
  try {
    if (c.out) {
      write_atomic(*c.out, body);
    } else {
      out << body;
    }
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kIo;
  }
  return kOk;
}

inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  JobConfig c;
  try {
    c = parse_job(args);
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << '\n';
    return kValidation;
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kIo;
  }
  return run(c, out, err);
}

}  // namespace dmcp::cli
