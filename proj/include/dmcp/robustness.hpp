#pragma once

// Robustness of a sequence against systematic errors: 1-D area-error scans,
// 2-D detuning/coupling grids with cut lines, Gaussian Monte-Carlo averaging
// and flat-top width at an infidelity threshold.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "dmcp/core.hpp"
#include "dmcp/error.hpp"
#include "dmcp/parallel.hpp"

namespace dmcp {

enum class ErrorAxis { AreaError, DetuningError, CouplingError, LengthError };

inline std::string to_string(ErrorAxis a) {
  switch (a) {
    case ErrorAxis::AreaError: return "area_error";
    case ErrorAxis::DetuningError: return "detuning_error";
    case ErrorAxis::CouplingError: return "coupling_error";
    case ErrorAxis::LengthError: return "length_error";
  }
  return "unknown";
}

struct ScanRange {
  double lo = -0.5;
  double hi = 0.5;
  int n_points = 1001;

  void validate() const {
    detail::require(std::isfinite(lo) && std::isfinite(hi), "ScanRange: bounds must be finite");
    detail::require(lo < hi, "ScanRange: lo must be < hi");
    detail::require(n_points >= 2, "ScanRange: n_points must be >= 2");
  }

  double at(std::size_t i) const {
    if (i + 1 == static_cast<std::size_t>(n_points)) return hi;
    return lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n_points - 1);
  }

  std::vector<double> points() const {
    std::vector<double> out(static_cast<std::size_t>(n_points));
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = at(i);
    return out;
  }

  friend bool operator==(const ScanRange&, const ScanRange&) = default;
};

struct GridAxis {
  ScanRange range;
  ErrorAxis label = ErrorAxis::AreaError;

  friend bool operator==(const GridAxis&, const GridAxis&) = default;
};

// Fidelity samples on a 1-D or 2-D error grid. 2-D values are stored with
// axis1 varying fastest: values[j * n1 + i] belongs to (axis1[i], axis2[j]).
struct FidelityGrid {
  GridAxis axis1;
  std::optional<GridAxis> axis2;
  std::vector<double> values;
  // set on cuts: the fixed coordinate actually used and its distance from the request
  std::optional<double> fixed_coordinate;
  std::optional<double> snap_distance;

  std::size_t n1() const { return static_cast<std::size_t>(axis1.range.n_points); }
  std::size_t n2() const { return axis2 ? static_cast<std::size_t>(axis2->range.n_points) : 1; }
  double at(std::size_t i, std::size_t j = 0) const { return values[j * n1() + i]; }

  // Number of samples with fidelity strictly above the threshold.
  std::size_t count_above(double threshold) const {
    return static_cast<std::size_t>(
        std::count_if(values.begin(), values.end(), [threshold](double f) { return f > threshold; }));
  }
};

inline FidelityGrid scan_area_error(const CompositeSequence& seq, const ScanRange& range) {
  range.validate();
  detail::require(range.lo > -1.0, "scan_area_error: range.lo must be > -1");
  FidelityGrid grid{{range, ErrorAxis::AreaError}, std::nullopt, std::vector<double>(range.n_points), {}, {}};
  parallel_for(grid.values.size(), [&](std::size_t i) {
    grid.values[i] = transfer_fidelity(seq, 1.0 + range.at(i), 1.0, 1.0);
  });
  return grid;
}

inline FidelityGrid scan_detuning_error(const CompositeSequence& seq, const ScanRange& range,
                                        ZeroDetuningError model = ZeroDetuningError::Hold) {
  range.validate();
  FidelityGrid grid{{range, ErrorAxis::DetuningError}, std::nullopt, std::vector<double>(range.n_points), {}, {}};
  parallel_for(grid.values.size(), [&](std::size_t i) {
    grid.values[i] = transfer_fidelity(seq, 1.0, 1.0 + range.at(i), 1.0, model);
  });
  return grid;
}

// Detuning error u along axis1, coupling error v along axis2.
inline FidelityGrid scan_2d(const CompositeSequence& seq, const ScanRange& detuning_range,
                            const ScanRange& coupling_range,
                            ZeroDetuningError model = ZeroDetuningError::Hold) {
  detuning_range.validate();
  coupling_range.validate();
  detail::require(coupling_range.lo > -1.0, "scan_2d: coupling error must stay > -1");
  FidelityGrid grid{{detuning_range, ErrorAxis::DetuningError},
                    GridAxis{coupling_range, ErrorAxis::CouplingError},
                    {},
                    {},
                    {}};
  const std::size_t n1 = grid.n1();
  grid.values.resize(n1 * grid.n2());
  parallel_for(grid.values.size(), [&](std::size_t k) {
    const double u = detuning_range.at(k % n1);
    const double v = coupling_range.at(k / n1);
    grid.values[k] = transfer_fidelity(seq, 1.0, 1.0 + u, 1.0 + v, model);
  });
  return grid;
}

// Which axis keeps varying in a cut; the other one is fixed at the requested coordinate.
enum class CutAlong { Axis1, Axis2 };

inline FidelityGrid extract_cut(const FidelityGrid& grid, CutAlong along, double at) {
  if (!grid.axis2) {
    detail::require(along == CutAlong::Axis1, "extract_cut: a 1-D grid can only be cut along axis1");
    return grid;
  }
  const GridAxis& fixed = along == CutAlong::Axis1 ? *grid.axis2 : grid.axis1;
  const GridAxis& kept = along == CutAlong::Axis1 ? grid.axis1 : *grid.axis2;
  detail::require(std::isfinite(at) && at >= fixed.range.lo && at <= fixed.range.hi,
                  "extract_cut: coordinate outside the fixed axis range");

  const auto count = static_cast<std::size_t>(fixed.range.n_points);
  std::size_t nearest = 0;
  double best = std::abs(fixed.range.at(0) - at);
  for (std::size_t i = 1; i < count; ++i) {
    const double d = std::abs(fixed.range.at(i) - at);
    if (d < best) {
      best = d;
      nearest = i;
    }
  }

  FidelityGrid cut{kept, std::nullopt, {}, fixed.range.at(nearest), best};
  const std::size_t m = static_cast<std::size_t>(kept.range.n_points);
  cut.values.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    cut.values[i] = along == CutAlong::Axis1 ? grid.at(i, nearest) : grid.at(nearest, i);
  }
  return cut;
}

// SplitMix64 finalizer; used to derive independent per-point streams from (seed, index).
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

inline std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t index) {
  return splitmix64(splitmix64(seed) ^ splitmix64(index + 0x632BE59BD9B4E019ULL));
}

struct MonteCarloCurve {
  ScanRange axis;
  std::vector<double> mean_infidelity;
  double sigma = 0.10;
  int n_trials = 100;
  std::uint64_t seed = 0;
};

inline constexpr double kMinPulseFactor = 0.01;

// Mean infidelity over Gaussian per-pulse area factors (1 + g), g ~ N(0, σ²),
// clamped below at kMinPulseFactor, on top of the common area error ε.
inline MonteCarloCurve monte_carlo_infidelity(const CompositeSequence& seq, const ScanRange& range, double sigma,
                                              int n_trials, std::uint64_t seed) {
  range.validate();
  detail::require(range.lo > -1.0, "monte_carlo_infidelity: range.lo must be > -1");
  detail::require(std::isfinite(sigma) && sigma >= 0.0, "monte_carlo_infidelity: sigma must be >= 0");
  detail::require(n_trials >= 1, "monte_carlo_infidelity: n_trials must be >= 1");

  MonteCarloCurve curve{range, std::vector<double>(range.n_points), sigma, n_trials, seed};
  parallel_for(curve.mean_infidelity.size(), [&](std::size_t i) {
    std::mt19937_64 engine(substream_seed(seed, i));
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<double> factors(seq.size());
    const double area_scale = 1.0 + range.at(i);
    double sum = 0.0;
    for (int t = 0; t < n_trials; ++t) {
      for (double& f : factors) f = std::max(kMinPulseFactor, 1.0 + sigma * gauss(engine));
      sum += 1.0 - std::norm(perturbed_propagator(seq, {area_scale, 1.0, 1.0}, factors).u12);
    }
    curve.mean_infidelity[i] = std::clamp(sum / n_trials, 0.0, 1.0);
  });
  return curve;
}

struct ThresholdWidth {
  double width = 0.0;
  // false when the infidelity at ε = 0 already exceeds the threshold
  bool within_at_zero = true;
  // true when the curve never crosses the threshold inside the sampled range
  bool clipped_by_range = false;
};

// Largest w with infidelity <= threshold for every sampled |ε| <= w, taking
// the linear-interpolation crossing on each side and the smaller of the two.
inline ThresholdWidth threshold_width(std::span<const double> epsilon, std::span<const double> infidelity,
                                      double threshold) {
  detail::require(epsilon.size() == infidelity.size() && epsilon.size() >= 2,
                  "threshold_width: need matching samples");
  detail::require(threshold > 0.0, "threshold_width: threshold must be > 0");
  for (std::size_t i = 1; i < epsilon.size(); ++i) {
    detail::require(epsilon[i] > epsilon[i - 1], "threshold_width: epsilon must be increasing");
  }
  detail::require(epsilon.front() < 0.0 && epsilon.back() > 0.0, "threshold_width: grid must straddle zero");

  std::size_t zero = 0;
  for (std::size_t i = 1; i < epsilon.size(); ++i) {
    if (std::abs(epsilon[i]) < std::abs(epsilon[zero])) zero = i;
  }
  detail::require(std::abs(epsilon[zero]) <= 1e-12 * std::max(1.0, epsilon.back() - epsilon.front()),
                  "threshold_width: grid must contain epsilon = 0");

  ThresholdWidth out;
  if (infidelity[zero] > threshold) {
    out.within_at_zero = false;
    return out;
  }
  const auto side = [&](int dir) {
    std::size_t i = zero;
    while (true) {
      const std::size_t next = dir > 0 ? i + 1 : i - 1;
      if ((dir > 0 && i + 1 >= epsilon.size()) || (dir < 0 && i == 0)) {
        out.clipped_by_range = true;
        return std::abs(epsilon[i]);
      }
      if (infidelity[next] > threshold) {
        const double t = (threshold - infidelity[i]) / (infidelity[next] - infidelity[i]);
        return std::abs(epsilon[i] + t * (epsilon[next] - epsilon[i]));
      }
      i = next;
    }
  };
  out.width = std::min(side(+1), side(-1));
  return out;
}

inline ThresholdWidth threshold_width(const FidelityGrid& scan, double threshold) {
  detail::require(!scan.axis2, "threshold_width: expects a 1-D scan");
  const std::vector<double> eps = scan.axis1.range.points();
  std::vector<double> infid(scan.values.size());
  for (std::size_t i = 0; i < infid.size(); ++i) infid[i] = 1.0 - scan.values[i];
  return threshold_width(eps, infid, threshold);
}

}  // namespace dmcp
