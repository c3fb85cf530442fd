#pragma once

// Two-waveguide directional coupler realization of a composite sequence.
//
// In coupled-mode theory the fundamental-mode amplitudes obey the same
// two-level equation as the qubit, with propagation distance z in place of
// time, coupling Ω = a·exp(−b·g) fixed by the gap g, and phase mismatch
// Δ = (β₁ − β₂)/2. Waveguide 1 keeps width w1; waveguide 2 is resized per
// segment, and β is taken linear in width with slope dbeta_dw, so
// Δ = dbeta_dw · (w1 − w2) / 2.

#include <cmath>
#include <string>
#include <vector>

#include "dmcp/core.hpp"
#include "dmcp/error.hpp"
#include "dmcp/parallel.hpp"
#include "dmcp/robustness.hpp"

namespace dmcp {

struct DispersionModel {
  double a = 1.0;
  double b = 1.0;
  double dbeta_dw = 1.0;
  double w1 = 1.0;

  void validate() const {
    detail::require(std::isfinite(a) && a > 0.0, "DispersionModel: a must be > 0");
    detail::require(std::isfinite(b) && b > 0.0, "DispersionModel: b must be > 0");
    detail::require(std::isfinite(w1) && w1 > 0.0, "DispersionModel: w1 must be > 0");
    detail::require(std::isfinite(dbeta_dw) && dbeta_dw != 0.0, "DispersionModel: dbeta_dw must be nonzero");
  }

  friend bool operator==(const DispersionModel&, const DispersionModel&) = default;
};

struct Segment {
  double width_ratio;  // w2 / w1
  double length;

  friend bool operator==(const Segment&, const Segment&) = default;
};

struct WaveguideDevice {
  double gap = 0.0;
  std::vector<Segment> segments;
  std::string label;

  void validate() const {
    detail::require(std::isfinite(gap) && gap >= 0.0, "WaveguideDevice: gap must be >= 0");
    detail::require(!segments.empty(), "WaveguideDevice: at least one segment is required");
    for (const Segment& s : segments) {
      if (!(std::isfinite(s.width_ratio) && s.width_ratio > 0.0)) {
        throw InvalidGeometry("WaveguideDevice: width ratios must be > 0");
      }
      if (!(std::isfinite(s.length) && s.length > 0.0)) {
        throw InvalidGeometry("WaveguideDevice: segment lengths must be > 0");
      }
    }
  }

  double total_length() const {
    double total = 0.0;
    for (const Segment& s : segments) total += s.length;
    return total;
  }

  friend bool operator==(const WaveguideDevice&, const WaveguideDevice&) = default;
};

inline double coupling_from_gap(const DispersionModel& m, double gap) {
  detail::require(std::isfinite(gap) && gap >= 0.0, "coupling_from_gap: gap must be >= 0");
  return m.a * std::exp(-m.b * gap);
}

// Slope dβ/dw that maps the mismatch `detuning` onto the width ratio w2/w1 = `width_ratio`.
inline double calibrate_dbeta_dw(double detuning, double width_ratio, double w1) {
  detail::require(detuning != 0.0, "calibrate_dbeta_dw: detuning must be nonzero");
  detail::require(width_ratio > 0.0 && width_ratio != 1.0, "calibrate_dbeta_dw: width ratio must be > 0 and != 1");
  detail::require(w1 > 0.0, "calibrate_dbeta_dw: w1 must be > 0");
  return 2.0 * detuning / (w1 * (1.0 - width_ratio));
}

inline double width_ratio_for_detuning(const DispersionModel& m, double detuning) {
  return 1.0 - 2.0 * detuning / (m.dbeta_dw * m.w1);
}

inline double segment_detuning(const DispersionModel& m, const Segment& s) {
  return 0.5 * m.dbeta_dw * m.w1 * (1.0 - s.width_ratio);
}

// Each pulse keeps its ratio Δ_n/Ω_n; the device coupling Ω comes from the gap.
inline WaveguideDevice device_from_sequence(const CompositeSequence& seq, const DispersionModel& m, double gap) {
  m.validate();
  const double omega = coupling_from_gap(m, gap);
  WaveguideDevice dev{gap, {}, seq.label()};
  dev.segments.reserve(seq.size());
  for (const Pulse& p : seq) {
    const double delta = p.detuning() / p.rabi() * omega;
    const double ratio = width_ratio_for_detuning(m, delta);
    if (!(ratio > 0.0)) {
      throw InvalidGeometry("device_from_sequence: detuning " + std::to_string(delta) +
                            " requires a non-positive waveguide width");
    }
    dev.segments.push_back({ratio, p.nominal_area() / std::hypot(omega, delta)});
  }
  dev.validate();
  return dev;
}

inline CompositeSequence sequence_from_device(const WaveguideDevice& dev, const DispersionModel& m) {
  m.validate();
  dev.validate();
  const double omega = coupling_from_gap(m, dev.gap);
  std::vector<Pulse> pulses;
  pulses.reserve(dev.segments.size());
  for (const Segment& s : dev.segments) {
    const double delta = segment_detuning(m, s);
    pulses.emplace_back(omega, delta, std::hypot(omega, delta) * s.length);
  }
  return CompositeSequence(std::move(pulses), dev.label);
}

struct IntensityPoint {
  double z;
  double i1;
  double i2;
};

namespace detail {

struct SegmentField {
  double omega;
  double delta;
  double length;
};

inline std::vector<SegmentField> perturbed_segments(const WaveguideDevice& dev, const DispersionModel& m,
                                                    double length_scale, double mismatch_scale,
                                                    ZeroDetuningError model) {
  m.validate();
  dev.validate();
  require(std::isfinite(length_scale) && length_scale > 0.0, "simulate_device: length_scale must be > 0");
  require(std::isfinite(mismatch_scale), "simulate_device: mismatch_scale must be finite");
  const double omega = coupling_from_gap(m, dev.gap);
  std::vector<SegmentField> out;
  out.reserve(dev.segments.size());
  for (const Segment& s : dev.segments) {
    const double nominal = segment_detuning(m, s);
    const double delta = (nominal == 0.0 && model == ZeroDetuningError::Offset) ? (mismatch_scale - 1.0) * omega
                                                                                : nominal * mismatch_scale;
    out.push_back({omega, delta, s.length * length_scale});
  }
  return out;
}

}  // namespace detail

// Light launched into waveguide 1; rows (z, I1, I2) sampled uniformly inside each segment.
inline std::vector<IntensityPoint> simulate_device(const WaveguideDevice& dev, const DispersionModel& m,
                                                   int n_steps_per_segment, double length_scale = 1.0,
                                                   double mismatch_scale = 1.0,
                                                   ZeroDetuningError model = ZeroDetuningError::Hold) {
  detail::require(n_steps_per_segment >= 1, "simulate_device: n_steps_per_segment must be >= 1");
  const auto fields = detail::perturbed_segments(dev, m, length_scale, mismatch_scale, model);
  std::vector<IntensityPoint> rows;
  rows.reserve(fields.size() * static_cast<std::size_t>(n_steps_per_segment) + 1);
  StateVector start = StateVector::ground();
  rows.push_back({0.0, start.p1(), start.p2()});
  double z0 = 0.0;
  for (const auto& f : fields) {
    const double og = std::hypot(f.omega, f.delta);
    for (int k = 1; k <= n_steps_per_segment; ++k) {
      const double z = f.length * k / n_steps_per_segment;
      const StateVector s = propagator_for_area(f.omega, f.delta, og * z).apply(start);
      rows.push_back({z0 + z, s.p1(), s.p2()});
    }
    start = propagator_for_area(f.omega, f.delta, og * f.length).apply(start);
    z0 += f.length;
  }
  return rows;
}

// Fraction of the power in waveguide 2 at the output.
inline double device_fidelity(const WaveguideDevice& dev, const DispersionModel& m, double length_scale = 1.0,
                              double mismatch_scale = 1.0, ZeroDetuningError model = ZeroDetuningError::Hold) {
  const auto fields = detail::perturbed_segments(dev, m, length_scale, mismatch_scale, model);
  Unitary2 total = Unitary2::identity();
  for (const auto& f : fields) {
    total = propagator_for_area(f.omega, f.delta, std::hypot(f.omega, f.delta) * f.length) * total;
  }
  return std::norm(total.u21);
}

// Mismatch error along axis1, length error along axis2.
inline FidelityGrid device_error_map(const WaveguideDevice& dev, const DispersionModel& m,
                                     const ScanRange& mismatch_range, const ScanRange& length_range,
                                     ZeroDetuningError model = ZeroDetuningError::Hold) {
  mismatch_range.validate();
  length_range.validate();
  detail::require(length_range.lo > -1.0, "device_error_map: length error must stay > -1");
  m.validate();
  dev.validate();
  FidelityGrid grid{{mismatch_range, ErrorAxis::DetuningError},
                    GridAxis{length_range, ErrorAxis::LengthError},
                    {},
                    {},
                    {}};
  const std::size_t n1 = grid.n1();
  grid.values.resize(n1 * grid.n2());
  parallel_for(grid.values.size(), [&](std::size_t k) {
    grid.values[k] =
        device_fidelity(dev, m, 1.0 + length_range.at(k / n1), 1.0 + mismatch_range.at(k % n1), model);
  });
  return grid;
}

}  // namespace dmcp
