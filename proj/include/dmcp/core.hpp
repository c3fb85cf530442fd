#pragma once

// Exact two-level dynamics for piecewise-constant coupling and detuning.
//
// Conventions: the Hamiltonian is H = (1/2) [[-Δ, Ω], [Ω, Δ]] (ħ = 1), a
// pulse of generalized Rabi frequency Ω_g = sqrt(Ω² + Δ²) acting for time δt
// has area A = Ω_g δt, and a sequence applies pulse 1 first, so the composite
// propagator is U_N ··· U_2 U_1.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dmcp/error.hpp"

namespace dmcp {

using cplx = std::complex<double>;

inline constexpr double pi = std::numbers::pi;

class Pulse {
 public:
  Pulse(double rabi, double detuning, double nominal_area = pi)
      : rabi_(rabi), detuning_(detuning), nominal_area_(nominal_area) {
    detail::require(std::isfinite(rabi) && rabi > 0.0, "Pulse: rabi must be finite and > 0");
    detail::require(std::isfinite(detuning), "Pulse: detuning must be finite");
    detail::require(std::isfinite(nominal_area) && nominal_area > 0.0,
                    "Pulse: nominal_area must be finite and > 0");
  }

  double rabi() const { return rabi_; }
  double detuning() const { return detuning_; }
  double nominal_area() const { return nominal_area_; }
  double generalized_rabi() const { return std::hypot(rabi_, detuning_); }

  friend bool operator==(const Pulse&, const Pulse&) = default;

 private:
  double rabi_;
  double detuning_;
  double nominal_area_;
};

class CompositeSequence {
 public:
  CompositeSequence(std::vector<Pulse> pulses, std::string label = {})
      : pulses_(std::move(pulses)), label_(std::move(label)) {
    detail::require(!pulses_.empty(), "CompositeSequence: at least one pulse is required");
  }

  std::size_t size() const { return pulses_.size(); }
  const Pulse& operator[](std::size_t i) const { return pulses_[i]; }
  std::span<const Pulse> pulses() const { return pulses_; }
  const std::string& label() const { return label_; }

  auto begin() const { return pulses_.begin(); }
  auto end() const { return pulses_.end(); }

  std::vector<double> detunings() const {
    std::vector<double> out;
    out.reserve(pulses_.size());
    for (const auto& p : pulses_) out.push_back(p.detuning());
    return out;
  }

 private:
  std::vector<Pulse> pulses_;
  std::string label_;
};

// Equal-coupling sequence of π pulses with the given detunings.
inline CompositeSequence make_pi_sequence(std::span<const double> detunings, double rabi = 1.0,
                                          std::string label = {}) {
  std::vector<Pulse> pulses;
  pulses.reserve(detunings.size());
  for (double d : detunings) pulses.emplace_back(rabi, d, pi);
  return CompositeSequence(std::move(pulses), std::move(label));
}

inline CompositeSequence resonant_pi_pulse(double rabi = 1.0) {
  return CompositeSequence({Pulse(rabi, 0.0, pi)}, "resonant");
}

struct StateVector {
  cplx c1{1.0, 0.0};
  cplx c2{0.0, 0.0};

  static StateVector ground() { return {}; }
  static StateVector excited() { return {cplx{0.0, 0.0}, cplx{1.0, 0.0}}; }

  double p1() const { return std::norm(c1); }
  double p2() const { return std::norm(c2); }
  double norm() const { return p1() + p2(); }
};

struct Unitary2 {
  cplx u11{1.0, 0.0};
  cplx u12{0.0, 0.0};
  cplx u21{0.0, 0.0};
  cplx u22{1.0, 0.0};

  static Unitary2 identity() { return {}; }

  Unitary2 adjoint() const {
    return {std::conj(u11), std::conj(u21), std::conj(u12), std::conj(u22)};
  }

  cplx det() const { return u11 * u22 - u12 * u21; }

  // Largest entry-wise deviation of U U† from the identity.
  double unitarity_defect() const {
    const Unitary2 p = *this * adjoint();
    double worst = std::abs(p.u11 - 1.0);
    worst = std::max(worst, std::abs(p.u12));
    worst = std::max(worst, std::abs(p.u21));
    worst = std::max(worst, std::abs(p.u22 - 1.0));
    return worst;
  }

  StateVector apply(const StateVector& s) const {
    return {u11 * s.c1 + u12 * s.c2, u21 * s.c1 + u22 * s.c2};
  }

  friend Unitary2 operator*(const Unitary2& a, const Unitary2& b) {
    return {a.u11 * b.u11 + a.u12 * b.u21, a.u11 * b.u12 + a.u12 * b.u22,
            a.u21 * b.u11 + a.u22 * b.u21, a.u21 * b.u12 + a.u22 * b.u22};
  }
};

// Closed-form propagator of a constant (Ω, Δ) segment with total area A = Ω_g δt.
inline Unitary2 propagator_for_area(double rabi, double detuning, double area) {
  detail::require(std::isfinite(rabi) && std::isfinite(detuning) && std::isfinite(area),
                  "propagator: non-finite input");
  const double og = std::hypot(rabi, detuning);
  if (og == 0.0) return Unitary2::identity();
  const double c = std::cos(0.5 * area);
  const double s = std::sin(0.5 * area);
  const double d = detuning / og;
  const double o = rabi / og;
  const cplx off{0.0, -o * s};
  return {cplx{c, d * s}, off, off, cplx{c, -d * s}};
}

inline Unitary2 pulse_propagator(const Pulse& p, double area_scale) {
  detail::require(std::isfinite(area_scale), "pulse_propagator: non-finite area_scale");
  detail::require(area_scale > 0.0, "pulse_propagator: area_scale must be > 0");
  return propagator_for_area(p.rabi(), p.detuning(), p.nominal_area() * area_scale);
}

inline double pi_duration(const Pulse& p) { return pi / p.generalized_rabi(); }

// Duration that realizes the pulse's nominal area.
inline double nominal_duration(const Pulse& p) { return p.nominal_area() / p.generalized_rabi(); }

inline Unitary2 compose_sequence(const CompositeSequence& seq, double area_scale = 1.0,
                                 std::span<const double> per_pulse_scales = {}) {
  detail::require(per_pulse_scales.empty() || per_pulse_scales.size() == seq.size(),
                  "compose_sequence: per_pulse_scales length must equal sequence length");
  Unitary2 total = Unitary2::identity();
  for (std::size_t n = 0; n < seq.size(); ++n) {
    const double scale = per_pulse_scales.empty() ? area_scale : area_scale * per_pulse_scales[n];
    total = pulse_propagator(seq[n], scale) * total;
  }
  return total;
}

// How a relative detuning error acts on a pulse whose nominal detuning is zero.
//   Hold:   Δ' = Δ·scale, so resonant pulses stay resonant.
//   Offset: resonant pulses receive an absolute offset Δ' = (scale − 1)·Ω,
//           i.e. the error coordinate is read in units of that pulse's coupling.
enum class ZeroDetuningError { Hold, Offset };

struct ErrorPoint {
  double area_scale = 1.0;
  double detuning_scale = 1.0;
  double coupling_scale = 1.0;
};

inline double perturbed_detuning(const Pulse& p, double detuning_scale, ZeroDetuningError model) {
  if (p.detuning() == 0.0 && model == ZeroDetuningError::Offset) {
    return (detuning_scale - 1.0) * p.rabi();
  }
  return p.detuning() * detuning_scale;
}

// Propagator of a sequence under systematic errors. Pulse durations are fixed
// at their nominal values times the area scales; coupling and detuning errors
// then change both the axis and the area each pulse actually sweeps.
inline Unitary2 perturbed_propagator(const CompositeSequence& seq, const ErrorPoint& err,
                                     std::span<const double> per_pulse_scales = {},
                                     ZeroDetuningError model = ZeroDetuningError::Hold) {
  detail::require(std::isfinite(err.area_scale) && err.area_scale > 0.0,
                  "perturbed_propagator: area_scale must be finite and > 0");
  detail::require(std::isfinite(err.coupling_scale) && err.coupling_scale > 0.0,
                  "perturbed_propagator: coupling_scale must be finite and > 0");
  detail::require(std::isfinite(err.detuning_scale), "perturbed_propagator: non-finite detuning_scale");
  detail::require(per_pulse_scales.empty() || per_pulse_scales.size() == seq.size(),
                  "perturbed_propagator: per_pulse_scales length must equal sequence length");
  Unitary2 total = Unitary2::identity();
  for (std::size_t n = 0; n < seq.size(); ++n) {
    const Pulse& p = seq[n];
    const double scale = per_pulse_scales.empty() ? err.area_scale : err.area_scale * per_pulse_scales[n];
    const double rabi = p.rabi() * err.coupling_scale;
    const double detuning = perturbed_detuning(p, err.detuning_scale, model);
    const double duration = nominal_duration(p) * scale;
    total = propagator_for_area(rabi, detuning, std::hypot(rabi, detuning) * duration) * total;
  }
  return total;
}

inline double transfer_fidelity(const CompositeSequence& seq, double area_scale, double detuning_scale = 1.0,
                                double coupling_scale = 1.0,
                                ZeroDetuningError model = ZeroDetuningError::Hold) {
  const Unitary2 u = perturbed_propagator(seq, {area_scale, detuning_scale, coupling_scale}, {}, model);
  return std::norm(u.u12);
}

struct TracePoint {
  double time;
  double p1;
  double p2;
};

inline std::vector<TracePoint> evolve_trace(const CompositeSequence& seq, int n_steps_per_pulse,
                                            const StateVector& initial = StateVector::ground()) {
  detail::require(n_steps_per_pulse >= 2, "evolve_trace: n_steps_per_pulse must be >= 2");
  detail::require(std::abs(initial.norm() - 1.0) < 1e-12, "evolve_trace: initial state must be normalized");
  std::vector<TracePoint> rows;
  rows.reserve(seq.size() * static_cast<std::size_t>(n_steps_per_pulse) + 1);
  rows.push_back({0.0, initial.p1(), initial.p2()});
  StateVector start = initial;
  double t0 = 0.0;
  for (const Pulse& p : seq) {
    const double duration = nominal_duration(p);
    for (int k = 1; k <= n_steps_per_pulse; ++k) {
      const double frac = static_cast<double>(k) / n_steps_per_pulse;
      const StateVector s =
          propagator_for_area(p.rabi(), p.detuning(), p.nominal_area() * frac).apply(start);
      rows.push_back({t0 + duration * frac, s.p1(), s.p2()});
    }
    start = pulse_propagator(p, 1.0).apply(start);
    t0 += duration;
  }
  return rows;
}

}  // namespace dmcp
