#pragma once

// First- and second-order detuning-modulated composite π-pulse sequences.
//
// First order: sign-alternating detunings (+Δ, −Δ, +Δ, ...). CPT reduces to a
// single polynomial in Δ/Ω whose largest root also flattens the transfer
// profile to second order in the area error.
//
// Second order: odd N with anti-symmetric detunings Δ_i = −Δ_{N+1−i} and a
// resonant middle pulse. CPT then holds for every Δ, and Δ is fixed by
// nulling the fourth area derivative of the transfer probability.

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "dmcp/core.hpp"
#include "dmcp/cpt.hpp"
#include "dmcp/derivative.hpp"
#include "dmcp/error.hpp"
#include "dmcp/parallel.hpp"
#include "dmcp/polynomial.hpp"

namespace dmcp {

enum class DesignOrder { First, Second };

inline std::string to_string(DesignOrder o) { return o == DesignOrder::First ? "first" : "second"; }

struct DesignSpec {
  int n_pulses = 2;
  DesignOrder order = DesignOrder::First;
  double coupling = 1.0;

  void validate() const {
    detail::require(std::isfinite(coupling) && coupling > 0.0, "DesignSpec: coupling must be > 0");
    if (order == DesignOrder::First) {
      detail::require(n_pulses >= 2, "DesignSpec: first-order designs need N >= 2");
    } else {
      detail::require(n_pulses >= 3 && n_pulses % 2 == 1, "DesignSpec: second-order designs need odd N >= 3");
    }
  }
};

struct DesignResult {
  CompositeSequence sequence;
  double delta_over_omega = 0.0;
  // derivative order -> d^k F / dA^k at A = π
  std::map<int, double> diagnostics;
  // every positive candidate considered, with |d4| (first order) or |d6| (second order)
  std::vector<std::pair<double, double>> candidates;
  // first order only: whether "largest root" and "smallest |d4|" picked the same candidate
  bool selection_rules_agree = true;
  std::string table_ref;
};

inline CompositeSequence sign_alternating_sequence(int n, double delta, double rabi = 1.0, std::string label = {}) {
  std::vector<double> d(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) d[static_cast<std::size_t>(i)] = (i % 2 == 0) ? delta : -delta;
  return make_pi_sequence(d, rabi, std::move(label));
}

// (Δ, −Δ, ..., 0, ..., Δ, −Δ): the left half alternates starting at +Δ, the
// right half mirrors it with opposite sign.
inline CompositeSequence anti_symmetric_sequence(int n, double delta, double rabi = 1.0, std::string label = {}) {
  detail::require(n >= 1 && n % 2 == 1, "anti_symmetric_sequence: N must be odd");
  const auto size = static_cast<std::size_t>(n);
  const std::size_t half = size / 2;
  std::vector<double> d(size, 0.0);
  for (std::size_t i = 0; i < half; ++i) {
    d[i] = (i % 2 == 0) ? delta : -delta;
    d[size - 1 - i] = -d[i];
  }
  return make_pi_sequence(d, rabi, std::move(label));
}

// Σ_s (−1)^s C(N, N−2s) Δ^{N−2s} with Ω = 1, ascending powers of Δ.
inline Coefficients first_order_coefficients(int n) {
  detail::require(n >= 2, "first_order_coefficients: N must be >= 2");
  Coefficients c(static_cast<std::size_t>(n) + 1, 0.0);
  double binom = 1.0;  // C(N, 2s)
  for (int s = 0; 2 * s <= n; ++s) {
    c[static_cast<std::size_t>(n - 2 * s)] = (s % 2 == 0) ? binom : -binom;
    binom = binom * (n - 2 * s) * (n - 2 * s - 1) / ((2 * s + 1) * (2 * s + 2));
  }
  return c;
}

// k-th derivative of F(A) = |u12|² with every pulse at area A·(nominal/π).
// F(A) is a trigonometric polynomial of degree N in A, so the natural step
// shrinks like 1/N. The constants balance truncation against rounding per order.
inline RichardsonOptions default_area_step(std::size_t n_pulses, int order) {
  static constexpr double scale[7] = {0.0, 1.0, 0.6, 2.0, 1.0, 2.4, 2.2};
  const double h = std::min(scale[order] / static_cast<double>(n_pulses), 2.0 / (order + 1));
  return {h, 4};
}

// Derivative of F(A) = |u12|^2 with every pulse at area A. Uses the per-order
// default step unless explicit options are given.
inline double area_derivative(const CompositeSequence& seq, int order, double at = pi,
                              std::optional<RichardsonOptions> options = std::nullopt) {
  detail::require(order >= 1 && order <= 6, "area_derivative: order must be in [1, 6]");
  detail::require(std::isfinite(at) && at > 0.0, "area_derivative: area must be > 0");
  const RichardsonOptions opt = options.value_or(default_area_step(seq.size(), order));
  detail::require(at - 0.5 * order * opt.base_step > 0.0, "area_derivative: stencil reaches non-positive area");
  const auto fidelity = [&seq](double area) { return std::norm(compose_sequence(seq, area / pi).u12); };
  return richardson_derivative(fidelity, at, order, opt);
}

inline std::map<int, double> derivative_diagnostics(const CompositeSequence& seq) {
  std::map<int, double> out;
  for (int k = 1; k <= 6; ++k) out[k] = area_derivative(seq, k);
  return out;
}

namespace detail {

inline std::string design_label(DesignOrder order, int n) {
  return to_string(order) + "-order N=" + std::to_string(n);
}

inline std::string table_ref(DesignOrder order, int n) {
  const bool published = order == DesignOrder::First ? (n >= 2 && n <= 5)
                                                     : (n == 3 || n == 5 || n == 7 || n == 9);
  if (!published) return "computed " + design_label(order, n);
  return to_string(order) + "-order table N=" + std::to_string(n);
}

inline void verify_design(const CompositeSequence& seq, double cpt_tol, double d2_tol) {
  const double residual = cpt_residual_oracle(seq);
  if (!(residual < cpt_tol)) {
    std::ostringstream os;
    os << "design verification failed: CPT residual " << residual << " for " << seq.label();
    throw NumericError(os.str());
  }
  const double d2 = area_derivative(seq, 2);
  if (!(std::abs(d2) < d2_tol)) {
    std::ostringstream os;
    os << "design verification failed: d2F/dA2 = " << d2 << " for " << seq.label();
    throw NumericError(os.str());
  }
}

}  // namespace detail

inline DesignResult solve_first_order(const DesignSpec& spec) {
  spec.validate();
  detail::require(spec.order == DesignOrder::First, "solve_first_order: spec.order must be First");
  const int n = spec.n_pulses;
  const Coefficients coeffs = first_order_coefficients(n);
  const std::vector<double> roots = real_roots(coeffs);

  std::vector<double> positive;
  for (double r : roots) {
    if (r > 1e-9) positive.push_back(newton_polish(coeffs, r));
  }
  if (positive.empty()) throw NumericError("solve_first_order: no positive real root found for N=" + std::to_string(n));

  DesignResult result{sign_alternating_sequence(n, 1.0), 0.0, {}, {}, true, detail::table_ref(spec.order, n)};
  double largest = positive.front();
  double best_d4 = std::numeric_limits<double>::infinity();
  double min_d4_root = positive.front();
  for (double r : positive) {
    if (relative_residual(coeffs, r) > 1e-12) {
      std::ostringstream os;
      os << "solve_first_order: root " << r << " did not polish (relative residual "
         << relative_residual(coeffs, r) << ")";
      throw NumericError(os.str());
    }
    const double d4 = std::abs(area_derivative(sign_alternating_sequence(n, r), 4));
    result.candidates.emplace_back(r, d4);
    largest = std::max(largest, r);
    if (d4 < best_d4) {
      best_d4 = d4;
      min_d4_root = r;
    }
  }
  result.selection_rules_agree = (min_d4_root == largest);
  result.delta_over_omega = largest;
  result.sequence = sign_alternating_sequence(n, spec.coupling * largest, spec.coupling,
                                              detail::design_label(spec.order, n));
  detail::verify_design(result.sequence, 1e-9, 1e-6);
  result.diagnostics = derivative_diagnostics(result.sequence);
  return result;
}

struct SecondOrderSearch {
  double step = 0.05;
  // upper end of the Δ/Ω scan is upper_factor · N
  double upper_factor = 4.0;
};

inline DesignResult solve_second_order(const DesignSpec& spec, const SecondOrderSearch& search = {}) {
  spec.validate();
  detail::require(spec.order == DesignOrder::Second, "solve_second_order: spec.order must be Second");
  detail::require(search.step > 0.0 && search.upper_factor > 0.0, "solve_second_order: invalid search grid");
  const int n = spec.n_pulses;
  const auto d4_at = [n](double x) { return area_derivative(anti_symmetric_sequence(n, x), 4); };

  const double upper = search.upper_factor * n;
  const auto cells = static_cast<std::size_t>(std::floor(upper / search.step + 1e-9));
  std::vector<double> grid(cells), values(cells);
  for (std::size_t i = 0; i < cells; ++i) grid[i] = search.step * static_cast<double>(i + 1);
  parallel_for(cells, [&](std::size_t i) { values[i] = d4_at(grid[i]); });

  std::vector<double> roots;
  for (std::size_t i = 0; i + 1 < cells; ++i) {
    if (values[i] == 0.0) {
      roots.push_back(grid[i]);
      continue;
    }
    if ((values[i] < 0.0) == (values[i + 1] < 0.0) || values[i + 1] == 0.0) continue;
    double lo = grid[i], hi = grid[i + 1], flo = values[i];
    while (hi - lo > 1e-7) {
      const double mid = 0.5 * (lo + hi);
      const double fmid = d4_at(mid);
      if ((fmid < 0.0) == (flo < 0.0)) {
        lo = mid;
        flo = fmid;
      } else {
        hi = mid;
      }
    }
    // secant polish, kept inside the bracket
    double a = lo, b = hi, fa = d4_at(a), fb = d4_at(b);
    for (int it = 0; it < 8 && fb != fa; ++it) {
      const double c = b - fb * (b - a) / (fb - fa);
      if (!(c > lo - 1e-7 && c < hi + 1e-7)) break;
      a = b;
      fa = fb;
      b = c;
      fb = d4_at(b);
      if (std::abs(b - a) < 1e-14) break;
    }
    roots.push_back(b);
  }
  if (values.back() == 0.0) roots.push_back(grid.back());
  if (roots.empty()) {
    std::ostringstream os;
    os << "solve_second_order: no sign change of d4F/dA4 for N=" << n << " over (0, " << upper
       << "] at step " << search.step;
    throw NumericError(os.str());
  }

  DesignResult result{anti_symmetric_sequence(n, 1.0), 0.0, {}, {}, true, detail::table_ref(spec.order, n)};
  double best = roots.front();
  double best_d6 = std::numeric_limits<double>::infinity();
  for (double r : roots) {
    const double d6 = std::abs(area_derivative(anti_symmetric_sequence(n, r), 6));
    result.candidates.emplace_back(r, d6);
    if (d6 < best_d6) {
      best_d6 = d6;
      best = r;
    }
  }
  result.delta_over_omega = best;
  result.sequence = anti_symmetric_sequence(n, spec.coupling * best, spec.coupling,
                                            detail::design_label(spec.order, n));
  detail::verify_design(result.sequence, 1e-9, 1e-6);
  result.diagnostics = derivative_diagnostics(result.sequence);
  return result;
}

inline DesignResult solve(const DesignSpec& spec) {
  return spec.order == DesignOrder::First ? solve_first_order(spec) : solve_second_order(spec);
}

}  // namespace dmcp
