#pragma once

// Real polynomial roots: companion-matrix eigenvalues, then Newton polishing
// against the original coefficients.

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include <Eigen/Eigenvalues>

#include "dmcp/error.hpp"

namespace dmcp {

// Coefficients in ascending order: c[0] + c[1] x + ... + c[n] x^n.
using Coefficients = std::vector<double>;

inline double evaluate(std::span<const double> c, double x) {
  double acc = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * x + *it;
  return acc;
}

inline Coefficients derivative(std::span<const double> c) {
  Coefficients d;
  for (std::size_t i = 1; i < c.size(); ++i) d.push_back(c[i] * static_cast<double>(i));
  return d;
}

// |p(x)| over the magnitude of the largest term, Σ |c_i| |x|^i.
inline double relative_residual(std::span<const double> c, double x) {
  double scale = 0.0;
  double xp = 1.0;
  for (double ci : c) {
    scale += std::abs(ci) * xp;
    xp *= std::abs(x);
  }
  return scale == 0.0 ? 0.0 : std::abs(evaluate(c, x)) / scale;
}

inline double newton_polish(std::span<const double> c, double x, int max_iter = 50) {
  const Coefficients d = derivative(c);
  for (int it = 0; it < max_iter; ++it) {
    const double fx = evaluate(c, x);
    const double dfx = evaluate(d, x);
    if (fx == 0.0 || dfx == 0.0) break;
    const double step = fx / dfx;
    x -= step;
    if (std::abs(step) <= 1e-16 * std::max(1.0, std::abs(x))) break;
  }
  return x;
}

// All real roots, sorted ascending. Eigenvalues whose imaginary part is below
// imag_tol (relative to max(1, |λ|)) are treated as real.
inline std::vector<double> real_roots(Coefficients c, double imag_tol = 1e-7) {
  while (!c.empty() && c.back() == 0.0) c.pop_back();
  detail::require(c.size() >= 2, "real_roots: polynomial must have degree >= 1");

  std::vector<double> roots;
  // factor out roots at zero so the companion matrix stays nonsingular
  std::size_t zeros = 0;
  while (zeros < c.size() - 1 && c[zeros] == 0.0) ++zeros;
  if (zeros > 0) roots.push_back(0.0);
  const Coefficients reduced(c.begin() + static_cast<std::ptrdiff_t>(zeros), c.end());

  const auto degree = static_cast<Eigen::Index>(reduced.size() - 1);
  if (degree >= 1) {
    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(degree, degree);
    for (Eigen::Index i = 1; i < degree; ++i) companion(i, i - 1) = 1.0;
    for (Eigen::Index i = 0; i < degree; ++i) {
      companion(i, degree - 1) = -reduced[static_cast<std::size_t>(i)] / reduced.back();
    }
    Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, false);
    if (solver.info() != Eigen::Success) throw NumericError("real_roots: eigenvalue solver did not converge");
    for (const auto& lambda : solver.eigenvalues()) {
      if (std::abs(lambda.imag()) <= imag_tol * std::max(1.0, std::abs(lambda))) {
        roots.push_back(newton_polish(reduced, lambda.real()));
      }
    }
  }
  std::sort(roots.begin(), roots.end());
  roots.erase(std::unique(roots.begin(), roots.end(),
                          [](double a, double b) { return std::abs(a - b) <= 1e-10 * std::max(1.0, std::abs(a)); }),
              roots.end());
  return roots;
}

}  // namespace dmcp
