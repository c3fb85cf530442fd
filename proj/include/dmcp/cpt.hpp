#pragma once

// Complete-population-transfer (CPT) conditions for sequences of π pulses.
//
// At A = π each pulse propagator is (i/Ω_g)·[[Δ, −Ω], [−Ω, −Δ]], so the
// diagonal element of the N-pulse product is i^N / Π Ω_g,n times a polynomial
// in the ratios x_n = Δ_n/Ω_n. Expanding the product gives
//
//   P(x) = Σ_{S ⊆ {1..N}, |S| ≡ N (mod 2)} (−1)^{Σ_{i∈S} i + ⌈|S|/2⌉} Π_{i∈S} x_i
//
// (indices 1-based), and CPT holds exactly when P(x) = 0. The even-N and odd-N
// sums below enumerate that expansion term by term; cpt_polynomial_via_product
// recovers the same number from the 2×2 matrix product.

#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "dmcp/core.hpp"
#include "dmcp/error.hpp"

namespace dmcp {

class DetuningRatios {
 public:
  explicit DetuningRatios(std::vector<double> ratios) : ratios_(std::move(ratios)) {
    for (double x : ratios_) detail::require(std::isfinite(x), "DetuningRatios: entries must be finite");
  }

  static DetuningRatios of(const CompositeSequence& seq) {
    std::vector<double> r;
    r.reserve(seq.size());
    for (const Pulse& p : seq) r.push_back(p.detuning() / p.rabi());
    return DetuningRatios(std::move(r));
  }

  std::size_t size() const { return ratios_.size(); }
  double operator[](std::size_t i) const { return ratios_[i]; }
  std::span<const double> values() const { return ratios_; }

 private:
  std::vector<double> ratios_;
};

namespace detail {

// Sum over all index subsets of the given order of the signed products.
inline double cpt_order_sum(std::span<const double> x, std::size_t order) {
  const std::size_t n = x.size();
  if (order == 0) return 1.0;
  if (order > n) return 0.0;
  const bool negate_order = ((order + 1) / 2) % 2 == 1;  // (−1)^⌈k/2⌉
  std::vector<std::size_t> idx(order);
  for (std::size_t i = 0; i < order; ++i) idx[i] = i;
  double total = 0.0;
  while (true) {
    double prod = 1.0;
    std::size_t index_sum = 0;
    for (std::size_t i : idx) {
      prod *= x[i];
      index_sum += i + 1;
    }
    const bool negative = (index_sum % 2 == 1) != negate_order;
    total += negative ? -prod : prod;

    // advance to the next combination in lexicographic order
    std::size_t pos = order;
    while (pos > 0 && idx[pos - 1] == n - order + pos - 1) --pos;
    if (pos == 0) break;
    ++idx[pos - 1];
    for (std::size_t j = pos; j < order; ++j) idx[j] = idx[j - 1] + 1;
  }
  return total;
}

inline double cpt_parity_sum(const DetuningRatios& x, std::size_t first_order) {
  double total = 0.0;
  for (std::size_t k = first_order; k <= x.size(); k += 2) total += cpt_order_sum(x.values(), k);
  return total;
}

}  // namespace detail

// Even-N condition: orders 0, 2, ..., N. Zero means complete transfer.
inline double cpt_sum_even(const DetuningRatios& x) {
  detail::require(x.size() >= 2 && x.size() % 2 == 0, "cpt_sum_even: N must be even and >= 2");
  return detail::cpt_parity_sum(x, 0);
}

// Odd-N condition: orders 1, 3, ..., N. Zero means complete transfer.
inline double cpt_sum_odd(const DetuningRatios& x) {
  detail::require(x.size() % 2 == 1, "cpt_sum_odd: N must be odd");
  return detail::cpt_parity_sum(x, 1);
}

inline double cpt_sum(const DetuningRatios& x) {
  return x.size() % 2 == 0 ? cpt_sum_even(x) : cpt_sum_odd(x);
}

// P(x) recovered from the matrix product: u11 · Π Ω_g,n / i^N at unit couplings.
// The imaginary part of the returned value is roundoff.
inline std::complex<double> cpt_polynomial_via_product(const DetuningRatios& x) {
  detail::require(x.size() >= 1, "cpt_polynomial_via_product: empty ratio vector");
  std::vector<Pulse> pulses;
  pulses.reserve(x.size());
  double norm = 1.0;
  for (double r : x.values()) {
    pulses.emplace_back(1.0, r, pi);
    norm *= std::hypot(1.0, r);
  }
  const Unitary2 u = compose_sequence(CompositeSequence(std::move(pulses)), 1.0);
  std::complex<double> phase{1.0, 0.0};
  for (std::size_t n = 0; n < x.size(); ++n) phase *= std::complex<double>{0.0, -1.0};  // i^{-N}
  return u.u11 * norm * phase;
}

// |u11| of the composite propagator at nominal areas; zero exactly at CPT.
inline double cpt_residual_oracle(const CompositeSequence& seq) {
  for (const Pulse& p : seq) {
    detail::require(std::abs(p.nominal_area() - pi) < 1e-12,
                    "cpt_residual_oracle: every pulse must have nominal area π");
  }
  return std::abs(compose_sequence(seq, 1.0).u11);
}

}  // namespace dmcp
