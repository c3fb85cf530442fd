#pragma once

// Central finite differences of arbitrary order with Richardson extrapolation.
//
// The k-th central difference δ_h^k f(x) / h^k has an error expansion in even
// powers of h, so halving h and combining (4^m T(h/2) − T(h)) / (4^m − 1)
// removes one h^{2m} term per level.

#include <cmath>
#include <vector>

#include "dmcp/error.hpp"

namespace dmcp {

struct RichardsonOptions {
  double base_step = 0.4;
  int levels = 4;
};

template <class Fn>
double central_difference(Fn&& f, double x, int order, double h) {
  detail::require(order >= 1, "central_difference: order must be >= 1");
  detail::require(h > 0.0, "central_difference: step must be > 0");
  double sum = 0.0;
  double binom = 1.0;
  for (int j = 0; j <= order; ++j) {
    const double offset = (0.5 * order - j) * h;
    sum += ((j % 2 == 0) ? binom : -binom) * f(x + offset);
    binom = binom * (order - j) / (j + 1);
  }
  return sum / std::pow(h, order);
}

template <class Fn>
double richardson_derivative(Fn&& f, double x, int order, const RichardsonOptions& opt = {}) {
  detail::require(opt.levels >= 1, "richardson_derivative: levels must be >= 1");
  std::vector<double> table;
  table.reserve(opt.levels);
  double h = opt.base_step;
  for (int i = 0; i < opt.levels; ++i, h *= 0.5) table.push_back(central_difference(f, x, order, h));
  double factor = 1.0;
  for (int m = 1; m < opt.levels; ++m) {
    factor *= 4.0;
    for (std::size_t i = 0; i + m < static_cast<std::size_t>(opt.levels); ++i) {
      table[i] = (factor * table[i + 1] - table[i]) / (factor - 1.0);
    }
  }
  return table.front();
}

}  // namespace dmcp
