#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "dmcp/derivative.hpp"
#include "dmcp/polynomial.hpp"
#include "oracles.hpp"

using namespace dmcp;

TEST(Richardson, DerivativesOfSine) {
  const auto f = [](double x) { return std::sin(x); };
  const double x = 0.7;
  const double exact[6] = {std::cos(x), -std::sin(x), -std::cos(x), std::sin(x), std::cos(x), -std::sin(x)};
  for (int k = 1; k <= 6; ++k) {
    const double tol = k <= 4 ? 1e-8 : 1e-6;
    EXPECT_NEAR(richardson_derivative(f, x, k), exact[k - 1], tol) << "order " << k;
  }
}

TEST(Richardson, ExactOnLowDegreePolynomials) {
  const auto cubic = [](double x) { return 2.0 * x * x * x - x + 4.0; };
  EXPECT_NEAR(richardson_derivative(cubic, 1.5, 1), 6.0 * 1.5 * 1.5 - 1.0, 1e-10);
  EXPECT_NEAR(richardson_derivative(cubic, 1.5, 3), 12.0, 1e-8);
}

TEST(Richardson, ImprovesOnPlainCentralDifference) {
  const auto f = [](double x) { return std::exp(2.0 * x); };
  const double exact = 16.0 * std::exp(0.6);
  const double plain = central_difference(f, 0.3, 4, 0.05);
  const double extrapolated = richardson_derivative(f, 0.3, 4, {0.2, 4});
  EXPECT_LT(std::abs(extrapolated - exact), std::abs(plain - exact));
}

TEST(Richardson, RejectsBadArguments) {
  const auto f = [](double x) { return x; };
  EXPECT_THROW(central_difference(f, 0.0, 0, 0.1), InvalidArgument);
  EXPECT_THROW(central_difference(f, 0.0, 2, 0.0), InvalidArgument);
  EXPECT_THROW(richardson_derivative(f, 0.0, 2, {0.1, 0}), InvalidArgument);
}

TEST(Polynomial, EvaluateAndDerivative) {
  const Coefficients c{1.0, -3.0, 0.0, 2.0};  // 1 − 3x + 2x³
  EXPECT_DOUBLE_EQ(evaluate(c, 2.0), 11.0);
  const Coefficients d = derivative(c);
  ASSERT_EQ(d.size(), 3u);
  EXPECT_DOUBLE_EQ(evaluate(d, 2.0), 21.0);
}

TEST(Polynomial, RealRootsOfKnownPolynomials) {
  // (x − 1)(x + 2)(x − 3) = x³ − 2x² − 5x + 6
  auto roots = real_roots({6.0, -5.0, -2.0, 1.0});
  ASSERT_EQ(roots.size(), 3u);
  EXPECT_NEAR(roots[0], -2.0, 1e-14);
  EXPECT_NEAR(roots[1], 1.0, 1e-14);
  EXPECT_NEAR(roots[2], 3.0, 1e-14);

  // x² + 1 has no real roots
  EXPECT_TRUE(real_roots({1.0, 0.0, 1.0}).empty());

  // x⁵ − 10x³ + 5x keeps the root at zero
  roots = real_roots({0.0, 5.0, 0.0, -10.0, 0.0, 1.0});
  ASSERT_EQ(roots.size(), 5u);
  EXPECT_EQ(roots[2], 0.0);
}

TEST(Polynomial, RejectsConstant) { EXPECT_THROW(real_roots({3.0}), InvalidArgument); }

TEST(Polynomial, MatchesBisectionOracleOnRandomRealRootedPolynomials) {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> root(-6.0, 6.0);
  for (int trial = 0; trial < 100; ++trial) {
    const int degree = 2 + trial % 8;
    std::vector<double> chosen(static_cast<std::size_t>(degree));
    for (double& r : chosen) r = root(rng);
    Coefficients c{1.0};
    for (double r : chosen) {
      Coefficients next(c.size() + 1, 0.0);
      for (std::size_t i = 0; i < c.size(); ++i) {
        next[i] -= r * c[i];
        next[i + 1] += c[i];
      }
      c = next;
    }
    const auto roots = real_roots(c);
    const auto brute = oracle::bisection_roots([&](double x) { return evaluate(c, x); }, -7.0, 7.0, 1e-3);
    // nearly coincident roots may merge or split differently; compare when both resolve them all
    if (brute.size() == chosen.size() && roots.size() == chosen.size()) {
      for (std::size_t i = 0; i < roots.size(); ++i) EXPECT_NEAR(roots[i], brute[i], 1e-6);
    }
    for (double r : roots) EXPECT_LT(relative_residual(c, r), 1e-12);
  }
}
