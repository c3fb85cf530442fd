#include <cmath>
#include <cstdlib>
#include <vector>

#include <gtest/gtest.h>

#include "dmcp/design.hpp"
#include "dmcp/robustness.hpp"

using namespace dmcp;

namespace {

CompositeSequence first_order(int n) { return solve_first_order({n, DesignOrder::First}).sequence; }
CompositeSequence second_order(int n) { return solve_second_order({n, DesignOrder::Second}).sequence; }

std::vector<CompositeSequence> designed() {
  std::vector<CompositeSequence> out;
  for (int n = 2; n <= 5; ++n) out.push_back(first_order(n));
  for (int n : {3, 5, 7, 9}) out.push_back(second_order(n));
  return out;
}

}  // namespace

TEST(ScanRange, Validation) {
  EXPECT_THROW((ScanRange{0.5, -0.5, 11}.validate()), InvalidArgument);
  EXPECT_THROW((ScanRange{-0.5, 0.5, 1}.validate()), InvalidArgument);
  EXPECT_THROW((ScanRange{-0.5, NAN, 11}.validate()), InvalidArgument);
  const ScanRange r{-0.5, 0.5, 1001};
  EXPECT_EQ(r.at(0), -0.5);
  EXPECT_EQ(r.at(500), 0.0);
  EXPECT_EQ(r.at(1000), 0.5);
}

TEST(ScanAreaError, ZeroErrorIsExact) {
  for (const auto& seq : designed()) {
    const auto grid = scan_area_error(seq, {-0.5, 0.5, 101});
    EXPECT_NEAR(grid.at(50), 1.0, 1e-9) << seq.label();
  }
}

TEST(ScanAreaError, ResonantPulseMatchesAnalyticProfile) {
  const auto grid = scan_area_error(resonant_pi_pulse(), {-0.5, 0.5, 1001});
  for (std::size_t i = 0; i < grid.n1(); ++i) {
    const double eps = grid.axis1.range.at(i);
    EXPECT_NEAR(grid.values[i], std::pow(std::cos(pi * eps / 2.0), 2), 1e-12);
  }
}

TEST(ScanAreaError, FirstOrderTwoPulsesAtTwoPercent) {
  const auto grid = scan_area_error(first_order(2), {-0.02, 0.02, 3});
  EXPECT_LT(1.0 - grid.at(0), 1e-4);
  EXPECT_LT(1.0 - grid.at(2), 1e-4);
}

TEST(ScanAreaError, RejectsNonPositiveArea) {
  EXPECT_THROW(scan_area_error(resonant_pi_pulse(), {-1.0, 0.5, 11}), InvalidArgument);
}

TEST(Scan2d, OriginIsExact) {
  const auto grid = scan_2d(first_order(3), {-1.0, 1.0, 21}, {-0.5, 0.5, 11});
  EXPECT_EQ(grid.n1(), 21u);
  EXPECT_EQ(grid.n2(), 11u);
  EXPECT_NEAR(grid.at(10, 5), 1.0, 1e-9);
  EXPECT_EQ(grid.axis1.label, ErrorAxis::DetuningError);
  EXPECT_EQ(grid.axis2->label, ErrorAxis::CouplingError);
}

TEST(Scan2d, AxisOrderMatchesDirectEvaluation) {
  const auto seq = second_order(3);
  const auto grid = scan_2d(seq, {-0.4, 0.6, 6}, {-0.3, 0.3, 4});
  for (std::size_t j = 0; j < grid.n2(); ++j) {
    for (std::size_t i = 0; i < grid.n1(); ++i) {
      const double u = grid.axis1.range.at(i), v = grid.axis2->range.at(j);
      EXPECT_EQ(grid.at(i, j), transfer_fidelity(seq, 1.0, 1.0 + u, 1.0 + v));
    }
  }
}

TEST(Scan2d, FirstOrderBeatsResonantUnderOffsetModel) {
  const ScanRange u{-1.0, 1.0, 201}, v{-0.99, 1.0, 200};
  const auto f3 = scan_2d(first_order(3), u, v, ZeroDetuningError::Offset);
  const auto res = scan_2d(resonant_pi_pulse(), u, v, ZeroDetuningError::Offset);
  EXPECT_GT(f3.count_above(0.9), res.count_above(0.9));
  // the larger region does not contain the resonant one: a thin band near v = 0 is lost
  std::size_t outside = 0;
  for (std::size_t k = 0; k < res.values.size(); ++k) outside += res.values[k] > 0.9 && !(f3.values[k] > 0.9);
  EXPECT_EQ(res.count_above(0.9), 2079u);
  EXPECT_EQ(f3.count_above(0.9), 6911u);
  EXPECT_EQ(outside, 487u);
}

TEST(Scan2d, DetuningSignReversalIsExactSymmetry) {
  // the profile is even under Δ → −Δ, which maps u to −2 − u; it is not even in u itself
  // because pulse durations stay fixed while the detuning magnitude changes
  const auto seq = second_order(3);
  for (double u = -1.0; u <= 1.0; u += 0.05) {
    for (double v : {-0.5, 0.0, 0.5}) {
      EXPECT_EQ(transfer_fidelity(seq, 1.0, 1.0 + u, 1.0 + v), transfer_fidelity(seq, 1.0, -(1.0 + u), 1.0 + v));
    }
  }
  const auto grid = scan_2d(seq, {-1.0, 1.0, 201}, {-0.5, 0.5, 3});
  EXPECT_NEAR(grid.at(0, 1), 0.16693453552234971, 1e-12);
  EXPECT_NEAR(grid.at(200, 1), 0.99622552098312012, 1e-12);
}

TEST(Scan2d, ValuesStayInUnitInterval) {
  const auto grid = scan_2d(second_order(5), {-1.0, 1.0, 41}, {-0.9, 1.0, 41});
  for (double f : grid.values) {
    EXPECT_GE(f, 0.0);
    EXPECT_LE(f, 1.0 + 1e-12);
  }
}

TEST(Scan2d, RejectsCouplingAtMinusOne) {
  EXPECT_THROW(scan_2d(resonant_pi_pulse(), {-1.0, 1.0, 3}, {-1.0, 1.0, 3}), InvalidArgument);
}

TEST(ExtractCut, OneDimensionalGridIsIdentity) {
  const auto grid = scan_area_error(first_order(2), {-0.2, 0.2, 21});
  const auto cut = extract_cut(grid, CutAlong::Axis1, 0.0);
  EXPECT_EQ(cut.values, grid.values);
  EXPECT_EQ(cut.axis1, grid.axis1);
  EXPECT_THROW(extract_cut(grid, CutAlong::Axis2, 0.0), InvalidArgument);
}

TEST(ExtractCut, ZeroCouplingCutMatchesDetuningScan) {
  const auto seq = first_order(3);
  const ScanRange u{-1.0, 1.0, 41};
  const auto grid = scan_2d(seq, u, {-0.5, 0.5, 11});
  const auto cut = extract_cut(grid, CutAlong::Axis1, 0.0);
  const auto direct = scan_detuning_error(seq, u);
  ASSERT_EQ(cut.values.size(), direct.values.size());
  for (std::size_t i = 0; i < cut.values.size(); ++i) EXPECT_NEAR(cut.values[i], direct.values[i], 1e-12);
  EXPECT_EQ(*cut.fixed_coordinate, 0.0);
  EXPECT_EQ(*cut.snap_distance, 0.0);
  EXPECT_EQ(cut.axis1.label, ErrorAxis::DetuningError);
}

TEST(ExtractCut, SnapsToNearestRow) {
  const auto seq = first_order(2);
  const auto grid = scan_2d(seq, {-1.0, 1.0, 5}, {-0.5, 0.5, 3});
  const auto cut = extract_cut(grid, CutAlong::Axis1, 0.2);
  EXPECT_EQ(*cut.fixed_coordinate, 0.0);
  EXPECT_NEAR(*cut.snap_distance, 0.2, 1e-15);
  for (std::size_t i = 0; i < 5; ++i) EXPECT_EQ(cut.values[i], grid.at(i, 1));

  const auto vertical = extract_cut(grid, CutAlong::Axis2, 0.6);
  EXPECT_EQ(*vertical.fixed_coordinate, 0.5);
  EXPECT_EQ(vertical.axis1.label, ErrorAxis::CouplingError);
  for (std::size_t j = 0; j < 3; ++j) EXPECT_EQ(vertical.values[j], grid.at(3, j));
}

TEST(ExtractCut, RejectsOutOfRange) {
  const auto grid = scan_2d(resonant_pi_pulse(), {-1.0, 1.0, 5}, {-0.5, 0.5, 3});
  EXPECT_THROW(extract_cut(grid, CutAlong::Axis1, 0.7), InvalidArgument);
  EXPECT_THROW(extract_cut(grid, CutAlong::Axis2, -1.5), InvalidArgument);
}

TEST(MonteCarlo, ZeroSigmaMatchesDeterministicScan) {
  const ScanRange r{-0.3, 0.3, 61};
  for (const auto& seq : {first_order(2), second_order(3)}) {
    const auto curve = monte_carlo_infidelity(seq, r, 0.0, 5, 99);
    const auto scan = scan_area_error(seq, r);
    for (std::size_t i = 0; i < scan.values.size(); ++i) {
      EXPECT_NEAR(curve.mean_infidelity[i], 1.0 - scan.values[i], 1e-12);
    }
  }
}

TEST(MonteCarlo, SameSeedIsBitIdenticalAcrossThreadCounts) {
  const auto seq = first_order(3);
  const ScanRange r{-0.2, 0.2, 41};
  ::setenv("DMCP_THREADS", "1", 1);
  const auto serial = monte_carlo_infidelity(seq, r, 0.1, 50, 7);
  ::setenv("DMCP_THREADS", "8", 1);
  const auto threaded = monte_carlo_infidelity(seq, r, 0.1, 50, 7);
  ::unsetenv("DMCP_THREADS");
  const auto again = monte_carlo_infidelity(seq, r, 0.1, 50, 7);
  EXPECT_EQ(serial.mean_infidelity, threaded.mean_infidelity);
  EXPECT_EQ(serial.mean_infidelity, again.mean_infidelity);
  const auto other = monte_carlo_infidelity(seq, r, 0.1, 50, 8);
  EXPECT_NE(serial.mean_infidelity, other.mean_infidelity);
}

TEST(MonteCarlo, StaysInUnitInterval) {
  const auto curve = monte_carlo_infidelity(second_order(3), {-0.5, 0.5, 21}, 0.5, 20, 1);
  for (double v : curve.mean_infidelity) {
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 1.0);
  }
}

TEST(MonteCarlo, RejectsBadArguments) {
  const auto seq = first_order(2);
  EXPECT_THROW(monte_carlo_infidelity(seq, {-0.2, 0.2, 5}, -0.1, 10, 1), InvalidArgument);
  EXPECT_THROW(monte_carlo_infidelity(seq, {-0.2, 0.2, 5}, 0.1, 0, 1), InvalidArgument);
}

TEST(MonteCarlo, FrozenRegression) {
  // values produced by this implementation with seed 20170101; guards the RNG stream layout
  const auto curve = monte_carlo_infidelity(first_order(2), {-0.2, 0.2, 5}, 0.1, 100, 20170101);
  const std::vector<double> frozen = {0.029555593727840179, 0.018634600015336927, 0.019525367406033188,
                                     0.030276767946008046, 0.053228465085031901};
  ASSERT_EQ(curve.mean_infidelity.size(), frozen.size());
  for (std::size_t i = 0; i < frozen.size(); ++i) EXPECT_NEAR(curve.mean_infidelity[i], frozen[i], 1e-15);
}

TEST(ThresholdWidth, ResonantPulseMatchesAnalyticInverse) {
  const auto w = threshold_width(scan_area_error(resonant_pi_pulse(), {-0.5, 0.5, 1001}), 1e-4);
  EXPECT_NEAR(w.width, 2.0 * std::asin(1e-2) / pi, 2e-4);
  EXPECT_TRUE(w.within_at_zero);
  EXPECT_FALSE(w.clipped_by_range);
}

TEST(ThresholdWidth, CompositeSequencesAndOrdering) {
  const ScanRange r{-0.5, 0.5, 1001};
  const double resonant = threshold_width(scan_area_error(resonant_pi_pulse(), r), 1e-4).width;
  const double f2 = threshold_width(scan_area_error(first_order(2), r), 1e-4).width;
  const double s3 = threshold_width(scan_area_error(second_order(3), r), 1e-4).width;
  EXPECT_GE(f2, 0.02);
  EXPECT_GE(s3, 0.10);
  EXPECT_LT(resonant, f2);
  EXPECT_LT(f2, s3);
}

TEST(ThresholdWidth, Flags) {
  const std::vector<double> eps{-0.2, -0.1, 0.0, 0.1, 0.2};
  const auto bad = threshold_width(eps, std::vector<double>{0.5, 0.5, 0.5, 0.5, 0.5}, 1e-4);
  EXPECT_FALSE(bad.within_at_zero);
  EXPECT_EQ(bad.width, 0.0);
  const auto flat = threshold_width(eps, std::vector<double>(5, 0.0), 1e-4);
  EXPECT_TRUE(flat.clipped_by_range);
  EXPECT_EQ(flat.width, 0.2);
  // crossing halfway between samples on the narrower side
  const auto lin = threshold_width(eps, std::vector<double>{1.0, 2e-4, 0.0, 0.0, 1.0}, 1e-4);
  EXPECT_NEAR(lin.width, 0.05, 1e-15);
  EXPECT_THROW(threshold_width(std::vector<double>{0.1, 0.2}, std::vector<double>{0.0, 0.0}, 1e-4), InvalidArgument);
  EXPECT_THROW(threshold_width(std::vector<double>{-0.2, -0.1, 0.1, 0.2}, std::vector<double>(4, 0.0), 1e-4),
               InvalidArgument);
}

TEST(RobustnessProperties, FlatAtZeroError) {
  for (const auto& seq : designed()) {
    const double h = 1e-4;
    const double slope = (transfer_fidelity(seq, 1.0 + h) - transfer_fidelity(seq, 1.0 - h)) / (2.0 * h);
    EXPECT_NEAR(transfer_fidelity(seq, 1.0), 1.0, 1e-9) << seq.label();
    EXPECT_NEAR(slope, 0.0, 1e-6) << seq.label();
  }
}
