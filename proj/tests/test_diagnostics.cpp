#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "bacc/diagnostics.hpp"

namespace {

using bacc::Berrut;
using bacc::NodeSet;
constexpr double kPi2 = std::numbers::pi * std::numbers::pi;

TEST(LebesgueFunction, HandValues) {
  EXPECT_NEAR(bacc::lebesgue_function(Berrut{}, NodeSet::custom({-1, 1}, -1, 1), 0.0), 1.0, 1e-15);
  EXPECT_NEAR(bacc::lebesgue_function(Berrut{}, NodeSet::custom({-1, 0, 1}, -1, 1), 0.5), 1.4, 1e-14);
  EXPECT_EQ(bacc::lebesgue_function(Berrut{}, bacc::chebyshev_second(9), bacc::chebyshev_second(9)[3]), 1.0);
}

TEST(LebesgueConstant, SingleIntervalIsOne) {
  const auto rep = bacc::lebesgue_constant(Berrut{}, NodeSet::custom({-1, 1}, -1, 1));
  EXPECT_NEAR(rep.constant_estimate, 1.0, 1e-14);
  EXPECT_EQ(rep.grid_size, 65u);
}

TEST(LebesgueConstant, BelowBoundForFullChebyshev) {
  const auto rep = bacc::lebesgue_constant(Berrut{}, bacc::chebyshev_second(40));
  EXPECT_LE(rep.constant_estimate, bacc::theoretical_lebesgue_bound(40, 0));
  EXPECT_GT(rep.constant_estimate, 1.0);
}

TEST(LebesgueConstant, WorstPatternBelowBound) {
  const auto nodes = bacc::survivor_nodes(bacc::worst_case_pattern(200, 8, 100));
  const auto rep = bacc::lebesgue_constant(Berrut{}, nodes);
  EXPECT_TRUE(std::isfinite(rep.constant_estimate));
  EXPECT_LE(rep.constant_estimate, bacc::theoretical_lebesgue_bound(200, 8));
}

TEST(LebesgueConstant, GridTooCoarseRejected) {
  EXPECT_THROW(bacc::lebesgue_constant(Berrut{}, bacc::chebyshev_second(4), {9}), bacc::error);
}

TEST(TheoreticalBound, Values) {
  EXPECT_NEAR(bacc::theoretical_lebesgue_bound(100, 0), (3 * kPi2 / 4 + 1) * (1 + kPi2 * std::log(100.0)), 1e-10);
  EXPECT_NEAR(bacc::theoretical_lebesgue_bound(100, 0), 390.29, 0.01);
  // ln(N - s) shrinks as s grows, so monotonicity only holds away from N.
  for (std::size_t s = 0; s < 25; ++s)
    EXPECT_GT(bacc::theoretical_lebesgue_bound(50, s + 1), bacc::theoretical_lebesgue_bound(50, s));
  EXPECT_THROW(bacc::theoretical_lebesgue_bound(10, 8), bacc::error);
}

TEST(WellSpaced, EquidistantAndChebyshev) {
  EXPECT_NEAR(bacc::well_spaced_constants(bacc::equidistant(17, -1, 1)).R_min, 1.0, 1e-12);
  for (std::size_t N : {4, 10, 50, 200}) {
    const auto rep = bacc::well_spaced_constants(bacc::chebyshev_second(N));
    EXPECT_LE(rep.C_min, kPi2 / 2);
    EXPECT_LE(rep.R_min, 3 * kPi2 / 4);
    EXPECT_TRUE(rep.dominated);
  }
  const auto worst = bacc::well_spaced_constants(bacc::survivor_nodes(bacc::worst_case_pattern(100, 3, 40)), 3);
  EXPECT_TRUE(worst.dominated);
  EXPECT_THROW(bacc::well_spaced_constants(NodeSet::custom({0, 1}, 0, 1)), bacc::error);
}

TEST(WorstCasePattern, Survivors) {
  EXPECT_EQ(bacc::worst_case_pattern(5, 2, 1).survivors(), (std::vector<std::size_t>{0, 1, 4, 5}));
  EXPECT_EQ(bacc::worst_case_pattern(9, 3, 0).survivors(), (std::vector<std::size_t>{0, 4, 5, 6, 7, 8, 9}));
  EXPECT_EQ(bacc::worst_case_pattern(4, 0, 3).survivors().size(), 5u);
  EXPECT_THROW(bacc::worst_case_pattern(5, 2, 3), bacc::error);
}

TEST(MeshParams, Values) {
  const auto eq = bacc::mesh_params(bacc::equidistant(8, -1, 1));
  EXPECT_NEAR(eq.h, 0.25, 1e-15);
  EXPECT_NEAR(eq.lambda, 1.0, 1e-12);
  const auto m = bacc::mesh_params(NodeSet::custom({0, 1, 3}, 0, 3));
  EXPECT_EQ(m.h, 2.0);
  EXPECT_EQ(m.lambda, 2.0);
  for (std::size_t s : {1, 4, 9}) {
    const std::size_t N = 120;
    const auto nodes = bacc::survivor_nodes(bacc::worst_case_pattern(N, s, 50));
    EXPECT_LE(bacc::mesh_params(nodes).h,
              2 * std::sin((s + 1.0) * std::numbers::pi / (2.0 * N)) * (1 + 1e-12));
  }
}

TEST(ErrorBound, Values) {
  EXPECT_EQ(bacc::error_bound(60, 20, 0, 0), 0.0);
  const double g1 = 1.5;
  const double g2 = 2.5;
  const double expected = 2 * (1 + 21.0 * 23.0 * kPi2 / 4) * std::sin(21 * std::numbers::pi / 120) * (g2 + g1);
  EXPECT_NEAR(bacc::error_bound(60, 20, g1, g2), expected, 1e-9 * expected);
  // N - s odd drops the first-derivative term.
  EXPECT_NEAR(bacc::error_bound(61, 20, g1, g2),
              2 * (1 + 21.0 * 23.0 * kPi2 / 4) * std::sin(21 * std::numbers::pi / 122) * g2, 1e-9);
  // Monotone in s at fixed parity of N - s.
  for (std::size_t s = 0; s + 5 < 60; ++s)
    EXPECT_LT(bacc::error_bound(60, s, 1, 1), bacc::error_bound(60, s + 2, 1, 1));
}

TEST(DerivativeNorms, Exp) {
  const auto n = bacc::derivative_norms([](double x) { return std::exp(x); }, -1, 1);
  EXPECT_NEAR(n.norm_g1, std::exp(1.0), 1e-5);
  EXPECT_NEAR(n.norm_g2, std::exp(1.0), 1e-4);
}

TEST(InterpolationError, ExpBelowBound) {
  for (auto [N, s] : {std::pair<std::size_t, std::size_t>{30, 2}, {80, 5}}) {
    const auto pattern = bacc::worst_case_pattern(N, s, N / 3);
    const auto nodes = bacc::survivor_nodes(pattern);
    std::vector<double> v;
    for (double x : nodes.points()) v.push_back(std::exp(x));
    const bacc::Interpolant<double> r(nodes, v);
    double err = 0;
    for (int k = 0; k <= 2000; ++k) {
      const double x = -1 + 2.0 * k / 2000;
      err = std::max(err, std::abs(r(x) - std::exp(x)));
    }
    EXPECT_LE(err, bacc::error_bound(N, s, std::exp(1.0), std::exp(1.0)));
  }
}

// Lebesgue constants of worst patterns grow like a + b ln(N - s).
TEST(LebesgueConstant, LogarithmicGrowth) {
  const std::size_t s = 3;
  std::vector<double> lx;
  std::vector<double> lam;
  for (std::size_t N : {40, 80, 160, 320, 640}) {
    const auto nodes = bacc::survivor_nodes(bacc::worst_case_pattern(N, s, (N - s) / 2));
    lam.push_back(bacc::lebesgue_constant(Berrut{}, nodes, {16}).constant_estimate);
    lx.push_back(std::log(static_cast<double>(N - s)));
  }
  const double n = static_cast<double>(lx.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i] / n;
    my += lam[i] / n;
  }
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxy += (lx[i] - mx) * (lam[i] - my);
    sxx += (lx[i] - mx) * (lx[i] - mx);
  }
  const double b = sxy / sxx;
  const double a = my - b * mx;
  for (std::size_t i = 0; i < lx.size(); ++i) EXPECT_LE(lam[i], 1.5 * (a + b * lx[i]));
  // log-log slope well below linear growth
  const double slope = std::log(lam.back() / lam.front()) / (lx.back() - lx.front());
  EXPECT_LT(slope, 1.0);
}

}  // namespace
