#pragma once

// Lebesgue functions and constants, well-spaced-points constants, mesh
// parameters, worst-case straggler patterns and the closed-form bounds of
// the scheme.

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <optional>
#include <vector>

#include "bacc/error.hpp"
#include "bacc/interpolants.hpp"
#include "bacc/pattern.hpp"
#include "bacc/pointsets.hpp"

namespace bacc {

struct LebesgueReport {
  double constant_estimate = 1.0;
  double argmax_x = 0.0;
  std::size_t grid_size = 0;
  std::optional<double> theoretical_bound;
};

struct WellSpacedReport {
  double C_min = 1.0;
  double R_min = 1.0;
  /// Constants (C, R) the measured ones were compared against.
  std::pair<double, double> satisfied_for{0.0, 0.0};
  bool dominated = false;
};

struct MeshParams {
  double h = 0.0;
  double lambda = 0.0;
};

struct DerivativeNorms {
  double norm_g1 = 0.0;
  double norm_g2 = 0.0;
};

/// Resolution of the Lebesgue-constant search: Chebyshev-distributed
/// interior samples per inter-node interval, plus the midpoint.
struct LebesgueGrid {
  std::size_t samples_per_interval = 64;
};

/// sum_i |l_i(x)| for the scheme's cardinal basis.
inline double lebesgue_function(const Scheme& scheme, const NodeSet& nodes,
                                std::span<const double> resolved_weights, double x) {
  const auto pts = nodes.points();
  if (coincident_node(pts, x)) return 1.0;
  if (std::holds_alternative<LagrangeDirect>(scheme)) {
    double sum = 0.0;
    for (std::size_t j = 0; j < pts.size(); ++j) sum += std::abs(lagrange_basis(pts, j, x));
    return sum;
  }
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double t = resolved_weights[i] / (x - pts[i]);
    num += std::abs(t);
    den += t;
  }
  return num / std::abs(den);
}

inline double lebesgue_function(const Scheme& scheme, const NodeSet& nodes, double x) {
  require(std::isfinite(x), errc::invalid_input, "evaluation point must be finite");
  const auto w = resolve_weights(scheme, nodes);
  return lebesgue_function(scheme, nodes, w, x);
}

/// Sample abscissae of the composite grid, ascending, excluding the nodes.
inline std::vector<double> lebesgue_sample_points(const NodeSet& nodes, LebesgueGrid grid = {}) {
  require(grid.samples_per_interval >= 10, errc::invalid_parameter,
          "need at least 10 samples per inter-node interval");
  const auto pts = nodes.points();
  const std::size_t m = grid.samples_per_interval;
  std::vector<double> offsets(m);
  for (std::size_t i = 0; i < m; ++i) {
    // Chebyshev points of the first kind on (-1, 1), ascending.
    offsets[i] = -std::cos((2.0 * static_cast<double>(i) + 1.0) * std::numbers::pi /
                           (2.0 * static_cast<double>(m)));
  }
  std::vector<double> xs;
  if (pts.size() < 2) return xs;
  xs.reserve((pts.size() - 1) * (m + 1));
  for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
    const double mid = 0.5 * (pts[k] + pts[k + 1]);
    const double half = 0.5 * (pts[k + 1] - pts[k]);
    bool mid_done = false;
    for (double o : offsets) {
      if (!mid_done && o >= 0.0) {
        if (o != 0.0) xs.push_back(mid);
        mid_done = true;
      }
      xs.push_back(mid + half * o);
    }
  }
  return xs;
}

/// Max of the Lebesgue function over the composite grid on the node hull.
inline LebesgueReport lebesgue_constant(const Scheme& scheme, const NodeSet& nodes,
                                        LebesgueGrid grid = {}) {
  LebesgueReport report;
  report.argmax_x = nodes[0];
  const auto xs = lebesgue_sample_points(nodes, grid);
  report.grid_size = xs.size();
  const auto w = resolve_weights(scheme, nodes);
  for (double x : xs) {
    const double v = lebesgue_function(scheme, nodes, w, x);
    if (v > report.constant_estimate) {
      report.constant_estimate = v;
      report.argmax_x = x;
    }
  }
  return report;
}

/// ((s+1)(s+3)pi^2/4 + 1) (1 + pi^2 (s+1) ln(N - s)), valid for s < N - 2.
inline double theoretical_lebesgue_bound(std::size_t N, std::size_t s) {
  require(s + 2 < N, errc::out_of_regime, "Lebesgue bound requires s < N - 2");
  const double sp1 = static_cast<double>(s) + 1.0;
  const double pi2 = std::numbers::pi * std::numbers::pi;
  const double R = sp1 * (sp1 + 2.0) * pi2 / 4.0;
  const double C = pi2 * sp1 / 2.0;
  return (R + 1.0) * (1.0 + 2.0 * C * std::log(static_cast<double>(N - s)));
}

/// Constants C and R for which the well-spaced conditions hold when s
/// consecutive second-kind Chebyshev points are missing.
inline std::pair<double, double> well_spaced_theory_constants(std::size_t s) {
  const double sp1 = static_cast<double>(s) + 1.0;
  const double pi2 = std::numbers::pi * std::numbers::pi;
  return {pi2 * sp1 / 2.0, sp1 * (sp1 + 2.0) * pi2 / 4.0};
}

/// Smallest C and R satisfying the three gap-ratio conditions for this node
/// set; exhaustive O(n^2) sweep.
inline WellSpacedReport well_spaced_constants(const NodeSet& nodes, std::size_t s = 0) {
  const auto x = nodes.points();
  require(x.size() >= 3, errc::too_few_nodes, "well-spaced constants need >= 3 nodes");
  const std::size_t n = x.size() - 1;
  WellSpacedReport report;
  for (std::size_t k = 0; k < n; ++k) {
    const double gap = x[k + 1] - x[k];
    for (std::size_t j = 0; j <= k; ++j)
      report.C_min = std::max(report.C_min, gap / (x[k + 1] - x[j]) * static_cast<double>(k + 1 - j));
    for (std::size_t j = k + 1; j <= n; ++j)
      report.C_min = std::max(report.C_min, gap / (x[j] - x[k]) * static_cast<double>(j - k));
  }
  for (std::size_t k = 1; k < n; ++k) {
    const double r = (x[k + 1] - x[k]) / (x[k] - x[k - 1]);
    report.R_min = std::max({report.R_min, r, 1.0 / r});
  }
  report.satisfied_for = well_spaced_theory_constants(s);
  report.dominated =
      report.C_min <= report.satisfied_for.first && report.R_min <= report.satisfied_for.second;
  return report;
}

/// Survivors {0..kbar} U {kbar+s+1..N}: the s missing workers are consecutive.
inline StragglerPattern worst_case_pattern(std::size_t N, std::size_t s, std::size_t kbar) {
  require(s <= N, errc::invalid_parameter, "s must not exceed N");
  std::vector<std::size_t> straggling;
  if (s > 0) {
    require(kbar + s + 1 <= N, errc::index_out_of_range, "kbar must lie in [0, N - s - 1]");
    for (std::size_t i = kbar + 1; i <= kbar + s; ++i) straggling.push_back(i);
  }
  return StragglerPattern(N, std::move(straggling), WorstCaseConsecutive{kbar});
}

/// Abscissae of the responding workers on the second-kind Chebyshev grid.
inline NodeSet survivor_nodes(const StragglerPattern& pattern) {
  const std::size_t N = pattern.N();
  std::vector<double> pts;
  for (std::size_t i : pattern.survivors()) pts.push_back(chebyshev_second_point(i, N));
  require(!pts.empty(), errc::empty_survivors, "no responding workers");
  return NodeSet::custom(std::move(pts), -1.0, 1.0);
}

/// h = max adjacent gap; lambda = max over interior i of the smaller of the
/// available neighbour gap ratios gap_i / gap_{i-1} and gap_i / gap_{i+1}.
inline MeshParams mesh_params(const NodeSet& nodes) {
  const auto x = nodes.points();
  require(x.size() >= 2, errc::too_few_nodes, "mesh parameters need >= 2 nodes");
  const std::size_t n = x.size() - 1;
  MeshParams m;
  for (std::size_t i = 0; i < n; ++i) m.h = std::max(m.h, x[i + 1] - x[i]);
  for (std::size_t i = 1; i < n; ++i) {
    const double gap = x[i + 1] - x[i];
    double r = gap / (x[i] - x[i - 1]);
    if (i + 2 <= n) r = std::min(r, gap / (x[i + 2] - x[i + 1]));
    m.lambda = std::max(m.lambda, r);
  }
  return m;
}

/// Approximation-error bound for Berrut decoding with s stragglers among
/// N+1 workers on [-1, 1]:
///   2 (1+R) sin((s+1)pi/2N) ||g''||               if N - s is odd,
///   2 (1+R) sin((s+1)pi/2N) (||g''|| + ||g'||)    otherwise.
inline double error_bound(std::size_t N, std::size_t s, double norm_g1, double norm_g2) {
  require(s + 2 < N, errc::out_of_regime, "error bound requires s < N - 2");
  require(norm_g1 >= 0.0 && norm_g2 >= 0.0, errc::invalid_parameter, "norms must be >= 0");
  const double R = well_spaced_theory_constants(s).second;
  const double factor = 2.0 * (1.0 + R) *
                        std::sin((static_cast<double>(s) + 1.0) * std::numbers::pi /
                                 (2.0 * static_cast<double>(N)));
  const bool odd = (N - s) % 2 == 1;
  return factor * (odd ? norm_g2 : norm_g2 + norm_g1);
}

/// Sup norms of g' and g'' on [a, b] by central differences on an
/// equispaced grid of `points` samples (one-sided second-order stencils at
/// the ends).
inline DerivativeNorms derivative_norms(const std::function<double(double)>& g, double a,
                                        double b, std::size_t points = 4001) {
  require(points >= 5, errc::invalid_parameter, "need >= 5 grid points");
  require(a < b, errc::invalid_interval, "need a < b");
  const std::size_t m = points - 1;
  const double h = (b - a) / static_cast<double>(m);
  std::vector<double> v(points);
  for (std::size_t i = 0; i <= m; ++i) v[i] = g(a + h * static_cast<double>(i));
  DerivativeNorms out;
  for (std::size_t i = 1; i < m; ++i) {
    out.norm_g1 = std::max(out.norm_g1, std::abs(v[i + 1] - v[i - 1]) / (2.0 * h));
    out.norm_g2 = std::max(out.norm_g2, std::abs(v[i + 1] - 2.0 * v[i] + v[i - 1]) / (h * h));
  }
  const double d1_lo = (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * h);
  const double d1_hi = (3.0 * v[m] - 4.0 * v[m - 1] + v[m - 2]) / (2.0 * h);
  const double d2_lo = (2.0 * v[0] - 5.0 * v[1] + 4.0 * v[2] - v[3]) / (h * h);
  const double d2_hi = (2.0 * v[m] - 5.0 * v[m - 1] + 4.0 * v[m - 2] - v[m - 3]) / (h * h);
  out.norm_g1 = std::max({out.norm_g1, std::abs(d1_lo), std::abs(d1_hi)});
  out.norm_g2 = std::max({out.norm_g2, std::abs(d2_lo), std::abs(d2_hi)});
  return out;
}

}  // namespace bacc
