#pragma once

// Node families used by the coding scheme and their barycentric weights.
//
// Nodes are always stored ascending. The textbook Chebyshev formulas
// enumerate points in descending order; here the alternating sign of a
// weight is attached to the stored position, which keeps the alternation
// intact and only flips the common factor.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "bacc/error.hpp"

namespace bacc {

enum class NodeKind { ChebyshevFirst, ChebyshevSecond, Equidistant, Custom };

constexpr std::string_view to_string(NodeKind kind) noexcept {
  switch (kind) {
    case NodeKind::ChebyshevFirst: return "chebyshev-first";
    case NodeKind::ChebyshevSecond: return "chebyshev-second";
    case NodeKind::Equidistant: return "equidistant";
    case NodeKind::Custom: return "custom";
  }
  return "unknown";
}

/// Relative spacing below which two nodes count as duplicates.
inline constexpr double kDuplicateTolerance = 1e-12;

class NodeSet {
 public:
  /// Validates and sorts `points`. Throws degenerate_nodes when two points
  /// are closer than 1e-12 * (b - a), invalid_interval when a point lies
  /// outside [a, b] or a >= b.
  static NodeSet custom(std::vector<double> points, double a, double b) {
    return NodeSet(std::move(points), a, b, NodeKind::Custom);
  }

  /// Interval defaults to the hull of the points.
  static NodeSet custom(std::vector<double> points) {
    require(!points.empty(), errc::too_few_nodes, "node set is empty");
    auto [lo, hi] = std::minmax_element(points.begin(), points.end());
    double a = *lo;
    double b = *hi;
    if (a == b) b = a + 1.0;  // single node: any nondegenerate interval
    return NodeSet(std::move(points), a, b, NodeKind::Custom);
  }

  [[nodiscard]] std::span<const double> points() const noexcept { return points_; }
  [[nodiscard]] std::size_t size() const noexcept { return points_.size(); }
  [[nodiscard]] double operator[](std::size_t i) const { return points_[i]; }
  [[nodiscard]] double lower() const noexcept { return a_; }
  [[nodiscard]] double upper() const noexcept { return b_; }
  [[nodiscard]] NodeKind kind() const noexcept { return kind_; }

  /// Sub-family made of the listed stored positions (kept in ascending order).
  [[nodiscard]] NodeSet subset(std::span<const std::size_t> positions) const {
    std::vector<double> pts;
    pts.reserve(positions.size());
    for (std::size_t p : positions) {
      require(p < points_.size(), errc::index_out_of_range, "subset position out of range");
      pts.push_back(points_[p]);
    }
    return NodeSet(std::move(pts), a_, b_, NodeKind::Custom);
  }

 private:
  friend NodeSet chebyshev_first(std::size_t);
  friend NodeSet chebyshev_second(std::size_t);
  friend NodeSet equidistant(std::size_t, double, double);

  NodeSet(std::vector<double> points, double a, double b, NodeKind kind)
      : points_(std::move(points)), a_(a), b_(b), kind_(kind) {
    require(std::isfinite(a) && std::isfinite(b) && a < b, errc::invalid_interval,
            "interval must satisfy a < b");
    require(!points_.empty(), errc::too_few_nodes, "node set is empty");
    std::sort(points_.begin(), points_.end());
    const double tol = kDuplicateTolerance * (b - a);
    for (std::size_t i = 0; i < points_.size(); ++i) {
      require(std::isfinite(points_[i]), errc::invalid_input, "non-finite node");
      require(points_[i] >= a && points_[i] <= b, errc::invalid_interval,
              "node outside its interval");
      if (i > 0 && points_[i] - points_[i - 1] <= tol)
        throw error(errc::degenerate_nodes,
                    "nodes " + std::to_string(i - 1) + " and " + std::to_string(i) + " coincide");
    }
  }

  std::vector<double> points_;
  double a_;
  double b_;
  NodeKind kind_;
};

/// K points cos((2j+1)pi/2K), ascending. Evaluated as sin of the
/// complementary angle so the set is exactly symmetric about zero.
inline NodeSet chebyshev_first(std::size_t K) {
  require(K >= 1, errc::invalid_parameter, "chebyshev_first needs K >= 1");
  std::vector<double> pts(K);
  const double k = static_cast<double>(K);
  for (std::size_t p = 0; p < K; ++p) {
    const double m = 2.0 * static_cast<double>(p) + 1.0 - k;
    pts[p] = std::sin(std::numbers::pi * m / (2.0 * k));
  }
  return NodeSet(std::move(pts), -1.0, 1.0, NodeKind::ChebyshevFirst);
}

/// Abscissa of worker `i` among N+1 workers: cos(i*pi/N), descending in i.
inline double chebyshev_second_point(std::size_t i, std::size_t N) {
  const double n = static_cast<double>(N);
  return std::sin(std::numbers::pi * (n - 2.0 * static_cast<double>(i)) / (2.0 * n));
}

/// N+1 points cos(i*pi/N), ascending.
inline NodeSet chebyshev_second(std::size_t N) {
  require(N >= 1, errc::invalid_parameter, "chebyshev_second needs N >= 1");
  std::vector<double> pts(N + 1);
  for (std::size_t p = 0; p <= N; ++p) pts[p] = chebyshev_second_point(N - p, N);
  return NodeSet(std::move(pts), -1.0, 1.0, NodeKind::ChebyshevSecond);
}

/// n+1 evenly spaced points from a to b inclusive.
inline NodeSet equidistant(std::size_t n, double a, double b) {
  require(n >= 1, errc::invalid_parameter, "equidistant needs n >= 1");
  require(std::isfinite(a) && std::isfinite(b) && a < b, errc::invalid_interval,
          "equidistant needs a < b");
  std::vector<double> pts(n + 1);
  const double span = b - a;
  const double nn = static_cast<double>(n);
  for (std::size_t i = 0; i <= n; ++i) {
    // Mirror the upper half so the grid is symmetric within its interval.
    const double ii = static_cast<double>(i);
    pts[i] = 2 * i <= n ? a + span * ii / nn : b - span * (nn - ii) / nn;
  }
  pts.back() = b;
  return NodeSet(std::move(pts), a, b, NodeKind::Equidistant);
}

/// Barycentric weights, one per node, defined up to a common nonzero factor.
struct WeightVector {
  std::vector<double> weights;

  [[nodiscard]] std::size_t size() const noexcept { return weights.size(); }
  [[nodiscard]] double operator[](std::size_t i) const { return weights[i]; }
};

namespace detail {

inline void normalize_max_abs(std::vector<double>& w) {
  double m = 0.0;
  for (double v : w) m = std::max(m, std::abs(v));
  if (m > 0.0)
    for (double& v : w) v /= m;
}

}  // namespace detail

/// w_i = 1 / prod_{k != i} (x_i - x_k), normalized so max |w_i| = 1.
///
/// Every factor is divided by a quarter of the node span (the capacity of
/// the interval) as it is multiplied in, which keeps the running product
/// near unity for well-distributed nodes and postpones overflow for
/// equidistant ones.
inline WeightVector weights_general(const NodeSet& nodes) {
  const auto x = nodes.points();
  const std::size_t n = x.size();
  std::vector<double> w(n, 1.0);
  if (n == 1) return {std::move(w)};
  const double span = x.back() - x.front();
  const double scale = span / 4.0;
  const double tol = kDuplicateTolerance * (nodes.upper() - nodes.lower());
  for (std::size_t i = 0; i < n; ++i) {
    double prod = 1.0;
    for (std::size_t k = 0; k < n; ++k) {
      if (k == i) continue;
      const double diff = x[i] - x[k];
      if (std::abs(diff) <= tol) throw error(errc::degenerate_nodes, "duplicate nodes");
      prod *= diff / scale;
    }
    w[i] = 1.0 / prod;
  }
  detail::normalize_max_abs(w);
  return {std::move(w)};
}

/// Closed-form weights for n+1 nodes of a known family, sign by ascending
/// stored position:
///   ChebyshevFirst:  (-1)^p sin((2j+1)pi/(2n+2)), j = n - p
///   ChebyshevSecond: (-1)^p delta_p, delta = 1/2 at both ends, 1 elsewhere
///   Equidistant:     (-1)^p binom(n, p), scaled by the central binomial
inline WeightVector weights_explicit(NodeKind kind, std::size_t n) {
  std::vector<double> w(n + 1);
  auto sign = [](std::size_t p) { return p % 2 == 0 ? 1.0 : -1.0; };
  switch (kind) {
    case NodeKind::ChebyshevFirst: {
      const double denom = 2.0 * static_cast<double>(n) + 2.0;
      for (std::size_t p = 0; p <= n; ++p) {
        const double j = static_cast<double>(n - p);
        w[p] = sign(p) * std::sin((2.0 * j + 1.0) * std::numbers::pi / denom);
      }
      return {std::move(w)};
    }
    case NodeKind::ChebyshevSecond: {
      for (std::size_t p = 0; p <= n; ++p)
        w[p] = sign(p) * ((p == 0 || p == n) ? 0.5 : 1.0);
      return {std::move(w)};
    }
    case NodeKind::Equidistant: {
      if (n <= 50) {
        // Exact in double up to n = 50.
        double b = 1.0;
        for (std::size_t p = 0; p <= n; ++p) {
          w[p] = sign(p) * b;
          b = b * static_cast<double>(n - p) / static_cast<double>(p + 1);
        }
        detail::normalize_max_abs(w);
        return {std::move(w)};
      }
      // log binom(n, p) - log binom(n, n/2) stays representable for any n.
      const double nn = static_cast<double>(n);
      const double half = std::floor(nn / 2.0);
      const double log_center =
          std::lgamma(nn + 1.0) - std::lgamma(half + 1.0) - std::lgamma(nn - half + 1.0);
      for (std::size_t p = 0; p <= n; ++p) {
        const double pp = static_cast<double>(p);
        const double log_b =
            std::lgamma(nn + 1.0) - std::lgamma(pp + 1.0) - std::lgamma(nn - pp + 1.0);
        w[p] = sign(p) * std::exp(log_b - log_center);
      }
      return {std::move(w)};
    }
    case NodeKind::Custom:
      break;
  }
  throw error(errc::unsupported_kind, "no closed-form weights for custom nodes");
}

}  // namespace bacc
