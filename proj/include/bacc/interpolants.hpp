#pragma once

// Lagrange, barycentric polynomial, barycentric rational and Berrut
// interpolants over a NodeSet, for scalar or matrix samples.

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "bacc/error.hpp"
#include "bacc/pointsets.hpp"
#include "bacc/sample.hpp"

namespace bacc {

/// Naive O(n^2) product form, kept as a baseline.
struct LagrangeDirect {};
/// Barycentric form of the interpolating polynomial (general weights).
struct BarycentricPoly {};
/// Barycentric form with caller-supplied nonzero weights.
struct BarycentricRational {
  WeightVector weights;
};
/// Barycentric rational form with weights (-1)^i by ascending position.
struct Berrut {};

using Scheme = std::variant<LagrangeDirect, BarycentricPoly, BarycentricRational, Berrut>;

/// |x - node| <= 1e-13 * max(1, |node|) counts as evaluating at the node.
inline bool coincides(double x, double node) noexcept {
  return std::abs(x - node) <= 1e-13 * std::max(1.0, std::abs(node));
}

/// Position of the node `x` coincides with, if any. Nodes are ascending.
inline std::optional<std::size_t> coincident_node(std::span<const double> nodes, double x) {
  auto it = std::lower_bound(nodes.begin(), nodes.end(), x);
  const auto pos = static_cast<std::size_t>(it - nodes.begin());
  if (pos < nodes.size() && coincides(x, nodes[pos])) return pos;
  if (pos > 0 && coincides(x, nodes[pos - 1])) return pos - 1;
  return std::nullopt;
}

inline std::vector<double> alternating_weights(std::size_t n) {
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) w[i] = i % 2 == 0 ? 1.0 : -1.0;
  return w;
}

/// Weights a barycentric scheme evaluates with; empty for LagrangeDirect.
inline std::vector<double> resolve_weights(const Scheme& scheme, const NodeSet& nodes) {
  return std::visit(
      [&](const auto& s) -> std::vector<double> {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, LagrangeDirect>) {
          return {};
        } else if constexpr (std::is_same_v<S, BarycentricPoly>) {
          return weights_general(nodes).weights;
        } else if constexpr (std::is_same_v<S, BarycentricRational>) {
          require(s.weights.size() == nodes.size(), errc::shape_mismatch,
                  "one weight per node required");
          for (double w : s.weights.weights)
            require(w != 0.0 && std::isfinite(w), errc::invalid_parameter,
                    "barycentric rational weights must be finite and nonzero");
          return s.weights.weights;
        } else {
          return alternating_weights(nodes.size());
        }
      },
      scheme);
}

/// sum_i w_i f_i / (x - x_i)  /  sum_i w_i / (x - x_i), with the exact-node rule.
template <Sample V>
V barycentric_eval(std::span<const double> nodes, std::span<const double> weights,
                   std::span<const V> samples, double x) {
  require(std::isfinite(x), errc::invalid_input, "evaluation point must be finite");
  if (auto hit = coincident_node(nodes, x)) return samples[*hit];
  if (nodes.size() == 1) return samples[0];
  double t = weights[0] / (x - nodes[0]);
  double den = t;
  V num = samples[0] * t;
  for (std::size_t i = 1; i < nodes.size(); ++i) {
    t = weights[i] / (x - nodes[i]);
    den += t;
    num += samples[i] * t;
  }
  return num * (1.0 / den);
}

/// Lagrange cardinal function j at x, product form.
inline double lagrange_basis(std::span<const double> nodes, std::size_t j, double x) {
  double v = 1.0;
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    if (k == j) continue;
    v *= (x - nodes[k]) / (nodes[j] - nodes[k]);
  }
  return v;
}

/// All cardinal basis values at x; O(n) for barycentric schemes.
inline std::vector<double> basis_values(const Scheme& scheme, const NodeSet& nodes,
                                        std::span<const double> resolved_weights, double x) {
  require(std::isfinite(x), errc::invalid_input, "evaluation point must be finite");
  const auto pts = nodes.points();
  const std::size_t n = pts.size();
  std::vector<double> l(n, 0.0);
  if (auto hit = coincident_node(pts, x)) {
    l[*hit] = 1.0;
    return l;
  }
  if (std::holds_alternative<LagrangeDirect>(scheme)) {
    for (std::size_t j = 0; j < n; ++j) l[j] = lagrange_basis(pts, j, x);
    return l;
  }
  double den = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    l[i] = resolved_weights[i] / (x - pts[i]);
    den += l[i];
  }
  for (double& v : l) v /= den;
  return l;
}

inline std::vector<double> basis_values(const Scheme& scheme, const NodeSet& nodes, double x) {
  const auto w = resolve_weights(scheme, nodes);
  return basis_values(scheme, nodes, w, x);
}

/// Cardinal value of basis function i at x.
inline double basis(const Scheme& scheme, const NodeSet& nodes, std::size_t i, double x) {
  require(i < nodes.size(), errc::index_out_of_range, "basis index out of range");
  require(std::isfinite(x), errc::invalid_input, "evaluation point must be finite");
  if (std::holds_alternative<LagrangeDirect>(scheme)) {
    if (auto hit = coincident_node(nodes.points(), x)) return *hit == i ? 1.0 : 0.0;
    return lagrange_basis(nodes.points(), i, x);
  }
  return basis_values(scheme, nodes, x)[i];
}

/// sum_j (-1)^j / (x - x_j): the denominator of Berrut's interpolant with
/// the node polynomial divided out. Never zero off the nodes.
inline double berrut_denominator(const NodeSet& nodes, double x) {
  require(std::isfinite(x), errc::invalid_input, "evaluation point must be finite");
  const auto pts = nodes.points();
  if (coincident_node(pts, x))
    throw error(errc::node_coincidence, "berrut_denominator evaluated at a node");
  double den = 0.0;
  for (std::size_t j = 0; j < pts.size(); ++j) den += (j % 2 == 0 ? 1.0 : -1.0) / (x - pts[j]);
  return den;
}

template <Sample V>
class Interpolant {
 public:
  Interpolant(NodeSet nodes, std::vector<V> samples, Scheme scheme = Berrut{})
      : nodes_(std::move(nodes)), samples_(std::move(samples)), scheme_(std::move(scheme)) {
    require(samples_.size() == nodes_.size(), errc::shape_mismatch,
            "sample count must equal node count");
    for (const auto& s : samples_) {
      require(sample_traits<V>::same_shape(s, samples_.front()), errc::shape_mismatch,
              "samples must share one shape");
      require(sample_traits<V>::all_finite(s), errc::invalid_input, "samples must be finite");
    }
    weights_ = resolve_weights(scheme_, nodes_);
  }

  [[nodiscard]] V operator()(double x) const {
    if (!std::holds_alternative<LagrangeDirect>(scheme_))
      return barycentric_eval<V>(nodes_.points(), weights_, samples_, x);
    require(std::isfinite(x), errc::invalid_input, "evaluation point must be finite");
    const auto pts = nodes_.points();
    if (auto hit = coincident_node(pts, x)) return samples_[*hit];
    V acc = samples_[0] * lagrange_basis(pts, 0, x);
    for (std::size_t j = 1; j < pts.size(); ++j) acc += samples_[j] * lagrange_basis(pts, j, x);
    return acc;
  }

  [[nodiscard]] const NodeSet& nodes() const noexcept { return nodes_; }
  [[nodiscard]] std::span<const V> samples() const noexcept { return samples_; }
  [[nodiscard]] const Scheme& scheme() const noexcept { return scheme_; }
  [[nodiscard]] std::span<const double> weights() const noexcept { return weights_; }

 private:
  NodeSet nodes_;
  std::vector<V> samples_;
  Scheme scheme_;
  std::vector<double> weights_;
};

template <Sample V>
V eval(const Interpolant<V>& interpolant, double x) {
  return interpolant(x);
}

}  // namespace bacc
