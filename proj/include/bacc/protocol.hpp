#pragma once

// Berrut approximated coded computing: the master encodes K inputs into
// N+1 coded shares with a Berrut rational function u(z), workers apply an
// arbitrary f to their share, and the master decodes any subset of the
// results by Berrut interpolation over the responding workers' abscissae,
// read off at the encoding points.
//
// Also the Lagrange coded computing baseline, exact for polynomial f but
// bound to a recovery threshold of (K-1) deg f + 1 results.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "bacc/error.hpp"
#include "bacc/functions.hpp"
#include "bacc/interpolants.hpp"
#include "bacc/pattern.hpp"
#include "bacc/pointsets.hpp"
#include "bacc/sample.hpp"

namespace bacc {

/// Abscissae handed to the workers. Worker i gets the i-th point in
/// descending order.
enum class WorkerGrid { ChebyshevSecond, Equidistant };

inline double worker_abscissa(std::size_t i, std::size_t N, WorkerGrid grid) {
  require(N >= 1, errc::invalid_parameter, "need N >= 1");
  require(i <= N, errc::index_out_of_range, "worker index exceeds N");
  if (grid == WorkerGrid::ChebyshevSecond) return chebyshev_second_point(i, N);
  const double n = static_cast<double>(N);
  return 2 * i <= N ? 1.0 - 2.0 * static_cast<double>(i) / n
                    : -1.0 + 2.0 * static_cast<double>(N - i) / n;
}

/// Data index j sits at the (K-1-j)-th ascending node, i.e. the encoding
/// points are consumed in descending order like cos((2j+1)pi/2K).
inline double encoding_point(const NodeSet& alphas, std::size_t j) {
  require(j < alphas.size(), errc::index_out_of_range, "data index out of range");
  return alphas[alphas.size() - 1 - j];
}

template <Sample V>
class Encoder {
 public:
  Encoder(std::vector<V> data, NodeSet alphas)
      : data_(std::move(data)), u_(make_interpolant(data_, alphas)) {}

  [[nodiscard]] std::size_t K() const noexcept { return data_.size(); }
  [[nodiscard]] const std::vector<V>& data() const noexcept { return data_; }
  [[nodiscard]] const NodeSet& alphas() const noexcept { return u_.nodes(); }
  [[nodiscard]] double alpha(std::size_t j) const { return encoding_point(alphas(), j); }

  /// u(z): the Berrut rational combination of the inputs.
  [[nodiscard]] V operator()(double z) const { return u_(z); }

  /// Coefficients mu_j(z) with u(z) = sum_j mu_j(z) X_j, in data order.
  [[nodiscard]] std::vector<double> coefficients(double z) const {
    const auto ascending = basis_values(Berrut{}, u_.nodes(), u_.weights(), z);
    std::vector<double> mu(K());
    for (std::size_t j = 0; j < K(); ++j) mu[j] = ascending[K() - 1 - j];
    return mu;
  }

 private:
  static Interpolant<V> make_interpolant(const std::vector<V>& data, const NodeSet& alphas) {
    require(!data.empty(), errc::empty_data, "no input data");
    require(alphas.size() == data.size(), errc::shape_mismatch,
            "one encoding point per input required");
    std::vector<V> ascending(data.rbegin(), data.rend());
    return Interpolant<V>(alphas, std::move(ascending), Berrut{});
  }

  std::vector<V> data_;
  Interpolant<V> u_;
};

/// Encoder over first-kind Chebyshev points.
template <Sample V>
Encoder<V> make_encoder(std::vector<V> data) {
  require(!data.empty(), errc::empty_data, "no input data");
  const std::size_t K = data.size();
  return Encoder<V>(std::move(data), chebyshev_first(K));
}

template <Sample V>
Encoder<V> make_encoder(std::vector<V> data, NodeSet alphas) {
  return Encoder<V>(std::move(data), std::move(alphas));
}

template <Sample V>
struct CodedShare {
  std::size_t worker = 0;
  double z = 0.0;
  V payload{};
};

/// Share i carries u(z_i) for i = 0..N.
template <Sample V>
std::vector<CodedShare<V>> encode_shares(const Encoder<V>& encoder, std::size_t N,
                                         WorkerGrid grid = WorkerGrid::ChebyshevSecond) {
  require(N >= 1, errc::invalid_parameter, "need N >= 1");
  std::vector<CodedShare<V>> shares;
  shares.reserve(N + 1);
  for (std::size_t i = 0; i <= N; ++i) {
    const double z = worker_abscissa(i, N, grid);
    shares.push_back({i, z, encoder(z)});
  }
  return shares;
}

template <Sample V>
struct DecodeInput {
  std::vector<std::size_t> survivors;
  std::vector<V> results;
  std::size_t N = 0;
  WorkerGrid grid = WorkerGrid::ChebyshevSecond;
};

/// Berrut interpolant through the responding workers, sorted by abscissa.
template <Sample V>
class SurvivorInterpolant {
 public:
  explicit SurvivorInterpolant(const DecodeInput<V>& input) {
    const std::size_t m = input.survivors.size();
    require(m >= 1, errc::empty_survivors, "no responding workers");
    require(input.results.size() == m, errc::shape_mismatch, "one result per survivor required");
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), std::size_t{0});
    z_.resize(m);
    for (std::size_t k = 0; k < m; ++k) {
      require(input.survivors[k] <= input.N, errc::index_out_of_range, "survivor index exceeds N");
      require(sample_traits<V>::same_shape(input.results[k], input.results[0]),
              errc::shape_mismatch, "worker results must share one shape");
      z_[k] = worker_abscissa(input.survivors[k], input.N, input.grid);
    }
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return z_[a] < z_[b]; });
    std::vector<double> sorted_z(m);
    values_.reserve(m);
    for (std::size_t k = 0; k < m; ++k) {
      sorted_z[k] = z_[order[k]];
      values_.push_back(input.results[order[k]]);
      if (k > 0)
        require(sorted_z[k] > sorted_z[k - 1], errc::invalid_parameter,
                "survivor indices must be distinct");
    }
    z_ = std::move(sorted_z);
    signs_ = alternating_weights(m);
  }

  [[nodiscard]] V operator()(double z) const {
    return barycentric_eval<V>(z_, signs_, values_, z);
  }

  [[nodiscard]] std::span<const double> abscissae() const noexcept { return z_; }

 private:
  std::vector<double> z_;
  std::vector<double> signs_;
  std::vector<V> values_;
};

/// Approximations of f(X_0), ..., f(X_{K-1}) from the survivors' results.
template <Sample V>
std::vector<V> decode(const DecodeInput<V>& input, const NodeSet& alphas) {
  const SurvivorInterpolant<V> r(input);
  std::vector<V> out;
  out.reserve(alphas.size());
  for (std::size_t j = 0; j < alphas.size(); ++j) out.push_back(r(encoding_point(alphas, j)));
  return out;
}

// ---------------------------------------------------------------------------
// Lagrange coded computing baseline.

enum class LccDecoder { Barycentric, Vandermonde };

/// Where the LCC encoding points alpha_k and evaluation points beta_n live.
/// Equidistant: beta = N+1 evenly spaced points on [a, b], alpha = K cell
/// midpoints of the same interval. Chebyshev: first-kind alpha and
/// second-kind beta mapped onto [a, b].
struct LccLayout {
  NodeKind kind = NodeKind::Equidistant;
  double a = -1.0;
  double b = 1.0;
};

struct LccOptions {
  LccLayout layout{};
  LccDecoder decoder = LccDecoder::Barycentric;
};

struct LccResult {
  std::vector<Matrix> outputs;
  std::size_t threshold = 0;
  /// max |w| / min |w| over the decoding nodes' barycentric weights.
  double weight_ratio = 1.0;
  /// 2-norm condition number of the monomial system (Vandermonde decoder).
  std::optional<double> vandermonde_condition;
};

namespace detail {

inline std::vector<double> map_interval(std::span<const double> x, double a, double b) {
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = a + (b - a) * (x[i] + 1.0) / 2.0;
  return out;
}

inline std::pair<NodeSet, NodeSet> lcc_points(const LccLayout& layout, std::size_t K, std::size_t N) {
  require(layout.a < layout.b, errc::invalid_interval, "LCC layout needs a < b");
  const double a = layout.a;
  const double b = layout.b;
  switch (layout.kind) {
    case NodeKind::Equidistant: {
      std::vector<double> alpha(K);
      for (std::size_t k = 0; k < K; ++k)
        alpha[k] = a + (b - a) * (static_cast<double>(k) + 0.5) / static_cast<double>(K);
      return {NodeSet::custom(std::move(alpha), a, b), equidistant(N, a, b)};
    }
    case NodeKind::ChebyshevFirst:
    case NodeKind::ChebyshevSecond:
      return {NodeSet::custom(map_interval(chebyshev_first(K).points(), a, b), a, b),
              NodeSet::custom(map_interval(chebyshev_second(N).points(), a, b), a, b)};
    case NodeKind::Custom:
      break;
  }
  throw error(errc::unsupported_kind, "LCC layout must be equidistant or Chebyshev");
}

}  // namespace detail

/// Encode with the Lagrange polynomial through (alpha_k, X_k), evaluate f at
/// every responding worker, interpolate g(z) = f(u(z)) through all responses
/// and read off g(alpha_k). At least (K-1) deg f + 1 responses are needed
/// for the interpolant to be g.
inline LccResult lcc_roundtrip(const std::vector<Matrix>& data, const FunctionSpec& f,
                               std::size_t N, const StragglerPattern& pattern,
                               const LccOptions& options = {}) {
  require(!data.empty(), errc::empty_data, "no input data");
  require(pattern.N() == N, errc::invalid_parameter, "pattern is for a different N");
  validate(f);
  const std::size_t K = data.size();
  const std::size_t deg = polynomial_degree(f);
  LccResult result;
  result.threshold = (K - 1) * deg + 1;

  const auto survivors = pattern.survivors();
  if (survivors.size() < result.threshold)
    throw error(errc::recovery_threshold,
                "LCC needs " + std::to_string(result.threshold) + " results, got " +
                    std::to_string(survivors.size()));

  auto [alphas, betas] = detail::lcc_points(options.layout, K, N);
  const Interpolant<Matrix> u(alphas, data, BarycentricPoly{});

  const std::size_t T = survivors.size();
  std::vector<double> beta(T);
  std::vector<Matrix> g(T);
  for (std::size_t t = 0; t < T; ++t) {
    beta[t] = betas[survivors[t]];
    g[t] = apply(f, u(beta[t]));
  }
  const NodeSet decode_nodes = NodeSet::custom(beta, options.layout.a, options.layout.b);
  // NodeSet sorts; betas are already ascending in worker order.
  const auto w = weights_general(decode_nodes).weights;
  double wmax = 0.0;
  double wmin = std::numeric_limits<double>::infinity();
  for (double v : w) {
    wmax = std::max(wmax, std::abs(v));
    wmin = std::min(wmin, std::abs(v));
  }
  result.weight_ratio = wmax / wmin;

  const auto alpha = alphas.points();
  if (options.decoder == LccDecoder::Barycentric) {
    const Interpolant<Matrix> r(decode_nodes, g, BarycentricRational{{w}});
    for (double a : alpha) result.outputs.push_back(r(a));
  } else {
    Eigen::MatrixXd V(T, T);
    for (std::size_t i = 0; i < T; ++i) {
      double p = 1.0;
      for (std::size_t j = 0; j < T; ++j) {
        V(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = p;
        p *= beta[i];
      }
    }
    const Eigen::Index rows = g[0].rows();
    const Eigen::Index cols = g[0].cols();
    Eigen::MatrixXd rhs(T, rows * cols);
    for (std::size_t t = 0; t < T; ++t)
      rhs.row(static_cast<Eigen::Index>(t)) = g[t].reshaped<Eigen::RowMajor>().transpose();
    const Eigen::MatrixXd coef = V.partialPivLu().solve(rhs);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(V);
    const auto& sv = svd.singularValues();
    result.vandermonde_condition = sv(0) / sv(sv.size() - 1);
    for (double a : alpha) {
      Eigen::RowVectorXd acc = Eigen::RowVectorXd::Zero(rows * cols);
      for (Eigen::Index k = static_cast<Eigen::Index>(T) - 1; k >= 0; --k) acc = acc * a + coef.row(k);
      Matrix out(rows, cols);
      out.reshaped<Eigen::RowMajor>() = acc.transpose();
      result.outputs.push_back(std::move(out));
    }
  }
  return result;
}

}  // namespace bacc
