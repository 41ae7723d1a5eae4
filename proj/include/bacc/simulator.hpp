#pragma once

// Master-worker straggler simulation and the experiment harness: random
// polynomial workloads, x sin x workloads, and paired node-family runs.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <vector>

#include "bacc/diagnostics.hpp"
#include "bacc/error.hpp"
#include "bacc/functions.hpp"
#include "bacc/parallel.hpp"
#include "bacc/pattern.hpp"
#include "bacc/pointsets.hpp"
#include "bacc/protocol.hpp"
#include "bacc/rng.hpp"

namespace bacc {

/// Uniform draw without replacement (partial Fisher-Yates over 0..N), or the
/// consecutive-gap pattern. With a fixed stream, the s-straggler set is a
/// prefix of the (s+1)-straggler set.
inline StragglerPattern sample_stragglers(std::size_t N, std::size_t s, const StragglerModel& model,
                                          CounterStream& rng) {
  require(s <= N, errc::invalid_parameter, "s must not exceed N");
  if (const auto* w = std::get_if<WorstCaseConsecutive>(&model)) return worst_case_pattern(N, s, w->kbar);
  require(std::holds_alternative<UniformRandom>(model), errc::invalid_parameter,
          "explicit patterns are not sampled");
  std::vector<std::size_t> perm(N + 1);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  for (std::size_t i = 0; i < s; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.below(N + 1 - i));
    std::swap(perm[i], perm[j]);
  }
  perm.resize(s);
  return StragglerPattern(N, std::move(perm), model);
}

inline StragglerPattern sample_stragglers(std::size_t N, std::size_t s, const StragglerModel& model) {
  CounterStream rng(std::holds_alternative<UniformRandom>(model) ? std::get<UniformRandom>(model).seed : 0,
                    {});
  return sample_stragglers(N, s, model, rng);
}

template <Sample V>
struct ExecutionResult {
  DecodeInput<V> input;
  /// Non-straggling workers whose result was not finite.
  std::vector<std::size_t> failed;
};

/// Applies f to every non-straggling share; non-finite results are recorded
/// as failures and left out of the survivors.
template <Sample V>
ExecutionResult<V> execute_workers(std::span<const CodedShare<V>> shares, const FunctionSpec& f,
                                   const StragglerPattern& pattern,
                                   WorkerGrid grid = WorkerGrid::ChebyshevSecond) {
  validate(f);
  require(shares.size() == pattern.N() + 1, errc::shape_mismatch, "need one share per worker");
  const auto alive = pattern.survivors();
  std::vector<std::optional<V>> slots(alive.size());
  parallel_for(alive.size(), [&](std::size_t k) {
    const auto& share = shares[alive[k]];
    require(share.worker == alive[k], errc::invalid_parameter, "shares must be in worker order");
    V out = apply(f, share.payload);
    if (sample_traits<V>::all_finite(out)) slots[k] = std::move(out);
  });
  ExecutionResult<V> result;
  result.input.N = pattern.N();
  result.input.grid = grid;
  for (std::size_t k = 0; k < alive.size(); ++k) {
    if (slots[k]) {
      result.input.survivors.push_back(alive[k]);
      result.input.results.push_back(std::move(*slots[k]));
    } else {
      result.failed.push_back(alive[k]);
    }
  }
  return result;
}

template <Sample V>
ExecutionResult<V> execute_workers(const std::vector<CodedShare<V>>& shares, const FunctionSpec& f,
                                   const StragglerPattern& pattern,
                                   WorkerGrid grid = WorkerGrid::ChebyshevSecond) {
  return execute_workers(std::span<const CodedShare<V>>(shares), f, pattern, grid);
}

inline constexpr double kRelativeErrorFloor = 1e-12;

/// Mean over outputs and entries of |approx - exact| / (|exact| + 1e-12).
inline double relative_error(std::span<const double> approx, std::span<const double> exact) {
  require(approx.size() == exact.size() && !exact.empty(), errc::shape_mismatch,
          "approx and exact must align");
  double sum = 0.0;
  for (std::size_t k = 0; k < exact.size(); ++k)
    sum += std::abs(approx[k] - exact[k]) / (std::abs(exact[k]) + kRelativeErrorFloor);
  return sum / static_cast<double>(exact.size());
}

inline double relative_error(std::span<const Matrix> approx, std::span<const Matrix> exact) {
  require(approx.size() == exact.size() && !exact.empty(), errc::shape_mismatch,
          "approx and exact must align");
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t k = 0; k < exact.size(); ++k) {
    require(sample_traits<Matrix>::same_shape(approx[k], exact[k]), errc::shape_mismatch,
            "approx and exact must align");
    sum += ((approx[k] - exact[k]).array().abs() / (exact[k].array().abs() + kRelativeErrorFloor)).sum();
    count += static_cast<std::size_t>(exact[k].size());
  }
  return sum / static_cast<double>(count);
}

/// Encoding and worker points: Chebyshev first/second kind, or both
/// equidistant on [-1, 1].
enum class NodeFamily { ChebyshevPair, Equidistant };

constexpr std::string_view to_string(NodeFamily f) noexcept {
  return f == NodeFamily::ChebyshevPair ? "chebyshev" : "equidistant";
}

enum class StragglerDraw { Uniform, Consecutive };

struct ExperimentConfig {
  std::size_t N = 500;
  std::size_t K = 20;
  /// Degree of the random polynomials; ignored when `function` is set.
  std::size_t deg = 25;
  std::vector<std::size_t> s_values{0};
  std::size_t trials_functions = 20;
  std::size_t trials_stragglers = 100;
  double coef_lo = -10.0;
  double coef_hi = 10.0;
  double input_lo = -1.0;
  double input_hi = 1.0;
  NodeFamily family = NodeFamily::ChebyshevPair;
  StragglerDraw draw = StragglerDraw::Uniform;
  /// Fixed worker function; random polynomials when empty.
  std::optional<FunctionSpec> function;
  std::uint64_t seed = 42;
};

struct ErrorStats {
  std::size_t s = 0;
  double mean = 0.0;
  double min = 0.0;
  double max = 0.0;
  std::size_t n_trials = 0;
  std::size_t worker_failures = 0;
  /// Mean over straggler draws, one entry per function.
  std::vector<double> per_function_mean;
};

inline void validate(const ExperimentConfig& c) {
  require(c.N >= 1 && c.K >= 1, errc::invalid_parameter, "N and K must be positive");
  require(c.trials_functions >= 1 && c.trials_stragglers >= 1, errc::invalid_parameter,
          "trial counts must be positive");
  require(!c.s_values.empty(), errc::invalid_parameter, "empty s range");
  for (std::size_t s : c.s_values) require(s <= c.N, errc::invalid_parameter, "s must not exceed N");
  require(c.coef_lo <= c.coef_hi && c.input_lo <= c.input_hi, errc::invalid_parameter,
          "ranges must be ordered");
  if (c.function) validate(*c.function);
}

namespace detail {

// Substream tags.
inline constexpr std::uint64_t kFunctionStream = 1;
inline constexpr std::uint64_t kStragglerStream = 2;

inline NodeSet encoding_nodes(NodeFamily family, std::size_t K) {
  if (family == NodeFamily::ChebyshevPair) return chebyshev_first(K);
  if (K == 1) return NodeSet::custom({0.0}, -1.0, 1.0);
  return equidistant(K - 1, -1.0, 1.0);
}

inline WorkerGrid worker_grid(NodeFamily family) {
  return family == NodeFamily::ChebyshevPair ? WorkerGrid::ChebyshevSecond : WorkerGrid::Equidistant;
}

}  // namespace detail

/// Every (function, straggler draw, s) trial of the sweep. Function draws
/// are shared across s; straggler draw t of function f uses the substream
/// (seed, f, t) for every s and every node family.
inline std::vector<ErrorStats> run_poly_experiment(const ExperimentConfig& config) {
  validate(config);
  const std::size_t F = config.trials_functions;
  const std::size_t T = config.trials_stragglers;
  const std::size_t S = config.s_values.size();
  const NodeSet alphas = detail::encoding_nodes(config.family, config.K);
  const WorkerGrid grid = detail::worker_grid(config.family);

  // errors[f][si * T + t]
  std::vector<std::vector<double>> errors(F, std::vector<double>(S * T));
  std::vector<std::size_t> failures(F, 0);

  parallel_for(F, [&](std::size_t f) {
    CounterStream draw(config.seed, {detail::kFunctionStream, f});
    FunctionSpec spec;
    if (config.function) {
      spec = *config.function;
    } else {
      Polynomial p;
      p.coefficients.resize(config.deg + 1);
      for (double& c : p.coefficients) c = draw.uniform(config.coef_lo, config.coef_hi);
      spec = {p, Application::Scalar};
    }
    std::vector<double> inputs(config.K);
    for (double& x : inputs) x = draw.uniform(config.input_lo, config.input_hi);
    std::vector<double> exact(config.K);
    for (std::size_t k = 0; k < config.K; ++k) exact[k] = apply(spec, inputs[k]);

    const Encoder<double> encoder(inputs, alphas);
    const auto shares = encode_shares(encoder, config.N, grid);
    std::vector<double> all_results(config.N + 1);
    std::vector<bool> ok(config.N + 1);
    for (std::size_t i = 0; i <= config.N; ++i) {
      all_results[i] = apply(spec, shares[i].payload);
      ok[i] = std::isfinite(all_results[i]);
    }
    failures[f] = static_cast<std::size_t>(std::count(ok.begin(), ok.end(), false));

    for (std::size_t t = 0; t < T; ++t) {
      for (std::size_t si = 0; si < S; ++si) {
        const std::size_t s = config.s_values[si];
        CounterStream rng(config.seed, {detail::kStragglerStream, f, t});
        StragglerModel model = UniformRandom{config.seed};
        if (config.draw == StragglerDraw::Consecutive) {
          require(s < config.N, errc::invalid_parameter, "consecutive gap needs s < N");
          model = WorstCaseConsecutive{s == 0 ? 0 : static_cast<std::size_t>(rng.below(config.N - s))};
        }
        const auto pattern = sample_stragglers(config.N, s, model, rng);
        DecodeInput<double> input;
        input.N = config.N;
        input.grid = grid;
        for (std::size_t i : pattern.survivors()) {
          if (!ok[i]) continue;
          input.survivors.push_back(i);
          input.results.push_back(all_results[i]);
        }
        double err = std::numeric_limits<double>::infinity();
        if (!input.survivors.empty()) err = relative_error(decode(input, alphas), exact);
        errors[f][si * T + t] = err;
      }
    }
  });

  std::vector<ErrorStats> out(S);
  for (std::size_t si = 0; si < S; ++si) {
    ErrorStats& st = out[si];
    st.s = config.s_values[si];
    st.n_trials = F * T;
    st.min = std::numeric_limits<double>::infinity();
    st.max = 0.0;
    double total = 0.0;
    for (std::size_t f = 0; f < F; ++f) {
      double fsum = 0.0;
      for (std::size_t t = 0; t < T; ++t) {
        const double e = errors[f][si * T + t];
        fsum += e;
        st.min = std::min(st.min, e);
        st.max = std::max(st.max, e);
      }
      st.per_function_mean.push_back(fsum / static_cast<double>(T));
      total += fsum;
      st.worker_failures += failures[f];
    }
    st.mean = total / static_cast<double>(F * T);
  }
  return out;
}

struct NodeComparison {
  std::vector<ErrorStats> chebyshev;
  std::vector<ErrorStats> equidistant;
};

/// Same trial streams with the Chebyshev pair and with equidistant points.
inline NodeComparison compare_nodesets(ExperimentConfig config) {
  NodeComparison out;
  config.family = NodeFamily::ChebyshevPair;
  out.chebyshev = run_poly_experiment(config);
  config.family = NodeFamily::Equidistant;
  out.equidistant = run_poly_experiment(config);
  return out;
}

struct CurveConfig {
  std::size_t N = 60;
  std::size_t K = 20;
  std::size_t s = 20;
  double grid_lo = -12.0;
  double grid_hi = 12.0;
  FunctionSpec function{XSinX{}, Application::Scalar};
  /// Straggler draw used for the curve.
  std::uint64_t seed = 42;
};

struct PointwiseCurve {
  std::vector<double> inputs;
  std::vector<double> exact;
  std::vector<double> decoded;
  std::vector<std::size_t> stragglers;
  double max_abs_error = 0.0;
  DerivativeNorms norms;
  /// Error bound for g = f o u; absent when s >= N - 2.
  std::optional<double> bound;
};

/// Inputs X_i = lo + (hi - lo) i / (K - 1) on the Chebyshev encoding
/// points, one uniform straggler draw, decoded value at every input.
inline PointwiseCurve run_nonpoly_curve(const CurveConfig& config) {
  require(config.K >= 2, errc::invalid_parameter, "curve needs K >= 2");
  require(config.s <= config.N, errc::invalid_parameter, "s must not exceed N");
  validate(config.function);
  PointwiseCurve curve;
  for (std::size_t i = 0; i < config.K; ++i)
    curve.inputs.push_back(config.grid_lo + (config.grid_hi - config.grid_lo) * static_cast<double>(i) /
                                                static_cast<double>(config.K - 1));
  for (double x : curve.inputs) curve.exact.push_back(apply(config.function, x));

  const auto encoder = make_encoder(curve.inputs);
  const auto shares = encode_shares(encoder, config.N);
  CounterStream rng(config.seed, {detail::kStragglerStream, 0, 0});
  const auto pattern = sample_stragglers(config.N, config.s, UniformRandom{config.seed}, rng);
  curve.stragglers = pattern.straggling();
  const auto run = execute_workers(shares, config.function, pattern);
  curve.decoded = decode(run.input, encoder.alphas());
  for (std::size_t k = 0; k < config.K; ++k)
    curve.max_abs_error = std::max(curve.max_abs_error, std::abs(curve.decoded[k] - curve.exact[k]));

  curve.norms = derivative_norms([&](double z) { return apply(config.function, encoder(z)); }, -1.0, 1.0);
  if (config.s + 2 < config.N)
    curve.bound = error_bound(config.N, config.s, curve.norms.norm_g1, curve.norms.norm_g2);
  return curve;
}

/// x sin x on uniform inputs, swept over s.
inline std::vector<ErrorStats> run_nonpoly_experiment(ExperimentConfig config) {
  if (!config.function) config.function = FunctionSpec{XSinX{}, Application::Scalar};
  return run_poly_experiment(config);
}

/// Least-squares non-decreasing fit (pool adjacent violators, unit weights).
inline std::vector<double> isotonic_fit(std::span<const double> y) {
  std::vector<double> level;
  std::vector<std::size_t> count;
  for (double v : y) {
    level.push_back(v);
    count.push_back(1);
    while (level.size() > 1 && level[level.size() - 2] > level.back()) {
      const std::size_t n = count.back() + count[count.size() - 2];
      const double merged =
          (level.back() * static_cast<double>(count.back()) +
           level[level.size() - 2] * static_cast<double>(count[count.size() - 2])) /
          static_cast<double>(n);
      level.pop_back();
      count.pop_back();
      level.back() = merged;
      count.back() = n;
    }
  }
  std::vector<double> fit;
  fit.reserve(y.size());
  for (std::size_t b = 0; b < level.size(); ++b) fit.insert(fit.end(), count[b], level[b]);
  return fit;
}

/// Largest |raw - fit| / fit over the sweep.
inline double isotonic_residual(std::span<const double> y) {
  const auto fit = isotonic_fit(y);
  double worst = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i)
    if (fit[i] > 0.0) worst = std::max(worst, std::abs(y[i] - fit[i]) / fit[i]);
  return worst;
}

}  // namespace bacc
