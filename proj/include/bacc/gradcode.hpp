#pragma once

// Coded gradient computation for a one-hidden-layer network. Minibatches
// are combined with the encoder's basis coefficients, workers return
// per-layer gradients on their coded batch, and the master interpolates
// those gradients back to the encoding points and sums them.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string_view>
#include <vector>

#include "bacc/error.hpp"
#include "bacc/parallel.hpp"
#include "bacc/pointsets.hpp"
#include "bacc/protocol.hpp"
#include "bacc/rng.hpp"
#include "bacc/sample.hpp"
#include "bacc/simulator.hpp"

namespace bacc {

enum class Activation { Sigmoid, Tanh, Relu, Identity };
enum class Loss { Mse, SigmoidCrossEntropy };

/// W1: hidden x inputs, W2: outputs x hidden. No biases.
struct ModelParams {
  Matrix W1;
  Matrix W2;
  Activation activation = Activation::Sigmoid;
};

struct Minibatch {
  Matrix X;
  Matrix Y;
  std::size_t index = 0;
};

/// Linear: labels coded like the features. Classification: |sum mu_j y_j|
/// then each row scaled to unit L1 norm.
enum class LabelCoding { Linear, Classification };

struct CodedBatch {
  std::size_t worker = 0;
  double z = 0.0;
  Matrix X;
  Matrix Y;
  /// mu_j for j = 0..K-1.
  std::vector<double> coefficients;
};

struct GradientSet {
  Matrix dW1;
  Matrix dW2;

  GradientSet operator*(double s) const { return {dW1 * s, dW2 * s}; }
  GradientSet& operator+=(const GradientSet& o) {
    dW1 += o.dW1;
    dW2 += o.dW2;
    return *this;
  }
  GradientSet operator+(const GradientSet& o) const {
    GradientSet r = *this;
    return r += o;
  }
};

template <>
struct sample_traits<GradientSet> {
  static bool all_finite(const GradientSet& g) { return g.dW1.allFinite() && g.dW2.allFinite(); }
  static bool same_shape(const GradientSet& a, const GradientSet& b) {
    return sample_traits<Matrix>::same_shape(a.dW1, b.dW1) && sample_traits<Matrix>::same_shape(a.dW2, b.dW2);
  }
  static GradientSet zero_like(const GradientSet& g) {
    return {sample_traits<Matrix>::zero_like(g.dW1), sample_traits<Matrix>::zero_like(g.dW2)};
  }
};

namespace detail {

inline double activate(Activation a, double x) {
  switch (a) {
    case Activation::Sigmoid: return 1.0 / (1.0 + std::exp(-x));
    case Activation::Tanh: return std::tanh(x);
    case Activation::Relu: return x > 0.0 ? x : 0.0;
    case Activation::Identity: return x;
  }
  return x;
}

// Derivative expressed through the pre-activation.
inline double activate_d1(Activation a, double x) {
  switch (a) {
    case Activation::Sigmoid: {
      const double s = 1.0 / (1.0 + std::exp(-x));
      return s * (1.0 - s);
    }
    case Activation::Tanh: {
      const double t = std::tanh(x);
      return 1.0 - t * t;
    }
    case Activation::Relu: return x > 0.0 ? 1.0 : 0.0;
    case Activation::Identity: return 1.0;
  }
  return 1.0;
}

inline double softplus(double x) { return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x))); }

inline void check_shapes(const ModelParams& p, const Matrix& X, const Matrix& Y) {
  require(p.W1.cols() == X.cols() && p.W2.cols() == p.W1.rows() && p.W2.rows() == Y.cols() &&
              X.rows() == Y.rows(),
          errc::shape_mismatch, "batch and parameter shapes disagree");
}

}  // namespace detail

inline Matrix forward(const ModelParams& p, const Matrix& X) {
  const Matrix H = (X * p.W1.transpose()).unaryExpr([&](double v) { return detail::activate(p.activation, v); });
  return H * p.W2.transpose();
}

/// Summed (not averaged) loss over the rows of X.
inline double loss_value(const ModelParams& p, const Matrix& X, const Matrix& Y, Loss loss) {
  detail::check_shapes(p, X, Y);
  const Matrix out = forward(p, X);
  if (loss == Loss::Mse) return 0.5 * (out - Y).squaredNorm();
  double J = 0.0;
  for (Eigen::Index i = 0; i < out.size(); ++i) J += detail::softplus(out(i)) - Y(i) * out(i);
  return J;
}

/// Backpropagation of the summed loss.
inline GradientSet gradient(const ModelParams& p, const Matrix& X, const Matrix& Y, Loss loss) {
  detail::check_shapes(p, X, Y);
  const Matrix pre = X * p.W1.transpose();
  const Matrix H = pre.unaryExpr([&](double v) { return detail::activate(p.activation, v); });
  const Matrix out = H * p.W2.transpose();
  Matrix d_out = loss == Loss::Mse
                     ? Matrix(out - Y)
                     : Matrix(out.unaryExpr([](double v) { return 1.0 / (1.0 + std::exp(-v)); }) - Y);
  const Matrix d_pre =
      ((d_out * p.W2).array() * pre.unaryExpr([&](double v) { return detail::activate_d1(p.activation, v); }).array())
          .matrix();
  return {d_pre.transpose() * X, d_out.transpose() * H};
}

/// Contiguous equal splits.
inline std::vector<Minibatch> partition_dataset(const Matrix& X, const Matrix& Y, std::size_t K) {
  require(X.rows() == Y.rows(), errc::shape_mismatch, "features and labels disagree in rows");
  const auto n = static_cast<std::size_t>(X.rows());
  require(K >= 1 && n % K == 0 && n > 0, errc::invalid_partition, "K must divide the sample count");
  const auto B = static_cast<Eigen::Index>(n / K);
  std::vector<Minibatch> out;
  for (std::size_t j = 0; j < K; ++j) {
    const auto r0 = static_cast<Eigen::Index>(j) * B;
    out.push_back({X.middleRows(r0, B), Y.middleRows(r0, B), j});
  }
  return out;
}

/// sum_j mu_j Y_j, or its absolute value with rows scaled to unit L1 norm.
inline Matrix code_labels(std::span<const double> mu, const std::vector<Minibatch>& batches, LabelCoding labels) {
  require(mu.size() == batches.size() && !batches.empty(), errc::shape_mismatch, "one coefficient per batch");
  Matrix Y = Matrix::Zero(batches[0].Y.rows(), batches[0].Y.cols());
  for (std::size_t j = 0; j < batches.size(); ++j) Y += mu[j] * batches[j].Y;
  if (labels == LabelCoding::Classification) {
    Y = Y.cwiseAbs();
    for (Eigen::Index i = 0; i < Y.rows(); ++i) {
      const double l1 = Y.row(i).sum();
      if (l1 > 0.0) Y.row(i) /= l1;
    }
  }
  return Y;
}

/// Coded batch r mixes the minibatches with the coefficients mu_j(z_r).
inline std::vector<CodedBatch> encode_batches(const std::vector<Minibatch>& batches, std::size_t N,
                                              LabelCoding labels = LabelCoding::Linear) {
  require(!batches.empty(), errc::empty_data, "no minibatches");
  for (const auto& b : batches)
    require(sample_traits<Matrix>::same_shape(b.X, batches[0].X) &&
                sample_traits<Matrix>::same_shape(b.Y, batches[0].Y),
            errc::shape_mismatch, "minibatches must share one shape");
  std::vector<Matrix> features;
  for (const auto& b : batches) features.push_back(b.X);
  const auto encoder = make_encoder(std::move(features));
  std::vector<CodedBatch> out;
  for (std::size_t r = 0; r <= N; ++r) {
    CodedBatch c;
    c.worker = r;
    c.z = worker_abscissa(r, N, WorkerGrid::ChebyshevSecond);
    c.coefficients = encoder.coefficients(c.z);
    c.X = encoder(c.z);
    c.Y = code_labels(c.coefficients, batches, labels);
    out.push_back(std::move(c));
  }
  return out;
}

/// Gradient of the summed loss on a coded batch; worker_failure when the
/// forward or backward pass goes non-finite.
inline GradientSet worker_gradient(const CodedBatch& coded, const ModelParams& params, Loss loss) {
  GradientSet g = gradient(params, coded.X, coded.Y, loss);
  if (!sample_traits<GradientSet>::all_finite(g))
    throw error(errc::worker_failure, "non-finite gradient on worker " + std::to_string(coded.worker));
  return g;
}

/// Interpolates the survivors' gradients, evaluates at every encoding point
/// and sums: an approximation of sum_j g(X_j).
inline GradientSet decode_gradient(const std::vector<std::size_t>& survivors,
                                   const std::vector<GradientSet>& results, std::size_t N, std::size_t K) {
  DecodeInput<GradientSet> input{survivors, results, N, WorkerGrid::ChebyshevSecond};
  const auto per_batch = decode(input, chebyshev_first(K));
  GradientSet total = per_batch[0];
  for (std::size_t j = 1; j < per_batch.size(); ++j) total += per_batch[j];
  return total;
}

/// W <- W - (eta / dataset_size) grad.
inline ModelParams sgd_step(const ModelParams& params, const GradientSet& grad, double eta,
                            std::size_t dataset_size) {
  require(eta >= 0.0 && dataset_size > 0, errc::invalid_parameter, "need eta >= 0 and a nonempty dataset");
  ModelParams next = params;
  const double scale = eta / static_cast<double>(dataset_size);
  next.W1 -= scale * grad.dW1;
  next.W2 -= scale * grad.dW2;
  return next;
}

enum class TrainScheme { Bacc, Replication, NoRedundancy, Full };

constexpr std::string_view to_string(TrainScheme s) noexcept {
  switch (s) {
    case TrainScheme::Bacc: return "bacc";
    case TrainScheme::Replication: return "replication";
    case TrainScheme::NoRedundancy: return "none";
    case TrainScheme::Full: return "full";
  }
  return "unknown";
}

struct Dataset {
  Matrix X;
  Matrix Y;
};

struct TrainConfig {
  TrainScheme scheme = TrainScheme::Bacc;
  std::size_t N = 5;
  std::size_t K = 4;
  std::size_t s = 0;
  std::size_t epochs = 50;
  double eta = 0.1;
  std::size_t hidden = 16;
  Activation activation = Activation::Sigmoid;
  Loss loss = Loss::Mse;
  LabelCoding labels = LabelCoding::Linear;
  std::uint64_t seed = 7;
};

namespace detail {

inline constexpr std::uint64_t kDataStream = 11;
inline constexpr std::uint64_t kInitStream = 12;
inline constexpr std::uint64_t kEpochStream = 13;

inline Matrix uniform_matrix(Eigen::Index rows, Eigen::Index cols, double lo, double hi, CounterStream& rng) {
  Matrix M(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) M(r, c) = rng.uniform(lo, hi);
  return M;
}

}  // namespace detail

/// Features uniform on [-1, 1]; targets from a fixed random sigmoid teacher
/// plus uniform noise of half-width `noise`. With `one_hot`, targets are the
/// one-hot argmax of the teacher outputs.
inline Dataset make_synthetic(std::uint64_t seed, std::size_t n = 256, std::size_t d = 8,
                              std::size_t outputs = 1, bool one_hot = false, double noise = 0.01) {
  require(n > 0 && d > 0 && outputs > 0, errc::invalid_parameter, "dataset dimensions must be positive");
  CounterStream rng(seed, {detail::kDataStream});
  const auto N = static_cast<Eigen::Index>(n);
  const auto D = static_cast<Eigen::Index>(d);
  const auto C = static_cast<Eigen::Index>(outputs);
  ModelParams teacher{detail::uniform_matrix(16, D, -1.0, 1.0, rng), detail::uniform_matrix(C, 16, -1.0, 1.0, rng),
                      Activation::Sigmoid};
  Dataset data;
  data.X = detail::uniform_matrix(N, D, -1.0, 1.0, rng);
  const Matrix out = forward(teacher, data.X);
  if (one_hot) {
    data.Y = Matrix::Zero(N, C);
    for (Eigen::Index i = 0; i < N; ++i) {
      Eigen::Index k = 0;
      out.row(i).maxCoeff(&k);
      data.Y(i, k) = 1.0;
    }
  } else {
    data.Y = out + detail::uniform_matrix(N, C, -noise, noise, rng);
  }
  return data;
}

inline ModelParams initial_params(const TrainConfig& config, std::size_t d, std::size_t outputs) {
  CounterStream rng(config.seed, {detail::kInitStream});
  const auto H = static_cast<Eigen::Index>(config.hidden);
  return {detail::uniform_matrix(H, static_cast<Eigen::Index>(d), -0.5, 0.5, rng),
          detail::uniform_matrix(static_cast<Eigen::Index>(outputs), H, -0.5, 0.5, rng), config.activation};
}

/// Mean loss over the raw dataset before training and after every epoch.
/// Each epoch is one gradient step over the whole dataset. The straggler
/// set of epoch e comes from the substream (seed, e) whatever the scheme.
inline std::vector<double> train(const TrainConfig& config, const Dataset& data) {
  require(config.K >= 1 && config.N >= 1, errc::invalid_parameter, "need K, N >= 1");
  if (config.scheme == TrainScheme::Replication)
    require(config.s + 1 <= config.N + 1, errc::infeasible_layout,
            "replication needs s + 1 distinct workers per batch");
  require(config.s <= config.N, errc::invalid_parameter, "s must not exceed N");
  require(config.eta > 0.0, errc::invalid_parameter, "eta must be positive");
  const auto batches = partition_dataset(data.X, data.Y, config.K);
  const auto n = static_cast<std::size_t>(data.X.rows());
  std::vector<CodedBatch> coded;
  if (config.scheme == TrainScheme::Bacc) coded = encode_batches(batches, config.N, config.labels);

  ModelParams params = initial_params(config, static_cast<std::size_t>(data.X.cols()),
                                      static_cast<std::size_t>(data.Y.cols()));
  const auto mean_loss = [&] { return loss_value(params, data.X, data.Y, config.loss) / static_cast<double>(n); };
  std::vector<double> trajectory{mean_loss()};

  for (std::size_t e = 0; e < config.epochs; ++e) {
    CounterStream rng(config.seed, {detail::kEpochStream, e});
    const auto pattern = sample_stragglers(config.N, config.s, UniformRandom{config.seed}, rng);
    GradientSet grad;
    switch (config.scheme) {
      case TrainScheme::Full:
      case TrainScheme::Replication:
      case TrainScheme::NoRedundancy: {
        // Batch j is recovered if one of its holders responds. Replication
        // puts batch j on workers (j + t) mod (N + 1) for t = 0..s; no
        // redundancy puts it on worker j mod (N + 1).
        std::vector<char> recovered(config.K, 1);
        for (std::size_t j = 0; j < config.K; ++j) {
          if (config.scheme == TrainScheme::Full) continue;
          if (config.scheme == TrainScheme::NoRedundancy) {
            recovered[j] = !pattern.is_straggling(j % (config.N + 1));
            continue;
          }
          bool any = false;
          for (std::size_t t = 0; t <= config.s; ++t) any = any || !pattern.is_straggling((j + t) % (config.N + 1));
          recovered[j] = any;
        }
        std::vector<std::optional<GradientSet>> slots(config.K);
        parallel_for(config.K, [&](std::size_t j) {
          if (recovered[j]) slots[j] = gradient(params, batches[j].X, batches[j].Y, config.loss);
        });
        grad = {Matrix::Zero(params.W1.rows(), params.W1.cols()), Matrix::Zero(params.W2.rows(), params.W2.cols())};
        for (const auto& g : slots)
          if (g) grad += *g;
        break;
      }
      case TrainScheme::Bacc: {
        const auto alive = pattern.survivors();
        std::vector<std::optional<GradientSet>> slots(alive.size());
        parallel_for(alive.size(), [&](std::size_t k) {
          try {
            slots[k] = worker_gradient(coded[alive[k]], params, config.loss);
          } catch (const error& err) {
            if (err.code() != errc::worker_failure) throw;
          }
        });
        std::vector<std::size_t> survivors;
        std::vector<GradientSet> results;
        for (std::size_t k = 0; k < alive.size(); ++k) {
          if (!slots[k]) continue;
          survivors.push_back(alive[k]);
          results.push_back(std::move(*slots[k]));
        }
        grad = decode_gradient(survivors, results, config.N, config.K);
        break;
      }
    }
    params = sgd_step(params, grad, config.eta, n);
    trajectory.push_back(mean_loss());
  }
  return trajectory;
}

/// An IDX array of unsigned bytes.
struct IdxArray {
  std::vector<std::uint32_t> dims;
  std::vector<std::uint8_t> data;
};

/// Reads big-endian IDX files with unsigned-byte payloads (magic 0x00000801
/// for label vectors, 0x00000803 for image stacks, any rank accepted).
inline IdxArray read_idx(std::istream& in) {
  std::array<unsigned char, 4> magic{};
  if (!in.read(reinterpret_cast<char*>(magic.data()), 4)) throw error(errc::io_failure, "truncated IDX header");
  require(magic[0] == 0 && magic[1] == 0 && magic[2] == 0x08, errc::io_failure, "not an unsigned-byte IDX file");
  const std::size_t rank = magic[3];
  require(rank >= 1, errc::io_failure, "IDX rank must be positive");
  IdxArray out;
  std::size_t total = 1;
  for (std::size_t r = 0; r < rank; ++r) {
    std::array<unsigned char, 4> b{};
    if (!in.read(reinterpret_cast<char*>(b.data()), 4)) throw error(errc::io_failure, "truncated IDX dims");
    const std::uint32_t dim = (std::uint32_t{b[0]} << 24) | (std::uint32_t{b[1]} << 16) |
                              (std::uint32_t{b[2]} << 8) | std::uint32_t{b[3]};
    out.dims.push_back(dim);
    total *= dim;
  }
  out.data.resize(total);
  if (total > 0 && !in.read(reinterpret_cast<char*>(out.data.data()), static_cast<std::streamsize>(total)))
    throw error(errc::io_failure, "truncated IDX payload");
  return out;
}

inline IdxArray read_idx(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw error(errc::io_failure, "cannot open " + path.string());
  return read_idx(in);
}

}  // namespace bacc
