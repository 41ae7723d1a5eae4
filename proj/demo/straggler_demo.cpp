// Encode eight 2x2 matrices for 24 workers, drop six of them, square the
// shares entrywise and decode.

#include <algorithm>
#include <cstdio>
#include <vector>

#include "bacc/bacc.hpp"

int main() {
  using bacc::Matrix;
  bacc::CounterStream rng(2024, {});
  std::vector<Matrix> data;
  for (int k = 0; k < 8; ++k) {
    Matrix X(2, 2);
    for (int i = 0; i < 4; ++i) X(i) = rng.uniform(-1.0, 1.0);
    data.push_back(X);
  }
  const auto encoder = bacc::make_encoder(data);
  const std::size_t N = 24;
  const auto shares = bacc::encode_shares(encoder, N);
  const bacc::FunctionSpec square{bacc::Named{"square"}, bacc::Application::Entrywise};

  for (std::size_t s : {0, 3, 6}) {
    const auto pattern = bacc::sample_stragglers(N, s, bacc::UniformRandom{99});
    const auto run = bacc::execute_workers(shares, square, pattern);
    const auto decoded = bacc::decode(run.input, encoder.alphas());
    double worst = 0.0;
    for (std::size_t j = 0; j < data.size(); ++j)
      worst = std::max(worst, (decoded[j] - bacc::apply(square, data[j])).cwiseAbs().maxCoeff());
    std::printf("s=%zu  survivors=%zu  max abs error %.3e\n", s, run.input.survivors.size(), worst);
  }
}
