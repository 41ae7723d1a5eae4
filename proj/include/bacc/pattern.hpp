#pragma once

#include <algorithm>
#include <cstdint>
#include <variant>
#include <vector>

#include "bacc/error.hpp"

namespace bacc {

struct UniformRandom {
  std::uint64_t seed = 0;
};
struct WorstCaseConsecutive {
  std::size_t kbar = 0;
};
/// Pattern given directly by the caller.
struct ExplicitPattern {};

using StragglerModel = std::variant<UniformRandom, WorstCaseConsecutive, ExplicitPattern>;

/// Workers 0..N that do not respond, plus how they were chosen.
class StragglerPattern {
 public:
  StragglerPattern(std::size_t N, std::vector<std::size_t> straggling,
                   StragglerModel model = ExplicitPattern{})
      : N_(N), straggling_(std::move(straggling)), model_(model) {
    std::sort(straggling_.begin(), straggling_.end());
    require(std::adjacent_find(straggling_.begin(), straggling_.end()) == straggling_.end(),
            errc::invalid_parameter, "straggler indices must be distinct");
    require(straggling_.empty() || straggling_.back() <= N, errc::index_out_of_range,
            "straggler index exceeds N");
  }

  [[nodiscard]] std::size_t N() const noexcept { return N_; }
  [[nodiscard]] std::size_t s() const noexcept { return straggling_.size(); }
  [[nodiscard]] const std::vector<std::size_t>& straggling() const& noexcept { return straggling_; }
  [[nodiscard]] std::vector<std::size_t> straggling() && noexcept { return std::move(straggling_); }
  [[nodiscard]] const StragglerModel& model() const noexcept { return model_; }

  [[nodiscard]] bool is_straggling(std::size_t worker) const {
    return std::binary_search(straggling_.begin(), straggling_.end(), worker);
  }

  /// Responding workers, ascending index.
  [[nodiscard]] std::vector<std::size_t> survivors() const {
    std::vector<std::size_t> out;
    out.reserve(N_ + 1 - straggling_.size());
    for (std::size_t i = 0; i <= N_; ++i)
      if (!is_straggling(i)) out.push_back(i);
    return out;
  }

 private:
  std::size_t N_;
  std::vector<std::size_t> straggling_;
  StragglerModel model_;
};

}  // namespace bacc
