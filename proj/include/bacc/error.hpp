#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace bacc {

enum class errc {
  invalid_parameter,
  invalid_interval,
  degenerate_nodes,
  unsupported_kind,
  invalid_input,
  node_coincidence,
  index_out_of_range,
  out_of_regime,
  too_few_nodes,
  empty_data,
  shape_mismatch,
  empty_survivors,
  recovery_threshold,
  invalid_partition,
  infeasible_layout,
  worker_failure,
  unknown_function,
  io_failure,
};

constexpr std::string_view to_string(errc code) noexcept {
  switch (code) {
    case errc::invalid_parameter: return "invalid-parameter";
    case errc::invalid_interval: return "invalid-interval";
    case errc::degenerate_nodes: return "degenerate-nodes";
    case errc::unsupported_kind: return "unsupported-kind";
    case errc::invalid_input: return "invalid-input";
    case errc::node_coincidence: return "node-coincidence";
    case errc::index_out_of_range: return "index-out-of-range";
    case errc::out_of_regime: return "out-of-regime";
    case errc::too_few_nodes: return "too-few-nodes";
    case errc::empty_data: return "empty-data";
    case errc::shape_mismatch: return "shape-mismatch";
    case errc::empty_survivors: return "empty-survivors";
    case errc::recovery_threshold: return "recovery-threshold";
    case errc::invalid_partition: return "invalid-partition";
    case errc::infeasible_layout: return "infeasible-layout";
    case errc::worker_failure: return "worker-failure";
    case errc::unknown_function: return "unknown-function";
    case errc::io_failure: return "io-failure";
  }
  return "unknown";
}

/// Every failure raised by the library carries one of the codes above.
class error : public std::runtime_error {
 public:
  error(errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  [[nodiscard]] errc code() const noexcept { return code_; }

 private:
  errc code_;
};

inline void require(bool condition, errc code, const std::string& what) {
  if (!condition) throw error(code, what);
}

}  // namespace bacc
