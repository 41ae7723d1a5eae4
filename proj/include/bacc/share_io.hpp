#pragma once

// Flat little-endian binary form of a coded share or worker result:
//   u32 worker, f64 z, u32 rows, u32 cols, rows*cols f64 row-major.

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>

#include "bacc/error.hpp"
#include "bacc/protocol.hpp"
#include "bacc/sample.hpp"

namespace bacc {

namespace detail {

template <typename T>
void put_le(std::ostream& out, T value) {
  static_assert(std::endian::native == std::endian::little, "big-endian hosts unsupported");
  char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  out.write(bytes, sizeof(T));
}

template <typename T>
T get_le(std::istream& in) {
  char bytes[sizeof(T)];
  if (!in.read(bytes, sizeof(T))) throw error(errc::io_failure, "truncated share record");
  T value;
  std::memcpy(&value, bytes, sizeof(T));
  return value;
}

}  // namespace detail

inline void write_share(std::ostream& out, const CodedShare<Matrix>& share) {
  require(share.worker <= UINT32_MAX && share.payload.rows() <= UINT32_MAX &&
              share.payload.cols() <= UINT32_MAX,
          errc::invalid_parameter, "share too large for the record format");
  detail::put_le<std::uint32_t>(out, static_cast<std::uint32_t>(share.worker));
  detail::put_le<double>(out, share.z);
  detail::put_le<std::uint32_t>(out, static_cast<std::uint32_t>(share.payload.rows()));
  detail::put_le<std::uint32_t>(out, static_cast<std::uint32_t>(share.payload.cols()));
  for (Eigen::Index r = 0; r < share.payload.rows(); ++r)
    for (Eigen::Index c = 0; c < share.payload.cols(); ++c) detail::put_le<double>(out, share.payload(r, c));
  if (!out) throw error(errc::io_failure, "failed writing share record");
}

inline CodedShare<Matrix> read_share(std::istream& in) {
  CodedShare<Matrix> share;
  share.worker = detail::get_le<std::uint32_t>(in);
  share.z = detail::get_le<double>(in);
  const auto rows = detail::get_le<std::uint32_t>(in);
  const auto cols = detail::get_le<std::uint32_t>(in);
  share.payload.resize(rows, cols);
  for (std::uint32_t r = 0; r < rows; ++r)
    for (std::uint32_t c = 0; c < cols; ++c) share.payload(r, c) = detail::get_le<double>(in);
  return share;
}

inline void save_share(const std::filesystem::path& path, const CodedShare<Matrix>& share) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw error(errc::io_failure, "cannot open " + path.string());
  write_share(out, share);
}

inline CodedShare<Matrix> load_share(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw error(errc::io_failure, "cannot open " + path.string());
  return read_share(in);
}

}  // namespace bacc
