#pragma once

// Uniform handling of interpolated values: plain scalars or Eigen matrices.
// Interpolation formulas are linear in the samples, so any type that can be
// scaled by a double and accumulated works.

#include <cmath>
#include <concepts>

#include <Eigen/Dense>

namespace bacc {

using Matrix = Eigen::MatrixXd;

template <typename T>
concept Sample = requires(T a, const T& b, double s) {
  { b * s } -> std::convertible_to<T>;
  a += b * s;
};

/// Shape and finiteness queries; the primary template covers scalars.
template <typename T>
struct sample_traits {
  static bool all_finite(const T& v) { return std::isfinite(v); }
  static bool same_shape(const T&, const T&) { return true; }
  static T zero_like(const T&) { return T{0}; }
};

template <>
struct sample_traits<Matrix> {
  static bool all_finite(const Matrix& v) { return v.allFinite(); }
  static bool same_shape(const Matrix& a, const Matrix& b) {
    return a.rows() == b.rows() && a.cols() == b.cols();
  }
  static Matrix zero_like(const Matrix& v) { return Matrix::Zero(v.rows(), v.cols()); }
};

}  // namespace bacc
