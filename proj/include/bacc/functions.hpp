#pragma once

// Functions workers apply to their coded inputs.

#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "bacc/error.hpp"
#include "bacc/sample.hpp"

namespace bacc {

/// How a scalar rule acts on a matrix input.
enum class Application { Scalar, Entrywise, MatrixPowerSum };

/// Coefficients in ascending powers.
struct Polynomial {
  std::vector<double> coefficients;
};
struct XSinX {};
struct Named {
  std::string id;
};

struct FunctionSpec {
  std::variant<Polynomial, XSinX, Named> kind;
  Application application = Application::Entrywise;
};

/// A registered scalar function with analytic first and second derivatives.
struct ScalarFunction {
  std::string_view name;
  double (*value)(double);
  double (*d1)(double);
  double (*d2)(double);
  /// Polynomial degree, if the function is a polynomial.
  std::optional<std::size_t> degree;
};

namespace detail {

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

inline const std::array<ScalarFunction, 9>& registry() {
  static const std::array<ScalarFunction, 9> table{{
      {"identity", [](double x) { return x; }, [](double) { return 1.0; },
       [](double) { return 0.0; }, 1},
      {"square", [](double x) { return x * x; }, [](double x) { return 2.0 * x; },
       [](double) { return 2.0; }, 2},
      {"cube", [](double x) { return x * x * x; }, [](double x) { return 3.0 * x * x; },
       [](double x) { return 6.0 * x; }, 3},
      {"exp", [](double x) { return std::exp(x); }, [](double x) { return std::exp(x); },
       [](double x) { return std::exp(x); }, std::nullopt},
      {"sin", [](double x) { return std::sin(x); }, [](double x) { return std::cos(x); },
       [](double x) { return -std::sin(x); }, std::nullopt},
      {"cos", [](double x) { return std::cos(x); }, [](double x) { return -std::sin(x); },
       [](double x) { return -std::cos(x); }, std::nullopt},
      {"xsinx", [](double x) { return x * std::sin(x); },
       [](double x) { return std::sin(x) + x * std::cos(x); },
       [](double x) { return 2.0 * std::cos(x) - x * std::sin(x); }, std::nullopt},
      {"tanh", [](double x) { return std::tanh(x); },
       [](double x) {
         const double t = std::tanh(x);
         return 1.0 - t * t;
       },
       [](double x) {
         const double t = std::tanh(x);
         return -2.0 * t * (1.0 - t * t);
       },
       std::nullopt},
      {"sigmoid", [](double x) { return sigmoid(x); },
       [](double x) {
         const double s = sigmoid(x);
         return s * (1.0 - s);
       },
       [](double x) {
         const double s = sigmoid(x);
         return s * (1.0 - s) * (1.0 - 2.0 * s);
       },
       std::nullopt},
  }};
  return table;
}

inline double horner(const std::vector<double>& c, double x) {
  double acc = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * x + *it;
  return acc;
}

}  // namespace detail

inline const ScalarFunction* find_function(std::string_view name) {
  for (const auto& f : detail::registry())
    if (f.name == name) return &f;
  return nullptr;
}

inline const ScalarFunction& lookup_function(std::string_view name) {
  const ScalarFunction* f = find_function(name);
  if (f == nullptr) throw error(errc::unknown_function, "no function named '" + std::string(name) + "'");
  return *f;
}

inline std::vector<std::string_view> function_names() {
  std::vector<std::string_view> out;
  for (const auto& f : detail::registry()) out.push_back(f.name);
  return out;
}

/// Validates coefficient finiteness and registry membership.
inline void validate(const FunctionSpec& spec) {
  if (const auto* p = std::get_if<Polynomial>(&spec.kind)) {
    require(!p->coefficients.empty(), errc::invalid_parameter, "polynomial has no coefficients");
    for (double c : p->coefficients)
      require(std::isfinite(c), errc::invalid_parameter, "polynomial coefficients must be finite");
  } else if (const auto* n = std::get_if<Named>(&spec.kind)) {
    lookup_function(n->id);
  }
  if (spec.application == Application::MatrixPowerSum)
    require(std::holds_alternative<Polynomial>(spec.kind), errc::invalid_parameter,
            "matrix power sums need a polynomial");
}

/// k-th derivative (k <= 2) of the scalar rule at x.
inline double derivative(const FunctionSpec& spec, double x, int order) {
  require(order >= 0 && order <= 2, errc::invalid_parameter, "derivative order must be 0..2");
  return std::visit(
      [&](const auto& k) -> double {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, Polynomial>) {
          std::vector<double> c = k.coefficients;
          for (int d = 0; d < order; ++d) {
            if (c.size() <= 1) return 0.0;
            for (std::size_t i = 1; i < c.size(); ++i) c[i - 1] = c[i] * static_cast<double>(i);
            c.pop_back();
          }
          return detail::horner(c, x);
        } else {
          std::string_view id = "xsinx";
          if constexpr (std::is_same_v<K, Named>) id = k.id;
          const ScalarFunction& f = lookup_function(id);
          return order == 0 ? f.value(x) : order == 1 ? f.d1(x) : f.d2(x);
        }
      },
      spec.kind);
}

inline double apply(const FunctionSpec& spec, double x) { return derivative(spec, x, 0); }

inline Matrix apply(const FunctionSpec& spec, const Matrix& X) {
  switch (spec.application) {
    case Application::Scalar:
      require(X.rows() == 1 && X.cols() == 1, errc::shape_mismatch, "scalar function needs 1x1 input");
      return Matrix::Constant(1, 1, apply(spec, X(0, 0)));
    case Application::Entrywise:
      return X.unaryExpr([&](double v) { return apply(spec, v); });
    case Application::MatrixPowerSum: {
      require(X.rows() == X.cols(), errc::shape_mismatch, "matrix power sum needs a square input");
      const auto& c = std::get<Polynomial>(spec.kind).coefficients;
      // Horner in the matrix argument.
      Matrix acc = Matrix::Zero(X.rows(), X.cols());
      for (auto it = c.rbegin(); it != c.rend(); ++it) {
        acc = acc * X;
        acc.diagonal().array() += *it;
      }
      return acc;
    }
  }
  throw error(errc::invalid_parameter, "unknown application mode");
}

/// Degree of a polynomial rule; throws for non-polynomial rules.
inline std::size_t polynomial_degree(const FunctionSpec& spec) {
  if (const auto* p = std::get_if<Polynomial>(&spec.kind)) {
    std::size_t d = p->coefficients.size();
    while (d > 1 && p->coefficients[d - 1] == 0.0) --d;
    return d == 0 ? 0 : d - 1;
  }
  if (const auto* n = std::get_if<Named>(&spec.kind)) {
    if (auto deg = lookup_function(n->id).degree) return *deg;
  }
  throw error(errc::invalid_parameter, "function is not a polynomial");
}

}  // namespace bacc
