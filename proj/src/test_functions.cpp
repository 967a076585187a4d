#include "subdfo/test_functions.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "subdfo/errors.hpp"

namespace subdfo {
namespace {

Vector gaussian_vector(Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector v(n);
  for (Index i = 0; i < n; ++i) v(i) = normal(rng);
  return v;
}

QuadraticCoefficients random_quadratic(Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  QuadraticCoefficients q;
  q.constant = normal(rng);
  q.linear = gaussian_vector(n, rng);
  Matrix g(n, n);
  for (Index j = 0; j < n; ++j) g.col(j) = gaussian_vector(n, rng);
  q.hessian = (g + g.transpose()) / (2.0 * std::sqrt(static_cast<double>(n)));
  return q;
}

struct CubicTerms {
  QuadraticCoefficients base;
  std::vector<Vector> directions;
  std::vector<double> weights;

  double operator()(const Vector& x) const {
    double value = base(x);
    for (std::size_t k = 0; k < directions.size(); ++k) {
      const double t = directions[k].dot(x);
      value += weights[k] * t * t * t;
    }
    return value;
  }
};

struct TrigTerms {
  QuadraticCoefficients base;
  std::vector<Vector> frequencies;
  std::vector<double> amplitudes;

  double operator()(const Vector& x) const {
    double value = base(x);
    for (std::size_t k = 0; k < frequencies.size(); ++k) {
      value += amplitudes[k] * std::sin(frequencies[k].dot(x));
    }
    return value;
  }
};

std::pair<std::string, std::uint64_t> split_spec(std::string_view spec) {
  const auto colon = spec.find(':');
  if (colon == std::string_view::npos) return {std::string(spec), 0};
  const std::string seed_text(spec.substr(colon + 1));
  try {
    std::size_t used = 0;
    const unsigned long long seed = std::stoull(seed_text, &used);
    if (used != seed_text.size()) throw std::invalid_argument("trailing characters");
    return {std::string(spec.substr(0, colon)), seed};
  } catch (const std::exception&) {
    throw Error(ErrorKind::InvalidArgument, "bad seed in function spec '" + std::string(spec) + "'");
  }
}

}  // namespace

std::string_view to_string(FunctionClass fc) {
  switch (fc) {
    case FunctionClass::Quadratic: return "quadratic";
    case FunctionClass::Cubic: return "cubic";
    case FunctionClass::TrigPolynomial: return "trig";
  }
  return "unknown";
}

FunctionClass function_class_from_string(std::string_view name) {
  if (name == "quadratic") return FunctionClass::Quadratic;
  if (name == "cubic") return FunctionClass::Cubic;
  if (name == "trig" || name == "trigpolynomial") return FunctionClass::TrigPolynomial;
  throw Error(ErrorKind::InvalidArgument, "unknown function class '" + std::string(name) + "'");
}

TestFunction make_quadratic_function(QuadraticCoefficients coeffs, std::string name) {
  const Index n = coeffs.linear.size();
  if (coeffs.hessian.rows() != n || coeffs.hessian.cols() != n) {
    throw Error(ErrorKind::DimensionMismatch, "quadratic coefficients do not conform");
  }
  FunctionOracle oracle(n, [coeffs](const Vector& x) { return coeffs(x); });
  return TestFunction{std::move(name), std::move(oracle), std::move(coeffs)};
}

TestFunction random_test_function(FunctionClass fc, Index n, std::mt19937_64& rng) {
  QuadraticCoefficients base = random_quadratic(n, rng);
  switch (fc) {
    case FunctionClass::Quadratic:
      return make_quadratic_function(std::move(base), "quadratic");
    case FunctionClass::Cubic: {
      std::normal_distribution<double> normal(0.0, 1.0);
      CubicTerms terms{std::move(base), {}, {}};
      for (int k = 0; k < 2; ++k) {
        terms.directions.push_back(gaussian_vector(n, rng) / std::sqrt(static_cast<double>(n)));
        terms.weights.push_back(0.5 * normal(rng));
      }
      return TestFunction{"cubic", FunctionOracle(n, terms), std::nullopt};
    }
    case FunctionClass::TrigPolynomial: {
      std::normal_distribution<double> normal(0.0, 1.0);
      std::uniform_real_distribution<double> length(0.25, 2.0);
      TrigTerms terms{std::move(base), {}, {}};
      for (int k = 0; k < 3; ++k) {
        Vector w = gaussian_vector(n, rng);
        w *= length(rng) / w.norm();
        terms.frequencies.push_back(std::move(w));
        terms.amplitudes.push_back(normal(rng));
      }
      return TestFunction{"trig", FunctionOracle(n, terms), std::nullopt};
    }
  }
  throw Error(ErrorKind::InvalidArgument, "unknown function class");
}

TestFunction make_named_function(std::string_view spec, Index n) {
  if (n < 1) throw Error(ErrorKind::InvalidArgument, "function dimension must be positive");
  const auto [name, seed] = split_spec(spec);
  if (name == "sphere") {
    return make_quadratic_function(
        QuadraticCoefficients{0.0, Vector::Zero(n), 2.0 * Matrix::Identity(n, n)}, "sphere");
  }
  if (name == "rosenbrock") {
    if (n < 2) throw Error(ErrorKind::InvalidArgument, "rosenbrock needs n >= 2");
    FunctionOracle oracle(n, [](const Vector& x) {
      double value = 0.0;
      for (Index i = 0; i + 1 < x.size(); ++i) {
        const double a = 1.0 - x(i);
        const double b = x(i + 1) - x(i) * x(i);
        value += a * a + 100.0 * b * b;
      }
      return value;
    });
    return TestFunction{"rosenbrock", std::move(oracle), std::nullopt};
  }
  std::mt19937_64 rng(seed);
  TestFunction out = [&] {
    if (name == "linear") {
      QuadraticCoefficients q = random_quadratic(n, rng);
      q.hessian.setZero();
      return make_quadratic_function(std::move(q), "linear");
    }
    return random_test_function(function_class_from_string(name), n, rng);
  }();
  out.name = std::string(spec);
  return out;
}

}  // namespace subdfo
