#pragma once

#include <array>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace rtswe {

using Index = Eigen::Index;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// Prognostic variables in solution-vector block order.
enum class Var : int { h = 0, u = 1, v = 2, s = 3 };

inline constexpr std::array<Var, 4> kAllVars{Var::h, Var::u, Var::v, Var::s};

constexpr int idx(Var w) { return static_cast<int>(w); }

constexpr std::string_view name(Var w) {
  switch (w) {
    case Var::h: return "h";
    case Var::u: return "u";
    case Var::v: return "v";
    case Var::s: return "s";
  }
  return "?";
}

// Error hierarchy. The CLI maps each kind onto its own exit code.

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid parameters or configuration values.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Newton failure, nonpositive height, singular systems.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// Newton iteration ran out of iterations.
class NewtonError : public NumericError {
 public:
  NewtonError(const std::string& what, double residual, int iterations)
      : NumericError(what), residual_(residual), iterations_(iterations) {}
  double residual() const { return residual_; }
  int iterations() const { return iterations_; }

 private:
  double residual_;
  int iterations_;
};

/// Filesystem failures.
class IoError : public Error {
 public:
  using Error::Error;
};

/// Bad magic, version, truncated payload, or inconsistent headers.
class FormatError : public Error {
 public:
  using Error::Error;
};

}  // namespace rtswe
