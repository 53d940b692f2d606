#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <initializer_list>
#include <utility>
#include <vector>

namespace cbnorm {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

// Tensor factorization of a Hilbert space. Factors are listed in slot order:
// slot 0 is the leftmost Kronecker factor, and a product basis index decodes
// big-endian, slot 0 most significant.
struct DimSplit {
  std::vector<int> dims;

  DimSplit() = default;
  DimSplit(std::initializer_list<int> d) : dims(d) {}
  explicit DimSplit(std::vector<int> d) : dims(std::move(d)) {}

  int factors() const { return static_cast<int>(dims.size()); }
  long total() const {
    long n = 1;
    for (int d : dims) n *= d;
    return n;
  }
};

namespace tol {
// Relative slack for Hermiticity and positivity checks; matrices this close
// are symmetrized or clipped rather than rejected.
inline constexpr double herm = 1e-10;
inline constexpr double eig = 1e-9;
inline constexpr double trace = 1e-9;
inline constexpr double tp = 1e-9;
// Eigenvalues below eig_clip * lambda_max count as exact zeros.
inline constexpr double eig_clip = 1e-15;
}  // namespace tol

}  // namespace cbnorm
