#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <random>

#include "cbnorm/errors.hpp"
#include "cbnorm/types.hpp"

namespace cbnorm {

inline std::mt19937_64 seeded_rng(std::uint64_t seed) { return std::mt19937_64(seed); }

// Standard complex Gaussian entries. Fill order is column major, real part
// drawn before imaginary; this ordering is part of the reproducibility
// contract, do not change it.
inline ComplexMatrix gaussian_complex(int rows, int cols, std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  ComplexMatrix G(rows, cols);
  for (int c = 0; c < cols; ++c)
    for (int r = 0; r < rows; ++r) {
      const double re = n(rng);
      const double im = n(rng);
      G(r, c) = Complex(re, im);
    }
  return G;
}

inline ComplexMatrix random_psd(int d, std::mt19937_64& rng) {
  ComplexMatrix G = gaussian_complex(d, d, rng);
  return (G * G.adjoint()).eval();
}

inline ComplexMatrix random_density(int d, std::mt19937_64& rng) {
  ComplexMatrix M = random_psd(d, rng);
  return M / M.trace().real();
}

inline ComplexVector random_pure(int d, std::mt19937_64& rng) {
  ComplexVector v = gaussian_complex(d, 1, rng).col(0);
  return v / v.norm();
}

// Haar isometry via thin QR of a Gaussian matrix, with the R diagonal phase
// absorbed into Q so the distribution is exactly invariant.
inline ComplexMatrix haar_isometry(int rows, int cols, std::mt19937_64& rng) {
  if (rows < cols) throw DimMismatchError("haar_isometry: rows < cols");
  ComplexMatrix G = gaussian_complex(rows, cols, rng);
  Eigen::HouseholderQR<ComplexMatrix> qr(G);
  ComplexMatrix Q = qr.householderQ() * ComplexMatrix::Identity(rows, cols);
  ComplexMatrix R = qr.matrixQR().topRows(cols).template triangularView<Eigen::Upper>();
  for (int j = 0; j < cols; ++j) {
    const Complex r = R(j, j);
    const double a = std::abs(r);
    Q.col(j) *= (a > 0.0) ? r / a : Complex(1, 0);
  }
  return Q;
}

inline ComplexMatrix haar_unitary(int d, std::mt19937_64& rng) {
  return haar_isometry(d, d, rng);
}

}  // namespace cbnorm
