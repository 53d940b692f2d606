#pragma once

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <unsupported/Eigen/KroneckerProduct>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "cbnorm/errors.hpp"
#include "cbnorm/types.hpp"

namespace cbnorm {

inline bool is_hermitian(const ComplexMatrix& M, double rel = tol::herm) {
  if (M.rows() != M.cols()) return false;
  const double scale = M.norm();
  return (M - M.adjoint()).norm() <= rel * std::max(scale, 1.0);
}

inline void require_hermitian(const ComplexMatrix& M, const char* where) {
  if (M.rows() != M.cols())
    throw DimMismatchError(std::string(where) + ": matrix is not square");
  if (!is_hermitian(M))
    throw NonHermitianError(std::string(where) + ": matrix is not Hermitian");
}

struct Spectrum {
  RealVector values;      // descending
  ComplexMatrix vectors;  // columns match values
};

inline Spectrum herm_eig(const ComplexMatrix& M) {
  require_hermitian(M, "herm_eig");
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(((M + M.adjoint()) * 0.5).eval());
  if (es.info() != Eigen::Success) throw Error("herm_eig: eigensolver failed");
  Spectrum s;
  s.values = es.eigenvalues().reverse();
  s.vectors = es.eigenvectors().rowwise().reverse();
  return s;
}

// Eigenvalues only, descending. Cheaper than herm_eig when vectors are unused.
inline RealVector herm_eigenvalues(const ComplexMatrix& M) {
  require_hermitian(M, "herm_eigenvalues");
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(((M + M.adjoint()) * 0.5).eval(),
                                                  Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw Error("herm_eigenvalues: eigensolver failed");
  return es.eigenvalues().reverse();
}

namespace detail {

// Clips the tiny negative dust of a numerically PSD spectrum to zero and
// rejects genuinely negative spectra.
inline RealVector clip_psd_spectrum(RealVector v, const char* where) {
  if (v.size() == 0) return v;
  const double top = v(0);
  const double scale = std::max({std::abs(top), std::abs(v(v.size() - 1)), 1.0});
  if (v(v.size() - 1) < -tol::eig * scale)
    throw NotPsdError(std::string(where) + ": negative eigenvalue " +
                      std::to_string(v(v.size() - 1)));
  const double floor = tol::eig_clip * std::max(top, 0.0);
  for (long i = 0; i < v.size(); ++i)
    if (v(i) < floor) v(i) = 0.0;
  return v;
}

}  // namespace detail

// Schatten p-norm of an arbitrary matrix, p in [1, inf]. The largest singular
// value is factored out so that s^p stays in range for extreme p.
inline double schatten_norm(const ComplexMatrix& M, double p) {
  if (std::isnan(p) || p < 1.0)
    throw BadExponentError("schatten_norm: p must be >= 1, got " + std::to_string(p));
  if (M.size() == 0) return 0.0;
  Eigen::JacobiSVD<ComplexMatrix> svd(M);
  const RealVector s = svd.singularValues();
  const double smax = s(0);
  if (smax <= 0.0) return 0.0;
  if (std::isinf(p)) return smax;
  if (p == 1.0) return s.sum();
  double acc = 0.0;
  for (long i = 0; i < s.size(); ++i) acc += std::pow(s(i) / smax, p);
  return smax * std::pow(acc, 1.0 / p);
}

// Same norm for a matrix already known Hermitian PSD; uses eigenvalues, which
// is both faster and exact for the positive part.
inline double schatten_norm_psd(const ComplexMatrix& M, double p) {
  if (std::isnan(p) || p < 1.0)
    throw BadExponentError("schatten_norm_psd: p must be >= 1, got " + std::to_string(p));
  RealVector v = detail::clip_psd_spectrum(herm_eigenvalues(M), "schatten_norm_psd");
  if (v.size() == 0) return 0.0;
  const double top = v(0);
  if (top <= 0.0) return 0.0;
  if (std::isinf(p)) return top;
  double acc = 0.0;
  for (long i = 0; i < v.size(); ++i) acc += std::pow(v(i) / top, p);
  return top * std::pow(acc, 1.0 / p);
}

// Tr M^t for PSD M and real t. Zero eigenvalues are dropped, so negative
// exponents act on the support.
inline double trace_power_psd(const ComplexMatrix& M, double t) {
  RealVector v = detail::clip_psd_spectrum(herm_eigenvalues(M), "trace_power_psd");
  double acc = 0.0;
  for (long i = 0; i < v.size(); ++i)
    if (v(i) > 0.0) acc += std::pow(v(i), t);
  return acc;
}

inline ComplexMatrix kron(const ComplexMatrix& A, const ComplexMatrix& B) {
  return Eigen::kroneckerProduct(A, B).eval();
}

// f applied to the spectrum of a PSD matrix. Eigenvalues below the clip
// threshold reach f as exact zeros.
inline ComplexMatrix matrix_fn_psd(const ComplexMatrix& M,
                                   const std::function<double(double)>& f) {
  Spectrum s = herm_eig(M);
  RealVector v = detail::clip_psd_spectrum(s.values, "matrix_fn_psd");
  RealVector fv(v.size());
  for (long i = 0; i < v.size(); ++i) fv(i) = f(v(i));
  return s.vectors * fv.asDiagonal() * s.vectors.adjoint();
}

// M^t on the support of a PSD matrix: zero eigenvalues stay zero for any t.
inline ComplexMatrix matrix_power_psd(const ComplexMatrix& M, double t) {
  return matrix_fn_psd(M, [t](double x) { return x > 0.0 ? std::pow(x, t) : 0.0; });
}

// Partial trace keeping the listed slots (0-based, strictly ascending output
// order follows slot order). Works for any number of tensor factors.
inline ComplexMatrix partial_trace(const ComplexMatrix& M, const DimSplit& split,
                                   std::vector<int> keep) {
  const int k = split.factors();
  if (k == 0 || split.total() != M.rows() || M.rows() != M.cols())
    throw DimMismatchError("partial_trace: split does not match matrix");
  std::sort(keep.begin(), keep.end());
  if (std::adjacent_find(keep.begin(), keep.end()) != keep.end())
    throw DimMismatchError("partial_trace: repeated slot in keep");
  for (int f : keep)
    if (f < 0 || f >= k) throw DimMismatchError("partial_trace: keep slot out of range");

  std::vector<int> traced;
  for (int f = 0; f < k; ++f)
    if (!std::binary_search(keep.begin(), keep.end(), f)) traced.push_back(f);

  std::vector<long> stride(k);
  stride[k - 1] = 1;
  for (int f = k - 2; f >= 0; --f) stride[f] = stride[f + 1] * split.dims[f + 1];

  auto offsets = [&](const std::vector<int>& slots) {
    long n = 1;
    for (int f : slots) n *= split.dims[f];
    std::vector<long> off(n, 0);
    for (long code = 0; code < n; ++code) {
      long c = code, o = 0;
      for (int i = static_cast<int>(slots.size()) - 1; i >= 0; --i) {
        const int f = slots[i];
        o += (c % split.dims[f]) * stride[f];
        c /= split.dims[f];
      }
      off[code] = o;
    }
    return off;
  };

  const std::vector<long> kept_off = offsets(keep);
  const std::vector<long> traced_off = offsets(traced);
  const long dk = static_cast<long>(kept_off.size());

  ComplexMatrix out = ComplexMatrix::Zero(dk, dk);
  for (long r = 0; r < dk; ++r)
    for (long c = 0; c < dk; ++c) {
      Complex acc(0, 0);
      for (long t : traced_off) acc += M(kept_off[r] + t, kept_off[c] + t);
      out(r, c) = acc;
    }
  return out;
}

// Von Neumann entropy in bits. A trace away from 1 beyond tolerance is
// renormalized and reported through the optional flag.
inline double von_neumann_entropy(const ComplexMatrix& rho, bool* renormalized = nullptr) {
  RealVector v = detail::clip_psd_spectrum(herm_eigenvalues(rho), "von_neumann_entropy");
  const double tr = v.sum();
  if (tr <= 0.0) throw NotPsdError("von_neumann_entropy: zero trace");
  if (renormalized) *renormalized = std::abs(tr - 1.0) > tol::trace;
  double s = 0.0;
  for (long i = 0; i < v.size(); ++i) {
    const double q = v(i) / tr;
    if (q > 0.0) s -= q * std::log2(q);
  }
  return s;
}

// S(Q) - S(Q_1) in bits, conditioning on everything except slot 0.
inline double conditional_entropy(const ComplexMatrix& Q, const DimSplit& split) {
  return von_neumann_entropy(Q) - von_neumann_entropy(partial_trace(Q, split, {0}));
}

// Pure state on C^d (x) C^d held by its coefficient matrix:
//   psi = sum_jk coeffs(j,k) e_j (x) e_k,   gamma_1 = coeffs coeffs^dagger.
struct BipartiteState {
  ComplexMatrix coeffs;

  int dim() const { return static_cast<int>(coeffs.rows()); }

  ComplexVector vector() const {
    const int d = dim(), d2 = static_cast<int>(coeffs.cols());
    ComplexVector v(static_cast<long>(d) * d2);
    for (int j = 0; j < d; ++j)
      for (int k = 0; k < d2; ++k) v(static_cast<long>(j) * d2 + k) = coeffs(j, k);
    return v;
  }

  ComplexMatrix gamma1() const { return coeffs * coeffs.adjoint(); }

  ComplexMatrix projector() const {
    ComplexVector v = vector();
    return v * v.adjoint();
  }
};

// Purification of a density matrix on the canonical ancilla basis, ancilla
// vectors attached in descending eigenvalue order. gamma1() reproduces rho.
inline BipartiteState purify(const ComplexMatrix& rho) {
  Spectrum s = herm_eig(rho);
  RealVector v = detail::clip_psd_spectrum(s.values, "purify");
  const double tr = v.sum();
  if (tr <= 0.0) throw NotPsdError("purify: zero trace");
  RealVector root = (v / tr).cwiseSqrt();
  BipartiteState psi;
  psi.coeffs = s.vectors * root.asDiagonal();
  return psi;
}

struct SchmidtDecomposition {
  RealVector coefficients;  // descending, l2-normalized for a unit vector
  ComplexMatrix left;       // columns
  ComplexMatrix right;      // columns
};

// psi = sum_m coefficients(m) left_m (x) right_m.
inline SchmidtDecomposition schmidt(const BipartiteState& psi) {
  Eigen::JacobiSVD<ComplexMatrix> svd(psi.coeffs, Eigen::ComputeThinU | Eigen::ComputeThinV);
  SchmidtDecomposition out;
  out.coefficients = svd.singularValues();
  out.left = svd.matrixU();
  out.right = svd.matrixV().conjugate();
  return out;
}

inline double trace_distance(const ComplexMatrix& A, const ComplexMatrix& B) {
  return schatten_norm(A - B, 1.0);
}

}  // namespace cbnorm
