#pragma once

#include <cmath>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "cbnorm/linalg.hpp"
#include "cbnorm/optim.hpp"

namespace cbnorm {

struct NormParams {
  double p = 2.0;
  int restarts = 20;
  int max_iters = 2000;
  double grad_tol = 1e-9;
  std::uint64_t seed = 1;
  double fd_step = 1e-6;
  double b_reg = 1e-12;      // identity regularization of the density argument
  double maxmin_tol = 1e-2;  // agreement demanded of the max-min identity
  bool analytic_gradient = true;
};

struct OptReport {
  double value = 0.0;
  ComplexMatrix argument;
  int iterations = 0;
  int restarts_used = 0;
  bool converged = false;
  double spread = 0.0;
};

namespace detail {

inline void require_norm_exponent(double p, const char* where) {
  if (std::isnan(p) || p < 1.0 || p > 64.0)
    throw BadExponentError(std::string(where) + ": p must lie in [1, 64], got " +
                           std::to_string(p));
}

inline void require_psd_input(const ComplexMatrix& x, const DimSplit& split, const char* where) {
  if (split.factors() < 2 || split.total() != x.rows())
    throw DimMismatchError(std::string(where) + ": split does not match matrix size");
  RealVector ev = herm_eigenvalues(x);  // rejects non-Hermitian input
  if (ev(ev.size() - 1) < -tol::eig * std::max(std::abs(ev(0)), 1.0))
    throw NotPsdError(std::string(where) + ": negative eigenvalue " +
                      std::to_string(ev(ev.size() - 1)));
}

// Real packing of a complex matrix: column-major real parts, then imaginary.
inline RealVector pack_complex(const ComplexMatrix& m) {
  const long n = m.size();
  RealVector x(2 * n);
  const Complex* p = m.data();
  for (long i = 0; i < n; ++i) {
    x(i) = p[i].real();
    x(n + i) = p[i].imag();
  }
  return x;
}

inline ComplexMatrix unpack_complex(const RealVector& x, int rows, int cols) {
  const long n = static_cast<long>(rows) * cols;
  ComplexMatrix m(rows, cols);
  Complex* p = m.data();
  for (long i = 0; i < n; ++i) p[i] = Complex(x(i), x(n + i));
  return m;
}

// Wirtinger gradient convention used throughout: for real f(C),
//   Gamma_ab = df/dRe(C_ab) + i df/dIm(C_ab),
// so df = Re Tr[Gamma^dag dC] and pack_complex(Gamma) is the gradient in the
// packed real coordinates.

// Ratio objective shared by norm_infp and omega_p:
//   f(C) = || (C (x) I) X (C^dag (x) I) ||_p / || C C^dag ||_p
// for PSD X on C^{d1} (x) C^{d2} and square C, evaluated at C/|C|_F. The sup
// of f over all complex C equals the sup over PSD arguments by polar
// decomposition and unitary invariance.
struct RatioProblem {
  ComplexMatrix x;
  int d1 = 0;
  int d2 = 0;
  double p = 2.0;

  ComplexMatrix conjugated(const ComplexMatrix& c) const {
    ComplexMatrix ci = kron(c, ComplexMatrix::Identity(d2, d2));
    ComplexMatrix y = ci * x * ci.adjoint();
    return ((y + y.adjoint()) * 0.5).eval();
  }

  double value_at(const ComplexMatrix& c) const {
    const double num = schatten_norm_psd(conjugated(c), p);
    const double den = schatten_norm_psd((c * c.adjoint()).eval(), p);
    return num / den;
  }

  // Wirtinger gradient of f at unit-Frobenius C.
  ComplexMatrix grad_at(const ComplexMatrix& c) const {
    const ComplexMatrix ci = kron(c, ComplexMatrix::Identity(d2, d2));
    ComplexMatrix y = ci * x * ci.adjoint();
    y = ((y + y.adjoint()) * 0.5).eval();
    Spectrum sy = herm_eig(y);
    RealVector ly = clip_psd_spectrum(sy.values, "RatioProblem");
    const ComplexMatrix h = c * c.adjoint();
    Spectrum sh = herm_eig(h);
    RealVector lh = clip_psd_spectrum(sh.values, "RatioProblem");

    double tr_yp = 0.0, tr_hp = 0.0;
    for (long i = 0; i < ly.size(); ++i) tr_yp += std::pow(ly(i), p);
    for (long i = 0; i < lh.size(); ++i) tr_hp += std::pow(lh(i), p);
    const double num = std::pow(tr_yp, 1.0 / p);
    const double den = std::pow(tr_hp, 1.0 / p);

    ComplexMatrix grad_num;
    if (tr_yp <= 0.0) {
      grad_num = ComplexMatrix::Zero(d1, d1);
    } else {
      ComplexMatrix w;
      if (p == 1.0) {
        w = ComplexMatrix::Identity(y.rows(), y.cols());
      } else {
        RealVector wy(ly.size());
        for (long i = 0; i < ly.size(); ++i) wy(i) = ly(i) > 0 ? std::pow(ly(i), p - 1.0) : 0.0;
        w = sy.vectors * wy.asDiagonal() * sy.vectors.adjoint();
      }
      ComplexMatrix m1 =
          partial_trace((x * ci.adjoint() * w).eval(), DimSplit{d1, d2}, {0});
      grad_num = 2.0 * std::pow(tr_yp, 1.0 / p - 1.0) * m1.adjoint();
    }

    ComplexMatrix k;
    if (p == 1.0) {
      k = ComplexMatrix::Identity(d1, d1);
    } else {
      RealVector wh(lh.size());
      for (long i = 0; i < lh.size(); ++i) wh(i) = lh(i) > 0 ? std::pow(lh(i), p - 1.0) : 0.0;
      k = sh.vectors * wh.asDiagonal() * sh.vectors.adjoint();
    }
    ComplexMatrix grad_den = 2.0 * std::pow(tr_hp, 1.0 / p - 1.0) * (k * c);

    return ((grad_num * den - num * grad_den) / (den * den)).eval();
  }
};

// Objective and gradient of x -> sign * f(unpack(x)/|x|), the pullback of a
// scale-invariant matrix function to packed coordinates.
template <typename Problem>
Objective scale_invariant_objective(std::shared_ptr<const Problem> prob, int d, double sign) {
  return [prob, d, sign](const RealVector& x) {
    const double nx = x.norm();
    if (nx < 1e-12) return 0.0;
    return sign * prob->value_at((unpack_complex(x, d, d) / nx).eval());
  };
}

template <typename Problem>
ObjectiveGradient scale_invariant_gradient(std::shared_ptr<const Problem> prob, int d,
                                           double sign) {
  return [prob, d, sign](const RealVector& x) {
    const double nx = x.norm();
    if (nx < 1e-12) return RealVector::Zero(x.size()).eval();
    const ComplexMatrix c = unpack_complex(x, d, d) / nx;
    RealVector g = pack_complex((sign * prob->grad_at(c)).eval());
    const RealVector xc = pack_complex(c);
    g -= xc * xc.dot(g);  // radial direction is flat after normalization
    return (g / nx).eval();
  };
}

// Multistart initializer over packed d x d matrices: restart 0 takes the
// deterministic seed list in order, later restarts draw Gaussian points.
inline Initializer matrix_initializer(int d, std::vector<ComplexMatrix> seeds) {
  return [d, seeds = std::move(seeds)](int restart, std::mt19937_64& rng) {
    if (restart < static_cast<int>(seeds.size())) {
      RealVector x = pack_complex(seeds[restart]);
      return (x / x.norm()).eval();
    }
    RealVector x = pack_complex(gaussian_complex(d, d, rng));
    return (x / x.norm()).eval();
  };
}

inline OptimSettings to_optim(const NormParams& np) {
  OptimSettings st;
  st.restarts = np.restarts;
  st.max_iters = np.max_iters;
  st.grad_tol = np.grad_tol;
  st.seed = np.seed;
  st.fd_step = np.fd_step;
  return st;
}

}  // namespace detail

// ||X||_(p,1) for PSD X: reduces exactly to the Schatten p-norm of the first
// marginal.
inline double norm_p1(const ComplexMatrix& x, const DimSplit& split, double p) {
  detail::require_norm_exponent(p, "norm_p1");
  detail::require_psd_input(x, split, "norm_p1");
  return schatten_norm_psd(partial_trace(x, split, {0}), p);
}

// sup over C of || (C (x) I) X (C^dag (x) I) ||_p / || C C^dag ||_p, the
// (inf, p) vector-valued norm of PSD X. The reported argument is the PSD
// representative A = (C^dag C)^{1/2} with Tr A^2 = 1.
inline OptReport norm_infp(const ComplexMatrix& x, const DimSplit& split,
                           const NormParams& params = {},
                           const std::vector<ComplexMatrix>* extra_seeds = nullptr) {
  detail::require_norm_exponent(params.p, "norm_infp");
  detail::require_psd_input(x, split, "norm_infp");
  const int d1 = split.dims[0];
  const int d2 = static_cast<int>(x.rows()) / d1;

  auto prob = std::make_shared<const detail::RatioProblem>(
      detail::RatioProblem{x, d1, d2, params.p});
  std::vector<ComplexMatrix> seeds;
  seeds.push_back(ComplexMatrix::Identity(d1, d1) / std::sqrt(static_cast<double>(d1)));
  if (extra_seeds) seeds.insert(seeds.end(), extra_seeds->begin(), extra_seeds->end());

  Objective f = detail::scale_invariant_objective(prob, d1, -1.0);
  ObjectiveGradient g = detail::scale_invariant_gradient(prob, d1, -1.0);
  OptimOutcome best = minimize_multistart(f, params.analytic_gradient ? &g : nullptr,
                                          detail::matrix_initializer(d1, std::move(seeds)),
                                          detail::to_optim(params));

  OptReport report;
  report.value = -best.value;
  const ComplexMatrix c = detail::unpack_complex(best.x, d1, d1) / best.x.norm();
  report.argument = matrix_power_psd((c.adjoint() * c).eval(), 0.5);
  report.iterations = best.iterations;
  report.restarts_used = best.restarts_used;
  report.converged = best.converged;
  report.spread = best.spread;
  return report;
}

// ||X||_(t,s) for PSD X and 1 <= t <= s: the infimum over densities B on the
// first slot of || X^{1/2} (B^{-1/r} (x) I) X^{1/2} ||_s with 1/r = 1/t - 1/s.
// At t = s no optimization is needed and the value is the Schatten s-norm;
// the argument then defaults to the normalized first marginal.
inline OptReport vv_inf_norm(const ComplexMatrix& x, const DimSplit& split, double t, double s,
                             const NormParams& params = {}) {
  detail::require_norm_exponent(s, "vv_inf_norm");
  detail::require_norm_exponent(t, "vv_inf_norm");
  if (t > s) throw BadExponentError("vv_inf_norm: outer exponent must not exceed inner");
  detail::require_psd_input(x, split, "vv_inf_norm");
  const int d1 = split.dims[0];
  const int d2 = static_cast<int>(x.rows()) / d1;
  const ComplexMatrix x1 = partial_trace(x, split, {0});
  const double tr = x1.trace().real();

  OptReport report;
  if (t == s) {
    report.value = schatten_norm_psd(x, s);
    report.argument = x1 / tr;
    report.converged = true;
    return report;
  }

  const double inv_r = 1.0 / t - 1.0 / s;
  const ComplexMatrix xh = matrix_power_psd(x, 0.5);
  const ComplexMatrix id2 = ComplexMatrix::Identity(d2, d2);
  const double reg = params.b_reg;

  auto density_of = [d1, reg](const ComplexMatrix& g) {
    ComplexMatrix m = g * g.adjoint();
    const double trm = m.trace().real();
    ComplexMatrix b = (m / trm + reg * ComplexMatrix::Identity(d1, d1)) / (1.0 + reg * d1);
    return ((b + b.adjoint()) * 0.5).eval();
  };

  Objective f = [&xh, &id2, &density_of, d1, s, inv_r](const RealVector& v) {
    ComplexMatrix g = detail::unpack_complex(v, d1, d1);
    if (g.norm() < 1e-9) return std::numeric_limits<double>::infinity();
    ComplexMatrix w = matrix_power_psd(density_of(g), -inv_r);
    ComplexMatrix m = xh * kron(w, id2) * xh;
    return schatten_norm_psd(((m + m.adjoint()) * 0.5).eval(), s);
  };

  std::vector<ComplexMatrix> seeds;
  seeds.push_back(matrix_power_psd(x1 / tr, 0.5));
  OptimOutcome best =
      minimize_multistart(f, nullptr, detail::matrix_initializer(d1, std::move(seeds)),
                          detail::to_optim(params));

  report.value = best.value;
  report.argument = density_of(detail::unpack_complex(best.x, d1, d1));
  report.iterations = best.iterations;
  report.restarts_used = best.restarts_used;
  report.converged = best.converged;
  report.spread = best.spread;
  return report;
}

// ||X||_(1,p): the p = params.p instance of the infimum form. At p = 1 the
// value is the trace norm and the minimizer is the normalized first marginal.
inline OptReport norm_1p(const ComplexMatrix& x, const DimSplit& split,
                         const NormParams& params = {}) {
  return vv_inf_norm(x, split, 1.0, params.p, params);
}

// Minimizing density of the (1,p) norm.
inline ComplexMatrix minimizer_B(const ComplexMatrix& x, const DimSplit& split,
                                 const NormParams& params = {}) {
  return norm_1p(x, split, params).argument;
}

// min over densities B of sup over densities A of
//   || (A^{1/2p} (x) I) (B (x) I)^{-1/2p} Y (B (x) I)^{-1/2p} (A^{1/2p} (x) I) ||_p.
// The inner sup is exactly norm_infp of the B-conjugated matrix (substitute
// M = A^{1/2p}), so only the outer problem needs derivative-free descent.
// The identity being verified downstream is that this equals ||Y||_p.
inline double maxmin_p(const ComplexMatrix& y, const DimSplit& split, double p,
                       const NormParams& params = {}) {
  detail::require_norm_exponent(p, "maxmin_p");
  detail::require_psd_input(y, split, "maxmin_p");
  const int d1 = split.dims[0];
  const int d2 = static_cast<int>(y.rows()) / d1;
  const ComplexMatrix id2 = ComplexMatrix::Identity(d2, d2);
  const double reg = std::max(params.b_reg, 1e-12);

  NormParams inner = params;
  inner.p = p;
  inner.restarts = 3;
  inner.max_iters = 300;
  inner.grad_tol = 1e-7;
  inner.analytic_gradient = true;

  Objective outer = [&](const RealVector& v) {
    ComplexMatrix g = detail::unpack_complex(v, d1, d1);
    if (g.norm() < 1e-9) return std::numeric_limits<double>::infinity();
    ComplexMatrix m = g * g.adjoint();
    ComplexMatrix b =
        (m / m.trace().real() + reg * ComplexMatrix::Identity(d1, d1)) / (1.0 + reg * d1);
    ComplexMatrix r = kron(matrix_power_psd(((b + b.adjoint()) * 0.5).eval(), -1.0 / (2.0 * p)), id2);
    ComplexMatrix z = r * y * r.adjoint();
    return norm_infp(((z + z.adjoint()) * 0.5).eval(), split, inner).value;
  };

  const ComplexMatrix y1 = partial_trace(y, split, {0});
  std::vector<ComplexMatrix> seeds;
  seeds.push_back(matrix_power_psd(y1 / y1.trace().real(), 0.5));
  seeds.push_back(ComplexMatrix::Identity(d1, d1) / std::sqrt(static_cast<double>(d1)));

  OptimSettings st;
  st.restarts = 2;
  st.max_iters = 40;
  st.grad_tol = 1e-6;
  st.seed = params.seed;
  st.fd_step = 1e-4;  // coarse: the inner optimum carries its own noise floor
  OptimOutcome best =
      minimize_multistart(outer, nullptr, detail::matrix_initializer(d1, std::move(seeds)), st);
  return best.value;
}

}  // namespace cbnorm
