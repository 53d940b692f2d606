#pragma once

#include <cmath>
#include <map>
#include <memory>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "cbnorm/channels.hpp"
#include "cbnorm/vnorms.hpp"

namespace cbnorm {

struct CbResult {
  double value = 0.0;
  BipartiteState state;  // coefficient matrix of the achieving bipartite vector
  OptReport report;
};

namespace detail {

// Conditional entropy objective for the minimal CB entropy:
//   f(C) = [S(Y) - S(C C^dag)] / ln 2,  Y = (C (x) I) X (C^dag (x) I),
// with X the Choi matrix of a trace preserving map, so Tr Y = Tr C C^dag and
// the first marginal of Y is exactly C C^dag.
struct CondEntropyProblem {
  ComplexMatrix x;
  int d1 = 0;
  int d2 = 0;

  static double entropy_nats(const RealVector& v) {
    double s = 0.0;
    for (long i = 0; i < v.size(); ++i)
      if (v(i) > 0.0) s -= v(i) * std::log(v(i));
    return s;
  }

  double value_at(const ComplexMatrix& c) const {
    ComplexMatrix ci = kron(c, ComplexMatrix::Identity(d2, d2));
    ComplexMatrix y = ci * x * ci.adjoint();
    y = ((y + y.adjoint()) * 0.5).eval();
    const RealVector ly = clip_psd_spectrum(herm_eigenvalues(y), "CondEntropyProblem");
    const RealVector lh =
        clip_psd_spectrum(herm_eigenvalues((c * c.adjoint()).eval()), "CondEntropyProblem");
    return (entropy_nats(ly) - entropy_nats(lh)) / std::numbers::ln2;
  }

  // ln with a floored spectrum: the flat clip keeps the gradient finite when
  // the iterate closes in on a rank-deficient optimum.
  static ComplexMatrix log_plus_one(const Spectrum& s, const RealVector& clipped) {
    const double floor = std::max(clipped(0) * 1e-18, 1e-300);
    RealVector w(clipped.size());
    for (long i = 0; i < w.size(); ++i) w(i) = std::log(std::max(clipped(i), floor)) + 1.0;
    return s.vectors * w.asDiagonal() * s.vectors.adjoint();
  }

  ComplexMatrix grad_at(const ComplexMatrix& c) const {
    const ComplexMatrix ci = kron(c, ComplexMatrix::Identity(d2, d2));
    ComplexMatrix y = ci * x * ci.adjoint();
    y = ((y + y.adjoint()) * 0.5).eval();
    Spectrum sy = herm_eig(y);
    const RealVector ly = clip_psd_spectrum(sy.values, "CondEntropyProblem");
    Spectrum sh = herm_eig((c * c.adjoint()).eval());
    const RealVector lh = clip_psd_spectrum(sh.values, "CondEntropyProblem");

    const ComplexMatrix l12 = log_plus_one(sy, ly);
    const ComplexMatrix p12 = partial_trace((x * ci.adjoint() * l12).eval(), DimSplit{d1, d2}, {0});
    const ComplexMatrix g12 = -2.0 * p12.adjoint();
    const ComplexMatrix l1 = log_plus_one(sh, lh);
    const ComplexMatrix g1 = -2.0 * (l1 * c);
    return ((g12 - g1) / std::numbers::ln2).eval();
  }
};

inline ComplexMatrix max_entangled_coeffs(int d) {
  return ComplexMatrix::Identity(d, d) / std::sqrt(static_cast<double>(d));
}

template <typename Problem>
CbResult run_bipartite_opt(std::shared_ptr<const Problem> prob, int d, double sign,
                           const NormParams& params, bool use_max_entangled,
                           const std::vector<ComplexMatrix>* extra_seeds,
                           std::vector<std::vector<double>>* histories = nullptr) {
  CbResult out;
  const ComplexMatrix maxent = max_entangled_coeffs(d);
  if (use_max_entangled) {
    out.value = prob->value_at(maxent);
    out.state.coeffs = maxent;
    out.report.value = out.value;
    out.report.argument = maxent;
    out.report.converged = true;
    return out;
  }
  std::vector<ComplexMatrix> seeds{maxent};
  if (extra_seeds) seeds.insert(seeds.end(), extra_seeds->begin(), extra_seeds->end());
  Objective f = scale_invariant_objective(prob, d, sign);
  ObjectiveGradient g = scale_invariant_gradient(prob, d, sign);
  OptimOutcome best = minimize_multistart(f, params.analytic_gradient ? &g : nullptr,
                                          matrix_initializer(d, std::move(seeds)),
                                          to_optim(params), histories);
  out.value = sign * best.value;
  out.state.coeffs = unpack_complex(best.x, d, d) / best.x.norm();
  out.report.value = out.value;
  out.report.argument = out.state.coeffs;
  out.report.iterations = best.iterations;
  out.report.restarts_used = best.restarts_used;
  out.report.converged = best.converged;
  out.report.spread = best.spread;
  return out;
}

}  // namespace detail

// omega_p(Phi): sup over bipartite pure inputs of
//   || (I (x) Phi)(psi psi^dag) ||_p / || Tr_2 psi psi^dag ||_p,
// computed as the ratio objective on the Choi matrix. With use_max_entangled
// the ratio is just evaluated at the maximally entangled state, which is the
// optimizer for irreducibly covariant maps.
inline CbResult omega_p(const Channel& ch, double p, const NormParams& params = {},
                        bool use_max_entangled = false,
                        const std::vector<ComplexMatrix>* extra_seeds = nullptr) {
  detail::require_norm_exponent(p, "omega_p");
  auto prob = std::make_shared<const detail::RatioProblem>(
      detail::RatioProblem{choi(ch), ch.d_in, ch.d_out, p});
  return detail::run_bipartite_opt(prob, ch.d_in, -1.0, params, use_max_entangled, extra_seeds);
}

// nu_p(Phi): sup over pure (unentangled) inputs of || Phi(phi phi^dag) ||_p.
// Convexity of the Schatten norm makes pure inputs sufficient.
inline OptReport nu_p(const Channel& ch, double p, const NormParams& params = {}) {
  detail::require_norm_exponent(p, "nu_p");
  const int d = ch.d_in;
  Objective f = [&ch, d, p](const RealVector& x) {
    const double nx = x.norm();
    if (nx < 1e-12) return 0.0;
    const ComplexVector u = detail::unpack_complex(x, d, 1).col(0) / nx;
    return -schatten_norm_psd(cbnorm::apply(ch, (u * u.adjoint()).eval()), p);
  };
  Initializer init = [d](int restart, std::mt19937_64& rng) {
    if (restart == 0) {
      RealVector x = RealVector::Zero(2 * d);
      x(0) = 1.0;
      return x;
    }
    RealVector x = detail::pack_complex(gaussian_complex(d, 1, rng));
    return (x / x.norm()).eval();
  };
  OptimOutcome best = minimize_multistart(f, nullptr, init, detail::to_optim(params));
  OptReport report;
  report.value = -best.value;
  report.argument = detail::unpack_complex(best.x, d, 1) / best.x.norm();
  report.iterations = best.iterations;
  report.restarts_used = best.restarts_used;
  report.converged = best.converged;
  report.spread = best.spread;
  return report;
}

// Minimal conditional entropy of the channel output over bipartite pure
// inputs, in bits. Negative values witness entanglement surviving the
// channel; the identity reaches -log2 d.
inline CbResult s_cb_min(const Channel& ch, const NormParams& params = {},
                         bool use_max_entangled = false,
                         const std::vector<ComplexMatrix>* extra_seeds = nullptr,
                         std::vector<std::vector<double>>* histories = nullptr) {
  require_tp(ch, "s_cb_min");
  auto prob = std::make_shared<const detail::CondEntropyProblem>(
      detail::CondEntropyProblem{choi(ch), ch.d_in, ch.d_out});
  return detail::run_bipartite_opt(prob, ch.d_in, +1.0, params, use_max_entangled, extra_seeds,
                                   histories);
}

// Renyi-style conditional entropy surrogate in bits:
//   u(p, gamma12) = [ (1 - Tr gamma12^p / Tr gamma1^p) / (p - 1) ] / ln 2,
// which tends to S(gamma12) - S(gamma1) as p -> 1+. Defined for p in (1, 2].
inline double u_fn(const ComplexMatrix& gamma12, const DimSplit& split, double p) {
  if (std::isnan(p) || p <= 1.0 || p > 2.0)
    throw BadExponentError("u_fn: p must lie in (1, 2], got " + std::to_string(p));
  const double t12 = trace_power_psd(gamma12, p);
  const double t1 = trace_power_psd(partial_trace(gamma12, split, {0}), p);
  return (1.0 - t12 / t1) / (p - 1.0) / std::numbers::ln2;
}

// Estimates lim_{p->1+} (1 - omega_p^p)/(p-1) in bits by evaluating on a
// descending grid and extrapolating the two points nearest p = 1. The limit
// equals the minimal conditional entropy.
inline double cb_limit_estimate(const Channel& ch,
                                std::vector<double> p_grid = {1.2, 1.1, 1.05, 1.02, 1.01},
                                const NormParams& params = {},
                                std::vector<std::pair<double, double>>* table = nullptr) {
  if (p_grid.size() < 2) throw BadExponentError("cb_limit_estimate: need at least two p values");
  require_tp(ch, "cb_limit_estimate");
  std::sort(p_grid.begin(), p_grid.end(), std::greater<double>());
  std::vector<std::pair<double, double>> pts;
  for (double p : p_grid) {
    if (p <= 1.0 || p > 2.0)
      throw BadExponentError("cb_limit_estimate: grid values must lie in (1, 2]");
    NormParams prm = params;
    const double w = omega_p(ch, p, prm).value;
    const double f = (1.0 - std::pow(w, p)) / (p - 1.0) / std::numbers::ln2;
    pts.emplace_back(p, f);
  }
  if (table) *table = pts;
  const auto [p1, f1] = pts[pts.size() - 2];
  const auto [p2, f2] = pts[pts.size() - 1];  // closest to 1
  return f2 + (f1 - f2) / (p1 - p2) * (1.0 - p2);
}

namespace closed {

inline double xlog2x(double x) { return x > 0.0 ? x * std::log2(x) : 0.0; }

inline double omega_depolarizing(int d, double mu, double p) {
  const double big = 1.0 - mu + d * d * mu;
  return std::pow(d, -(p + 1.0) / p) *
         std::pow(std::pow(big, p) + (d * d - 1) * std::pow(1.0 - mu, p), 1.0 / p);
}

inline double scb_depolarizing(int d, double mu) {
  const double big = 1.0 - mu + d * d * mu;
  return std::log2(static_cast<double>(d)) -
         (xlog2x(big) + (d * d - 1) * xlog2x(1.0 - mu)) / (d * d);
}

inline double nu_depolarizing_qubit(double mu, double p) {
  return 0.5 * std::pow(std::pow(1.0 + mu, p) + std::pow(1.0 - mu, p), 1.0 / p);
}

inline double omega_werner_holevo(int d, double p) {
  return std::pow(2.0 / (d - 1.0), 1.0 - 1.0 / p);
}

inline double nu_werner_holevo(int d, double p) {
  return std::pow(1.0 / (d - 1.0), 1.0 - 1.0 / p);
}

inline double scb_werner_holevo(int d) { return std::log2((d - 1.0) / 2.0); }

inline double omega_identity(int d, double p) {
  return std::pow(static_cast<double>(d), (p - 1.0) / p);
}

inline double scb_identity(int d) { return -std::log2(static_cast<double>(d)); }

inline double scb_noisy(int d) { return std::log2(static_cast<double>(d)); }

}  // namespace closed

// Name-keyed dispatcher over the closed forms; unknown names throw
// BadNameError. Arguments are read from the map by the conventional keys
// d, mu, p.
inline double closed_form(const std::string& name, const std::map<std::string, double>& args) {
  auto get = [&args, &name](const char* key) {
    auto it = args.find(key);
    if (it == args.end())
      throw BadNameError("closed_form: " + name + " needs argument " + key);
    return it->second;
  };
  if (name == "omega_depolarizing")
    return closed::omega_depolarizing(static_cast<int>(get("d")), get("mu"), get("p"));
  if (name == "scb_depolarizing")
    return closed::scb_depolarizing(static_cast<int>(get("d")), get("mu"));
  if (name == "nu_depolarizing_qubit") return closed::nu_depolarizing_qubit(get("mu"), get("p"));
  if (name == "omega_werner_holevo")
    return closed::omega_werner_holevo(static_cast<int>(get("d")), get("p"));
  if (name == "nu_werner_holevo")
    return closed::nu_werner_holevo(static_cast<int>(get("d")), get("p"));
  if (name == "scb_werner_holevo") return closed::scb_werner_holevo(static_cast<int>(get("d")));
  if (name == "omega_identity")
    return closed::omega_identity(static_cast<int>(get("d")), get("p"));
  if (name == "scb_identity") return closed::scb_identity(static_cast<int>(get("d")));
  if (name == "scb_noisy") return closed::scb_noisy(static_cast<int>(get("d")));
  throw BadNameError("closed_form: unknown name " + name);
}

struct PairCheck {
  double lhs = 0.0;      // joint value on the tensor product channel
  double rhs = 0.0;      // product (or sum) of the single-channel values
  double gap = 0.0;      // lhs - rhs
  double rel_gap = 0.0;  // gap / |rhs|
  CbResult a, b, joint;
};

// Multiplicativity of omega_p across a tensor product. The joint run gets
// triple the restarts plus the product of the single-channel optimizers as a
// seed; at that seed the joint ratio factorizes exactly, so lhs >= rhs holds
// up to optimizer tolerance by construction and the check is whether the
// joint optimizer finds anything better.
inline PairCheck mult_check_omega(const Channel& a, const Channel& b, double p,
                                  const NormParams& params = {}) {
  PairCheck out;
  out.a = omega_p(a, p, params);
  out.b = omega_p(b, p, params);
  NormParams joint_params = params;
  joint_params.restarts = params.restarts * 3;
  std::vector<ComplexMatrix> seeds{kron(out.a.state.coeffs, out.b.state.coeffs)};
  out.joint = omega_p(tensor(a, b), p, joint_params, false, &seeds);
  out.lhs = out.joint.value;
  out.rhs = out.a.value * out.b.value;
  out.gap = out.lhs - out.rhs;
  out.rel_gap = out.gap / std::abs(out.rhs);
  return out;
}

// Additivity of the minimal conditional entropy across a tensor product,
// same seeding strategy, gap in bits.
inline PairCheck add_check_scb(const Channel& a, const Channel& b,
                               const NormParams& params = {}) {
  PairCheck out;
  out.a = s_cb_min(a, params);
  out.b = s_cb_min(b, params);
  NormParams joint_params = params;
  joint_params.restarts = params.restarts * 3;
  std::vector<ComplexMatrix> seeds{kron(out.a.state.coeffs, out.b.state.coeffs)};
  out.joint = s_cb_min(tensor(a, b), joint_params, false, &seeds);
  out.lhs = out.joint.value;
  out.rhs = out.a.value + out.b.value;
  out.gap = out.lhs - out.rhs;
  out.rel_gap = std::abs(out.rhs) > 0 ? out.gap / std::abs(out.rhs) : out.gap;
  return out;
}

struct MuStar {
  double root = 0.0;
  double reference = 0.74592;  // the published crossing, kept for comparison
  double discrepancy = 0.0;    // root - reference
  int iterations = 0;
};

// Bisects the closed-form minimal conditional entropy of the depolarizing
// family for its sign change. The bracket endpoints must straddle zero.
inline MuStar mu_star(int d = 2, double lo = 0.5, double hi = 0.9, double tol_root = 1e-10) {
  double flo = closed::scb_depolarizing(d, lo);
  double fhi = closed::scb_depolarizing(d, hi);
  if (flo == 0.0) return {lo, 0.74592, lo - 0.74592, 0};
  if (fhi == 0.0) return {hi, 0.74592, hi - 0.74592, 0};
  if ((flo > 0) == (fhi > 0))
    throw NoSignChangeError("mu_star: no sign change on [" + std::to_string(lo) + ", " +
                            std::to_string(hi) + "]");
  MuStar out;
  while (hi - lo > tol_root) {
    const double mid = 0.5 * (lo + hi);
    const double fmid = closed::scb_depolarizing(d, mid);
    ++out.iterations;
    if (fmid == 0.0) {
      lo = hi = mid;
      break;
    }
    if ((fmid > 0) == (flo > 0)) {
      lo = mid;
      flo = fmid;
    } else {
      hi = mid;
    }
  }
  out.root = 0.5 * (lo + hi);
  out.discrepancy = out.root - out.reference;
  return out;
}

// The two-parameter qubit family gamma12(a) induced by inputs
// sqrt(a) e00 + sqrt(1-a) e11, written in the output-major basis order
// 00, 10, 01, 11 of the published display.
inline ComplexMatrix nonunital_gamma12(double a, double lambda, double tau) {
  ComplexMatrix g = ComplexMatrix::Zero(4, 4);
  g(0, 0) = a * (1.0 + tau + lambda) / 2.0;
  g(1, 1) = (1.0 - a) * (1.0 + tau - lambda) / 2.0;
  g(2, 2) = a * (1.0 - tau - lambda) / 2.0;
  g(3, 3) = (1.0 - a) * (1.0 - tau + lambda) / 2.0;
  g(0, 3) = g(3, 0) = lambda * std::sqrt(a * (1.0 - a));
  return g;
}

struct SweepResult {
  double a_star = 0.0;
  std::vector<double> a_grid;
  std::vector<double> ratios;
  double lambda = 0.0;
  double tau = 0.0;
  double p = 2.0;
};

// Scans the Schmidt weight a of the input through the closed-form gamma12
// family and reports where || gamma12 ||_p / || gamma1 ||_p peaks. The family
// is a formal curve in (lambda, tau); building an actual channel additionally
// needs |tau| <= 1 - lambda.
inline SweepResult nonunital_sweep(double lambda, double tau, double p,
                                   std::vector<double> a_grid = {}) {
  detail::require_norm_exponent(p, "nonunital_sweep");
  if (a_grid.empty())
    for (int i = 1; i <= 199; ++i) a_grid.push_back(i * 0.005);
  SweepResult out;
  out.a_grid = a_grid;
  out.lambda = lambda;
  out.tau = tau;
  out.p = p;
  double best = -1.0;
  for (double a : a_grid) {
    // singular-value norm: outside the CP region the formal curve can leave
    // the PSD cone
    const double num = schatten_norm(nonunital_gamma12(a, lambda, tau), p);
    const double den = std::pow(std::pow(a, p) + std::pow(1.0 - a, p), 1.0 / p);
    const double r = num / den;
    out.ratios.push_back(r);
    if (r > best) {
      best = r;
      out.a_star = a;
    }
  }
  return out;
}

}  // namespace cbnorm
