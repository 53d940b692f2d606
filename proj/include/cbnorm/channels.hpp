#pragma once

#include <cmath>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "cbnorm/linalg.hpp"
#include "cbnorm/random.hpp"

namespace cbnorm {

// Completely positive map between matrix algebras, held by Kraus operators
// (each d_out x d_in). Trace preservation is not assumed; callers that need
// it go through require_tp.
struct Channel {
  int d_in = 0;
  int d_out = 0;
  std::vector<ComplexMatrix> kraus;
  std::string name;
  std::map<std::string, double> params;
  bool entanglement_breaking = false;

  mutable std::shared_ptr<const ComplexMatrix> choi_cache;
};

// Frobenius residual of sum K^dagger K against the identity.
inline double tp_residual(const Channel& ch) {
  ComplexMatrix s = ComplexMatrix::Zero(ch.d_in, ch.d_in);
  for (const auto& k : ch.kraus) s.noalias() += k.adjoint() * k;
  return (s - ComplexMatrix::Identity(ch.d_in, ch.d_in)).norm();
}

inline bool is_trace_preserving(const Channel& ch, double slack = tol::tp) {
  return tp_residual(ch) <= slack * std::sqrt(static_cast<double>(ch.d_in));
}

inline void require_tp(const Channel& ch, const char* where) {
  const double r = tp_residual(ch);
  if (r > tol::tp * std::sqrt(static_cast<double>(ch.d_in)))
    throw NotTpError(std::string(where) + ": sum K^dag K - I residual " + std::to_string(r) +
                     " for channel " + (ch.name.empty() ? "<unnamed>" : ch.name));
}

struct ChannelCheck {
  bool cp = false;
  bool tp = false;
  double min_choi_eig = 0.0;
  double tp_residual = 0.0;
};

// Choi matrix on input (x) output:
//   X = sum_jk E_jk (x) Phi(E_jk),  index (j,a) = j*d_out + a.
// Assembled from Kraus vectorizations, X = sum_l w_l w_l^dagger with
// w_l[(j,a)] = K_l(a,j), so the result is PSD by construction.
inline const ComplexMatrix& choi(const Channel& ch) {
  if (!ch.choi_cache) {
    const long n = static_cast<long>(ch.d_in) * ch.d_out;
    ComplexMatrix x = ComplexMatrix::Zero(n, n);
    for (const auto& k : ch.kraus) {
      ComplexVector w(n);
      for (int j = 0; j < ch.d_in; ++j)
        for (int a = 0; a < ch.d_out; ++a) w(static_cast<long>(j) * ch.d_out + a) = k(a, j);
      x.noalias() += w * w.adjoint();
    }
    ch.choi_cache = std::make_shared<const ComplexMatrix>(std::move(x));
  }
  return *ch.choi_cache;
}

// Kraus operators of a map given its Choi matrix. Throws NotCpError when the
// Choi matrix has a genuinely negative eigenvalue.
inline std::vector<ComplexMatrix> kraus_from_choi(const ComplexMatrix& x, int d_in, int d_out) {
  const long n = static_cast<long>(d_in) * d_out;
  if (x.rows() != n || x.cols() != n)
    throw DimMismatchError("kraus_from_choi: Choi matrix has wrong size");
  Spectrum s = herm_eig(x);
  const double scale = std::max(std::abs(s.values(0)), 1.0);
  const double lowest = s.values(s.values.size() - 1);
  if (lowest < -tol::eig * scale)
    throw NotCpError("kraus_from_choi: Choi eigenvalue " + std::to_string(lowest) +
                     " is negative");
  std::vector<ComplexMatrix> ks;
  for (long i = 0; i < s.values.size(); ++i) {
    const double lam = s.values(i);
    if (lam <= tol::eig_clip * std::max(s.values(0), 0.0)) continue;
    const double root = std::sqrt(lam);
    ComplexMatrix k(d_out, d_in);
    for (int j = 0; j < d_in; ++j)
      for (int a = 0; a < d_out; ++a) k(a, j) = root * s.vectors(static_cast<long>(j) * d_out + a, i);
    ks.push_back(std::move(k));
  }
  return ks;
}

inline ChannelCheck validate(const Channel& ch) {
  for (const auto& k : ch.kraus)
    if (k.rows() != ch.d_out || k.cols() != ch.d_in)
      throw DimMismatchError("validate: Kraus operator shape does not match channel dims");
  ChannelCheck out;
  RealVector ev = herm_eigenvalues(choi(ch));
  out.min_choi_eig = ev(ev.size() - 1);
  out.cp = out.min_choi_eig >= -tol::eig * std::max(std::abs(ev(0)), 1.0);
  out.tp_residual = tp_residual(ch);
  out.tp = out.tp_residual <= tol::tp * std::sqrt(static_cast<double>(ch.d_in));
  return out;
}

inline ComplexMatrix apply(const Channel& ch, const ComplexMatrix& rho) {
  if (rho.rows() != ch.d_in || rho.cols() != ch.d_in)
    throw DimMismatchError("apply: state has wrong dimension");
  ComplexMatrix out = ComplexMatrix::Zero(ch.d_out, ch.d_out);
  for (const auto& k : ch.kraus) out.noalias() += k * rho * k.adjoint();
  return out;
}

// (I_ref (x) Phi)(Q) for Q on C^{d_ref} (x) C^{d_in}.
inline ComplexMatrix apply_extended(const Channel& ch, const ComplexMatrix& q, int d_ref) {
  if (q.rows() != static_cast<long>(d_ref) * ch.d_in || q.rows() != q.cols())
    throw DimMismatchError("apply_extended: state does not match d_ref * d_in");
  const ComplexMatrix id = ComplexMatrix::Identity(d_ref, d_ref);
  ComplexMatrix out = ComplexMatrix::Zero(static_cast<long>(d_ref) * ch.d_out, static_cast<long>(d_ref) * ch.d_out);
  for (const auto& k : ch.kraus) {
    ComplexMatrix ik = kron(id, k);
    out.noalias() += ik * q * ik.adjoint();
  }
  return out;
}

// rho -> mu rho + (1 - mu) I/d. Valid for mu in [-1/(d^2-1), 1]; anything
// outside surfaces as NotCpError from the Choi decomposition.
inline Channel depolarizing(int d, double mu) {
  if (d < 2) throw DimMismatchError("depolarizing: d must be >= 2");
  const long n = static_cast<long>(d) * d;
  ComplexVector omega = ComplexVector::Zero(n);
  for (int j = 0; j < d; ++j) omega(static_cast<long>(j) * d + j) = 1.0;
  ComplexMatrix x = mu * (omega * omega.adjoint());
  x += ((1.0 - mu) / d) * ComplexMatrix::Identity(n, n);
  Channel ch;
  ch.d_in = ch.d_out = d;
  ch.kraus = kraus_from_choi(x, d, d);
  ch.name = "depolarizing";
  ch.params = {{"d", static_cast<double>(d)}, {"mu", mu}};
  // isotropic separability threshold
  ch.entanglement_breaking = mu <= 1.0 / (d + 1) + 1e-12;
  return ch;
}

inline Channel identity_channel(int d) {
  Channel ch;
  ch.d_in = ch.d_out = d;
  ch.kraus = {ComplexMatrix::Identity(d, d)};
  ch.name = "identity";
  ch.params = {{"d", static_cast<double>(d)}};
  return ch;
}

// Completely depolarizing: rho -> I/d Tr rho.
inline Channel noisy_channel(int d) {
  Channel ch = depolarizing(d, 0.0);
  ch.name = "noisy";
  ch.params = {{"d", static_cast<double>(d)}};
  return ch;
}

// rho -> (Tr rho I - rho^T)/(d-1), Kraus (E_jk - E_kj)/sqrt(d-1) for j < k.
inline Channel werner_holevo(int d) {
  if (d < 2) throw DimMismatchError("werner_holevo: d must be >= 2");
  Channel ch;
  ch.d_in = ch.d_out = d;
  const double root = std::sqrt(static_cast<double>(d - 1));
  for (int j = 0; j < d; ++j)
    for (int k = j + 1; k < d; ++k) {
      ComplexMatrix m = ComplexMatrix::Zero(d, d);
      m(j, k) = 1.0 / root;
      m(k, j) = -1.0 / root;
      ch.kraus.push_back(std::move(m));
    }
  ch.name = "werner_holevo";
  ch.params = {{"d", static_cast<double>(d)}};
  return ch;
}

// Choi matrix of the qubit map rho -> lambda rho + ((1-lambda)/2 I + (tau/2) sigma_3) Tr rho,
// basis order (in, out) = 00, 01, 10, 11.
inline ComplexMatrix nonunital_qubit_choi(double lambda, double tau) {
  ComplexMatrix x = ComplexMatrix::Zero(4, 4);
  x(0, 0) = (1.0 + lambda + tau) / 2.0;
  x(1, 1) = (1.0 - lambda - tau) / 2.0;
  x(2, 2) = (1.0 - lambda + tau) / 2.0;
  x(3, 3) = (1.0 + lambda - tau) / 2.0;
  x(0, 3) = x(3, 0) = lambda;
  return x;
}

// Complete positivity demands |tau| <= 1 - lambda; outside that region the
// Choi decomposition throws NotCpError.
inline Channel nonunital_qubit(double lambda, double tau) {
  Channel ch;
  ch.d_in = ch.d_out = 2;
  ch.kraus = kraus_from_choi(nonunital_qubit_choi(lambda, tau), 2, 2);
  ch.name = "nonunital";
  ch.params = {{"lambda", lambda}, {"tau", tau}};
  return ch;
}

// Measure-and-prepare data: rho -> sum_k Tr(E_k rho) R_k.
struct EbtSpec {
  std::vector<ComplexMatrix> povm;    // PSD, summing to the identity
  std::vector<ComplexMatrix> states;  // densities, one per POVM element
};

inline Channel ebt_channel(const EbtSpec& spec) {
  if (spec.povm.empty() || spec.povm.size() != spec.states.size())
    throw BadPovmError("ebt_channel: need matching, non-empty POVM and state lists");
  const int d_in = static_cast<int>(spec.povm[0].rows());
  const int d_out = static_cast<int>(spec.states[0].rows());
  ComplexMatrix sum = ComplexMatrix::Zero(d_in, d_in);
  for (const auto& e : spec.povm) {
    if (e.rows() != d_in || e.cols() != d_in)
      throw DimMismatchError("ebt_channel: POVM element shape mismatch");
    RealVector ev = herm_eigenvalues(e);
    if (ev(ev.size() - 1) < -tol::eig * std::max(std::abs(ev(0)), 1.0))
      throw BadPovmError("ebt_channel: POVM element has negative eigenvalue " +
                         std::to_string(ev(ev.size() - 1)));
    sum += e;
  }
  if ((sum - ComplexMatrix::Identity(d_in, d_in)).norm() > tol::tp * d_in)
    throw BadPovmError("ebt_channel: POVM does not sum to the identity");
  for (const auto& r : spec.states) {
    if (r.rows() != d_out || r.cols() != d_out)
      throw DimMismatchError("ebt_channel: state shape mismatch");
    RealVector ev = herm_eigenvalues(r);
    if (ev(ev.size() - 1) < -tol::eig * std::max(std::abs(ev(0)), 1.0) ||
        std::abs(herm_eigenvalues(r).sum() - 1.0) > tol::trace * d_out)
      throw BadPovmError("ebt_channel: prepared state is not a density matrix");
  }
  // Choi of a measure-and-prepare map: X = sum_k E_k^T (x) R_k.
  const long n = static_cast<long>(d_in) * d_out;
  ComplexMatrix x = ComplexMatrix::Zero(n, n);
  for (std::size_t k = 0; k < spec.povm.size(); ++k)
    x += kron(spec.povm[k].transpose(), spec.states[k]);
  Channel ch;
  ch.d_in = d_in;
  ch.d_out = d_out;
  ch.kraus = kraus_from_choi(x, d_in, d_out);
  ch.name = "ebt";
  ch.entanglement_breaking = true;
  return ch;
}

// Haar-random isometry into output (x) environment, traced over the
// environment. Needs d_out * d_env >= d_in.
inline Channel random_cpt(int d_in, int d_out, int d_env, std::uint64_t seed) {
  if (static_cast<long>(d_out) * d_env < d_in)
    throw DimMismatchError("random_cpt: d_out * d_env < d_in");
  auto rng = seeded_rng(seed);
  ComplexMatrix v = haar_isometry(d_out * d_env, d_in, rng);
  Channel ch;
  ch.d_in = d_in;
  ch.d_out = d_out;
  ch.kraus.assign(d_env, ComplexMatrix::Zero(d_out, d_in));
  for (int e = 0; e < d_env; ++e)
    for (int a = 0; a < d_out; ++a)
      for (int i = 0; i < d_in; ++i) ch.kraus[e](a, i) = v(static_cast<long>(a) * d_env + e, i);
  ch.name = "random_cpt";
  ch.params = {{"d_in", static_cast<double>(d_in)},
               {"d_out", static_cast<double>(d_out)},
               {"d_env", static_cast<double>(d_env)},
               {"seed", static_cast<double>(seed)}};
  return ch;
}

inline Channel tensor(const Channel& a, const Channel& b) {
  Channel ch;
  ch.d_in = a.d_in * b.d_in;
  ch.d_out = a.d_out * b.d_out;
  for (const auto& ka : a.kraus)
    for (const auto& kb : b.kraus) ch.kraus.push_back(kron(ka, kb));
  ch.name = a.name + "x" + b.name;
  ch.entanglement_breaking = a.entanglement_breaking && b.entanglement_breaking;
  return ch;
}

struct StinespringIsometry {
  ComplexMatrix v;  // (d_out * d_env) x d_in, row index a*d_env + e
  int d_out = 0;
  int d_env = 0;
};

// V e_i = sum_{a,e} K_e(a,i) e_a (x) e_e; an isometry exactly when the
// channel is trace preserving.
inline StinespringIsometry stinespring(const Channel& ch) {
  const int d_env = static_cast<int>(ch.kraus.size());
  StinespringIsometry st;
  st.d_out = ch.d_out;
  st.d_env = d_env;
  st.v = ComplexMatrix::Zero(static_cast<long>(ch.d_out) * d_env, ch.d_in);
  for (int e = 0; e < d_env; ++e)
    for (int a = 0; a < ch.d_out; ++a)
      for (int i = 0; i < ch.d_in; ++i) st.v(static_cast<long>(a) * d_env + e, i) = ch.kraus[e](a, i);
  return st;
}

// Complementary channel to the environment: C_a(e,i) = K_e(a,i).
inline Channel complementary(const Channel& ch) {
  const int d_env = static_cast<int>(ch.kraus.size());
  Channel out;
  out.d_in = ch.d_in;
  out.d_out = d_env;
  out.kraus.assign(ch.d_out, ComplexMatrix::Zero(d_env, ch.d_in));
  for (int e = 0; e < d_env; ++e)
    for (int a = 0; a < ch.d_out; ++a)
      for (int i = 0; i < ch.d_in; ++i) out.kraus[a](e, i) = ch.kraus[e](a, i);
  out.name = ch.name + "_complement";
  return out;
}

}  // namespace cbnorm
