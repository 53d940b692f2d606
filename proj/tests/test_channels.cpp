#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "cbnorm/channels.hpp"

using namespace cbnorm;

namespace {

double frob_dist(const ComplexMatrix& a, const ComplexMatrix& b) { return (a - b).norm(); }

}  // namespace

TEST_CASE("depolarizing channel action and trace preservation") {
  auto rng = seeded_rng(101);
  for (int d : {2, 3}) {
    for (double mu : {0.0, 0.3, 0.9, 1.0}) {
      Channel ch = depolarizing(d, mu);
      CHECK(is_trace_preserving(ch));
      ComplexMatrix rho = random_density(d, rng);
      ComplexMatrix expect =
          mu * rho + ((1.0 - mu) / d) * ComplexMatrix::Identity(d, d) * rho.trace();
      CHECK(frob_dist(cbnorm::apply(ch, rho), expect) == doctest::Approx(0.0).epsilon(1e-10));
    }
  }
}

TEST_CASE("depolarizing parameter range is enforced by the Choi spectrum") {
  CHECK_THROWS_WITH_AS(depolarizing(2, 1.5), doctest::Contains("eigenvalue"), NotCpError);
  CHECK_THROWS_AS(depolarizing(2, -0.4), NotCpError);  // below -1/3
  CHECK_NOTHROW(depolarizing(2, -0.333));
  CHECK(depolarizing(2, 1.0 / 3.0).entanglement_breaking);
  CHECK_FALSE(depolarizing(2, 0.4).entanglement_breaking);
  CHECK(noisy_channel(3).entanglement_breaking);
}

TEST_CASE("Choi matrix conventions") {
  // identity qubit: Choi is the unnormalized maximally entangled projector
  Channel id2 = identity_channel(2);
  const ComplexMatrix& x = choi(id2);
  ComplexVector omega = ComplexVector::Zero(4);
  omega(0) = omega(3) = 1.0;
  CHECK(frob_dist(x, omega * omega.adjoint()) == doctest::Approx(0.0).epsilon(1e-14));

  // trace preservation reads off the input marginal, total trace is d_in
  for (const Channel& ch : {depolarizing(3, 0.6), werner_holevo(3), nonunital_qubit(0.6, 0.3)}) {
    const ComplexMatrix& c = choi(ch);
    CHECK(c.trace().real() == doctest::Approx(ch.d_in).epsilon(1e-12));
    CHECK(frob_dist(partial_trace(c, DimSplit{ch.d_in, ch.d_out}, {0}),
                    ComplexMatrix::Identity(ch.d_in, ch.d_in)) ==
          doctest::Approx(0.0).epsilon(1e-10));
  }

  // depolarizing Choi spectrum: one big eigenvalue, d^2-1 equal small ones
  RealVector ev = herm_eigenvalues(choi(depolarizing(2, 0.5)));
  CHECK(ev(0) == doctest::Approx(1.25).epsilon(1e-12));
  CHECK(ev(3) == doctest::Approx(0.25).epsilon(1e-12));

  // cache is shared
  CHECK(&choi(id2) == &choi(id2));
}

TEST_CASE("kraus_from_choi round trip") {
  Channel ch = random_cpt(3, 2, 4, 202);
  const ComplexMatrix x = choi(ch);
  Channel back;
  back.d_in = 3;
  back.d_out = 2;
  back.kraus = kraus_from_choi(x, 3, 2);
  CHECK(frob_dist(choi(back), x) == doctest::Approx(0.0).epsilon(1e-10));
  auto rng = seeded_rng(203);
  ComplexMatrix rho = random_density(3, rng);
  CHECK(frob_dist(cbnorm::apply(back, rho), cbnorm::apply(ch, rho)) == doctest::Approx(0.0).epsilon(1e-10));
}

TEST_CASE("validate reports both properties") {
  ChannelCheck ok = validate(depolarizing(2, 0.7));
  CHECK(ok.cp);
  CHECK(ok.tp);
  Channel not_tp;
  not_tp.d_in = not_tp.d_out = 2;
  not_tp.kraus = {0.5 * ComplexMatrix::Identity(2, 2)};
  ChannelCheck bad = validate(not_tp);
  CHECK(bad.cp);
  CHECK_FALSE(bad.tp);
  CHECK_THROWS_AS(require_tp(not_tp, "test"), NotTpError);
}

TEST_CASE("werner_holevo action") {
  auto rng = seeded_rng(104);
  for (int d : {2, 3, 4}) {
    Channel ch = werner_holevo(d);
    CHECK(is_trace_preserving(ch));
    CHECK(static_cast<int>(ch.kraus.size()) == d * (d - 1) / 2);
    ComplexMatrix rho = random_density(d, rng);
    ComplexMatrix expect =
        (ComplexMatrix::Identity(d, d) * rho.trace() - rho.transpose()) / (d - 1.0);
    CHECK(frob_dist(cbnorm::apply(ch, rho), expect) == doctest::Approx(0.0).epsilon(1e-10));
  }
  // d = 2: a single antisymmetric Kraus operator, so the map is unitary
  Channel wh2 = werner_holevo(2);
  REQUIRE(wh2.kraus.size() == 1);
  CHECK(frob_dist(wh2.kraus[0] * wh2.kraus[0].adjoint(), ComplexMatrix::Identity(2, 2)) ==
        doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("nonunital qubit family and its positivity region") {
  Channel ch = nonunital_qubit(0.6, 0.3);
  CHECK(is_trace_preserving(ch));
  auto rng = seeded_rng(105);
  ComplexMatrix rho = random_density(2, rng);
  ComplexMatrix sigma3 = ComplexMatrix::Zero(2, 2);
  sigma3(0, 0) = 1.0;
  sigma3(1, 1) = -1.0;
  ComplexMatrix expect = 0.6 * rho +
                         rho.trace() * (0.4 / 2.0 * ComplexMatrix::Identity(2, 2) +
                                        0.3 / 2.0 * sigma3);
  CHECK(frob_dist(cbnorm::apply(ch, rho), expect) == doctest::Approx(0.0).epsilon(1e-10));

  CHECK_NOTHROW(nonunital_qubit(0.6, -0.4));
  CHECK_NOTHROW(nonunital_qubit(0.0, 1.0));
  // |tau| > 1 - lambda breaks positivity of the Choi matrix
  CHECK_THROWS_AS(nonunital_qubit(0.8, 0.3), NotCpError);
  CHECK_THROWS_AS(nonunital_qubit(0.6, 0.5), NotCpError);
  CHECK_THROWS_AS(nonunital_qubit(0.8, -0.3), NotCpError);
}

TEST_CASE("measure-and-prepare channel reproduces qubit depolarizing at mu = 1/3") {
  // prepare the six Pauli eigenstates, measure the matching scaled projectors
  std::vector<ComplexVector> dirs;
  ComplexVector v(2);
  v << 1, 0;
  dirs.push_back(v);
  v << 0, 1;
  dirs.push_back(v);
  v << 1, 1;
  dirs.push_back(v / std::sqrt(2.0));
  v << 1, -1;
  dirs.push_back(v / std::sqrt(2.0));
  v << 1, Complex(0, 1);
  dirs.push_back(v / std::sqrt(2.0));
  v << 1, Complex(0, -1);
  dirs.push_back(v / std::sqrt(2.0));

  EbtSpec spec;
  for (const auto& u : dirs) {
    ComplexMatrix proj = u * u.adjoint();
    spec.states.push_back(proj);
    spec.povm.push_back(proj / 3.0);
  }
  Channel mp = ebt_channel(spec);
  CHECK(mp.entanglement_breaking);
  CHECK(is_trace_preserving(mp));
  CHECK(frob_dist(choi(mp), choi(depolarizing(2, 1.0 / 3.0))) ==
        doctest::Approx(0.0).epsilon(1e-12));

  EbtSpec broken = spec;
  broken.povm.pop_back();
  broken.states.pop_back();
  CHECK_THROWS_AS(ebt_channel(broken), BadPovmError);
}

TEST_CASE("random CPT maps are trace preserving and reproducible") {
  Channel a = random_cpt(2, 2, 3, 7);
  Channel b = random_cpt(2, 2, 3, 7);
  Channel c = random_cpt(2, 2, 3, 8);
  CHECK(is_trace_preserving(a));
  CHECK(frob_dist(choi(a), choi(b)) == 0.0);
  CHECK(frob_dist(choi(a), choi(c)) > 1e-3);
  CHECK_THROWS_AS(random_cpt(5, 2, 2, 1), DimMismatchError);
}

TEST_CASE("tensor product channel") {
  Channel a = depolarizing(2, 0.7);
  Channel b = werner_holevo(2);
  Channel t = tensor(a, b);
  CHECK(t.d_in == 4);
  CHECK(t.d_out == 4);
  CHECK(is_trace_preserving(t));
  auto rng = seeded_rng(106);
  ComplexMatrix ra = random_density(2, rng);
  ComplexMatrix rb = random_density(2, rng);
  CHECK(frob_dist(cbnorm::apply(t, kron(ra, rb)), kron(cbnorm::apply(a, ra), cbnorm::apply(b, rb))) ==
        doctest::Approx(0.0).epsilon(1e-10));
  CHECK(tensor(depolarizing(2, 0.2), noisy_channel(2)).entanglement_breaking);
  CHECK_FALSE(t.entanglement_breaking);
}

TEST_CASE("apply_extended acts on the second slot only") {
  Channel ch = depolarizing(2, 0.4);
  auto rng = seeded_rng(107);
  ComplexMatrix a = random_density(3, rng);
  ComplexMatrix b = random_density(2, rng);
  CHECK(frob_dist(apply_extended(ch, kron(a, b), 3), kron(a, cbnorm::apply(ch, b))) ==
        doctest::Approx(0.0).epsilon(1e-10));
  CHECK_THROWS_AS(apply_extended(ch, a, 2), DimMismatchError);
}

TEST_CASE("stinespring dilation") {
  Channel ch = random_cpt(3, 2, 3, 55);
  StinespringIsometry st = stinespring(ch);
  CHECK(frob_dist(st.v.adjoint() * st.v, ComplexMatrix::Identity(3, 3)) ==
        doctest::Approx(0.0).epsilon(1e-12));
  auto rng = seeded_rng(108);
  ComplexMatrix rho = random_density(3, rng);
  ComplexMatrix lifted = st.v * rho * st.v.adjoint();
  CHECK(frob_dist(partial_trace(lifted, DimSplit{st.d_out, st.d_env}, {0}), cbnorm::apply(ch, rho)) ==
        doctest::Approx(0.0).epsilon(1e-10));
}

TEST_CASE("complementary channel and the exchange entropy identity") {
  // S(Phi^C(I/d)) equals the entropy of the normalized Choi matrix
  for (const Channel& ch : {depolarizing(2, 0.6), random_cpt(2, 3, 2, 77), werner_holevo(3)}) {
    Channel comp = complementary(ch);
    ComplexMatrix maxmix = ComplexMatrix::Identity(ch.d_in, ch.d_in) / ch.d_in;
    const double lhs = von_neumann_entropy(cbnorm::apply(comp, maxmix));
    const double rhs = von_neumann_entropy(choi(ch) / ch.d_in);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-9));
  }
}
