#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include "biham/dynamics.hpp"

using namespace biham;

namespace {

const Complex I(0.0, 1.0);

ReducedPoint random_reduced(int n, std::uint64_t seed, double gap = 0.3,
                            double scale = 0.5) {
  return ReducedPoint(random_torus_regular(n, mix_seed(seed, 1), gap),
                      random_hermitian(n, mix_seed(seed, 2), scale));
}

}  // namespace

TEST_CASE("power-trace Hamiltonian values") {
  ComplexMatrix L = ComplexMatrix::Zero(2, 2);
  L(0, 0) = 1.0;
  L(1, 1) = 2.0;
  const Hermitian h(L);
  CHECK(power_trace_hamiltonian(1, h) == doctest::Approx(3.0));
  CHECK(power_trace_hamiltonian(2, h) == doctest::Approx(2.5));
  CHECK_THROWS_AS(power_trace_hamiltonian(0, h), std::invalid_argument);

  // invariance under conjugation
  Unitary eta = random_unitary(2, 3);
  const Hermitian hc(hermitian_part(eta.m * L * eta.m.adjoint()));
  CHECK(power_trace_hamiltonian(2, hc) == doctest::Approx(2.5).epsilon(1e-12));

  // the word form matches
  const PhasePoint pp(random_unitary(2, 4), h);
  CHECK(hamiltonian_observable(2).evaluate(pp) == doctest::Approx(2.5));
}

TEST_CASE("explicit flow basics") {
  const PhasePoint start(random_unitary(2, 5), random_hermitian(2, 6));
  const PhasePoint same = explicit_flow(2, 0.0, start);
  CHECK((same.g.m - start.g.m).norm() <= 1e-14);
  CHECK((same.L.m - start.L.m).norm() <= 1e-14);

  ComplexMatrix L = ComplexMatrix::Zero(2, 2);
  L(0, 0) = 1.0;
  L(1, 1) = -1.0;
  const PhasePoint p2(random_unitary(2, 7), Hermitian(L));
  const PhasePoint moved = explicit_flow(1, 3.14159265358979323846, p2);
  CHECK((moved.g.m + p2.g.m).norm() <= 1e-12);  // exp(+-i pi) = -1
  CHECK((moved.L.m - L).norm() == 0.0);
}

TEST_CASE("flows of different degree commute") {
  const PhasePoint start(random_unitary(3, 8), random_hermitian(3, 9));
  const PhasePoint a = explicit_flow(1, 0.7, explicit_flow(2, 0.4, start));
  const PhasePoint b = explicit_flow(2, 0.4, explicit_flow(1, 0.7, start));
  CHECK((a.g.m - b.g.m).norm() <= 1e-9);
  CHECK((a.L.m - b.L.m).norm() <= 1e-9);
}

TEST_CASE("gauge compensator solves the tangency condition") {
  const int n = 3;
  SUBCASE("vanishing momenta") {
    const ReducedPoint rp(random_torus_regular(n, 10, 0.2),
                          Hermitian(ComplexMatrix::Zero(n, n)));
    CHECK(tangency_gauge(2, rp).m.norm() == 0.0);
  }
  SUBCASE("diagonal momenta keep only the constant part") {
    ComplexMatrix L = ComplexMatrix::Zero(n, n);
    L(0, 0) = 0.4;
    L(1, 1) = -0.7;
    L(2, 2) = 1.1;
    const ReducedPoint rp(random_torus_regular(n, 11, 0.2), Hermitian(L));
    const AntiHermitian z = tangency_gauge(2, rp);
    CHECK((z.m + 0.5 * I * L * L).norm() <= 1e-14);
  }
  SUBCASE("condition holds at random points") {
    for (std::uint64_t s = 0; s < 100; ++s) {
      const ReducedPoint rp = random_reduced(n, mix_seed(12, s), 0.05);
      const int k = 1 + static_cast<int>(s % 3);
      const AntiHermitian z = tangency_gauge(k, rp);
      ComplexMatrix Lk = ComplexMatrix::Identity(n, n);
      for (int i = 0; i < k; ++i) Lk *= rp.L.m;
      const ComplexMatrix cond =
          (I * Lk * rp.Q.Q + commutator(z.m, rp.Q.Q)) * rp.Q.inverse();
      CHECK((cond - project_space(Space::UNDiag, cond)).norm() <= 1e-9);
    }
  }
}

TEST_CASE("reduced field structure") {
  const int n = 3;
  SUBCASE("diagonal momenta freeze the spins") {
    ComplexMatrix L = ComplexMatrix::Zero(n, n);
    L(0, 0) = 0.5;
    L(1, 1) = 1.5;
    L(2, 2) = -0.25;
    const ReducedPoint rp(random_torus_regular(n, 13, 0.2), Hermitian(L));
    const ReducedTangent w = reduced_field(2, rp);
    CHECK((w.dQ - I * L * L * rp.Q.Q).norm() <= 1e-14);
    CHECK(w.dL.m.norm() <= 1e-14);
  }
  SUBCASE("field is tangent to the torus") {
    for (std::uint64_t s = 0; s < 50; ++s) {
      const ReducedPoint rp = random_reduced(n, mix_seed(14, s));
      const ReducedTangent w = reduced_field(1 + static_cast<int>(s % 3), rp);
      CHECK(grade_split(w.dQ * rp.Q.inverse()).off().norm() <= 1e-10);
      CHECK((w.dL.m - w.dL.m.adjoint()).norm() <= 1e-13);
    }
  }
}

TEST_CASE("rk4 reproduces the decoupled closed form") {
  const int n = 3;
  RealVector q0(n), l0(n);
  q0 << 0.3, 2.0, 4.2;
  l0 << 0.8, -0.3, 0.5;
  ComplexMatrix L = ComplexMatrix::Zero(n, n);
  for (int j = 0; j < n; ++j) L(j, j) = l0[j];
  const ReducedPoint start(RegularTorusElement::from_angles(q0), Hermitian(L));
  for (int k : {1, 2}) {
    const IntegrationResult traj = integrate_rk4(k, start, 3.0, 1e-2);
    CHECK_FALSE(traj.aborted);
    const auto& fin = traj.samples.back();
    CHECK((fin.state.L.m - L).norm() <= 1e-10);
    for (int j = 0; j < n; ++j) {
      const Complex expect = std::polar(1.0, q0[j] + fin.t * std::pow(l0[j], k));
      CHECK(std::abs(fin.state.Q.Q(j, j) - expect) <= 1e-9);
    }
  }
}

TEST_CASE("rk4 conserves the trace words") {
  const ReducedPoint start = random_reduced(3, 15, 0.8, 0.25);
  const IntegrationResult traj = integrate_rk4(1, start, 10.0, 1e-2);
  CHECK_FALSE(traj.aborted);
  CHECK(traj.min_gap > 10.0 * tol::regular_gap);
  CHECK(traj.max_drift <= 1e-8);
  for (const auto& d : conserved_drifts(traj, 4)) {
    CHECK(d.max_drift <= 1e-7);
    if (d.word == "Re tr(L L)") CHECK(d.max_drift <= 1e-8);
  }
}

TEST_CASE("rk4 aborts near torus collisions") {
  // antisymmetric off-diagonal coupling drives the two angles together
  RealVector q0(2);
  q0 << 0.0, 0.35;
  ComplexMatrix L = ComplexMatrix::Zero(2, 2);
  L(0, 0) = 0.6;
  L(1, 1) = -0.6;
  L(0, 1) = Complex(0.4, 0.2);
  L(1, 0) = std::conj(L(0, 1));
  const ReducedPoint start(RegularTorusElement::from_angles(q0),
                           Hermitian(L));
  const IntegrationResult traj = integrate_rk4(1, start, 50.0, 1e-2);
  if (traj.aborted) {
    CHECK(traj.abort_time > 0.0);
    CHECK(traj.min_gap < 0.35);
  } else {
    CHECK(traj.samples.back().t == doctest::Approx(50.0));
  }
  CHECK_THROWS_AS(integrate_rk4(1, start, 1.0, -0.1), std::invalid_argument);
}

TEST_CASE("conserved word enumeration") {
  const auto one = conserved_words(1);
  REQUIRE(one.size() == 1);
  CHECK(one[0].first == "Re tr(L)");

  const auto two = conserved_words(2);
  REQUIRE(two.size() == 3);
  std::set<std::string> names;
  for (const auto& [name, expr] : two) names.insert(name);
  CHECK(names.count("Re tr(L)") == 1);
  CHECK(names.count("Re tr(L L)") == 1);
  CHECK(names.count("Re tr(L Qinv L Q)") == 1);

  // cyclic classes only, pure conjugated powers dropped
  const auto four = conserved_words(4);
  CHECK(four.size() == 11);
  std::set<std::string> all;
  for (const auto& [name, expr] : four) CHECK(all.insert(name).second);
}

TEST_CASE("conserved words are invariant under the normalizer") {
  const int n = 3;
  const ReducedPoint rp = random_reduced(n, 16);
  // permutation combined with torus phases
  ComplexMatrix eta = ComplexMatrix::Zero(n, n);
  eta(1, 0) = std::polar(1.0, 0.7);
  eta(2, 1) = std::polar(1.0, -1.1);
  eta(0, 2) = std::polar(1.0, 2.3);
  const Unitary u(eta);
  const ReducedPoint moved(
      RegularTorusElement::from_matrix(u.m * rp.Q.Q * u.m.adjoint()),
      Hermitian(hermitian_part(u.m * rp.L.m * u.m.adjoint())));
  for (const auto& [name, expr] : conserved_words(4)) {
    CHECK(expr.evaluate(moved) ==
          doctest::Approx(expr.evaluate(rp)).epsilon(1e-11));
  }
}

TEST_CASE("sutherland chart") {
  const int n = 3;
  SUBCASE("zero spin is diagonal") {
    RealVector q(n), p(n);
    q << 0.3, 1.7, 3.9;
    p << 1.0, -0.5, 0.2;
    const SutherlandCoords c(q, p, ComplexMatrix::Zero(n, n));
    const ReducedPoint rp = sutherland_to(c);
    CHECK(grade_split(rp.L.m).off().norm() == 0.0);
    CHECK(sutherland_hamiltonian(c) == doctest::Approx(0.5 * (1.0 + 0.25 + 0.04)));
  }
  SUBCASE("round trip") {
    for (std::uint64_t s = 0; s < 100; ++s) {
      const ReducedPoint rp = random_reduced(n, mix_seed(17, s), 0.05);
      const SutherlandCoords c = sutherland_from(rp);
      const ReducedPoint back = sutherland_to(c);
      CHECK((back.L.m - rp.L.m).norm() <= 1e-10);
      CHECK((back.Q.Q - rp.Q.Q).norm() <= 1e-12);
    }
  }
  SUBCASE("two-body closed form") {
    RealVector q(2), p(2);
    q << 0.5, 0.5 + 3.14159265358979323846;
    p << 0.0, 0.0;
    ComplexMatrix phi = ComplexMatrix::Zero(2, 2);
    phi(0, 1) = std::polar(1.0, 0.4);
    phi(1, 0) = std::conj(phi(0, 1));
    const SutherlandCoords c(q, p, phi);
    CHECK(sutherland_hamiltonian(c) == doctest::Approx(0.25));
  }
  SUBCASE("hamiltonian equals half the momentum square trace") {
    for (std::uint64_t s = 0; s < 100; ++s) {
      const ReducedPoint rp = random_reduced(n, mix_seed(18, s), 0.05);
      const SutherlandCoords c = sutherland_from(rp);
      CHECK(sutherland_hamiltonian(c) ==
            doctest::Approx(0.5 * (rp.L.m * rp.L.m).trace().real())
                .epsilon(1e-9));
    }
  }
}

TEST_CASE("ruijsenaars chart") {
  SUBCASE("scalar case") {
    RealVector q(1), p(1);
    q << 0.9;
    p << 0.35;
    const RSCoords c(RegularTorusElement::from_angles(q), p,
                     ComplexMatrix::Identity(1, 1));
    const ReducedPoint rp = rs_to(c);
    CHECK(rp.L.m(0, 0).real() == doctest::Approx(std::exp(2.0 * 0.35)));
    const RSCoords back = rs_from(rp);
    CHECK(back.p[0] == doctest::Approx(0.35));
    CHECK(std::abs(back.lambda(0, 0) - 1.0) <= 1e-14);
  }
  SUBCASE("unit spin corresponds to diagonal momenta") {
    const int n = 3;
    const RegularTorusElement Q = random_torus_regular(n, 19, 0.3);
    RealVector p(n);
    p << 0.2, -0.4, 0.1;
    const RSCoords c(Q, p, ComplexMatrix::Identity(n, n));
    const ReducedPoint rp = rs_to(c);
    CHECK(grade_split(rp.L.m).off().norm() <= 1e-14);
    const RSCoords back = rs_from(rp);
    CHECK((back.lambda - ComplexMatrix::Identity(n, n)).norm() <= 1e-12);
  }
  SUBCASE("round trip and the coupling identity") {
    const int n = 3;
    for (std::uint64_t s = 0; s < 100; ++s) {
      const ReducedPoint rp(random_torus_regular(n, mix_seed(20, s), 0.05),
                            random_positive(n, mix_seed(21, s), 0.5).h);
      const RSCoords c = rs_from(rp);
      const ReducedPoint back = rs_to(c);
      CHECK((back.L.m - rp.L.m).norm() <= 1e-9);
      const RealVector v = rs_couplings(c);
      double total = 0.0;
      for (int i = 0; i < n; ++i) total += std::exp(2.0 * c.p[i]) * v[i];
      CHECK(total == doctest::Approx(rp.L.m.trace().real()).epsilon(1e-10));
    }
  }
  SUBCASE("momenta must be positive") {
    const ReducedPoint rp = random_reduced(2, 22);
    const bool positive =
        Eigen::SelfAdjointEigenSolver<ComplexMatrix>(rp.L.m).eigenvalues()
            .minCoeff() > 0.0;
    if (!positive) CHECK_THROWS_AS(rs_from(rp), std::domain_error);
  }
}
