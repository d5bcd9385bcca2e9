#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "biham/brackets.hpp"
#include "biham/dynamics.hpp"

using namespace biham;

namespace {

const Complex I(0.0, 1.0);

ComplexMatrix unit(int n, int i, int j) {
  ComplexMatrix e = ComplexMatrix::Zero(n, n);
  e(i, j) = 1.0;
  return e;
}

PhasePoint random_phase(int n, std::uint64_t seed, double scale = 0.7) {
  return PhasePoint(random_unitary(n, mix_seed(seed, 1)),
                    random_hermitian(n, mix_seed(seed, 2), scale));
}

ReducedPoint random_reduced(int n, std::uint64_t seed) {
  return ReducedPoint(random_torus_regular(n, mix_seed(seed, 3), 0.2),
                      random_hermitian(n, mix_seed(seed, 4), 0.7));
}

}  // namespace

TEST_CASE("r operator halves the two subalgebras") {
  const int n = 3;
  Rng rng(1);
  ComplexMatrix x(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) x(i, j) = rng.complex_normal();
  UbParts p = project_ub(x);
  CHECK((r_operator(p.u) - 0.5 * p.u).norm() <= 1e-14);
  CHECK((r_operator(p.b) + 0.5 * p.b).norm() <= 1e-14);
  CHECK((r_operator(r_operator(x)) - 0.25 * x).norm() <= 1e-13);
}

TEST_CASE("dynamical r-matrix entrywise action") {
  RealVector q(2);
  q << 1.3, 1.3 - 3.14159265358979323846;  // q1 - q2 = pi
  const RegularTorusElement Q = RegularTorusElement::from_angles(q);

  // diagonal matrices are annihilated
  ComplexMatrix d = ComplexMatrix::Zero(2, 2);
  d(0, 0) = 2.0;
  d(1, 1) = -1.0 * I;
  CHECK(rmatrix_apply(Q, d).norm() == 0.0);

  // on E12 the eigenvalue is -(i/2) cot((q1-q2)/2) = 0 at separation pi
  CHECK(rmatrix_apply(Q, unit(2, 0, 1)).norm() <= 1e-14);

  RealVector q2(2);
  q2 << 0.9, 0.2;
  const RegularTorusElement Q2 = RegularTorusElement::from_angles(q2);
  const Complex expected = -0.5 * I / std::tan(0.5 * (0.9 - 0.2));
  CHECK(std::abs(rmatrix_apply(Q2, unit(2, 0, 1))(0, 1) - expected) <= 1e-14);
}

TEST_CASE("dynamical r-matrix antisymmetry and u(n) stability") {
  const int n = 3;
  const RegularTorusElement Q = random_torus_regular(n, 5, 0.2);
  Rng rng(6);
  for (int rep = 0; rep < 20; ++rep) {
    ComplexMatrix x(n, n), y(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        x(i, j) = rng.complex_normal();
        y(i, j) = rng.complex_normal();
      }
    CHECK(std::abs(pairing(rmatrix_apply(Q, x), y) +
                   pairing(x, rmatrix_apply(Q, y))) <= 1e-10);
    const ComplexMatrix xu = project_ub(x).u;
    const ComplexMatrix rx = rmatrix_apply(Q, xu);
    CHECK((rx + rx.adjoint()).norm() <= 1e-12);
    CHECK(grade_split(rx).zero.norm() == 0.0);
  }
}

TEST_CASE("r bracket degenerate cases and bilinearity") {
  const int n = 3;
  const RegularTorusElement Q = random_torus_regular(n, 7, 0.2);
  Rng rng(8);
  ComplexMatrix x(n, n), y(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      x(i, j) = rng.complex_normal();
      y(i, j) = rng.complex_normal();
    }
  CHECK(r_bracket(Q, x, x).norm() <= 1e-12);
  ComplexMatrix d1 = ComplexMatrix::Zero(n, n), d2m = ComplexMatrix::Zero(n, n);
  for (int j = 0; j < n; ++j) {
    d1(j, j) = Complex(0, j + 1.0);
    d2m(j, j) = Complex(0, 2.0 - j);
  }
  CHECK(r_bracket(Q, d1, d2m).norm() == 0.0);
  const ComplexMatrix lhs = r_bracket(Q, 2.0 * x + 0.5 * y, y);
  const ComplexMatrix rhs = 2.0 * r_bracket(Q, x, y) + 0.5 * r_bracket(Q, y, y);
  CHECK((lhs - rhs).norm() <= 1e-10);
}

TEST_CASE("brackets are antisymmetric in f") {
  const int n = 3;
  const ObservableExpr f =
      ObservableExpr::word(1.0, Part::Re, {Letter::G, Letter::L}) +
      ObservableExpr::word(0.3, Part::Im, {Letter::L});
  const PhasePoint pp = random_phase(n, 10);
  for (BracketKind k : {BracketKind::Ctb1, BracketKind::Ctb2}) {
    CHECK(std::abs(bracket(k, Observable(f), Observable(f), pp)) <= 1e-12);
  }
  const ReducedPoint rp = random_reduced(n, 11);
  const ObservableExpr fr = ObservableExpr::word(
      1.0, Part::Re, {Letter::L, Letter::Qinv, Letter::L, Letter::Q});
  for (BracketKind k : {BracketKind::Red1, BracketKind::Red2}) {
    CHECK(std::abs(bracket(k, Observable(fr), Observable(fr), rp)) <= 1e-12);
  }
  const GlPoint gl(random_invertible(n, 12));
  const ObservableExpr fk = ObservableExpr::word(1.0, Part::Re, {Letter::G});
  CHECK(std::abs(bracket(BracketKind::Double, Observable(fk), Observable(fk),
                         gl)) <= 1e-12);
  const ModelPoint2 m2(random_unitary(n, 13), random_positive(n, 14));
  CHECK(std::abs(bracket(BracketKind::Model2, Observable(f), Observable(f), m2)) <=
        1e-12);
}

TEST_CASE("canonical bracket of linear momentum functions") {
  // with T_a = E12 - E21 and T_b = i(E12 + E21), the bracket of the momentum
  // components <T, L> under the canonical structure is <L, [T_a, T_b]>,
  // which evaluates to 2 (L11 - L22)
  const int n = 2;
  const PhasePoint pp = random_phase(n, 15);
  const ComplexMatrix ta = unit(2, 0, 1) - unit(2, 1, 0);
  const ComplexMatrix tb = I * (unit(2, 0, 1) + unit(2, 1, 0));
  auto momentum = [](const ComplexMatrix& t) {
    return Observable(std::function<double(const Point&)>([t](const Point& x) {
      return pairing(t, std::get<PhasePoint>(x).L.m);
    }));
  };
  const double v =
      bracket(BracketKind::Ctb1, momentum(ta), momentum(tb), pp);
  const double expected = 2.0 * (pp.L.m(0, 0).real() - pp.L.m(1, 1).real());
  CHECK(v == doctest::Approx(expected).epsilon(1e-9));
}

TEST_CASE("reduced bracket of torus trace against total momentum") {
  const int n = 3;
  const ReducedPoint rp = random_reduced(n, 16);
  const ObservableExpr f = ObservableExpr::word(1.0, Part::Re, {Letter::Q});
  const ObservableExpr h = ObservableExpr::word(1.0, Part::Re, {Letter::L});
  const double v = bracket(BracketKind::Red1, Observable(f), Observable(h), rp);
  CHECK(v == doctest::Approx(-rp.Q.Q.trace().imag()).epsilon(1e-12));
}

TEST_CASE("second bracket halves the model bracket") {
  const int n = 3;
  for (std::uint64_t s = 0; s < 20; ++s) {
    const ModelPoint2 m2(random_unitary(n, mix_seed(17, s)),
                         random_positive(n, mix_seed(18, s)));
    Rng rng(mix_seed(19, s));
    std::vector<Letter> alpha{Letter::G, Letter::Ginv, Letter::L};
    std::vector<WordTerm> tf, th;
    for (int t = 0; t < 2; ++t) {
      WordTerm w;
      w.coeff = 1.0 - 2.0 * rng.uniform();
      w.part = rng.uniform() < 0.5 ? Part::Re : Part::Im;
      for (int i = 0; i <= t + 1; ++i) w.word.push_back(alpha[rng.raw() % 3]);
      tf.push_back(w);
      WordTerm w2;
      w2.coeff = 1.0 - 2.0 * rng.uniform();
      w2.part = rng.uniform() < 0.5 ? Part::Re : Part::Im;
      for (int i = 0; i <= t; ++i) w2.word.push_back(alpha[rng.raw() % 3]);
      th.push_back(w2);
    }
    const ObservableExpr F{tf}, H{th};
    const double model =
        bracket(BracketKind::Model2, Observable(F), Observable(H), m2);
    const double ctb =
        bracket(BracketKind::Ctb2, Observable(F), Observable(H), m2.phase());
    CHECK(ctb == doctest::Approx(0.5 * model).epsilon(1e-10));
  }
}

TEST_CASE("Leibniz rule through callable products") {
  const int n = 3;
  const PhasePoint pp = random_phase(n, 20);
  const ObservableExpr f = ObservableExpr::word(1.0, Part::Re, {Letter::L});
  const ObservableExpr g =
      ObservableExpr::word(1.0, Part::Im, {Letter::G, Letter::L});
  const ObservableExpr h =
      ObservableExpr::word(1.0, Part::Re, {Letter::G, Letter::G});
  const Observable prod(std::function<double(const Point&)>(
      [f, g](const Point& x) { return f.evaluate(x) * g.evaluate(x); }));
  for (BracketKind k : {BracketKind::Ctb1, BracketKind::Ctb2}) {
    const double lhs = bracket(k, prod, Observable(h), pp);
    const double rhs =
        f.evaluate(pp) * bracket(k, Observable(g), Observable(h), pp) +
        g.evaluate(pp) * bracket(k, Observable(f), Observable(h), pp);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-8));
  }
}

TEST_CASE("commutator pairing identity") {
  // 2 <L d2F, d2H> = <L, [d2F, d2H]> for anti-Hermitian arguments
  const int n = 3;
  const Hermitian L = random_hermitian(n, 21);
  Rng rng(22);
  ComplexMatrix a(n, n), b(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      a(i, j) = rng.complex_normal();
      b(i, j) = rng.complex_normal();
    }
  const ComplexMatrix au = project_ub(a).u, bu = project_ub(b).u;
  CHECK(2.0 * pairing(L.m * au, bu) ==
        doctest::Approx(pairing(L.m, commutator(au, bu))).epsilon(1e-12));
}

TEST_CASE("hamiltonian vector fields of the commuting family") {
  const int n = 3;
  const PhasePoint pp = random_phase(n, 23);
  for (int k = 1; k <= 3; ++k) {
    ComplexMatrix Lk = ComplexMatrix::Identity(n, n);
    for (int i = 0; i < k; ++i) Lk *= pp.L.m;
    const Tangent t1 = hamiltonian_vector_field(
        BracketKind::Ctb1, Observable(hamiltonian_observable(k + 1)), pp);
    CHECK((t1.dG - I * Lk * pp.g.m).norm() <= 1e-11);
    CHECK(t1.dL.norm() <= 1e-11);
    const Tangent t2 = hamiltonian_vector_field(
        BracketKind::Ctb2, Observable(hamiltonian_observable(k)), pp);
    CHECK((t2.dG - I * Lk * pp.g.m).norm() <= 1e-11);
    CHECK(t2.dL.norm() <= 1e-11);
  }
}

TEST_CASE("hamiltonian vector field satisfies the duality contract") {
  const int n = 3;
  const PhasePoint pp = random_phase(n, 24);
  Rng rng(25);
  const ObservableExpr h =
      ObservableExpr::word(0.8, Part::Re, {Letter::G, Letter::L, Letter::L}) +
      ObservableExpr::word(-0.5, Part::Im, {Letter::Ginv, Letter::L});
  for (BracketKind k : {BracketKind::Ctb1, BracketKind::Ctb2}) {
    const Tangent field = hamiltonian_vector_field(k, Observable(h), pp);
    for (int rep = 0; rep < 5; ++rep) {
      std::vector<Letter> alpha{Letter::G, Letter::Ginv, Letter::L};
      WordTerm w;
      w.coeff = 1.0;
      w.part = rep % 2 ? Part::Im : Part::Re;
      for (int i = 0; i <= rep % 3; ++i) w.word.push_back(alpha[rng.raw() % 3]);
      const ObservableExpr f{{w}};
      const double lhs = derivative_along(f, pp, field.dG, field.dL);
      const double rhs = bracket(k, Observable(f), Observable(h), pp);
      CHECK(lhs == doctest::Approx(rhs).epsilon(1e-7));
    }
  }
}

TEST_CASE("double-kind field follows the flow formula") {
  const int n = 2;
  const GlPoint gl(random_invertible(n, 26));
  const ObservableExpr h = ObservableExpr::word(1.0, Part::Re, {Letter::G});
  const Tangent field =
      hamiltonian_vector_field(BracketKind::Double, Observable(h), gl);
  const GradientSet g = exact_gradients(h, gl);
  const ComplexMatrix expected =
      r_operator(*g.nabla) * gl.K + gl.K * r_operator(*g.nabla_prime);
  CHECK((field.dG - expected).norm() <= 1e-12);
  // duality against coordinate words
  const ObservableExpr f = ObservableExpr::word(1.0, Part::Im, {Letter::G, Letter::G});
  const double lhs = derivative_along(f, gl, field.dG, ComplexMatrix::Zero(n, n));
  const double rhs = bracket(BracketKind::Double, Observable(f), Observable(h), gl);
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-9));
}

TEST_CASE("kind and point must match") {
  const PhasePoint pp = random_phase(2, 27);
  const ObservableExpr f = ObservableExpr::word(1.0, Part::Re, {Letter::L});
  CHECK_THROWS_AS(bracket(BracketKind::Red1, Observable(f), Observable(f), pp),
                  std::invalid_argument);
  CHECK_THROWS_AS(bracket(BracketKind::Double, Observable(f), Observable(f), pp),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      hamiltonian_vector_field(BracketKind::Red2, Observable(f), pp),
      std::invalid_argument);
  CHECK(bracket_from_name("ctb2") == BracketKind::Ctb2);
  CHECK_THROWS_AS(bracket_from_name("nope"), std::invalid_argument);
}
