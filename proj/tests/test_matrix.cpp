#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "biham/matrix.hpp"

using namespace biham;

namespace {

ComplexMatrix unit(int n, int i, int j) {
  ComplexMatrix e = ComplexMatrix::Zero(n, n);
  e(i, j) = 1.0;
  return e;
}

const Complex I(0.0, 1.0);

}  // namespace

TEST_CASE("pairing basic values") {
  CHECK(pairing(I * unit(2, 0, 0), unit(2, 0, 0)) == doctest::Approx(1.0));
  ComplexMatrix iId = I * ComplexMatrix::Identity(3, 3);
  CHECK(pairing(iId, iId) == doctest::Approx(0.0));
  CHECK(pairing(unit(2, 0, 1), unit(2, 1, 0)) == doctest::Approx(0.0));
  CHECK(pairing(I * unit(2, 0, 1), unit(2, 1, 0)) == doctest::Approx(1.0));
  CHECK_THROWS_AS(pairing(unit(2, 0, 0), unit(3, 0, 0)), std::invalid_argument);
}

TEST_CASE("pairing symmetry and ad-invariance") {
  for (std::uint64_t s = 0; s < 20; ++s) {
    Rng rng(s);
    const int n = 2 + static_cast<int>(s % 3);
    auto rnd = [&]() {
      ComplexMatrix m(n, n);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = rng.complex_normal();
      return m;
    };
    const ComplexMatrix x = rnd(), y = rnd(), z = rnd();
    CHECK(pairing(x, y) == doctest::Approx(pairing(y, x)).epsilon(1e-12));
    const double ad =
        pairing(commutator(z, x), y) + pairing(x, commutator(z, y));
    CHECK(std::abs(ad) <= 1e-10);
  }
}

TEST_CASE("project_ub splits uniquely") {
  const int n = 3;
  Rng rng(5);
  ComplexMatrix x(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) x(i, j) = rng.complex_normal();

  UbParts p = project_ub(x);
  CHECK((p.u + p.b - x).norm() <= 1e-14);
  CHECK((p.u + p.u.adjoint()).norm() <= 1e-14);          // anti-Hermitian
  CHECK(grade_split(p.b).minus.norm() == 0.0);           // upper triangular
  for (int j = 0; j < n; ++j) CHECK(std::abs(p.b(j, j).imag()) <= 1e-15);

  // members of either subalgebra are fixed points
  UbParts pu = project_ub(p.u);
  CHECK(pu.u.isApprox(p.u, 1e-14));
  CHECK(pu.b.norm() <= 1e-14);
  UbParts pb = project_ub(p.b);
  CHECK(pb.b.isApprox(p.b, 1e-14));
  CHECK(pb.u.norm() <= 1e-14);
}

TEST_CASE("project_ub two-by-two example") {
  // E21 decomposes into (E21 - E12) + E12
  UbParts p = project_ub(unit(2, 1, 0));
  CHECK((p.u - (unit(2, 1, 0) - unit(2, 0, 1))).norm() <= 1e-15);
  CHECK((p.b - unit(2, 0, 1)).norm() <= 1e-15);
}

TEST_CASE("grade_split partitions entries") {
  ComplexMatrix d = ComplexMatrix::Zero(2, 2);
  d(0, 0) = 2.0;
  d(1, 1) = 3.0 * I;
  GradeParts g = grade_split(d);
  CHECK(g.plus.norm() == 0.0);
  CHECK(g.minus.norm() == 0.0);
  CHECK((g.zero - d).norm() == 0.0);

  ComplexMatrix x = unit(2, 0, 1) + unit(2, 1, 0);
  GradeParts gx = grade_split(x);
  CHECK((gx.plus - unit(2, 0, 1)).norm() == 0.0);
  CHECK((gx.minus - unit(2, 1, 0)).norm() == 0.0);
  CHECK(gx.zero.norm() == 0.0);

  Rng rng(3);
  ComplexMatrix r(3, 3);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r(i, j) = rng.complex_normal();
  GradeParts gr = grade_split(r);
  CHECK((gr.plus + gr.zero + gr.minus - r).norm() == 0.0);  // exact partition
}

TEST_CASE("basis dimensions and u(1)") {
  for (int n : {1, 2, 3, 4}) {
    CHECK(static_cast<int>(basis(Space::UN, n).size()) == n * n);
    CHECK(static_cast<int>(basis(Space::BN, n).size()) == n * n);
    CHECK(static_cast<int>(basis(Space::Herm, n).size()) == n * n);
    CHECK(static_cast<int>(basis(Space::UNDiag, n).size()) == n);
    CHECK(static_cast<int>(basis(Space::BNDiag, n).size()) == n);
    CHECK(static_cast<int>(basis(Space::BNUpper, n).size()) == n * n - n);
    CHECK(static_cast<int>(basis(Space::Gl, n).size()) == 2 * n * n);
  }
  auto u1 = basis(Space::UN, 1);
  REQUIRE(u1.size() == 1);
  CHECK(u1[0](0, 0) == I);
}

TEST_CASE("duality Gram matrices invertible") {
  for (int n : {2, 3}) {
    auto check_pair = [n](Space v, Space w) {
      const auto bv = basis(v, n);
      const auto bw = basis(w, n);
      REQUIRE(bv.size() == bw.size());
      Eigen::MatrixXd gram(bv.size(), bw.size());
      for (std::size_t i = 0; i < bv.size(); ++i)
        for (std::size_t j = 0; j < bw.size(); ++j)
          gram(static_cast<int>(i), static_cast<int>(j)) = pairing(bw[j], bv[i]);
      CHECK(Eigen::FullPivLU<Eigen::MatrixXd>(gram).isInvertible());
    };
    check_pair(Space::UN, Space::BN);
    check_pair(Space::UN, Space::Herm);
    check_pair(Space::Gl, Space::Gl);
    check_pair(Space::UNDiag, Space::BNDiag);
    check_pair(Space::UNOff, Space::BNUpper);
  }
}

TEST_CASE("dualize round trips and zero") {
  const int n = 3;
  auto roundtrip = [n](Space v, Space w, const ComplexMatrix& w0) {
    const auto bv = basis(v, n);
    std::vector<double> ell;
    for (const auto& x : bv) ell.push_back(pairing(w0, x));
    const ComplexMatrix back = dualize(ell, v, w, n);
    CHECK((back - w0).norm() <= 1e-10);
  };
  Rng rng(11);
  ComplexMatrix r(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) r(i, j) = rng.complex_normal();
  roundtrip(Space::UN, Space::BN, project_space(Space::BN, r));
  roundtrip(Space::BN, Space::UN, project_space(Space::UN, r));
  roundtrip(Space::Herm, Space::UN, project_space(Space::UN, r));
  roundtrip(Space::UN, Space::Herm, project_space(Space::Herm, r));
  roundtrip(Space::Gl, Space::Gl, r);
  roundtrip(Space::UNDiag, Space::BNDiag, project_space(Space::BNDiag, r));
  roundtrip(Space::BNUpper, Space::UNOff, project_space(Space::UNOff, r));

  std::vector<double> zeros(static_cast<std::size_t>(n * n), 0.0);
  CHECK(dualize(zeros, Space::UN, Space::BN, n).norm() == 0.0);

  // the functional Y -> 2 tr(LY) on Hermitian directions dualizes to 2iL
  ComplexMatrix L = hermitian_part(r);
  std::vector<double> ell;
  for (const auto& y : basis(Space::Herm, n)) {
    ell.push_back(2.0 * (L * y).trace().real());
  }
  const ComplexMatrix d = dualize(ell, Space::Herm, Space::UN, n);
  CHECK((d - 2.0 * I * L).norm() <= 1e-10);
}

TEST_CASE("dualize rejects mismatched spaces") {
  std::vector<double> ell(4, 0.0);
  CHECK_THROWS_AS(dualize(ell, Space::UN, Space::UNDiag, 2), std::invalid_argument);
  // u(n) paired against itself is totally isotropic: singular Gram
  CHECK_THROWS_AS(dualize(ell, Space::UN, Space::UN, 2), std::invalid_argument);
}

TEST_CASE("cholesky_upper factors positive matrices") {
  for (std::uint64_t s = 0; s < 10; ++s) {
    const int n = 2 + static_cast<int>(s % 3);
    PositiveHermitian a = random_positive(n, s, 0.6);
    const ComplexMatrix b = cholesky_upper(a.m());
    CHECK((b * b.adjoint() - a.m()).norm() <= 1e-12 * std::max(1.0, a.m().norm()));
    for (int j = 0; j < n; ++j) {
      CHECK(b(j, j).real() > 0.0);
      CHECK(b(j, j).imag() == 0.0);
      for (int i = j + 1; i < n; ++i) CHECK(b(i, j) == Complex(0.0, 0.0));
    }
  }
  ComplexMatrix notpos = -ComplexMatrix::Identity(2, 2);
  CHECK_THROWS_AS(cholesky_upper(notpos), std::domain_error);
}

TEST_CASE("matrix exponentials") {
  const int n = 3;
  Hermitian h = random_hermitian(n, 21, 0.8);
  const ComplexMatrix u = exp_i_hermitian(h.m, 1.3);
  CHECK((u.adjoint() * u - ComplexMatrix::Identity(n, n)).norm() <= 1e-13);
  CHECK((u - expm(Complex(0.0, 1.3) * h.m)).norm() <= 1e-12);
  // strictly upper stays strictly upper under the series
  PosTriangular b = random_pos_triangular(n, 22, 0.4);
  ComplexMatrix nilp = grade_split(b.m).plus;
  CHECK(grade_split(expm(nilp)).minus.norm() == 0.0);
}

TEST_CASE("typed wrappers enforce invariants") {
  CHECK_THROWS_AS(Unitary(2.0 * ComplexMatrix::Identity(2, 2)), std::domain_error);
  CHECK_THROWS_AS(Hermitian(Complex(0, 1) * ComplexMatrix::Identity(2, 2)),
                  std::domain_error);
  CHECK_THROWS_AS(PositiveHermitian(-ComplexMatrix::Identity(2, 2)),
                  std::domain_error);
  ComplexMatrix lower = ComplexMatrix::Identity(2, 2);
  lower(1, 0) = 0.5;
  CHECK_THROWS_AS(PosTriangular{lower}, std::domain_error);

  RealVector q(2);
  q << 0.3, 0.3 + 1e-10;
  CHECK_THROWS_AS(RegularTorusElement::from_angles(q), std::domain_error);
  q << 0.3, 2.0;
  const RegularTorusElement t = RegularTorusElement::from_angles(q);
  CHECK(t.gap() ==
        doctest::Approx(std::abs(std::polar(1.0, 0.3) - std::polar(1.0, 2.0))));
  CHECK_THROWS_AS(RegularTorusElement::from_matrix(ComplexMatrix::Ones(2, 2)),
                  std::domain_error);
}

TEST_CASE("random samples satisfy their invariants") {
  for (std::uint64_t s = 1; s <= 10; ++s) {
    const int n = 2 + static_cast<int>(s % 3);
    Unitary u = random_unitary(n, s);
    CHECK((u.m.adjoint() * u.m - ComplexMatrix::Identity(n, n)).norm() <= 1e-12);
    Hermitian h = random_hermitian(n, s);
    CHECK((h.m - h.m.adjoint()).norm() <= 1e-14);
    PositiveHermitian p = random_positive(n, s);
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(p.m());
    CHECK(es.eigenvalues().minCoeff() > 0.0);
    RegularTorusElement t = random_torus_regular(n, s);
    CHECK(t.gap() >= tol::regular_gap);
    PosTriangular b = random_pos_triangular(n, s);
    for (int j = 0; j < n; ++j) CHECK(b.m(j, j).real() > 0.0);
  }
}

TEST_CASE("rng and digest are reproducible") {
  Rng a(123), b(123);
  for (int i = 0; i < 100; ++i) CHECK(a.raw() == b.raw());
  const ComplexMatrix m1 = random_unitary(3, 77).m;
  const ComplexMatrix m2 = random_unitary(3, 77).m;
  CHECK((m1 - m2).norm() == 0.0);
  CHECK(digest(m1) == digest(m2));
  CHECK(digest(m1) != digest(random_unitary(3, 78).m));
}

TEST_CASE("condition estimate and polar projection") {
  ComplexMatrix a = ComplexMatrix::Identity(2, 2);
  a(0, 0) = 100.0;
  CHECK(condition_estimate(a) == doctest::Approx(100.0));
  const ComplexMatrix u0 = random_unitary(3, 9).m;
  const ComplexMatrix noisy = u0 + 1e-8 * random_hermitian(3, 10).m;
  const ComplexMatrix pol = polar_unitary(noisy);
  CHECK((pol.adjoint() * pol - ComplexMatrix::Identity(3, 3)).norm() <= 1e-14);
  CHECK((pol - u0).norm() <= 1e-7);
}
