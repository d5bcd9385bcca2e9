#include "biham/factorization.hpp"

#include <stdexcept>

namespace biham {

namespace {

void require_invertible(const ComplexMatrix& K, const char* who) {
  require_square_finite(K, who);
  const double cond = condition_estimate(K);
  if (!(cond < tol::condition_limit)) {
    throw std::domain_error(std::string(who) +
                            ": matrix is singular or too ill-conditioned");
  }
}

}  // namespace

DoubleSplit split(const ComplexMatrix& K) {
  require_invertible(K, "split");
  const int n = static_cast<int>(K.rows());
  // bL from K K^dagger = bL bL^dagger, then gR = K^{-1} bL.
  PosTriangular bL(cholesky_upper(K * K.adjoint()));
  ComplexMatrix gR = polar_unitary(K.partialPivLu().solve(bL.m));
  // bR from K^dagger K = (bR bR^dagger)^{-1}, then gL = K bR.
  ComplexMatrix gramInv = (K.adjoint() * K).partialPivLu().solve(
      ComplexMatrix::Identity(n, n));
  PosTriangular bR(cholesky_upper(hermitian_part(gramInv)));
  ComplexMatrix gL = polar_unitary(K * bR.m);
  return DoubleSplit{std::move(bL), Unitary(std::move(gL)), std::move(bR),
                     Unitary(std::move(gR))};
}

PosTriangular left_triangular(const ComplexMatrix& K) { return split(K).bL; }
PosTriangular right_triangular(const ComplexMatrix& K) { return split(K).bR; }
Unitary left_unitary(const ComplexMatrix& K) { return split(K).gL; }
Unitary right_unitary(const ComplexMatrix& K) { return split(K).gR; }

ModelPoint1 model1_of(const ComplexMatrix& K) {
  DoubleSplit s = split(K);
  return ModelPoint1(std::move(s.gR), std::move(s.bR));
}

ComplexMatrix model1_inverse(const ModelPoint1& p) {
  // With W := g^{-1} b the consistency relation bL^{-1} gL = g^{-1} bR shows
  // that W factors as (bL)^{-1} gL; uniqueness of the triangular-unitary
  // factorization of W then recovers bL, and K = bL g^{-1}.
  const ComplexMatrix w = p.g.m.adjoint() * p.b.m;
  DoubleSplit sw = split(w);
  const ComplexMatrix bL = sw.bL.inverse().m;
  ComplexMatrix K = bL * p.g.m.adjoint();
  // round-trip contract
  ModelPoint1 back = model1_of(K);
  const double res = (back.g.m - p.g.m).norm() + (back.b.m - p.b.m).norm();
  if (res > 1e-9 * std::max(1.0, K.norm())) {
    throw std::runtime_error("model1_inverse: round-trip residual too large");
  }
  return K;
}

ModelPoint2 model2_of(const ModelPoint1& p) {
  ComplexMatrix L = p.b.m * p.b.m.adjoint();
  return ModelPoint2(p.g, PositiveHermitian(hermitian_part(L)));
}

ModelPoint1 model2_inverse(const ModelPoint2& p) {
  return ModelPoint1(p.g, PosTriangular(cholesky_upper(p.L.m())));
}

ModelPoint2 double_to_model2(const ComplexMatrix& K) {
  return model2_of(model1_of(K));
}

ComplexMatrix model2_to_double(const ModelPoint2& p) {
  return model1_inverse(model2_inverse(p));
}

PosTriangular moment_map(const ComplexMatrix& K) {
  DoubleSplit s = split(K);
  return PosTriangular(s.bL.m * s.bR.m);
}

ComplexMatrix quasi_adjoint(const Unitary& eta, const ComplexMatrix& K) {
  if (eta.dim() != K.rows()) {
    throw std::invalid_argument("quasi_adjoint: dimension mismatch");
  }
  PosTriangular bL = left_triangular(K);
  Unitary xi = right_unitary(eta.m * bL.m);
  return eta.m * K * xi.m;
}

Unitary dressing_twist1(const Unitary& eta, const ModelPoint1& p) {
  const ComplexMatrix K = model1_inverse(p);
  PosTriangular bL = left_triangular(K);
  Unitary xi = right_unitary(eta.m * bL.m);
  return xi.inverse();
}

Unitary dressing_twist2(const Unitary& eta, const ModelPoint2& p) {
  return dressing_twist1(eta, model2_inverse(p));
}

ModelPoint1 quasi_adjoint_action1(const Unitary& eta, const ModelPoint1& p) {
  Unitary tw = dressing_twist1(eta, p);
  Unitary g(tw.m * p.g.m * tw.m.adjoint());
  PosTriangular b = left_triangular(tw.m * p.b.m);
  return ModelPoint1(std::move(g), std::move(b));
}

ModelPoint2 quasi_adjoint_action2(const Unitary& eta, const ModelPoint2& p) {
  Unitary tw = dressing_twist2(eta, p);
  Unitary g(tw.m * p.g.m * tw.m.adjoint());
  PositiveHermitian L(hermitian_part(tw.m * p.L.m() * tw.m.adjoint()));
  return ModelPoint2(std::move(g), std::move(L));
}

ModelPoint1 undressed_action1(const Unitary& eta, const ModelPoint1& p) {
  Unitary g(eta.m * p.g.m * eta.m.adjoint());
  PosTriangular b = left_triangular(eta.m * p.b.m);
  return ModelPoint1(std::move(g), std::move(b));
}

ModelPoint2 undressed_action2(const Unitary& eta, const ModelPoint2& p) {
  Unitary g(eta.m * p.g.m * eta.m.adjoint());
  PositiveHermitian L(hermitian_part(eta.m * p.L.m() * eta.m.adjoint()));
  return ModelPoint2(std::move(g), std::move(L));
}

}  // namespace biham
