#include "biham/points.hpp"

#include <stdexcept>

namespace biham {

namespace {
void require_dims(int a, int b, const char* who) {
  if (a != b) throw std::invalid_argument(std::string(who) + ": dimension mismatch");
}
}  // namespace

PhasePoint::PhasePoint(Unitary gg, Hermitian ll) : g(std::move(gg)), L(std::move(ll)) {
  require_dims(g.dim(), L.dim(), "PhasePoint");
}

ReducedPoint::ReducedPoint(RegularTorusElement qq, Hermitian ll)
    : Q(std::move(qq)), L(std::move(ll)) {
  require_dims(Q.dim(), L.dim(), "ReducedPoint");
}

PhasePoint ReducedPoint::embed() const { return PhasePoint(Unitary(Q.Q), L); }

ModelPoint1::ModelPoint1(Unitary gg, PosTriangular bb)
    : g(std::move(gg)), b(std::move(bb)) {
  require_dims(g.dim(), b.dim(), "ModelPoint1");
}

ModelPoint2::ModelPoint2(Unitary gg, PositiveHermitian ll)
    : g(std::move(gg)), L(std::move(ll)) {
  require_dims(g.dim(), L.dim(), "ModelPoint2");
}

PhasePoint ModelPoint2::phase() const { return PhasePoint(g, L.h); }

SutherlandCoords::SutherlandCoords(RealVector qq, RealVector pp, ComplexMatrix spin,
                                   double eps_reg)
    : q(std::move(qq)), p(std::move(pp)), phi(std::move(spin)) {
  require_dims(static_cast<int>(q.size()), static_cast<int>(p.size()),
               "SutherlandCoords");
  require_square_finite(phi, "SutherlandCoords");
  require_dims(static_cast<int>(q.size()), static_cast<int>(phi.rows()),
               "SutherlandCoords");
  if ((phi - phi.adjoint()).norm() > tol::hermitian * 1e2) {
    throw std::domain_error("SutherlandCoords: spin matrix must be Hermitian");
  }
  for (int j = 0; j < phi.rows(); ++j) {
    if (std::abs(phi(j, j)) > tol::hermitian * 1e2) {
      throw std::domain_error("SutherlandCoords: spin matrix must have zero diagonal");
    }
    phi(j, j) = 0.0;
  }
  // reuse the torus invariant check
  RegularTorusElement::from_angles(q, eps_reg);
}

RSCoords::RSCoords(RegularTorusElement qq, RealVector pp, ComplexMatrix lam)
    : Q(std::move(qq)), p(std::move(pp)), lambda(std::move(lam)) {
  require_dims(Q.dim(), static_cast<int>(p.size()), "RSCoords");
  require_square_finite(lambda, "RSCoords");
  require_dims(Q.dim(), static_cast<int>(lambda.rows()), "RSCoords");
  const int n = Q.dim();
  for (int i = 0; i < n; ++i) {
    if (std::abs(lambda(i, i) - 1.0) > 1e-9) {
      throw std::domain_error("RSCoords: lambda diagonal must be 1");
    }
    lambda(i, i) = 1.0;
    for (int j = 0; j < i; ++j) {
      if (std::abs(lambda(i, j)) > 1e-11) {
        throw std::domain_error("RSCoords: lambda must be upper triangular");
      }
      lambda(i, j) = 0.0;
    }
  }
}

int point_dim(const Point& p) {
  return std::visit([](const auto& x) { return x.dim(); }, p);
}

const char* point_kind_name(const Point& p) {
  struct Namer {
    const char* operator()(const GlPoint&) const { return "gl"; }
    const char* operator()(const PhasePoint&) const { return "phase"; }
    const char* operator()(const ReducedPoint&) const { return "reduced"; }
    const char* operator()(const ModelPoint1&) const { return "model1"; }
    const char* operator()(const ModelPoint2&) const { return "model2"; }
    const char* operator()(const RSCoords&) const { return "rs"; }
  };
  return std::visit(Namer{}, p);
}

}  // namespace biham
