// points.hpp — phase-space value types shared by the calculus, bracket and
// dynamics layers.

#pragma once

#include <variant>

#include "biham/matrix.hpp"

namespace biham {

// Element of GL(n,C), the Heisenberg double itself.
struct GlPoint {
  ComplexMatrix K;
  explicit GlPoint(ComplexMatrix k) : K(std::move(k)) {
    require_square_finite(K, "GlPoint");
  }
  int dim() const { return static_cast<int>(K.rows()); }
};

// (g, L) with g unitary and L Hermitian; model of the cotangent bundle.
struct PhasePoint {
  Unitary g;
  Hermitian L;
  PhasePoint(Unitary gg, Hermitian ll);
  int dim() const { return g.dim(); }
};

// (Q, L) with Q a regular diagonal unitary; the reduced phase space slice.
struct ReducedPoint {
  RegularTorusElement Q;
  Hermitian L;
  ReducedPoint(RegularTorusElement qq, Hermitian ll);
  int dim() const { return Q.dim(); }
  PhasePoint embed() const;  // tautological embedding into (g, L)
};

// (g, b) with b upper triangular, positive diagonal.
struct ModelPoint1 {
  Unitary g;
  PosTriangular b;
  ModelPoint1(Unitary gg, PosTriangular bb);
  int dim() const { return g.dim(); }
};

// (g, L) with L positive Hermitian.
struct ModelPoint2 {
  Unitary g;
  PositiveHermitian L;
  ModelPoint2(Unitary gg, PositiveHermitian ll);
  int dim() const { return g.dim(); }
  PhasePoint phase() const;
};

// (q, p, phi): torus angles, diagonal momenta, off-diagonal Hermitian spin.
struct SutherlandCoords {
  RealVector q;
  RealVector p;
  ComplexMatrix phi;
  SutherlandCoords(RealVector qq, RealVector pp, ComplexMatrix spin,
                   double eps_reg = tol::regular_gap);
  int dim() const { return static_cast<int>(q.size()); }
};

// (Q, p, lambda): torus element, diagonal momenta, unit-diagonal upper
// triangular spin variable.
struct RSCoords {
  RegularTorusElement Q;
  RealVector p;
  ComplexMatrix lambda;
  RSCoords(RegularTorusElement qq, RealVector pp, ComplexMatrix lam);
  int dim() const { return Q.dim(); }
};

using Point = std::variant<GlPoint, PhasePoint, ReducedPoint, ModelPoint1,
                           ModelPoint2, RSCoords>;

int point_dim(const Point& p);
const char* point_kind_name(const Point& p);

}  // namespace biham
