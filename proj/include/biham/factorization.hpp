// factorization.hpp — unique factorizations of GL(n,C) into unitary and
// positive-triangular factors, the two model maps of the Heisenberg double,
// the moment map, and the quasi-adjoint actions.

#pragma once

#include "biham/points.hpp"

namespace biham {

// K = bL * gR^{-1} = gL * bR^{-1}, with unitary g's and upper triangular
// positive-diagonal b's.  Both factorizations are unique.
struct DoubleSplit {
  PosTriangular bL;
  Unitary gL;
  PosTriangular bR;
  Unitary gR;
};

// Factors an invertible K.  Throws std::domain_error when K is singular or
// its condition number exceeds tol::condition_limit.
DoubleSplit split(const ComplexMatrix& K);

PosTriangular left_triangular(const ComplexMatrix& K);   // bL
PosTriangular right_triangular(const ComplexMatrix& K);  // bR
Unitary left_unitary(const ComplexMatrix& K);            // gL
Unitary right_unitary(const ComplexMatrix& K);           // gR

// First model map K -> (gR, bR) and its inverse.
ModelPoint1 model1_of(const ComplexMatrix& K);
ComplexMatrix model1_inverse(const ModelPoint1& p);

// Second model map (g, b) -> (g, b b^dagger) and its inverse.
ModelPoint2 model2_of(const ModelPoint1& p);
ModelPoint1 model2_inverse(const ModelPoint2& p);

ModelPoint2 double_to_model2(const ComplexMatrix& K);   // m2 o m1
ComplexMatrix model2_to_double(const ModelPoint2& p);

// Moment map K -> bL * bR.
PosTriangular moment_map(const ComplexMatrix& K);

// Quasi-adjoint action of a unitary eta on the double.
ComplexMatrix quasi_adjoint(const Unitary& eta, const ComplexMatrix& K);

// Transported actions on the two model spaces, and their undressed
// counterparts with the same orbits.
ModelPoint1 quasi_adjoint_action1(const Unitary& eta, const ModelPoint1& p);
ModelPoint2 quasi_adjoint_action2(const Unitary& eta, const ModelPoint2& p);
ModelPoint1 undressed_action1(const Unitary& eta, const ModelPoint1& p);
ModelPoint2 undressed_action2(const Unitary& eta, const ModelPoint2& p);

// The compensating unitary eta~ used by both transported actions.
Unitary dressing_twist1(const Unitary& eta, const ModelPoint1& p);
Unitary dressing_twist2(const Unitary& eta, const ModelPoint2& p);

}  // namespace biham
