// brackets.hpp — the Poisson bracket evaluators: the double bracket on
// GL(n,C), its two model-space forms, the compatible pair on the cotangent
// bundle, the reduced pair on the torus slice, the decoupled form in
// Ruijsenaars variables, and the dynamical r-matrix that drives the
// reduced structure.

#pragma once

#include "biham/calculus.hpp"

namespace biham {

enum class BracketKind {
  Double,      // Semenov-Tian-Shansky bracket on GL(n,C)
  Model1,      // transported to U(n) x B(n)
  Model2,      // transported to U(n) x P(n)
  Ctb1,        // canonical cotangent-bundle bracket on U(n) x Herm(n)
  Ctb2,        // second (double-induced) bracket on U(n) x Herm(n)
  Red1,        // reduced first bracket on T^n_reg x Herm(n)
  Red2,        // reduced second bracket
  Decoupled2   // reduced second bracket in (Q, p, lambda) variables
};

const char* bracket_name(BracketKind k);
BracketKind bracket_from_name(const std::string& name);

// R = (P_u - P_b)/2, half the difference of the projections onto u(n), b(n).
ComplexMatrix r_operator(const ComplexMatrix& x);

// The dynamical r-matrix: zero on diagonals, and on E_kl (k != l) it acts by
// (Q_k/Q_l + 1)/(Q_k/Q_l - 1)/2.
ComplexMatrix rmatrix_apply(const RegularTorusElement& Q, const ComplexMatrix& x);

// [X,Y]_{R(Q)} = [R(Q)X, Y] + [X, R(Q)Y]
ComplexMatrix r_bracket(const RegularTorusElement& Q, const ComplexMatrix& x,
                        const ComplexMatrix& y);

// Evaluates the bracket of two observables at a point.  The point kind must
// match the bracket kind; gradients are exact for word observables and
// central-difference otherwise.
double bracket(BracketKind kind, const Observable& f, const Observable& h,
               const Point& p, const FdOptions& opts = {});

// Same, from precomputed gradient sets.
double bracket_from_gradients(BracketKind kind, const GradientSet& gf,
                              const GradientSet& gh, const Point& p);

// Tangent vector generated by h.  For Double the group slot carries dK; for
// Ctb1/Ctb2 it carries dg, with dL in the Hermitian slot.  The returned
// vector satisfies d/dt f = bracket(f, h) for every observable f.
struct Tangent {
  ComplexMatrix dG;
  ComplexMatrix dL;
};
Tangent hamiltonian_vector_field(BracketKind kind, const Observable& h,
                                 const Point& p, const FdOptions& opts = {});

}  // namespace biham
