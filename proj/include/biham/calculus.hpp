// calculus.hpp — directional derivatives of observables.  Every derivative
// object is defined by a pairing identity of the form
//     pairing(slot, X) = d/dt f(point perturbed along X) at t = 0,
// with X running over the basis of the direction space and the slot living
// in the dual subspace.  Trace words get closed-form derivatives; arbitrary
// callables get central finite differences along the same directions.

#pragma once

#include <functional>
#include <optional>

#include "biham/observable.hpp"

namespace biham {

struct GradientSet {
  std::optional<ComplexMatrix> nabla;        // gl-valued, left, on GL(n,C)
  std::optional<ComplexMatrix> nabla_prime;  // gl-valued, right
  std::optional<ComplexMatrix> D1;           // b(n)-valued, left, unitary slot
  std::optional<ComplexMatrix> D1_prime;     // b(n)-valued, right
  std::optional<ComplexMatrix> D2;           // u(n)-valued, left, triangular slot
  std::optional<ComplexMatrix> D2_prime;     // u(n)-valued, right
  std::optional<ComplexMatrix> d2;           // u(n)-valued, Hermitian slot
  std::optional<ComplexMatrix> DQ;           // b(n)_0-valued, torus slot
  std::optional<ComplexMatrix> dp;           // u(n)_0-valued, momentum slot
  std::optional<ComplexMatrix> Dlam;         // off-diagonal u(n)-valued, left
  std::optional<ComplexMatrix> Dlam_prime;   // off-diagonal u(n)-valued, right
};

// Perturbation channels.  Which channels exist depends on the point kind.
enum class Channel {
  GroupLeft,     // group slot, e^{tX} m            (gl or phase/model)
  GroupRight,    // group slot, m e^{tX}
  HermAdd,       // Hermitian slot, L + tX
  TriLeft,       // triangular slot, e^{tX} b
  TriRight,      // triangular slot, b e^{tX}
  TorusLeft,     // torus slot, e^{tX} Q
  MomentumAdd,   // diagonal momentum slot, p + tX
  SpinLeft,      // spin slot, e^{tX} lambda
  SpinRight      // spin slot, lambda e^{tX}
};

// Direction space of a channel at a given point kind.
Space channel_direction_space(Channel c, const Point& p);
// Dual space the corresponding gradient slot lives in.
Space channel_value_space(Channel c, const Point& p);

enum class FdScheme { Central2, Central4 };

struct FdOptions {
  FdScheme scheme = FdScheme::Central4;
  double h_group = 1e-3;
  double h_herm = 1e-4;
};

// Exact directional derivative of a word observable along one channel
// direction.  This is the oracle the gradient slots are checked against.
double exact_directional(const ObservableExpr& f, const Point& p, Channel c,
                         const ComplexMatrix& x);

// Derivative of a word observable along a raw tangent (dG on the group/torus
// slot, dL on the Hermitian slot).  Valid at gl, phase and reduced points.
double derivative_along(const ObservableExpr& f, const Point& p,
                        const ComplexMatrix& dG, const ComplexMatrix& dL);

// All gradient slots the point kind supports, in closed form.
GradientSet exact_gradients(const ObservableExpr& f, const Point& p);

// Same slots by central differences.  Throws std::domain_error when a torus
// point sits within 10*h of the regularity boundary, and on NaN evaluations.
GradientSet fd_gradients(const std::function<double(const Point&)>& f,
                         const Point& p, const FdOptions& opts = {});

// Exact path when the observable carries a word expression, FD otherwise.
GradientSet gradients(const Observable& f, const Point& p,
                      const FdOptions& opts = {});

// Point perturbed along one channel direction (used by the FD path and by
// flow tests).
Point perturb(const Point& p, Channel c, const ComplexMatrix& x, double t);

// d/dt f(g, L + t I): exact for word observables, FD for callables.
double unit_shift_derivative(const Observable& f, const Point& p,
                             const FdOptions& opts = {});

}  // namespace biham
