// dynamics.hpp — the commuting Hamiltonians tr(L^k)/k, their explicit flow
// on the cotangent bundle, the induced vector field on the reduced torus
// slice, an RK4 integrator with invariant re-projection, conserved trace
// words, and the Sutherland / Ruijsenaars coordinate systems.

#pragma once

#include <string>
#include <utility>
#include <vector>

#include "biham/brackets.hpp"

namespace biham {

// tr(L^k)/k.  The imaginary residue of the trace must stay below 1e-12.
double power_trace_hamiltonian(int k, const Hermitian& L);

// The same Hamiltonian as a word observable.
ObservableExpr hamiltonian_observable(int k);

// (g, L) -> (exp(i t L^k) g, L), computed via eigendecomposition of L.
PhasePoint explicit_flow(int k, double t, const PhasePoint& start);

// Anti-Hermitian gauge term that makes the induced field tangent to the
// torus slice: R(Q)(i L^k) - (i/2) L^k.
AntiHermitian tangency_gauge(int k, const ReducedPoint& p);

struct ReducedTangent {
  ComplexMatrix dQ;
  Hermitian dL;
};

// Induced field (i (L^k)_0 Q, [R(Q)(i L^k), L]) on the torus slice.
ReducedTangent reduced_field(int k, const ReducedPoint& p);

struct TrajectorySample {
  double t;
  ReducedPoint state;
};

struct IntegrationResult {
  std::vector<TrajectorySample> samples;
  double min_gap = 0.0;       // smallest torus regularity gap seen
  double max_drift = 0.0;     // largest per-step re-projection correction
  bool aborted = false;       // regularity loss before t_end
  double abort_time = 0.0;
};

// Classical fixed-step RK4 on the matrix ODE.  Each stored state is
// re-projected: Q by phase normalization, L by Hermitian symmetrization,
// with the correction sizes asserted below 1e-8 per step.  Aborts (with the
// offending time) when the regularity gap falls under 10 * eps_reg.
IntegrationResult integrate_rk4(int k, const ReducedPoint& start, double t_end,
                                double dt, int store_every = 1);

// Conserved observables: trace words in L and Qinv L Q up to the given total
// degree, one representative per cyclic class, pure powers of the conjugated
// letter dropped (their traces repeat the pure-L ones).
std::vector<std::pair<std::string, ObservableExpr>> conserved_words(int degree_cap = 4);

struct DriftRecord {
  std::string word;
  double initial_value;
  double max_drift;
};

std::vector<DriftRecord> conserved_drifts(const IntegrationResult& traj,
                                          int degree_cap = 4);

// --- Sutherland coordinates --------------------------------------------------

// (Q, L) -> (q, p, phi) with p = diag L and phi the off-diagonal Hermitian
// spin; inverse of L = p - (R(Q) + 1/2)(phi).
SutherlandCoords sutherland_from(const ReducedPoint& p);
ReducedPoint sutherland_to(const SutherlandCoords& c);

// p^2/2 summed plus the trigonometric spin interaction; equals tr(L^2)/2.
double sutherland_hamiltonian(const SutherlandCoords& c);

// --- Ruijsenaars coordinates -------------------------------------------------

// (Q, L) with L positive -> (Q, p, lambda): L = b b^dagger, b = e^p b_+ with
// unit-diagonal b_+, lambda = b_+^{-1} Q^{-1} b_+ Q.
RSCoords rs_from(const ReducedPoint& p);
ReducedPoint rs_to(const RSCoords& c);

// Couplings V_i = (b_+ b_+^dagger)_ii, so that tr L = sum_i e^{2 p_i} V_i.
RealVector rs_couplings(const RSCoords& c);

}  // namespace biham
