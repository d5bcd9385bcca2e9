#include "biham/dynamics.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace biham {

namespace {

ComplexMatrix matrix_power(const ComplexMatrix& m, int k) {
  ComplexMatrix out = ComplexMatrix::Identity(m.rows(), m.cols());
  for (int i = 0; i < k; ++i) out *= m;
  return out;
}

}  // namespace

double power_trace_hamiltonian(int k, const Hermitian& L) {
  if (k < 1) throw std::invalid_argument("power_trace_hamiltonian: k must be >= 1");
  const Complex tr = matrix_power(L.m, k).trace();
  if (std::abs(tr.imag()) > 1e-12 * std::max(1.0, std::abs(tr.real()))) {
    throw std::runtime_error("power_trace_hamiltonian: imaginary residue too large");
  }
  return tr.real() / static_cast<double>(k);
}

ObservableExpr hamiltonian_observable(int k) {
  if (k < 1) throw std::invalid_argument("hamiltonian_observable: k must be >= 1");
  return ObservableExpr::word(1.0 / static_cast<double>(k), Part::Re,
                              std::vector<Letter>(static_cast<std::size_t>(k), Letter::L));
}

PhasePoint explicit_flow(int k, double t, const PhasePoint& start) {
  if (k < 1) throw std::invalid_argument("explicit_flow: k must be >= 1");
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(start.L.m);
  const int n = start.dim();
  Eigen::VectorXcd phases(n);
  for (int j = 0; j < n; ++j) {
    phases[j] = std::polar(1.0, t * std::pow(es.eigenvalues()[j], k));
  }
  ComplexMatrix u = es.eigenvectors() * phases.asDiagonal() *
                    es.eigenvectors().adjoint() * start.g.m;
  return PhasePoint(Unitary(std::move(u)), start.L);
}

AntiHermitian tangency_gauge(int k, const ReducedPoint& p) {
  const Complex I(0.0, 1.0);
  const ComplexMatrix Lk = matrix_power(p.L.m, k);
  return AntiHermitian(rmatrix_apply(p.Q, I * Lk) - 0.5 * I * Lk);
}

ReducedTangent reduced_field(int k, const ReducedPoint& p) {
  const Complex I(0.0, 1.0);
  const ComplexMatrix Lk = matrix_power(p.L.m, k);
  const int n = p.dim();
  ComplexMatrix dQ = ComplexMatrix::Zero(n, n);
  for (int j = 0; j < n; ++j) dQ(j, j) = I * Lk(j, j) * p.Q.Q(j, j);
  ComplexMatrix dL = commutator(rmatrix_apply(p.Q, I * Lk), p.L.m);
  return ReducedTangent{std::move(dQ), Hermitian(hermitian_part(dL))};
}

// --- integration --------------------------------------------------------------

namespace {

struct RawState {
  Eigen::VectorXcd Qdiag;
  ComplexMatrix L;
};

RawState field_raw(int k, const RawState& s) {
  const Complex I(0.0, 1.0);
  const int n = static_cast<int>(s.Qdiag.size());
  const ComplexMatrix Lk = matrix_power(s.L, k);
  RawState out;
  out.Qdiag.resize(n);
  for (int j = 0; j < n; ++j) out.Qdiag[j] = I * Lk(j, j) * s.Qdiag[j];
  // r-matrix applied entrywise on the raw diagonal
  ComplexMatrix r = ComplexMatrix::Zero(n, n);
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      if (a == b) continue;
      const Complex z = s.Qdiag[a] / s.Qdiag[b];
      r(a, b) = 0.5 * (z + 1.0) / (z - 1.0) * (I * Lk(a, b));
    }
  }
  out.L = commutator(r, s.L);
  return out;
}

}  // namespace

IntegrationResult integrate_rk4(int k, const ReducedPoint& start, double t_end,
                                double dt, int store_every) {
  if (!(dt > 0.0)) throw std::invalid_argument("integrate_rk4: dt must be positive");
  if (store_every < 1) store_every = 1;
  const int n = start.dim();
  const double abort_gap = 10.0 * tol::regular_gap;

  IntegrationResult result;
  RawState s{start.Q.Q.diagonal(), start.L.m};
  result.min_gap = torus_gap(s.Qdiag);
  {
    // store principal angles so the exported columns share one convention
    RealVector q0(n);
    for (int j = 0; j < n; ++j) q0[j] = std::arg(s.Qdiag[j]);
    result.samples.push_back(
        {0.0, ReducedPoint(RegularTorusElement::from_angles(q0), start.L)});
  }

  const auto steps = static_cast<long>(std::llround(t_end / dt));
  for (long step = 1; step <= steps; ++step) {
    const RawState k1 = field_raw(k, s);
    RawState mid{s.Qdiag + 0.5 * dt * k1.Qdiag, s.L + 0.5 * dt * k1.L};
    const RawState k2 = field_raw(k, mid);
    mid = RawState{s.Qdiag + 0.5 * dt * k2.Qdiag, s.L + 0.5 * dt * k2.L};
    const RawState k3 = field_raw(k, mid);
    const RawState end{s.Qdiag + dt * k3.Qdiag, s.L + dt * k3.L};
    const RawState k4 = field_raw(k, end);

    s.Qdiag += (dt / 6.0) * (k1.Qdiag + 2.0 * k2.Qdiag + 2.0 * k3.Qdiag + k4.Qdiag);
    s.L += (dt / 6.0) * (k1.L + 2.0 * k2.L + 2.0 * k3.L + k4.L);

    if (!s.Qdiag.allFinite() || !s.L.allFinite()) {
      throw std::runtime_error("integrate_rk4: non-finite state (step size)");
    }

    // re-projection: unit phases and Hermitian symmetrization
    double drift = 0.0;
    for (int j = 0; j < n; ++j) {
      const double mod = std::abs(s.Qdiag[j]);
      drift = std::max(drift, std::abs(mod - 1.0));
      s.Qdiag[j] /= mod;
    }
    drift = std::max(drift, 0.5 * (s.L - s.L.adjoint()).norm());
    s.L = hermitian_part(s.L);
    result.max_drift = std::max(result.max_drift, drift);
    if (drift > 1e-8) {
      throw std::runtime_error("integrate_rk4: per-step projection drift above 1e-8");
    }

    const double gap = torus_gap(s.Qdiag);
    result.min_gap = std::min(result.min_gap, gap);
    const double t = static_cast<double>(step) * dt;
    if (gap < abort_gap) {
      result.aborted = true;
      result.abort_time = t;
      return result;
    }

    if (step % store_every == 0 || step == steps) {
      RealVector q(n);
      for (int j = 0; j < n; ++j) q[j] = std::arg(s.Qdiag[j]);
      result.samples.push_back(
          {t, ReducedPoint(RegularTorusElement::from_angles(q), Hermitian(s.L))});
    }
  }
  return result;
}

// --- conserved words -----------------------------------------------------------

namespace {

// canonical representative: lexicographically smallest cyclic rotation
std::string canonical_cyclic(const std::string& w) {
  std::string best = w;
  for (std::size_t r = 1; r < w.size(); ++r) {
    const std::string rot = w.substr(r) + w.substr(0, r);
    if (rot < best) best = rot;
  }
  return best;
}

}  // namespace

std::vector<std::pair<std::string, ObservableExpr>> conserved_words(int degree_cap) {
  if (degree_cap < 1) throw std::invalid_argument("conserved_words: degree_cap >= 1");
  std::vector<std::pair<std::string, ObservableExpr>> out;
  std::set<std::string> seen;
  for (int deg = 1; deg <= degree_cap; ++deg) {
    // letters: 'A' = L, 'B' = Qinv L Q
    for (int mask = 0; mask < (1 << deg); ++mask) {
      std::string w(static_cast<std::size_t>(deg), 'A');
      for (int i = 0; i < deg; ++i) {
        if (mask & (1 << i)) w[static_cast<std::size_t>(i)] = 'B';
      }
      if (w.find('A') == std::string::npos) continue;  // tr(B^d) = tr(A^d)
      const std::string canon = canonical_cyclic(w);
      if (!seen.insert(canon).second) continue;
      std::vector<Letter> letters;
      std::string name;
      for (char c : canon) {
        if (c == 'A') {
          letters.push_back(Letter::L);
          name += "L ";
        } else {
          letters.push_back(Letter::Qinv);
          letters.push_back(Letter::L);
          letters.push_back(Letter::Q);
          name += "Qinv L Q ";
        }
      }
      if (!name.empty()) name.pop_back();
      out.emplace_back("Re tr(" + name + ")",
                       ObservableExpr::word(1.0, Part::Re, std::move(letters)));
    }
  }
  return out;
}

std::vector<DriftRecord> conserved_drifts(const IntegrationResult& traj,
                                          int degree_cap) {
  std::vector<DriftRecord> out;
  if (traj.samples.empty()) return out;
  for (const auto& [name, expr] : conserved_words(degree_cap)) {
    const double v0 = expr.evaluate(traj.samples.front().state);
    double drift = 0.0;
    for (const auto& s : traj.samples) {
      drift = std::max(drift, std::abs(expr.evaluate(s.state) - v0));
    }
    out.push_back({name, v0, drift});
  }
  return out;
}

// --- Sutherland coordinates -----------------------------------------------------

SutherlandCoords sutherland_from(const ReducedPoint& p) {
  const int n = p.dim();
  RealVector mom(n);
  for (int j = 0; j < n; ++j) mom[j] = p.L.m(j, j).real();
  // phi = Q^{-1} L_perp Q - L_perp, entrywise (Q_l/Q_k - 1) L_kl
  ComplexMatrix phi = ComplexMatrix::Zero(n, n);
  for (int k = 0; k < n; ++k) {
    for (int l = 0; l < n; ++l) {
      if (k == l) continue;
      phi(k, l) = (p.Q.Q(l, l) / p.Q.Q(k, k) - 1.0) * p.L.m(k, l);
    }
  }
  return SutherlandCoords(p.Q.q, std::move(mom), std::move(phi));
}

ReducedPoint sutherland_to(const SutherlandCoords& c) {
  const int n = c.dim();
  RegularTorusElement Q = RegularTorusElement::from_angles(c.q);
  ComplexMatrix L = ComplexMatrix::Zero(n, n);
  for (int j = 0; j < n; ++j) L(j, j) = c.p[j];
  for (int k = 0; k < n; ++k) {
    for (int l = 0; l < n; ++l) {
      if (k == l) continue;
      const Complex z = Q.Q(k, k) / Q.Q(l, l);
      // L_perp = -(R(Q) + 1/2) phi, entrywise -z/(z-1) phi_kl
      L(k, l) = -z / (z - 1.0) * c.phi(k, l);
    }
  }
  return ReducedPoint(std::move(Q), Hermitian(hermitian_part(L)));
}

double sutherland_hamiltonian(const SutherlandCoords& c) {
  const int n = c.dim();
  double h = 0.0;
  for (int j = 0; j < n; ++j) h += 0.5 * c.p[j] * c.p[j];
  for (int k = 0; k < n; ++k) {
    for (int l = 0; l < n; ++l) {
      if (k == l) continue;
      const double s = std::sin(0.5 * (c.q[k] - c.q[l]));
      h += 0.125 * std::norm(c.phi(k, l)) / (s * s);
    }
  }
  return h;
}

// --- Ruijsenaars coordinates -----------------------------------------------------

RSCoords rs_from(const ReducedPoint& p) {
  const int n = p.dim();
  PositiveHermitian pos(p.L.m);  // validates positivity
  const ComplexMatrix b = cholesky_upper(pos.m());
  RealVector mom(n);
  ComplexMatrix bplus = b;
  for (int i = 0; i < n; ++i) {
    mom[i] = std::log(b(i, i).real());
    bplus.row(i) /= b(i, i).real();
  }
  const ComplexMatrix bplus_inv =
      bplus.triangularView<Eigen::Upper>().solve(ComplexMatrix::Identity(n, n));
  ComplexMatrix lambda = bplus_inv * p.Q.inverse() * bplus * p.Q.Q;
  return RSCoords(p.Q, std::move(mom), std::move(lambda));
}

ReducedPoint rs_to(const RSCoords& c) {
  const int n = c.dim();
  // Solve b_+ lambda = Q^{-1} b_+ Q for unit-diagonal upper triangular b_+,
  // entrywise along increasing superdiagonals.
  ComplexMatrix u = ComplexMatrix::Identity(n, n);
  for (int d = 1; d < n; ++d) {
    for (int k = 0; k + d < n; ++k) {
      const int l = k + d;
      Complex acc(0.0, 0.0);
      for (int m = k; m < l; ++m) acc += u(k, m) * c.lambda(m, l);
      const Complex denom = c.Q.Q(l, l) / c.Q.Q(k, k) - 1.0;
      u(k, l) = acc / denom;
    }
  }
  ComplexMatrix b = u;
  for (int i = 0; i < n; ++i) b.row(i) *= std::exp(c.p[i]);
  ComplexMatrix L = b * b.adjoint();
  return ReducedPoint(c.Q, Hermitian(hermitian_part(L)));
}

RealVector rs_couplings(const RSCoords& c) {
  const int n = c.dim();
  ComplexMatrix u = ComplexMatrix::Identity(n, n);
  for (int d = 1; d < n; ++d) {
    for (int k = 0; k + d < n; ++k) {
      const int l = k + d;
      Complex acc(0.0, 0.0);
      for (int m = k; m < l; ++m) acc += u(k, m) * c.lambda(m, l);
      u(k, l) = acc / (c.Q.Q(l, l) / c.Q.Q(k, k) - 1.0);
    }
  }
  RealVector v(n);
  for (int i = 0; i < n; ++i) v[i] = (u.row(i) * u.row(i).adjoint())(0, 0).real();
  return v;
}

}  // namespace biham
