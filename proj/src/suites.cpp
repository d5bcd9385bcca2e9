#include "biham/suites.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <stdexcept>
#include <thread>

#include "biham/factorization.hpp"

namespace biham {

namespace {

using json = nlohmann::ordered_json;

// --- trial harness -----------------------------------------------------------

struct CheckSpec {
  std::string name;
  double tol;
};

struct TrialResult {
  std::vector<double> residuals;  // one per check, NaN = not exercised
  std::string digest;
};

using TrialFn = std::function<TrialResult(int trial, std::uint64_t seed)>;

SuiteReport reduce_suite(const SuiteSpec& spec, const std::vector<CheckSpec>& checks,
                         const std::vector<TrialResult>& results,
                         const std::vector<std::uint64_t>& seeds) {
  SuiteReport report;
  report.suite_id = spec.suite_id;
  report.n = spec.n;
  report.trials = spec.trials;
  report.seed = spec.seed;
  report.pass = true;
  for (std::size_t c = 0; c < checks.size(); ++c) {
    CheckRecord rec;
    rec.name = checks[c].name;
    rec.tolerance = checks[c].tol;
    auto it = spec.tol_overrides.find(rec.name);
    if (it != spec.tol_overrides.end()) rec.tolerance = it->second;
    rec.trials = 0;
    rec.max_residual = 0.0;
    for (std::size_t t = 0; t < results.size(); ++t) {
      if (c >= results[t].residuals.size()) continue;
      const double r = results[t].residuals[c];
      if (std::isnan(r)) continue;
      ++rec.trials;
      if (r > rec.max_residual) {
        rec.max_residual = r;
        rec.worst_seed = seeds[t];
        rec.worst_digest = results[t].digest;
      }
    }
    rec.pass = rec.max_residual <= rec.tolerance;
    report.pass = report.pass && rec.pass;
    report.checks.push_back(std::move(rec));
  }
  return report;
}

void run_trials(const SuiteSpec& spec, const TrialFn& fn,
                std::vector<TrialResult>& results, std::vector<std::uint64_t>& seeds) {
  results.resize(static_cast<std::size_t>(spec.trials));
  seeds.resize(static_cast<std::size_t>(spec.trials));
  for (int t = 0; t < spec.trials; ++t) {
    seeds[static_cast<std::size_t>(t)] = mix_seed(spec.seed, static_cast<std::uint64_t>(t));
  }
  const int workers = std::max(1, std::min(worker_count(), spec.trials));
  std::atomic<int> next{0};
  auto work = [&]() {
    for (;;) {
      const int t = next.fetch_add(1);
      if (t >= spec.trials) return;
      TrialResult r;
      try {
        r = fn(t, seeds[static_cast<std::size_t>(t)]);
      } catch (const std::exception& ex) {
        r.residuals.assign(64, std::numeric_limits<double>::infinity());
        r.digest = std::string("exception: ") + ex.what();
      }
      results[static_cast<std::size_t>(t)] = std::move(r);
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
}

SuiteReport run_generic(const SuiteSpec& spec, const std::vector<CheckSpec>& checks,
                        const TrialFn& fn) {
  std::vector<TrialResult> results;
  std::vector<std::uint64_t> seeds;
  run_trials(spec, fn, results, seeds);
  return reduce_suite(spec, checks, results, seeds);
}

// --- random observables -------------------------------------------------------

double random_coeff(Rng& rng) {
  const double mag = 0.5 + 1.5 * rng.uniform();
  return rng.uniform() < 0.5 ? -mag : mag;
}

ObservableExpr random_word(Rng& rng, const std::vector<Letter>& alphabet,
                           int max_len, int max_terms) {
  std::vector<WordTerm> terms;
  const int nterms = 1 + static_cast<int>(rng.uniform() * max_terms) % max_terms;
  for (int t = 0; t < nterms; ++t) {
    WordTerm term;
    term.coeff = random_coeff(rng);
    term.part = rng.uniform() < 0.5 ? Part::Re : Part::Im;
    const int len = 1 + static_cast<int>(rng.uniform() * max_len) % max_len;
    for (int i = 0; i < len; ++i) {
      term.word.push_back(alphabet[rng.raw() % alphabet.size()]);
    }
    terms.push_back(std::move(term));
  }
  return ObservableExpr(std::move(terms));
}

const std::vector<Letter>& phase_alphabet() {
  static const std::vector<Letter> a{Letter::G, Letter::Ginv, Letter::L};
  return a;
}

const std::vector<Letter>& gl_alphabet() {
  static const std::vector<Letter> a{Letter::G, Letter::Ginv};
  return a;
}

const std::vector<Letter>& reduced_alphabet() {
  static const std::vector<Letter> a{Letter::Q, Letter::Qinv, Letter::L};
  return a;
}

// N(n)-invariant observables on the reduced slice: trace words in L and
// Qinv L Q, plus words in Q alone.
std::vector<ObservableExpr> invariant_pool() {
  std::vector<ObservableExpr> pool;
  for (const auto& [name, expr] : conserved_words(3)) {
    (void)name;
    pool.push_back(expr);
  }
  pool.push_back(ObservableExpr::word(1.0, Part::Re, {Letter::Q}));
  pool.push_back(ObservableExpr::word(1.0, Part::Im, {Letter::Q}));
  pool.push_back(ObservableExpr::word(0.5, Part::Re, {Letter::Q, Letter::Q}));
  pool.push_back(ObservableExpr::word(1.0, Part::Re, {Letter::Qinv}));
  return pool;
}

ObservableExpr pick_invariant(Rng& rng, const std::vector<ObservableExpr>& pool) {
  const ObservableExpr& base = pool[rng.raw() % pool.size()];
  return base * random_coeff(rng);
}

// random monomial unitary: permutation times torus phases
Unitary random_monomial(int n, Rng& rng) {
  std::vector<int> perm(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) perm[static_cast<std::size_t>(i)] = i;
  for (int i = n - 1; i > 0; --i) {
    const int j = static_cast<int>(rng.raw() % static_cast<std::uint64_t>(i + 1));
    std::swap(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)]);
  }
  ComplexMatrix eta = ComplexMatrix::Zero(n, n);
  for (int j = 0; j < n; ++j) {
    eta(perm[static_cast<std::size_t>(j)], j) =
        std::polar(1.0, 2.0 * 3.14159265358979323846 * rng.uniform());
  }
  return Unitary(std::move(eta));
}

PhasePoint random_phase_point(int n, std::uint64_t seed, double scale = 0.7) {
  return PhasePoint(random_unitary(n, mix_seed(seed, 11)),
                    random_hermitian(n, mix_seed(seed, 12), scale));
}

ReducedPoint random_reduced_point(int n, std::uint64_t seed, double gap = 0.15,
                                  double scale = 0.7) {
  return ReducedPoint(random_torus_regular(n, mix_seed(seed, 13), gap),
                      random_hermitian(n, mix_seed(seed, 14), scale));
}

ModelPoint2 random_model2_point(int n, std::uint64_t seed) {
  return ModelPoint2(random_unitary(n, mix_seed(seed, 15)),
                     random_positive(n, mix_seed(seed, 16), 0.5));
}

// Generic double element with controlled conditioning: every K factors as
// (triangular) x (unitary), so sampling the factors with moderate scale
// covers GL(n,C) while keeping inverse-gram observables O(1).
ComplexMatrix random_double_point(int n, std::uint64_t seed, double scale = 0.3) {
  return random_pos_triangular(n, mix_seed(seed, 17), scale).m *
         random_unitary(n, mix_seed(seed, 18)).m;
}

// --- generic Jacobi machinery ---------------------------------------------------

using BracketFn =
    std::function<double(const Observable&, const Observable&, const Point&)>;

double jacobi_residual(const BracketFn& bk, const Observable& f, const Observable& g,
                       const Observable& h, const Point& p) {
  auto compose = [bk](Observable a, Observable b) {
    return Observable(std::function<double(const Point&)>(
        [bk, a, b](const Point& x) { return bk(a, b, x); }));
  };
  return std::abs(bk(f, compose(g, h), p) + bk(g, compose(h, f), p) +
                  bk(h, compose(f, g), p));
}

BracketFn plain_bracket(BracketKind kind) {
  return [kind](const Observable& f, const Observable& h, const Point& p) {
    return bracket(kind, f, h, p);
  };
}

// --- individual suites ----------------------------------------------------------

SuiteReport suite_factorization(const SuiteSpec& spec) {
  const std::vector<CheckSpec> checks = {
      {"split-left-residual", 1e-9},   {"split-right-residual", 1e-9},
      {"split-consistency", 1e-9},     {"split-redo", 1e-8},
      {"model1-roundtrip", 1e-9},      {"model2-roundtrip", 1e-10},
      {"moment-functoriality", 1e-9},  {"unitary-split", 1e-9},
  };
  const int n = spec.n;
  return run_generic(spec, checks, [n](int, std::uint64_t seed) {
    TrialResult out;
    const ComplexMatrix K = random_invertible(n, mix_seed(seed, 1));
    out.digest = digest(K);
    DoubleSplit s = split(K);
    out.residuals.push_back((s.bL.m * s.gR.m.adjoint() - K).norm());
    out.residuals.push_back((s.gL.m * s.bR.inverse().m - K).norm());
    out.residuals.push_back(
        (s.bL.inverse().m * s.gL.m - s.gR.m.adjoint() * s.bR.m).norm());
    {
      const ComplexMatrix K2 = s.bL.m * s.gR.m.adjoint();
      DoubleSplit s2 = split(K2);
      out.residuals.push_back((s2.bL.m - s.bL.m).norm() + (s2.bR.m - s.bR.m).norm() +
                              (s2.gL.m - s.gL.m).norm() + (s2.gR.m - s.gR.m).norm());
    }
    out.residuals.push_back((model1_inverse(model1_of(K)) - K).norm());
    {
      ModelPoint1 p1(random_unitary(n, mix_seed(seed, 2)),
                     random_pos_triangular(n, mix_seed(seed, 3)));
      ModelPoint1 back = model2_inverse(model2_of(p1));
      out.residuals.push_back((back.g.m - p1.g.m).norm() + (back.b.m - p1.b.m).norm());
    }
    {
      PosTriangular lamR = split(K).bR;
      const ComplexMatrix gram_inv = (K.adjoint() * K).partialPivLu().inverse();
      out.residuals.push_back((lamR.m * lamR.m.adjoint() - gram_inv).norm());
    }
    {
      // unitary input: both triangular factors collapse to 1, gL = K and
      // (by K = bL gR^{-1}) gR = K^{-1}
      Unitary u = random_unitary(n, mix_seed(seed, 4));
      DoubleSplit su = split(u.m);
      const ComplexMatrix one = ComplexMatrix::Identity(n, n);
      out.residuals.push_back((su.gL.m - u.m).norm() +
                              (su.gR.m - u.m.adjoint()).norm() +
                              (su.bL.m - one).norm() + (su.bR.m - one).norm());
    }
    return out;
  });
}

double slot_gap(const std::optional<ComplexMatrix>& a,
                const std::optional<ComplexMatrix>& b) {
  if (!a && !b) return 0.0;
  if (!a || !b) return std::numeric_limits<double>::infinity();
  return (*a - *b).norm();
}

double gradient_set_gap(const GradientSet& a, const GradientSet& b) {
  double r = 0.0;
  r = std::max(r, slot_gap(a.nabla, b.nabla));
  r = std::max(r, slot_gap(a.nabla_prime, b.nabla_prime));
  r = std::max(r, slot_gap(a.D1, b.D1));
  r = std::max(r, slot_gap(a.D1_prime, b.D1_prime));
  r = std::max(r, slot_gap(a.D2, b.D2));
  r = std::max(r, slot_gap(a.D2_prime, b.D2_prime));
  r = std::max(r, slot_gap(a.d2, b.d2));
  r = std::max(r, slot_gap(a.DQ, b.DQ));
  r = std::max(r, slot_gap(a.dp, b.dp));
  r = std::max(r, slot_gap(a.Dlam, b.Dlam));
  r = std::max(r, slot_gap(a.Dlam_prime, b.Dlam_prime));
  return r;
}

GradientSet scale_add(const GradientSet& a, double alpha, const GradientSet& b,
                      double beta) {
  GradientSet out;
  auto comb = [&](const std::optional<ComplexMatrix>& x,
                  const std::optional<ComplexMatrix>& y)
      -> std::optional<ComplexMatrix> {
    if (!x || !y) return std::nullopt;
    return alpha * *x + beta * *y;
  };
  out.nabla = comb(a.nabla, b.nabla);
  out.nabla_prime = comb(a.nabla_prime, b.nabla_prime);
  out.D1 = comb(a.D1, b.D1);
  out.D1_prime = comb(a.D1_prime, b.D1_prime);
  out.D2 = comb(a.D2, b.D2);
  out.D2_prime = comb(a.D2_prime, b.D2_prime);
  out.d2 = comb(a.d2, b.d2);
  out.DQ = comb(a.DQ, b.DQ);
  out.dp = comb(a.dp, b.dp);
  out.Dlam = comb(a.Dlam, b.Dlam);
  out.Dlam_prime = comb(a.Dlam_prime, b.Dlam_prime);
  return out;
}

// max over channels and basis directions of
// |pairing(slot, X) - exact directional derivative|
double pairing_identity_residual(const ObservableExpr& f, const Point& p,
                                 const GradientSet& g) {
  const int n = point_dim(p);
  double worst = 0.0;
  auto check = [&](Channel c, const std::optional<ComplexMatrix>& slot) {
    if (!slot) return;
    for (const auto& x : basis(channel_direction_space(c, p), n)) {
      const double lhs = pairing(*slot, x);
      const double rhs = exact_directional(f, p, c, x);
      worst = std::max(worst, std::abs(lhs - rhs));
    }
  };
  const bool gl = std::holds_alternative<GlPoint>(p);
  check(Channel::GroupLeft, gl ? g.nabla : g.D1);
  check(Channel::GroupRight, gl ? g.nabla_prime : g.D1_prime);
  if (g.d2) check(Channel::HermAdd, g.d2);
  if (g.D2) check(Channel::TriLeft, g.D2);
  if (g.D2_prime) check(Channel::TriRight, g.D2_prime);
  if (g.DQ) check(Channel::TorusLeft, g.DQ);
  return worst;
}

SuiteReport suite_gradients(const SuiteSpec& spec) {
  const std::vector<CheckSpec> checks = {
      {"pairing-identity", 1e-10}, {"fd-agreement", 1e-7},
      {"linearity", 1e-10},        {"unit-shift", 1e-7},
      {"extension-restriction", 1e-10},
  };
  const int n = spec.n;
  return run_generic(spec, checks, [n](int trial, std::uint64_t seed) {
    TrialResult out;
    Rng rng(seed);
    // rotate through point kinds
    Point p = [&]() -> Point {
      switch (trial % 4) {
        case 0: return random_phase_point(n, seed);
        case 1: return random_reduced_point(n, seed);
        case 2:
          return ModelPoint1(random_unitary(n, mix_seed(seed, 21)),
                             random_pos_triangular(n, mix_seed(seed, 22)));
        default: return GlPoint(random_double_point(n, mix_seed(seed, 23)));
      }
    }();
    const std::vector<Letter>& alpha =
        std::holds_alternative<GlPoint>(p)
            ? gl_alphabet()
            : (std::holds_alternative<ReducedPoint>(p) ? reduced_alphabet()
                                                       : phase_alphabet());
    const ObservableExpr f = random_word(rng, alpha, 4, 2);
    out.digest = digest(letter_matrix(alpha.front(), p));

    const GradientSet ge = exact_gradients(f, p);
    out.residuals.push_back(pairing_identity_residual(f, p, ge));

    const GradientSet gfd =
        fd_gradients([&f](const Point& x) { return f.evaluate(x); }, p);
    out.residuals.push_back(gradient_set_gap(ge, gfd));

    {
      const ObservableExpr g2 = random_word(rng, alpha, 3, 2);
      const double a = random_coeff(rng), b = random_coeff(rng);
      const GradientSet lhs = exact_gradients(f * a + g2 * b, p);
      const GradientSet rhs = scale_add(exact_gradients(f, p), a,
                                        exact_gradients(g2, p), b);
      out.residuals.push_back(gradient_set_gap(lhs, rhs));
    }

    if (std::holds_alternative<PhasePoint>(p)) {
      const Observable of(f);
      const double exact = unit_shift_derivative(of, p);
      const Observable ofd(std::function<double(const Point&)>(
          [f](const Point& x) { return f.evaluate(x); }));
      const double fd = unit_shift_derivative(ofd, p);
      out.residuals.push_back(std::abs(exact - fd));
    } else {
      out.residuals.push_back(std::numeric_limits<double>::quiet_NaN());
    }

    {
      const ReducedPoint rp = random_reduced_point(n, mix_seed(seed, 24));
      const auto pool = invariant_pool();
      const ObservableExpr f_red = pick_invariant(rng, pool);
      const ObservableExpr F = f_red.extend_invariant();
      double r = std::abs(F.evaluate(rp.embed()) - f_red.evaluate(rp));
      // invariance of the extension under conjugation
      Unitary eta = random_unitary(n, mix_seed(seed, 25));
      PhasePoint conj(Unitary(eta.m * rp.Q.Q * eta.m.adjoint()),
                      Hermitian(hermitian_part(eta.m * rp.L.m * eta.m.adjoint())));
      r = std::max(r, std::abs(F.evaluate(conj) - F.evaluate(rp.embed())));
      out.residuals.push_back(r);
    }
    return out;
  });
}

SuiteReport suite_jacobi(const SuiteSpec& spec) {
  const std::vector<CheckSpec> checks = {
      {"jacobi-ctb1", 1e-5},
      {"jacobi-ctb2", 1e-5},
      {"jacobi-red1", 1e-5},
      {"jacobi-red2", 1e-5},
  };
  const int n = spec.n;
  return run_generic(spec, checks, [n](int, std::uint64_t seed) {
    TrialResult out;
    Rng rng(seed);
    const PhasePoint pp = random_phase_point(n, seed);
    out.digest = digest(pp.L.m);
    const ObservableExpr f = random_word(rng, phase_alphabet(), 3, 2);
    const ObservableExpr g = random_word(rng, phase_alphabet(), 3, 2);
    const ObservableExpr h = random_word(rng, phase_alphabet(), 3, 2);
    out.residuals.push_back(
        jacobi_residual(plain_bracket(BracketKind::Ctb1), f, g, h, pp));
    out.residuals.push_back(
        jacobi_residual(plain_bracket(BracketKind::Ctb2), f, g, h, pp));

    const ReducedPoint rp = random_reduced_point(n, mix_seed(seed, 31));
    const auto pool = invariant_pool();
    const ObservableExpr fi = pick_invariant(rng, pool);
    const ObservableExpr gi = pick_invariant(rng, pool);
    const ObservableExpr hi = pick_invariant(rng, pool);
    out.residuals.push_back(
        jacobi_residual(plain_bracket(BracketKind::Red1), fi, gi, hi, rp));
    out.residuals.push_back(
        jacobi_residual(plain_bracket(BracketKind::Red2), fi, gi, hi, rp));
    return out;
  });
}

SuiteReport suite_compatibility(const SuiteSpec& spec) {
  const std::vector<CheckSpec> checks = {
      {"pencil-t=-1", 1e-5}, {"pencil-t=0.5", 1e-5}, {"pencil-t=1", 1e-5},
      {"pencil-t=2", 1e-5},  {"pencil-reduced", 1e-5},
  };
  const int n = spec.n;
  return run_generic(spec, checks, [n](int, std::uint64_t seed) {
    TrialResult out;
    Rng rng(seed);
    const PhasePoint pp = random_phase_point(n, seed);
    out.digest = digest(pp.L.m);
    const ObservableExpr f = random_word(rng, phase_alphabet(), 3, 2);
    const ObservableExpr g = random_word(rng, phase_alphabet(), 3, 2);
    const ObservableExpr h = random_word(rng, phase_alphabet(), 3, 2);
    for (double t : {-1.0, 0.5, 1.0, 2.0}) {
      BracketFn pencil = [t](const Observable& a, const Observable& b,
                             const Point& x) {
        return bracket(BracketKind::Ctb1, a, b, x) +
               t * bracket(BracketKind::Ctb2, a, b, x);
      };
      out.residuals.push_back(jacobi_residual(pencil, f, g, h, pp));
    }
    {
      const ReducedPoint rp = random_reduced_point(n, mix_seed(seed, 32));
      const auto pool = invariant_pool();
      BracketFn pencil = [](const Observable& a, const Observable& b,
                            const Point& x) {
        return bracket(BracketKind::Red1, a, b, x) +
               bracket(BracketKind::Red2, a, b, x);
      };
      out.residuals.push_back(jacobi_residual(pencil, pick_invariant(rng, pool),
                                              pick_invariant(rng, pool),
                                              pick_invariant(rng, pool), rp));
    }
    return out;
  });
}

SuiteReport suite_exactness(const SuiteSpec& spec) {
  const std::vector<CheckSpec> checks = {
      {"lie-derivative-relation", 1e-6},
      {"first-bracket-invariance", 1e-6},
  };
  const int n = spec.n;
  return run_generic(spec, checks, [n](int, std::uint64_t seed) {
    TrialResult out;
    Rng rng(seed);
    const PhasePoint pp = random_phase_point(n, seed);
    out.digest = digest(pp.L.m);
    const ObservableExpr F = random_word(rng, phase_alphabet(), 3, 2);
    const ObservableExpr H = random_word(rng, phase_alphabet(), 3, 2);
    const ObservableExpr DF = F.unit_shift_derived();
    const ObservableExpr DH = H.unit_shift_derived();
    const ComplexMatrix one = ComplexMatrix::Identity(n, n);

    auto outer_shift = [&](BracketKind kind) {
      // d/dt of the bracket value along L -> L + t, fourth-order stencil
      auto val = [&](double t) {
        PhasePoint shifted(pp.g, Hermitian(pp.L.m + t * one));
        return bracket(kind, Observable(F), Observable(H), shifted);
      };
      const double h = 1e-4;
      return (-val(2 * h) + 8 * val(h) - 8 * val(-h) + val(-2 * h)) / (12 * h);
    };

    {
      const double lhs = bracket(BracketKind::Ctb1, Observable(F), Observable(H), pp);
      const double rhs =
          outer_shift(BracketKind::Ctb2) -
          bracket(BracketKind::Ctb2, Observable(DF), Observable(H), pp) -
          bracket(BracketKind::Ctb2, Observable(F), Observable(DH), pp);
      out.residuals.push_back(std::abs(lhs - rhs));
    }
    {
      const double rhs =
          outer_shift(BracketKind::Ctb1) -
          bracket(BracketKind::Ctb1, Observable(DF), Observable(H), pp) -
          bracket(BracketKind::Ctb1, Observable(F), Observable(DH), pp);
      out.residuals.push_back(std::abs(rhs));
    }
    return out;
  });
}

SuiteReport suite_ladder(const SuiteSpec& spec) {
  const std::vector<CheckSpec> checks = {
      {"ladder-k1", 1e-8}, {"ladder-k2", 1e-8}, {"ladder-k3", 1e-8},
  };
  const int n = spec.n;
  return run_generic(spec, checks, [n](int, std::uint64_t seed) {
    TrialResult out;
    Rng rng(seed);
    const PhasePoint pp = random_phase_point(n, seed);
    out.digest = digest(pp.L.m);
    std::vector<ObservableExpr> words;
    for (int i = 0; i < 10; ++i) {
      words.push_back(random_word(rng, phase_alphabet(), 4, 2));
    }
    for (int k = 1; k <= 3; ++k) {
      const Observable hk(hamiltonian_observable(k));
      const Observable hk1(hamiltonian_observable(k + 1));
      double worst = 0.0;
      for (const auto& f : words) {
        const double lhs = bracket(BracketKind::Ctb2, Observable(f), hk, pp);
        const double rhs = bracket(BracketKind::Ctb1, Observable(f), hk1, pp);
        worst = std::max(worst, std::abs(lhs - rhs));
      }
      out.residuals.push_back(worst);
    }
    return out;
  });
}

SuiteReport suite_reduction_oracle(const SuiteSpec& spec) {
  const std::vector<CheckSpec> checks = {
      {"red1-vs-ctb1", 1e-7},
      {"red2-vs-ctb2", 1e-7},
      {"commutant-diagonal", 1e-9},
      {"gradient-transport", 1e-8},
  };
  const int n = spec.n;
  return run_generic(spec, checks, [n](int, std::uint64_t seed) {
    TrialResult out;
    Rng rng(seed);
    const ReducedPoint rp = random_reduced_point(n, seed);
    out.digest = digest(rp.L.m);
    const PhasePoint embedded = rp.embed();
    const auto pool = invariant_pool();
    double r1 = 0.0, r2 = 0.0, r3 = 0.0, r4 = 0.0;
    for (int pair = 0; pair < 6; ++pair) {
      const ObservableExpr f = pick_invariant(rng, pool);
      const ObservableExpr h = pick_invariant(rng, pool);
      const ObservableExpr F = f.extend_invariant();
      const ObservableExpr H = h.extend_invariant();
      r1 = std::max(r1, std::abs(bracket(BracketKind::Red1, Observable(f),
                                         Observable(h), rp) -
                                 bracket(BracketKind::Ctb1, Observable(F),
                                         Observable(H), embedded)));
      r2 = std::max(r2, std::abs(bracket(BracketKind::Red2, Observable(f),
                                         Observable(h), rp) -
                                 bracket(BracketKind::Ctb2, Observable(F),
                                         Observable(H), embedded)));
      // gradient relations between the reduced and the invariant extension
      const GradientSet gf = exact_gradients(f, rp);
      const GradientSet gF = exact_gradients(F, embedded);
      r3 = std::max(r3, slot_gap(gf.d2, gF.d2));
      const ComplexMatrix br = commutator(rp.L.m, *gf.d2);
      r3 = std::max(r3, project_space(Space::UNDiag, br).norm() +
                            project_space(Space::BNDiag, br).norm());
      const ComplexMatrix br_plus = grade_split(br).plus;
      const ComplexMatrix expected =
          *gf.DQ - br_plus - 2.0 * rmatrix_apply(rp.Q, br_plus);
      r4 = std::max(r4, (*gF.D1 - expected).norm());
    }
    out.residuals = {r1, r2, r3, r4};
    return out;
  });
}

SuiteReport suite_invariance(const SuiteSpec& spec) {
  const std::vector<CheckSpec> checks = {
      {"red1-equivariance", 1e-8},
      {"red2-equivariance", 1e-8},
      {"word-equivariance", 1e-10},
  };
  const int n = spec.n;
  return run_generic(spec, checks, [n](int, std::uint64_t seed) {
    TrialResult out;
    Rng rng(seed);
    const ReducedPoint rp = random_reduced_point(n, seed);
    out.digest = digest(rp.L.m);
    const Unitary eta = random_monomial(n, rng);
    const ComplexMatrix Q2 = eta.m * rp.Q.Q * eta.m.adjoint();
    const ReducedPoint rp2(
        RegularTorusElement::from_matrix(Q2),
        Hermitian(hermitian_part(eta.m * rp.L.m * eta.m.adjoint())));
    const auto pool = invariant_pool();
    double r1 = 0.0, r2 = 0.0, r3 = 0.0;
    for (int rep = 0; rep < 4; ++rep) {
      const ObservableExpr f = pick_invariant(rng, pool);
      const ObservableExpr h = pick_invariant(rng, pool);
      r1 = std::max(r1, std::abs(bracket(BracketKind::Red1, Observable(f),
                                         Observable(h), rp) -
                                 bracket(BracketKind::Red1, Observable(f),
                                         Observable(h), rp2)));
      r2 = std::max(r2, std::abs(bracket(BracketKind::Red2, Observable(f),
                                         Observable(h), rp) -
                                 bracket(BracketKind::Red2, Observable(f),
                                         Observable(h), rp2)));
      r3 = std::max(r3, std::abs(f.evaluate(rp) - f.evaluate(rp2)));
    }
    out.residuals = {r1, r2, r3};
    return out;
  });
}

SuiteReport suite_actions(const SuiteSpec& spec) {
  const std::vector<CheckSpec> checks = {
      {"quasi-adjoint-identity", 1e-10}, {"quasi-adjoint-unit", 1e-10},
      {"quasi-adjoint-composition", 1e-9}, {"action2-orbit", 1e-9},
      {"action2-invariants", 1e-9},      {"closure-invariance", 1e-7},
      {"model2-half-factor", 1e-8},      {"model1-transport", 1e-9},
      {"double-transport", 1e-6},
  };
  const int n = spec.n;
  return run_generic(spec, checks, [n](int, std::uint64_t seed) {
    TrialResult out;
    Rng rng(seed);
    const ComplexMatrix K = random_invertible(n, mix_seed(seed, 41));
    out.digest = digest(K);
    const Unitary eta1 = random_unitary(n, mix_seed(seed, 42));
    const Unitary eta2 = random_unitary(n, mix_seed(seed, 43));
    const ComplexMatrix one = ComplexMatrix::Identity(n, n);

    out.residuals.push_back((quasi_adjoint(Unitary(one), K) - K).norm());
    // the identity is a fixed point: eta * Xi_R(eta) = eta * eta^{-1} = 1
    out.residuals.push_back((quasi_adjoint(eta1, one) - one).norm());
    {
      const ComplexMatrix lhs = quasi_adjoint(eta2, quasi_adjoint(eta1, K));
      const ComplexMatrix rhs = quasi_adjoint(Unitary(eta2.m * eta1.m), K);
      out.residuals.push_back((lhs - rhs).norm());
    }
    const ModelPoint2 p2 = random_model2_point(n, seed);
    {
      const ModelPoint2 moved = quasi_adjoint_action2(eta1, p2);
      const Unitary tw = dressing_twist2(eta1, p2);
      const ModelPoint2 undressed = undressed_action2(tw, p2);
      out.residuals.push_back((moved.g.m - undressed.g.m).norm() +
                              (moved.L.m() - undressed.L.m()).norm());
      const ObservableExpr inv = ObservableExpr::word(
          1.0, Part::Re, {Letter::Ginv, Letter::L, Letter::G, Letter::L});
      out.residuals.push_back(std::abs(inv.evaluate(moved) - inv.evaluate(p2)));
    }
    {
      const ObservableExpr F = random_word(rng, phase_alphabet(), 3, 2);
      const ObservableExpr H = random_word(rng, phase_alphabet(), 3, 2);
      const double v = bracket(BracketKind::Model2, Observable(F), Observable(H), p2);
      const ModelPoint2 p2b = undressed_action2(eta2, p2);
      const double vb =
          bracket(BracketKind::Model2, Observable(F), Observable(H), p2b);
      out.residuals.push_back(std::abs(v - vb));
      // the cotangent bracket restricted to positive L is half the model one
      const double half =
          bracket(BracketKind::Ctb2, Observable(F), Observable(H), p2.phase());
      out.residuals.push_back(std::abs(half - 0.5 * v));
      // transport through (g, b) -> (g, b b^dagger)
      const ModelPoint1 p1 = model2_inverse(p2);
      const double v1 =
          bracket(BracketKind::Model1, Observable(F), Observable(H), p1);
      out.residuals.push_back(std::abs(v1 - v));
      // transport from the double: pullbacks along K -> (g, L)
      auto pull = [](ObservableExpr e) {
        return Observable(std::function<double(const Point&)>(
            [e](const Point& x) {
              return e.evaluate(double_to_model2(std::get<GlPoint>(x).K));
            }));
      };
      const ComplexMatrix Kc = random_double_point(n, mix_seed(seed, 44));
      const double vd =
          bracket(BracketKind::Double, pull(F), pull(H), GlPoint(Kc));
      const double vk = bracket(BracketKind::Model2, Observable(F), Observable(H),
                                double_to_model2(Kc));
      out.residuals.push_back(std::abs(vd - vk));
    }
    return out;
  });
}

SuiteReport suite_flows(const SuiteSpec& spec) {
  const std::vector<CheckSpec> checks = {
      {"flow-vs-ctb2", 1e-7},      {"flow-vs-ctb1", 1e-7},
      {"flow-commutation", 1e-9},  {"field-duality", 1e-7},
      {"double-field-pushforward", 1e-6}, {"gauge-condition", 1e-9},
      {"reduced-field-tangency", 1e-10},  {"reduced-flow-vs-brackets", 1e-7},
  };
  const int n = spec.n;
  return run_generic(spec, checks, [n](int trial, std::uint64_t seed) {
    TrialResult out;
    Rng rng(seed);
    const PhasePoint pp = random_phase_point(n, seed, 0.5);
    out.digest = digest(pp.L.m);
    const int k = 1 + trial % 3;
    const ObservableExpr f = random_word(rng, phase_alphabet(), 3, 2);

    {
      // time derivative of f along the explicit flow; the small stencil keeps
      // the fourth-order truncation well under tolerance for k = 3 at n = 4
      auto val = [&](double t) { return f.evaluate(explicit_flow(k, t, pp)); };
      const double h = 1e-4;
      const double dflow =
          (-val(2 * h) + 8 * val(h) - 8 * val(-h) + val(-2 * h)) / (12 * h);
      const double v2 = bracket(BracketKind::Ctb2, Observable(f),
                                Observable(hamiltonian_observable(k)), pp);
      const double v1 = bracket(BracketKind::Ctb1, Observable(f),
                                Observable(hamiltonian_observable(k + 1)), pp);
      out.residuals.push_back(std::abs(dflow - v2));
      out.residuals.push_back(std::abs(dflow - v1));
    }
    {
      const PhasePoint a = explicit_flow(2, 0.4, explicit_flow(1, 0.3, pp));
      const PhasePoint b = explicit_flow(1, 0.3, explicit_flow(2, 0.4, pp));
      out.residuals.push_back((a.g.m - b.g.m).norm() + (a.L.m - b.L.m).norm());
    }
    {
      const ObservableExpr h = random_word(rng, phase_alphabet(), 3, 2);
      double worst = 0.0;
      for (BracketKind kind : {BracketKind::Ctb1, BracketKind::Ctb2}) {
        const Tangent field = hamiltonian_vector_field(kind, Observable(h), pp);
        const double lhs = derivative_along(f, pp, field.dG, field.dL);
        const double rhs = bracket(kind, Observable(f), Observable(h), pp);
        worst = std::max(worst, std::abs(lhs - rhs));
      }
      out.residuals.push_back(worst);
    }
    {
      // generator psi(bR) on the double; its field must push forward to
      // dg = (Dpsi) g, db = b (b^{-1} (Dpsi) b)_b
      const ComplexMatrix K = random_double_point(n, mix_seed(seed, 51));
      const DoubleSplit s = split(K);
      const ObservableExpr psi_word =
          ObservableExpr::word(0.5, Part::Re, {Letter::L}) +
          ObservableExpr::word(0.25, Part::Re, {Letter::L, Letter::L});
      auto psi_at = [&](const PosTriangular& b) {
        return psi_word.evaluate(
            ModelPoint1(Unitary(ComplexMatrix::Identity(n, n)), b));
      };
      const Observable h_gl(std::function<double(const Point&)>(
          [&psi_at](const Point& x) {
            return psi_at(split(std::get<GlPoint>(x).K).bR);
          }));
      const Tangent field =
          hamiltonian_vector_field(BracketKind::Double, h_gl, GlPoint(K));
      // step along the normalized direction so the stencil stays linear,
      // then rescale the derivative back to the actual field
      const double fnorm = std::max(field.dG.norm(), 1e-12);
      const ComplexMatrix dir = field.dG / fnorm;
      const double h = 1e-3;
      auto model_at = [&](double t) { return model1_of(K + t * dir); };
      const ModelPoint1 mp = model_at(h), mm = model_at(-h), mp2 = model_at(2 * h),
                        mm2 = model_at(-2 * h);
      const ComplexMatrix dg =
          fnorm * (-mp2.g.m + 8 * mp.g.m - 8 * mm.g.m + mm2.g.m) / (12 * h);
      const ComplexMatrix db =
          fnorm * (-mp2.b.m + 8 * mp.b.m - 8 * mm.b.m + mm2.b.m) / (12 * h);
      const GradientSet gpsi = exact_gradients(
          psi_word, ModelPoint1(Unitary(ComplexMatrix::Identity(n, n)), s.bR));
      const ComplexMatrix dpsi = *gpsi.D2;
      const ComplexMatrix binv = s.bR.inverse().m;
      const ComplexMatrix dg_expected = dpsi * s.gR.m;
      const ComplexMatrix db_expected =
          s.bR.m * project_ub(binv * dpsi * s.bR.m).b;
      out.residuals.push_back((dg - dg_expected).norm() +
                              (db - db_expected).norm());
    }
    const ReducedPoint rp = random_reduced_point(n, mix_seed(seed, 52));
    {
      const AntiHermitian zeta = tangency_gauge(k, rp);
      const Complex I(0.0, 1.0);
      ComplexMatrix Lk = ComplexMatrix::Identity(n, n);
      for (int i = 0; i < k; ++i) Lk *= rp.L.m;
      const ComplexMatrix cond =
          (I * Lk * rp.Q.Q + commutator(zeta.m, rp.Q.Q)) * rp.Q.inverse();
      out.residuals.push_back((cond - project_space(Space::UNDiag, cond)).norm());

      const ReducedTangent w = reduced_field(k, rp);
      double r = (w.dQ - (I * Lk * rp.Q.Q + commutator(zeta.m, rp.Q.Q))).norm();
      r = std::max(r, (w.dL.m - commutator(zeta.m, rp.L.m)).norm());
      r = std::max(r, grade_split(w.dQ * rp.Q.inverse()).off().norm());
      out.residuals.push_back(r);
    }
    {
      const auto pool = invariant_pool();
      const ObservableExpr fi = pick_invariant(rng, pool);
      const ReducedTangent w = reduced_field(k, rp);
      const double dfield = derivative_along(fi, rp, w.dQ, w.dL.m);
      const double v2 = bracket(BracketKind::Red2, Observable(fi),
                                Observable(hamiltonian_observable(k)), rp);
      const double v1 = bracket(BracketKind::Red1, Observable(fi),
                                Observable(hamiltonian_observable(k + 1)), rp);
      out.residuals.push_back(
          std::max(std::abs(dfield - v2), std::abs(dfield - v1)));
    }
    return out;
  });
}

SuiteReport suite_conservation(const SuiteSpec& spec) {
  const std::vector<CheckSpec> checks = {
      {"trace-square-drift", 1e-8},
      {"word-drift", 1e-7},
      {"energy-drift-rate", 1e-8},
      {"diagonal-closed-form", 1e-9},
      {"regularity-monitor", 0.0},
  };
  SuiteSpec local = spec;
  local.trials = std::min(spec.trials, 4);  // trajectories are the cost driver
  const int n = spec.n;
  SuiteReport rep = run_generic(local, checks, [n](int, std::uint64_t seed) {
    TrialResult out;
    const double t_end = 10.0, dt = 1e-2;
    const int k = 1;
    const ReducedPoint start = random_reduced_point(n, seed, 0.8, 0.25);
    out.digest = digest(start.L.m);
    const IntegrationResult traj = integrate_rk4(k, start, t_end, dt);
    const auto drifts = conserved_drifts(traj, 4);
    double d2 = 0.0, dall = 0.0;
    for (const auto& d : drifts) {
      dall = std::max(dall, d.max_drift);
      if (d.word == "Re tr(L L)") d2 = d.max_drift;
    }
    out.residuals.push_back(d2);
    out.residuals.push_back(dall);
    {
      const double e0 = power_trace_hamiltonian(k, traj.samples.front().state.L);
      double emax = 0.0;
      for (const auto& s : traj.samples) {
        emax = std::max(emax,
                        std::abs(power_trace_hamiltonian(k, s.state.L) - e0));
      }
      out.residuals.push_back(emax / t_end);
    }
    {
      // diagonal momenta decouple: rigid torus rotation, frozen spins
      RealVector q0(n), l0(n);
      Rng rng(mix_seed(seed, 61));
      const double sector = 2.0 * 3.14159265358979323846 / n;
      for (int j = 0; j < n; ++j) {
        q0[j] = sector * (j + 0.3 * rng.uniform());
        l0[j] = rng.normal() * 0.4;
      }
      ComplexMatrix Ld = ComplexMatrix::Zero(n, n);
      for (int j = 0; j < n; ++j) Ld(j, j) = l0[j];
      const ReducedPoint dstart(RegularTorusElement::from_angles(q0, 0.3),
                                Hermitian(Ld));
      const IntegrationResult dtraj = integrate_rk4(k, dstart, 2.0, dt);
      const auto& fin = dtraj.samples.back();
      double r = (fin.state.L.m - Ld).norm();
      for (int j = 0; j < n; ++j) {
        const Complex expected =
            std::polar(1.0, q0[j] + fin.t * std::pow(l0[j], k));
        r = std::max(r, std::abs(fin.state.Q.Q(j, j) - expected));
      }
      out.residuals.push_back(r);
    }
    out.residuals.push_back(traj.aborted ? 1.0 : 0.0);
    return out;
  });
  rep.trials = local.trials;
  return rep;
}

SuiteReport suite_coords(const SuiteSpec& spec) {
  const std::vector<CheckSpec> checks = {
      {"sutherland-roundtrip", 1e-10}, {"sutherland-hamiltonian", 1e-9},
      {"rs-roundtrip", 1e-9},          {"rs-hamiltonian", 1e-9},
      {"decoupled-bracket", 1e-6},
  };
  const int n = spec.n;
  return run_generic(spec, checks, [n](int, std::uint64_t seed) {
    TrialResult out;
    Rng rng(seed);
    const ReducedPoint rp = random_reduced_point(n, seed, 0.3, 0.6);
    out.digest = digest(rp.L.m);
    {
      const SutherlandCoords c = sutherland_from(rp);
      const ReducedPoint back = sutherland_to(c);
      out.residuals.push_back((back.L.m - rp.L.m).norm() +
                              (back.Q.Q - rp.Q.Q).norm());
      out.residuals.push_back(std::abs(sutherland_hamiltonian(c) -
                                       0.5 * (rp.L.m * rp.L.m).trace().real()));
    }
    {
      // positive momenta for the Ruijsenaars chart
      const ReducedPoint rpos(
          rp.Q, random_positive(n, mix_seed(seed, 71), 0.5).h);
      const RSCoords c = rs_from(rpos);
      const ReducedPoint back = rs_to(c);
      out.residuals.push_back((back.L.m - rpos.L.m).norm() +
                              (back.Q.Q - rpos.Q.Q).norm());
      const RealVector v = rs_couplings(c);
      double h = 0.0;
      for (int i = 0; i < n; ++i) h += std::exp(2.0 * c.p[i]) * v[i];
      out.residuals.push_back(std::abs(h - rpos.L.m.trace().real()));

      const auto pool = invariant_pool();
      const ObservableExpr f = pick_invariant(rng, pool);
      const ObservableExpr h2 = pick_invariant(rng, pool);
      auto through_chart = [](ObservableExpr e) {
        return Observable(std::function<double(const Point&)>(
            [e](const Point& x) {
              return e.evaluate(rs_to(std::get<RSCoords>(x)));
            }));
      };
      // the chart composition has steeper higher derivatives than plain
      // words; a finer stencil keeps the truncation under the oracle bound
      FdOptions fine;
      fine.h_group = 3e-4;
      const double lhs = bracket(BracketKind::Decoupled2, through_chart(f),
                                 through_chart(h2), c, fine);
      const double rhs =
          bracket(BracketKind::Red2, Observable(f), Observable(h2), rpos);
      out.residuals.push_back(std::abs(lhs - rhs));
    }
    return out;
  });
}

struct SuiteEntry {
  const char* name;
  const char* description;
  SuiteReport (*fn)(const SuiteSpec&);
};

const SuiteEntry kSuites[] = {
    {"factorization",
     "unique triangular/unitary factorizations, model maps and round trips",
     &suite_factorization},
    {"gradients",
     "defining pairings of all derivative slots, FD agreement, extensions",
     &suite_gradients},
    {"jacobi", "nested-FD Jacobi identity for ctb1/ctb2/red1/red2",
     &suite_jacobi},
    {"compatibility", "Jacobi identity for pencils ctb1 + t*ctb2",
     &suite_compatibility},
    {"exactness", "Lie-derivative relation between the two brackets",
     &suite_exactness},
    {"ladder", "bi-Hamiltonian ladder {f,H_k}_2 = {f,H_{k+1}}_1",
     &suite_ladder},
    {"reduction-oracle",
     "reduced brackets match invariant extensions at diagonal points",
     &suite_reduction_oracle},
    {"invariance", "equivariance of reduced brackets under the normalizer",
     &suite_invariance},
    {"actions", "quasi-adjoint actions, closure, bracket transports",
     &suite_actions},
    {"flows", "explicit/bracket flow consistency and the reduced field",
     &suite_flows},
    {"conservation", "RK4 trajectory drift of conserved trace words",
     &suite_conservation},
    {"coords", "Sutherland and Ruijsenaars charts and the decoupled bracket",
     &suite_coords},
};

}  // namespace

std::vector<std::string> suite_names() {
  std::vector<std::string> out;
  for (const auto& e : kSuites) out.emplace_back(e.name);
  return out;
}

bool is_suite(const std::string& suite_id) {
  for (const auto& e : kSuites) {
    if (suite_id == e.name) return true;
  }
  return false;
}

std::string suite_description(const std::string& suite_id) {
  for (const auto& e : kSuites) {
    if (suite_id == e.name) return e.description;
  }
  throw std::invalid_argument("unknown suite: " + suite_id);
}

SuiteReport run_suite(const SuiteSpec& spec) {
  for (const auto& e : kSuites) {
    if (spec.suite_id == e.name) {
      if (spec.n < 1) throw std::invalid_argument("run_suite: n must be >= 1");
      if (spec.trials < 1) throw std::invalid_argument("run_suite: trials >= 1");
      const auto start = std::chrono::steady_clock::now();
      SuiteReport rep = e.fn(spec);
      rep.wall_seconds =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
              .count();
      return rep;
    }
  }
  throw std::invalid_argument("unknown suite: " + spec.suite_id);
}

namespace {

double json_safe(double v) {
  if (std::isnan(v)) return -1.0;
  if (std::isinf(v)) return 1e308;
  return v;
}

}  // namespace

nlohmann::ordered_json report_json(const SuiteReport& report) {
  json j;
  j["schema_version"] = 1;
  j["suite_id"] = report.suite_id;
  j["n"] = report.n;
  j["trials"] = report.trials;
  j["seed"] = report.seed;
  j["pass"] = report.pass;
  json checks = json::array();
  for (const auto& c : report.checks) {
    json jc;
    jc["name"] = c.name;
    jc["tolerance"] = json_safe(c.tolerance);
    jc["max_residual"] = json_safe(c.max_residual);
    jc["trials"] = c.trials;
    jc["worst_seed"] = c.worst_seed;
    jc["worst_digest"] = c.worst_digest;
    jc["pass"] = c.pass;
    checks.push_back(std::move(jc));
  }
  j["checks"] = std::move(checks);
  return j;
}

int worker_count() {
  if (const char* env = std::getenv("BIHAM_THREADS")) {
    const int v = std::atoi(env);
    if (v >= 1) return v;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

// --- simulation -----------------------------------------------------------------

namespace {

int line_of_offset(const std::string& text, std::size_t offset) {
  int line = 1;
  for (std::size_t i = 0; i < offset && i < text.size(); ++i) {
    if (text[i] == '\n') ++line;
  }
  return line;
}

}  // namespace

SimulationConfig SimulationConfig::from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const nlohmann::json::parse_error& ex) {
    throw std::invalid_argument("config parse error (line " +
                                std::to_string(line_of_offset(text, ex.byte)) +
                                "): " + ex.what());
  }
  SimulationConfig c;
  try {
    c.schema_version = j.value("schema_version", 1);
    if (c.schema_version != 1) {
      throw std::invalid_argument("unsupported schema_version");
    }
    c.n = j.value("n", 3);
    c.flow_power = j.value("flow_power", 1);
    c.t_end = j.value("t_end", 10.0);
    c.dt = j.value("dt", 1e-2);
    c.store_every = j.value("store_every", 1);
    c.degree_cap = j.value("degree_cap", 4);
    c.seed = j.value("seed", static_cast<std::uint64_t>(1));
    c.scale = j.value("scale", 0.25);
    c.initial_kind = j.value("initial", json::object()).value("kind", "random");
    if (j.contains("initial")) {
      const json& init = j.at("initial");
      if (init.contains("angles")) {
        c.angles = init.at("angles").get<std::vector<double>>();
      }
      if (init.contains("l_diag")) {
        c.l_diag = init.at("l_diag").get<std::vector<double>>();
      }
      if (init.contains("scale")) c.scale = init.at("scale").get<double>();
      if (init.contains("l_entries")) {
        const auto rows = init.at("l_entries")
                              .get<std::vector<std::vector<std::vector<double>>>>();
        const int n = static_cast<int>(rows.size());
        c.l_full = ComplexMatrix::Zero(n, n);
        for (int i = 0; i < n; ++i) {
          for (int jj = 0; jj < n; ++jj) {
            c.l_full(i, jj) = Complex(rows[static_cast<std::size_t>(i)]
                                          [static_cast<std::size_t>(jj)][0],
                                      rows[static_cast<std::size_t>(i)]
                                          [static_cast<std::size_t>(jj)][1]);
          }
        }
      }
    }
    if (j.contains("observables")) {
      c.observables = j.at("observables").get<std::vector<std::string>>();
    }
  } catch (const nlohmann::json::exception& ex) {
    throw std::invalid_argument(std::string("config field error: ") + ex.what());
  }
  if (c.n < 1 || !(c.dt > 0.0) || !(c.t_end > 0.0) || c.flow_power < 1) {
    throw std::invalid_argument("config: n, dt, t_end, flow_power must be positive");
  }
  if (c.initial_kind != "random" && c.initial_kind != "diagonal" &&
      c.initial_kind != "explicit") {
    throw std::invalid_argument("config: initial.kind must be random, diagonal "
                                "or explicit");
  }
  return c;
}

SimulationConfig SimulationConfig::from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file: " + path);
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return from_json_text(text);
}

nlohmann::ordered_json SimulationConfig::to_json() const {
  json j;
  j["schema_version"] = schema_version;
  j["n"] = n;
  j["flow_power"] = flow_power;
  j["t_end"] = t_end;
  j["dt"] = dt;
  j["store_every"] = store_every;
  j["degree_cap"] = degree_cap;
  j["seed"] = seed;
  json init;
  init["kind"] = initial_kind;
  init["scale"] = scale;
  if (!angles.empty()) init["angles"] = angles;
  if (!l_diag.empty()) init["l_diag"] = l_diag;
  j["initial"] = std::move(init);
  if (!observables.empty()) j["observables"] = observables;
  return j;
}

ReducedPoint initial_point(const SimulationConfig& c) {
  const int n = c.n;
  if (c.initial_kind == "random") {
    return ReducedPoint(random_torus_regular(n, mix_seed(c.seed, 81), 0.5),
                        random_hermitian(n, mix_seed(c.seed, 82), c.scale));
  }
  if (static_cast<int>(c.angles.size()) != n) {
    throw std::invalid_argument("config: initial.angles must list n angles");
  }
  RealVector q(n);
  for (int j = 0; j < n; ++j) q[j] = c.angles[static_cast<std::size_t>(j)];
  RegularTorusElement Q = RegularTorusElement::from_angles(q);
  if (c.initial_kind == "diagonal") {
    if (static_cast<int>(c.l_diag.size()) != n) {
      throw std::invalid_argument("config: initial.l_diag must list n values");
    }
    ComplexMatrix L = ComplexMatrix::Zero(n, n);
    for (int j = 0; j < n; ++j) L(j, j) = c.l_diag[static_cast<std::size_t>(j)];
    return ReducedPoint(std::move(Q), Hermitian(std::move(L)));
  }
  if (c.l_full.rows() != n) {
    throw std::invalid_argument("config: initial.l_entries must be n x n");
  }
  return ReducedPoint(std::move(Q), Hermitian(c.l_full));
}

namespace {

void write_csv(const std::string& path, const IntegrationResult& traj, int n) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "t";
  for (int j = 1; j <= n; ++j) out << ",q" << j;
  for (int i = 1; i <= n; ++i) {
    for (int j = i; j <= n; ++j) {
      out << ",ReL" << i << j << ",ImL" << i << j;
    }
  }
  out << "\n";
  char buf[32];
  auto put = [&](double v) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    out << buf;
  };
  for (const auto& s : traj.samples) {
    put(s.t);
    for (int j = 0; j < n; ++j) {
      out << ',';
      put(s.state.Q.q[j]);
    }
    for (int i = 0; i < n; ++i) {
      for (int j = i; j < n; ++j) {
        out << ',';
        put(s.state.L.m(i, j).real());
        out << ',';
        put(s.state.L.m(i, j).imag());
      }
    }
    out << "\n";
  }
}

}  // namespace

SimulationOutcome run_simulation(const SimulationConfig& config,
                                 const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  const ReducedPoint start = initial_point(config);
  SimulationOutcome outcome;
  outcome.trajectory = integrate_rk4(config.flow_power, start, config.t_end,
                                     config.dt, config.store_every);
  outcome.drifts = conserved_drifts(outcome.trajectory, config.degree_cap);
  for (const auto& text : config.observables) {
    const ObservableExpr e = ObservableExpr::parse(text);
    const double v0 = e.evaluate(outcome.trajectory.samples.front().state);
    double drift = 0.0;
    for (const auto& s : outcome.trajectory.samples) {
      drift = std::max(drift, std::abs(e.evaluate(s.state) - v0));
    }
    outcome.extra_drifts.push_back({text, v0, drift});
  }

  outcome.csv_path = out_dir + "/trajectory.csv";
  outcome.report_path = out_dir + "/report.json";
  write_csv(outcome.csv_path, outcome.trajectory, config.n);

  json j;
  j["schema_version"] = 1;
  j["config"] = config.to_json();
  j["samples"] = outcome.trajectory.samples.size();
  j["aborted"] = outcome.trajectory.aborted;
  if (outcome.trajectory.aborted) j["abort_time"] = outcome.trajectory.abort_time;
  j["min_regularity_gap"] = json_safe(outcome.trajectory.min_gap);
  j["max_projection_drift"] = json_safe(outcome.trajectory.max_drift);
  json drifts = json::array();
  for (const auto& d : outcome.drifts) {
    json jd;
    jd["word"] = d.word;
    jd["initial"] = json_safe(d.initial_value);
    jd["max_drift"] = json_safe(d.max_drift);
    drifts.push_back(std::move(jd));
  }
  j["conserved"] = std::move(drifts);
  if (!outcome.extra_drifts.empty()) {
    json extra = json::array();
    for (const auto& d : outcome.extra_drifts) {
      json jd;
      jd["observable"] = d.word;
      jd["initial"] = json_safe(d.initial_value);
      jd["max_drift"] = json_safe(d.max_drift);
      extra.push_back(std::move(jd));
    }
    j["observables"] = std::move(extra);
  }
  std::ofstream out(outcome.report_path);
  if (!out) throw std::runtime_error("cannot write " + outcome.report_path);
  out << j.dump(2) << "\n";
  return outcome;
}

}  // namespace biham
