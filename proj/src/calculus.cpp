#include "biham/calculus.hpp"

#include <cmath>
#include <stdexcept>

namespace biham {

namespace {

[[noreturn]] void bad_channel(Channel, const Point& p) {
  throw std::invalid_argument(std::string("calculus: channel not available at a ") +
                              point_kind_name(p) + " point");
}

struct ChannelTable {
  std::vector<Channel> channels;
};

std::vector<Channel> point_channels(const Point& p) {
  struct Visitor {
    std::vector<Channel> operator()(const GlPoint&) const {
      return {Channel::GroupLeft, Channel::GroupRight};
    }
    std::vector<Channel> operator()(const PhasePoint&) const {
      return {Channel::GroupLeft, Channel::GroupRight, Channel::HermAdd};
    }
    std::vector<Channel> operator()(const ModelPoint2&) const {
      return {Channel::GroupLeft, Channel::GroupRight, Channel::HermAdd};
    }
    std::vector<Channel> operator()(const ModelPoint1&) const {
      return {Channel::GroupLeft, Channel::GroupRight, Channel::TriLeft,
              Channel::TriRight};
    }
    std::vector<Channel> operator()(const ReducedPoint&) const {
      return {Channel::TorusLeft, Channel::HermAdd};
    }
    std::vector<Channel> operator()(const RSCoords&) const {
      return {Channel::TorusLeft, Channel::MomentumAdd, Channel::SpinLeft,
              Channel::SpinRight};
    }
  };
  return std::visit(Visitor{}, p);
}

bool has_channel(const Point& p, Channel c) {
  for (Channel x : point_channels(p)) {
    if (x == c) return true;
  }
  return false;
}

}  // namespace

Space channel_direction_space(Channel c, const Point& p) {
  if (!has_channel(p, c)) bad_channel(c, p);
  switch (c) {
    case Channel::GroupLeft:
    case Channel::GroupRight:
      return std::holds_alternative<GlPoint>(p) ? Space::Gl : Space::UN;
    case Channel::HermAdd: return Space::Herm;
    case Channel::TriLeft:
    case Channel::TriRight: return Space::BN;
    case Channel::TorusLeft: return Space::UNDiag;
    case Channel::MomentumAdd: return Space::BNDiag;
    case Channel::SpinLeft:
    case Channel::SpinRight: return Space::BNUpper;
  }
  bad_channel(c, p);
}

Space channel_value_space(Channel c, const Point& p) {
  if (!has_channel(p, c)) bad_channel(c, p);
  switch (c) {
    case Channel::GroupLeft:
    case Channel::GroupRight:
      return std::holds_alternative<GlPoint>(p) ? Space::Gl : Space::BN;
    case Channel::HermAdd: return Space::UN;
    case Channel::TriLeft:
    case Channel::TriRight: return Space::UN;
    case Channel::TorusLeft: return Space::BNDiag;
    case Channel::MomentumAdd: return Space::UNDiag;
    case Channel::SpinLeft:
    case Channel::SpinRight: return Space::UNOff;
  }
  bad_channel(c, p);
}

// --- exact path --------------------------------------------------------------

namespace {

// Per-term cyclic contexts: for tr(M_1..M_m), the derivative along letter
// variations {dM} is sum_i tr(dM_i S_i P_i).  Occurrences of the same letter
// share the variation, so only the per-letter sums of S_i P_i are kept.
struct TermContext {
  double coeff;
  Part part;
  ComplexMatrix ctx_g;     // sum of contexts at G positions
  ComplexMatrix ctx_ginv;  // sum of contexts at Ginv positions
  ComplexMatrix ctx_l;     // sum of contexts at L positions
  bool has_g = false, has_ginv = false, has_l = false;
};

struct ExprContext {
  std::vector<TermContext> terms;
  int n;
};

// Letters are reduced to three classes: group (G/Q), group inverse, L.
int letter_class(Letter l) {
  switch (l) {
    case Letter::G:
    case Letter::Q: return 0;
    case Letter::Ginv:
    case Letter::Qinv: return 1;
    case Letter::L: return 2;
  }
  return 2;
}

ExprContext build_context(const ObservableExpr& f, const Point& p) {
  const int n = point_dim(p);
  ExprContext out;
  out.n = n;
  for (const auto& t : f.terms()) {
    const std::size_t m = t.word.size();
    TermContext tc{t.coeff, t.part, ComplexMatrix::Zero(n, n),
                   ComplexMatrix::Zero(n, n), ComplexMatrix::Zero(n, n)};
    if (m > 0) {
      std::vector<ComplexMatrix> mats(m);
      for (std::size_t i = 0; i < m; ++i) mats[i] = letter_matrix(t.word[i], p);
      std::vector<ComplexMatrix> prefix(m + 1), suffix(m + 1);
      prefix[0] = ComplexMatrix::Identity(n, n);
      for (std::size_t i = 0; i < m; ++i) prefix[i + 1] = prefix[i] * mats[i];
      suffix[m] = ComplexMatrix::Identity(n, n);
      for (std::size_t i = m; i-- > 0;) suffix[i] = mats[i] * suffix[i + 1];
      for (std::size_t i = 0; i < m; ++i) {
        const ComplexMatrix ctx = suffix[i + 1] * prefix[i];
        switch (letter_class(t.word[i])) {
          case 0: tc.ctx_g += ctx; tc.has_g = true; break;
          case 1: tc.ctx_ginv += ctx; tc.has_ginv = true; break;
          case 2: tc.ctx_l += ctx; tc.has_l = true; break;
        }
      }
    }
    out.terms.push_back(std::move(tc));
  }
  return out;
}

// Variations of the bound letter matrices along one channel direction.
struct LetterDeltas {
  ComplexMatrix dG;     // variation of the group letter
  ComplexMatrix dGinv;  // variation of its inverse
  ComplexMatrix dL;     // variation of the L letter
  bool use_g = false, use_l = false;
};

LetterDeltas channel_deltas(const Point& p, Channel c, const ComplexMatrix& x) {
  struct Visitor {
    Channel c;
    const ComplexMatrix& x;
    LetterDeltas operator()(const GlPoint& pt) const {
      LetterDeltas d;
      d.use_g = true;
      const ComplexMatrix kinv = pt.K.partialPivLu().inverse();
      if (c == Channel::GroupLeft) {
        d.dG = x * pt.K;
        d.dGinv = -kinv * x;
      } else if (c == Channel::GroupRight) {
        d.dG = pt.K * x;
        d.dGinv = -x * kinv;
      } else {
        throw std::invalid_argument("calculus: bad channel at gl point");
      }
      return d;
    }
    LetterDeltas group_slot(const ComplexMatrix& g) const {
      LetterDeltas d;
      d.use_g = true;
      if (c == Channel::GroupLeft || c == Channel::TorusLeft) {
        d.dG = x * g;
        d.dGinv = -g.adjoint() * x;
      } else {
        d.dG = g * x;
        d.dGinv = -x * g.adjoint();
      }
      return d;
    }
    LetterDeltas operator()(const PhasePoint& pt) const {
      if (c == Channel::HermAdd) {
        LetterDeltas d;
        d.use_l = true;
        d.dL = x;
        return d;
      }
      return group_slot(pt.g.m);
    }
    LetterDeltas operator()(const ModelPoint2& pt) const {
      if (c == Channel::HermAdd) {
        LetterDeltas d;
        d.use_l = true;
        d.dL = x;
        return d;
      }
      return group_slot(pt.g.m);
    }
    LetterDeltas operator()(const ReducedPoint& pt) const {
      if (c == Channel::HermAdd) {
        LetterDeltas d;
        d.use_l = true;
        d.dL = x;
        return d;
      }
      return group_slot(pt.Q.Q);
    }
    LetterDeltas operator()(const ModelPoint1& pt) const {
      if (c == Channel::GroupLeft || c == Channel::GroupRight) {
        return group_slot(pt.g.m);
      }
      LetterDeltas d;
      d.use_l = true;
      const ComplexMatrix pos = pt.b.m * pt.b.m.adjoint();
      if (c == Channel::TriLeft) {
        d.dL = x * pos + pos * x.adjoint();
      } else if (c == Channel::TriRight) {
        d.dL = pt.b.m * (x + x.adjoint()) * pt.b.m.adjoint();
      } else {
        throw std::invalid_argument("calculus: bad channel at model1 point");
      }
      return d;
    }
    LetterDeltas operator()(const RSCoords&) const {
      throw std::invalid_argument(
          "calculus: exact derivatives are not defined at decoupled coordinates");
    }
  };
  return std::visit(Visitor{c, x}, p);
}

double directional_from_context(const ExprContext& ec, const LetterDeltas& d) {
  double out = 0.0;
  for (const auto& t : ec.terms) {
    Complex acc(0.0, 0.0);
    if (d.use_g) {
      if (t.has_g) acc += (d.dG * t.ctx_g).trace();
      if (t.has_ginv) acc += (d.dGinv * t.ctx_ginv).trace();
    }
    if (d.use_l && t.has_l) acc += (d.dL * t.ctx_l).trace();
    out += t.coeff * (t.part == Part::Re ? acc.real() : acc.imag());
  }
  return out;
}

}  // namespace

double exact_directional(const ObservableExpr& f, const Point& p, Channel c,
                         const ComplexMatrix& x) {
  if (!has_channel(p, c)) bad_channel(c, p);
  const ExprContext ec = build_context(f, p);
  return directional_from_context(ec, channel_deltas(p, c, x));
}

double derivative_along(const ObservableExpr& f, const Point& p,
                        const ComplexMatrix& dG, const ComplexMatrix& dL) {
  const ExprContext ec = build_context(f, p);
  LetterDeltas d;
  d.use_g = true;
  d.use_l = true;
  d.dL = dL;
  d.dG = dG;
  // d(G^{-1}) = -G^{-1} dG G^{-1}
  struct GroupOf {
    ComplexMatrix operator()(const GlPoint& x) const {
      return x.K.partialPivLu().inverse();
    }
    ComplexMatrix operator()(const PhasePoint& x) const { return x.g.m.adjoint(); }
    ComplexMatrix operator()(const ModelPoint2& x) const { return x.g.m.adjoint(); }
    ComplexMatrix operator()(const ReducedPoint& x) const { return x.Q.inverse(); }
    ComplexMatrix operator()(const ModelPoint1&) const {
      throw std::invalid_argument("derivative_along: unsupported at model1 points");
    }
    ComplexMatrix operator()(const RSCoords&) const {
      throw std::invalid_argument("derivative_along: unsupported at rs points");
    }
  };
  const ComplexMatrix ginv = std::visit(GroupOf{}, p);
  d.dGinv = -ginv * dG * ginv;
  return directional_from_context(ec, d);
}

namespace {

ComplexMatrix slot_from_functional(const Point& p, Channel c,
                                   const std::function<double(const ComplexMatrix&)>& ell) {
  const int n = point_dim(p);
  const Space v = channel_direction_space(c, p);
  const Space w = channel_value_space(c, p);
  const auto bv = basis(v, n);
  std::vector<double> values;
  values.reserve(bv.size());
  for (const auto& x : bv) values.push_back(ell(x));
  ComplexMatrix slot = dualize(values, v, w, n);
  return enforce_space(w, slot, tol::subspace);
}

void assign_slot(GradientSet& g, const Point& p, Channel c, ComplexMatrix value) {
  const bool gl = std::holds_alternative<GlPoint>(p);
  switch (c) {
    case Channel::GroupLeft:
      (gl ? g.nabla : g.D1) = std::move(value);
      break;
    case Channel::GroupRight:
      (gl ? g.nabla_prime : g.D1_prime) = std::move(value);
      break;
    case Channel::HermAdd: g.d2 = std::move(value); break;
    case Channel::TriLeft: g.D2 = std::move(value); break;
    case Channel::TriRight: g.D2_prime = std::move(value); break;
    case Channel::TorusLeft: g.DQ = std::move(value); break;
    case Channel::MomentumAdd: g.dp = std::move(value); break;
    case Channel::SpinLeft: g.Dlam = std::move(value); break;
    case Channel::SpinRight: g.Dlam_prime = std::move(value); break;
  }
}

}  // namespace

GradientSet exact_gradients(const ObservableExpr& f, const Point& p) {
  if (std::holds_alternative<RSCoords>(p)) {
    throw std::invalid_argument(
        "exact_gradients: decoupled coordinates support only the FD path");
  }
  const ExprContext ec = build_context(f, p);
  GradientSet out;
  for (Channel c : point_channels(p)) {
    ComplexMatrix slot = slot_from_functional(p, c, [&](const ComplexMatrix& x) {
      return directional_from_context(ec, channel_deltas(p, c, x));
    });
    assign_slot(out, p, c, std::move(slot));
  }
  // On a reduced point the torus slot also plays the role of the diagonal
  // restriction of D1; nothing else to fill.
  return out;
}

// --- finite differences -------------------------------------------------------

Point perturb(const Point& p, Channel c, const ComplexMatrix& x, double t) {
  struct Visitor {
    Channel c;
    const ComplexMatrix& x;
    double t;
    Point operator()(const GlPoint& pt) const {
      if (c == Channel::GroupLeft) return GlPoint(expm(t * x) * pt.K);
      if (c == Channel::GroupRight) return GlPoint(pt.K * expm(t * x));
      throw std::invalid_argument("perturb: bad channel at gl point");
    }
    Point operator()(const PhasePoint& pt) const {
      switch (c) {
        case Channel::GroupLeft:
          return PhasePoint(Unitary(expm(t * x) * pt.g.m), pt.L);
        case Channel::GroupRight:
          return PhasePoint(Unitary(pt.g.m * expm(t * x)), pt.L);
        case Channel::HermAdd:
          return PhasePoint(pt.g, Hermitian(pt.L.m + t * x));
        default: break;
      }
      throw std::invalid_argument("perturb: bad channel at phase point");
    }
    Point operator()(const ModelPoint2& pt) const {
      switch (c) {
        case Channel::GroupLeft:
          return ModelPoint2(Unitary(expm(t * x) * pt.g.m), pt.L);
        case Channel::GroupRight:
          return ModelPoint2(Unitary(pt.g.m * expm(t * x)), pt.L);
        case Channel::HermAdd:
          return ModelPoint2(pt.g, PositiveHermitian(pt.L.m() + t * x));
        default: break;
      }
      throw std::invalid_argument("perturb: bad channel at model2 point");
    }
    Point operator()(const ModelPoint1& pt) const {
      switch (c) {
        case Channel::GroupLeft:
          return ModelPoint1(Unitary(expm(t * x) * pt.g.m), pt.b);
        case Channel::GroupRight:
          return ModelPoint1(Unitary(pt.g.m * expm(t * x)), pt.b);
        case Channel::TriLeft:
          return ModelPoint1(pt.g, PosTriangular(expm(t * x) * pt.b.m));
        case Channel::TriRight:
          return ModelPoint1(pt.g, PosTriangular(pt.b.m * expm(t * x)));
        default: break;
      }
      throw std::invalid_argument("perturb: bad channel at model1 point");
    }
    Point operator()(const ReducedPoint& pt) const {
      switch (c) {
        case Channel::TorusLeft: {
          RealVector q = pt.Q.q;
          for (int j = 0; j < q.size(); ++j) q[j] += t * x(j, j).imag();
          return ReducedPoint(RegularTorusElement::from_angles(q), pt.L);
        }
        case Channel::HermAdd:
          return ReducedPoint(pt.Q, Hermitian(pt.L.m + t * x));
        default: break;
      }
      throw std::invalid_argument("perturb: bad channel at reduced point");
    }
    Point operator()(const RSCoords& pt) const {
      switch (c) {
        case Channel::TorusLeft: {
          RealVector q = pt.Q.q;
          for (int j = 0; j < q.size(); ++j) q[j] += t * x(j, j).imag();
          return RSCoords(RegularTorusElement::from_angles(q), pt.p, pt.lambda);
        }
        case Channel::MomentumAdd: {
          RealVector p2 = pt.p;
          for (int j = 0; j < p2.size(); ++j) p2[j] += t * x(j, j).real();
          return RSCoords(pt.Q, p2, pt.lambda);
        }
        case Channel::SpinLeft:
          return RSCoords(pt.Q, pt.p, expm(t * x) * pt.lambda);
        case Channel::SpinRight:
          return RSCoords(pt.Q, pt.p, pt.lambda * expm(t * x));
        default: break;
      }
      throw std::invalid_argument("perturb: bad channel at rs point");
    }
  };
  return std::visit(Visitor{c, x, t}, p);
}

namespace {

double channel_step(Channel c, const FdOptions& opts) {
  switch (c) {
    case Channel::HermAdd:
    case Channel::MomentumAdd: return opts.h_herm;
    default: return opts.h_group;
  }
}

double fd_directional(const std::function<double(const Point&)>& f, const Point& p,
                      Channel c, const ComplexMatrix& x, const FdOptions& opts) {
  const double h = channel_step(c, opts);
  auto eval = [&](double t) {
    const double v = f(perturb(p, c, x, t));
    if (!std::isfinite(v)) {
      throw std::domain_error("fd_gradients: observable returned a non-finite value");
    }
    return v;
  };
  if (opts.scheme == FdScheme::Central2) {
    return (eval(h) - eval(-h)) / (2.0 * h);
  }
  return (-eval(2.0 * h) + 8.0 * eval(h) - 8.0 * eval(-h) + eval(-2.0 * h)) /
         (12.0 * h);
}

void check_regularity_margin(const Point& p, const FdOptions& opts) {
  const double margin = 10.0 * opts.h_group;
  if (const auto* rp = std::get_if<ReducedPoint>(&p)) {
    if (rp->Q.gap() < margin) {
      throw std::domain_error("fd_gradients: point within 10h of the regularity boundary");
    }
  } else if (const auto* rs = std::get_if<RSCoords>(&p)) {
    if (rs->Q.gap() < margin) {
      throw std::domain_error("fd_gradients: point within 10h of the regularity boundary");
    }
  }
}

}  // namespace

GradientSet fd_gradients(const std::function<double(const Point&)>& f,
                         const Point& p, const FdOptions& opts) {
  check_regularity_margin(p, opts);
  GradientSet out;
  for (Channel c : point_channels(p)) {
    ComplexMatrix slot = slot_from_functional(p, c, [&](const ComplexMatrix& x) {
      return fd_directional(f, p, c, x, opts);
    });
    assign_slot(out, p, c, std::move(slot));
  }
  return out;
}

GradientSet gradients(const Observable& f, const Point& p, const FdOptions& opts) {
  if (f.exact() && !std::holds_alternative<RSCoords>(p)) {
    return exact_gradients(*f.expr, p);
  }
  return fd_gradients(f.fn, p, opts);
}

double unit_shift_derivative(const Observable& f, const Point& p,
                             const FdOptions& opts) {
  if (!std::holds_alternative<PhasePoint>(p) &&
      !std::holds_alternative<ReducedPoint>(p) &&
      !std::holds_alternative<ModelPoint2>(p)) {
    throw std::invalid_argument(
        "unit_shift_derivative: point must carry a Hermitian slot");
  }
  const int n = point_dim(p);
  if (f.exact()) {
    return f.expr->unit_shift_derived().evaluate(p);
  }
  const ComplexMatrix one = ComplexMatrix::Identity(n, n);
  const double h = opts.h_herm;
  auto eval = [&](double t) { return f.fn(perturb(p, Channel::HermAdd, one, t)); };
  if (opts.scheme == FdScheme::Central2) return (eval(h) - eval(-h)) / (2.0 * h);
  return (-eval(2.0 * h) + 8.0 * eval(h) - 8.0 * eval(-h) + eval(-2.0 * h)) /
         (12.0 * h);
}

}  // namespace biham
