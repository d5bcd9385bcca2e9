#include "biham/brackets.hpp"

#include <stdexcept>

namespace biham {

const char* bracket_name(BracketKind k) {
  switch (k) {
    case BracketKind::Double: return "double";
    case BracketKind::Model1: return "model1";
    case BracketKind::Model2: return "model2";
    case BracketKind::Ctb1: return "ctb1";
    case BracketKind::Ctb2: return "ctb2";
    case BracketKind::Red1: return "red1";
    case BracketKind::Red2: return "red2";
    case BracketKind::Decoupled2: return "decoupled2";
  }
  return "?";
}

BracketKind bracket_from_name(const std::string& name) {
  for (BracketKind k :
       {BracketKind::Double, BracketKind::Model1, BracketKind::Model2,
        BracketKind::Ctb1, BracketKind::Ctb2, BracketKind::Red1, BracketKind::Red2,
        BracketKind::Decoupled2}) {
    if (name == bracket_name(k)) return k;
  }
  throw std::invalid_argument("unknown bracket kind: " + name);
}

ComplexMatrix r_operator(const ComplexMatrix& x) {
  UbParts parts = project_ub(x);
  return 0.5 * (parts.u - parts.b);
}

ComplexMatrix rmatrix_apply(const RegularTorusElement& Q, const ComplexMatrix& x) {
  require_square_finite(x, "rmatrix_apply");
  const int n = Q.dim();
  if (x.rows() != n) throw std::invalid_argument("rmatrix_apply: dimension mismatch");
  ComplexMatrix out = ComplexMatrix::Zero(n, n);
  for (int k = 0; k < n; ++k) {
    for (int l = 0; l < n; ++l) {
      if (k == l) continue;
      const Complex z = Q.Q(k, k) / Q.Q(l, l);
      out(k, l) = 0.5 * (z + 1.0) / (z - 1.0) * x(k, l);
    }
  }
  return out;
}

ComplexMatrix r_bracket(const RegularTorusElement& Q, const ComplexMatrix& x,
                        const ComplexMatrix& y) {
  return commutator(rmatrix_apply(Q, x), y) + commutator(x, rmatrix_apply(Q, y));
}

namespace {

const ComplexMatrix& need(const std::optional<ComplexMatrix>& slot, const char* name) {
  if (!slot) {
    throw std::invalid_argument(std::string("bracket: missing gradient slot ") + name);
  }
  return *slot;
}

double double_bracket(const GradientSet& gf, const GradientSet& gh) {
  const ComplexMatrix& nf = need(gf.nabla, "nabla(f)");
  const ComplexMatrix& nh = need(gh.nabla, "nabla(h)");
  const ComplexMatrix& nfp = need(gf.nabla_prime, "nabla'(f)");
  const ComplexMatrix& nhp = need(gh.nabla_prime, "nabla'(h)");
  return pairing(nf, r_operator(nh)) + pairing(nfp, r_operator(nhp));
}

double model1_bracket(const GradientSet& gf, const GradientSet& gh,
                      const ModelPoint1& pt) {
  const ComplexMatrix binv = pt.b.inverse().m;
  const ComplexMatrix& d2f_p = need(gf.D2_prime, "D2'(f)");
  const ComplexMatrix& d2h = need(gh.D2, "D2(h)");
  const ComplexMatrix& d1f_p = need(gf.D1_prime, "D1'(f)");
  const ComplexMatrix& d1h = need(gh.D1, "D1(h)");
  const ComplexMatrix& d1f = need(gf.D1, "D1(f)");
  const ComplexMatrix& d2f = need(gf.D2, "D2(f)");
  return pairing(d2f_p, binv * d2h * pt.b.m) -
         pairing(d1f_p, pt.g.m.adjoint() * d1h * pt.g.m) +
         pairing(d1f, d2h) - pairing(d1h, d2f);
}

double model2_bracket(const GradientSet& gf, const GradientSet& gh,
                      const ComplexMatrix& g, const ComplexMatrix& L) {
  const ComplexMatrix Ldf = L * need(gf.d2, "d2(f)");
  const ComplexMatrix Ldh = L * need(gh.d2, "d2(h)");
  return 4.0 * pairing(Ldf, project_ub(Ldh).u) -
         pairing(need(gf.D1_prime, "D1'(f)"), g.adjoint() * need(gh.D1, "D1(h)") * g) +
         2.0 * pairing(need(gf.D1, "D1(f)"), Ldh) -
         2.0 * pairing(need(gh.D1, "D1(h)"), Ldf);
}

double ctb1_bracket(const GradientSet& gf, const GradientSet& gh,
                    const ComplexMatrix& L) {
  const ComplexMatrix& d2f = need(gf.d2, "d2(f)");
  const ComplexMatrix& d2h = need(gh.d2, "d2(h)");
  return pairing(need(gf.D1, "D1(f)"), d2h) - pairing(need(gh.D1, "D1(h)"), d2f) +
         2.0 * pairing(L * d2f, d2h);
}

double ctb2_bracket(const GradientSet& gf, const GradientSet& gh,
                    const ComplexMatrix& g, const ComplexMatrix& L) {
  const ComplexMatrix Ldf = L * need(gf.d2, "d2(f)");
  const ComplexMatrix Ldh = L * need(gh.d2, "d2(h)");
  return pairing(need(gf.D1, "D1(f)"), Ldh) - pairing(need(gh.D1, "D1(h)"), Ldf) +
         2.0 * pairing(Ldf, project_ub(Ldh).u) -
         0.5 * pairing(need(gf.D1_prime, "D1'(f)"),
                       g.adjoint() * need(gh.D1, "D1(h)") * g);
}

double red1_bracket(const GradientSet& gf, const GradientSet& gh,
                    const ReducedPoint& pt) {
  const ComplexMatrix& d2f = need(gf.d2, "d2(f)");
  const ComplexMatrix& d2h = need(gh.d2, "d2(h)");
  return pairing(need(gf.DQ, "DQ(f)"), d2h) - pairing(need(gh.DQ, "DQ(h)"), d2f) +
         pairing(pt.L.m, r_bracket(pt.Q, d2f, d2h));
}

double red2_bracket(const GradientSet& gf, const GradientSet& gh,
                    const ReducedPoint& pt) {
  const ComplexMatrix Ldf = pt.L.m * need(gf.d2, "d2(f)");
  const ComplexMatrix Ldh = pt.L.m * need(gh.d2, "d2(h)");
  return pairing(need(gf.DQ, "DQ(f)"), Ldh) - pairing(need(gh.DQ, "DQ(h)"), Ldf) +
         2.0 * pairing(Ldf, rmatrix_apply(pt.Q, Ldh));
}

double decoupled2_bracket(const GradientSet& gf, const GradientSet& gh,
                          const RSCoords& pt) {
  const ComplexMatrix lam_inv =
      pt.lambda.triangularView<Eigen::Upper>().solve(
          ComplexMatrix::Identity(pt.dim(), pt.dim()));
  const double rhs =
      pairing(need(gf.DQ, "DQ(f)"), need(gh.dp, "dp(h)")) -
      pairing(need(gh.DQ, "DQ(h)"), need(gf.dp, "dp(f)")) +
      pairing(need(gf.Dlam_prime, "Dlam'(f)"),
              lam_inv * need(gh.Dlam, "Dlam(h)") * pt.lambda);
  // The displayed decoupled formula carries twice the reduced bracket.
  return 0.5 * rhs;
}

void require_point(BracketKind kind, const Point& p) {
  const bool ok = [&] {
    switch (kind) {
      case BracketKind::Double: return std::holds_alternative<GlPoint>(p);
      case BracketKind::Model1: return std::holds_alternative<ModelPoint1>(p);
      case BracketKind::Model2: return std::holds_alternative<ModelPoint2>(p);
      case BracketKind::Ctb1:
      case BracketKind::Ctb2: return std::holds_alternative<PhasePoint>(p);
      case BracketKind::Red1:
      case BracketKind::Red2: return std::holds_alternative<ReducedPoint>(p);
      case BracketKind::Decoupled2: return std::holds_alternative<RSCoords>(p);
    }
    return false;
  }();
  if (!ok) {
    throw std::invalid_argument(std::string("bracket ") + bracket_name(kind) +
                                " is not defined at a " + point_kind_name(p) +
                                " point");
  }
}

}  // namespace

double bracket_from_gradients(BracketKind kind, const GradientSet& gf,
                              const GradientSet& gh, const Point& p) {
  require_point(kind, p);
  switch (kind) {
    case BracketKind::Double:
      return double_bracket(gf, gh);
    case BracketKind::Model1:
      return model1_bracket(gf, gh, std::get<ModelPoint1>(p));
    case BracketKind::Model2: {
      const auto& pt = std::get<ModelPoint2>(p);
      return model2_bracket(gf, gh, pt.g.m, pt.L.m());
    }
    case BracketKind::Ctb1:
      return ctb1_bracket(gf, gh, std::get<PhasePoint>(p).L.m);
    case BracketKind::Ctb2: {
      const auto& pt = std::get<PhasePoint>(p);
      return ctb2_bracket(gf, gh, pt.g.m, pt.L.m);
    }
    case BracketKind::Red1:
      return red1_bracket(gf, gh, std::get<ReducedPoint>(p));
    case BracketKind::Red2:
      return red2_bracket(gf, gh, std::get<ReducedPoint>(p));
    case BracketKind::Decoupled2:
      return decoupled2_bracket(gf, gh, std::get<RSCoords>(p));
  }
  throw std::logic_error("bracket_from_gradients: unreachable");
}

double bracket(BracketKind kind, const Observable& f, const Observable& h,
               const Point& p, const FdOptions& opts) {
  require_point(kind, p);
  const GradientSet gf = gradients(f, p, opts);
  const GradientSet gh = gradients(h, p, opts);
  return bracket_from_gradients(kind, gf, gh, p);
}

Tangent hamiltonian_vector_field(BracketKind kind, const Observable& h,
                                 const Point& p, const FdOptions& opts) {
  require_point(kind, p);
  const GradientSet gh = gradients(h, p, opts);
  const int n = point_dim(p);
  switch (kind) {
    case BracketKind::Double: {
      const auto& K = std::get<GlPoint>(p).K;
      Tangent t;
      t.dG = r_operator(need(gh.nabla, "nabla(h)")) * K +
             K * r_operator(need(gh.nabla_prime, "nabla'(h)"));
      t.dL = ComplexMatrix::Zero(n, n);
      return t;
    }
    case BracketKind::Ctb1: {
      const auto& pt = std::get<PhasePoint>(p);
      const ComplexMatrix& d2h = need(gh.d2, "d2(h)");
      const ComplexMatrix& d1h = need(gh.D1, "D1(h)");
      Tangent t;
      t.dG = d2h * pt.g.m;
      t.dL = commutator(d2h, pt.L.m) - hermitian_part(d1h);
      return t;
    }
    case BracketKind::Ctb2: {
      const auto& pt = std::get<PhasePoint>(p);
      const ComplexMatrix& d2h = need(gh.d2, "d2(h)");
      const ComplexMatrix& d1h = need(gh.D1, "D1(h)");
      const ComplexMatrix Ldh_u = project_ub(pt.L.m * d2h).u;
      const ComplexMatrix right = project_ub(pt.g.m.adjoint() * d1h * pt.g.m).u;
      Tangent t;
      t.dG = Ldh_u * pt.g.m - 0.5 * pt.g.m * right;
      t.dL = hermitian_part((2.0 * Ldh_u - d1h) * pt.L.m);
      return t;
    }
    default:
      throw std::invalid_argument(
          std::string("hamiltonian_vector_field: unsupported kind ") +
          bracket_name(kind));
  }
}

}  // namespace biham
