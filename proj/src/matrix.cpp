#include "biham/matrix.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <cmath>
#include <cstring>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace biham {

namespace {

constexpr double kPi = 3.14159265358979323846;

void require_same_dim(const ComplexMatrix& x, const ComplexMatrix& y, const char* who) {
  if (x.rows() != y.rows() || x.cols() != y.cols()) {
    throw std::invalid_argument(std::string(who) + ": dimension mismatch");
  }
}

}  // namespace

void require_square_finite(const ComplexMatrix& x, const char* who) {
  if (x.rows() != x.cols() || x.rows() < 1) {
    throw std::invalid_argument(std::string(who) + ": matrix must be square");
  }
  if (!x.allFinite()) {
    throw std::invalid_argument(std::string(who) + ": non-finite entries");
  }
}

double pairing(const ComplexMatrix& x, const ComplexMatrix& y) {
  require_same_dim(x, y, "pairing");
  // Im tr(XY) without forming the product.
  return (x.transpose().cwiseProduct(y)).sum().imag();
}

ComplexMatrix commutator(const ComplexMatrix& x, const ComplexMatrix& y) {
  return x * y - y * x;
}

ComplexMatrix hermitian_part(const ComplexMatrix& x) {
  return 0.5 * (x + x.adjoint());
}

ComplexMatrix anti_hermitian_part(const ComplexMatrix& x) {
  return 0.5 * (x - x.adjoint());
}

UbParts project_ub(const ComplexMatrix& x) {
  require_square_finite(x, "project_ub");
  const int n = static_cast<int>(x.rows());
  ComplexMatrix lower = ComplexMatrix::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < i; ++j) lower(i, j) = x(i, j);
  }
  ComplexMatrix u = lower - lower.adjoint();
  for (int j = 0; j < n; ++j) u(j, j) = Complex(0.0, x(j, j).imag());
  return {u, x - u};
}

GradeParts grade_split(const ComplexMatrix& x) {
  require_square_finite(x, "grade_split");
  const int n = static_cast<int>(x.rows());
  GradeParts g{ComplexMatrix::Zero(n, n), ComplexMatrix::Zero(n, n),
               ComplexMatrix::Zero(n, n)};
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i < j) {
        g.plus(i, j) = x(i, j);
      } else if (i == j) {
        g.zero(i, j) = x(i, j);
      } else {
        g.minus(i, j) = x(i, j);
      }
    }
  }
  return g;
}

const char* space_name(Space s) {
  switch (s) {
    case Space::UN: return "u(n)";
    case Space::BN: return "b(n)";
    case Space::Herm: return "herm(n)";
    case Space::Gl: return "gl(n)";
    case Space::UNDiag: return "u(n)_0";
    case Space::BNDiag: return "b(n)_0";
    case Space::BNUpper: return "b(n)_+";
    case Space::UNOff: return "u(n)_perp";
  }
  return "?";
}

int space_dim(Space s, int n) {
  switch (s) {
    case Space::UN:
    case Space::BN:
    case Space::Herm: return n * n;
    case Space::Gl: return 2 * n * n;
    case Space::UNDiag:
    case Space::BNDiag: return n;
    case Space::BNUpper:
    case Space::UNOff: return n * n - n;
  }
  return 0;
}

std::vector<ComplexMatrix> basis(Space s, int n) {
  if (n < 1) throw std::invalid_argument("basis: n must be >= 1");
  const Complex I(0.0, 1.0);
  auto unit = [n](int i, int j) {
    ComplexMatrix e = ComplexMatrix::Zero(n, n);
    e(i, j) = 1.0;
    return e;
  };
  std::vector<ComplexMatrix> out;
  out.reserve(static_cast<std::size_t>(space_dim(s, n)));
  switch (s) {
    case Space::UN:
      for (int j = 0; j < n; ++j) out.push_back(I * unit(j, j));
      for (int k = 0; k < n; ++k) {
        for (int l = k + 1; l < n; ++l) {
          out.push_back(unit(k, l) - unit(l, k));
          out.push_back(I * (unit(k, l) + unit(l, k)));
        }
      }
      break;
    case Space::BN:
      for (int j = 0; j < n; ++j) out.push_back(unit(j, j));
      for (int k = 0; k < n; ++k) {
        for (int l = k + 1; l < n; ++l) {
          out.push_back(unit(k, l));
          out.push_back(I * unit(k, l));
        }
      }
      break;
    case Space::Herm:
      for (int j = 0; j < n; ++j) out.push_back(unit(j, j));
      for (int k = 0; k < n; ++k) {
        for (int l = k + 1; l < n; ++l) {
          out.push_back(unit(k, l) + unit(l, k));
          out.push_back(I * (unit(k, l) - unit(l, k)));
        }
      }
      break;
    case Space::Gl: {
      auto bu = basis(Space::UN, n);
      auto bb = basis(Space::BN, n);
      out.insert(out.end(), bu.begin(), bu.end());
      out.insert(out.end(), bb.begin(), bb.end());
      break;
    }
    case Space::UNDiag:
      for (int j = 0; j < n; ++j) out.push_back(I * unit(j, j));
      break;
    case Space::BNDiag:
      for (int j = 0; j < n; ++j) out.push_back(unit(j, j));
      break;
    case Space::BNUpper:
      for (int k = 0; k < n; ++k) {
        for (int l = k + 1; l < n; ++l) {
          out.push_back(unit(k, l));
          out.push_back(I * unit(k, l));
        }
      }
      break;
    case Space::UNOff:
      for (int k = 0; k < n; ++k) {
        for (int l = k + 1; l < n; ++l) {
          out.push_back(unit(k, l) - unit(l, k));
          out.push_back(I * (unit(k, l) + unit(l, k)));
        }
      }
      break;
  }
  return out;
}

ComplexMatrix project_space(Space s, const ComplexMatrix& x) {
  require_square_finite(x, "project_space");
  const int n = static_cast<int>(x.rows());
  GradeParts g = grade_split(x);
  switch (s) {
    case Space::UN: return anti_hermitian_part(x);
    case Space::Herm: return hermitian_part(x);
    case Space::Gl: return x;
    case Space::BN: {
      ComplexMatrix out = g.plus;
      for (int j = 0; j < n; ++j) out(j, j) = x(j, j).real();
      return out;
    }
    case Space::UNDiag: {
      ComplexMatrix out = ComplexMatrix::Zero(n, n);
      for (int j = 0; j < n; ++j) out(j, j) = Complex(0.0, x(j, j).imag());
      return out;
    }
    case Space::BNDiag: {
      ComplexMatrix out = ComplexMatrix::Zero(n, n);
      for (int j = 0; j < n; ++j) out(j, j) = x(j, j).real();
      return out;
    }
    case Space::BNUpper: return g.plus;
    case Space::UNOff: return anti_hermitian_part(x) - project_space(Space::UNDiag, x);
  }
  return x;
}

ComplexMatrix dualize(const std::vector<double>& ell, Space v, Space w, int n) {
  const int dv = space_dim(v, n);
  const int dw = space_dim(w, n);
  if (static_cast<int>(ell.size()) != dv) {
    throw std::invalid_argument("dualize: functional size does not match basis(V)");
  }
  if (dv != dw) {
    throw std::invalid_argument("dualize: spaces are not of equal dimension");
  }
  const auto bv = basis(v, n);
  const auto bw = basis(w, n);
  Eigen::MatrixXd gram(dv, dw);
  for (int i = 0; i < dv; ++i) {
    for (int j = 0; j < dw; ++j) gram(i, j) = pairing(bw[j], bv[i]);
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(gram);
  if (!lu.isInvertible()) {
    throw std::invalid_argument(std::string("dualize: singular Gram matrix for (") +
                                space_name(v) + ", " + space_name(w) + ")");
  }
  Eigen::VectorXd rhs = Eigen::Map<const Eigen::VectorXd>(ell.data(), dv);
  Eigen::VectorXd coef = lu.solve(rhs);
  ComplexMatrix out = ComplexMatrix::Zero(n, n);
  for (int j = 0; j < dw; ++j) out += coef[j] * bw[j];
  return out;
}

ComplexMatrix enforce_space(Space s, const ComplexMatrix& x, double residual_tol) {
  ComplexMatrix p = project_space(s, x);
  const double res = (x - p).norm();
  if (res > residual_tol) {
    throw std::runtime_error(std::string("enforce_space: residual ") +
                             std::to_string(res) + " outside " + space_name(s));
  }
  return p;
}

ComplexMatrix expm(const ComplexMatrix& x) {
  require_square_finite(x, "expm");
  const int n = static_cast<int>(x.rows());
  double norm = x.cwiseAbs().rowwise().sum().maxCoeff();
  int squarings = 0;
  ComplexMatrix y = x;
  while (norm > 0.5) {
    y *= 0.5;
    norm *= 0.5;
    ++squarings;
  }
  ComplexMatrix result = ComplexMatrix::Identity(n, n);
  ComplexMatrix term = ComplexMatrix::Identity(n, n);
  for (int k = 1; k <= 32; ++k) {
    term = (term * y) / static_cast<double>(k);
    result += term;
    if (term.norm() < 1e-18 * result.norm()) break;
  }
  for (int s = 0; s < squarings; ++s) result = result * result;
  return result;
}

ComplexMatrix exp_i_hermitian(const ComplexMatrix& h, double t) {
  require_square_finite(h, "exp_i_hermitian");
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(h);
  if (es.info() != Eigen::Success) {
    throw std::runtime_error("exp_i_hermitian: eigensolver failed");
  }
  const int n = static_cast<int>(h.rows());
  Eigen::VectorXcd phases(n);
  for (int j = 0; j < n; ++j) {
    phases[j] = std::polar(1.0, t * es.eigenvalues()[j]);
  }
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

ComplexMatrix cholesky_upper(const ComplexMatrix& a) {
  require_square_finite(a, "cholesky_upper");
  const int n = static_cast<int>(a.rows());
  ComplexMatrix b = ComplexMatrix::Zero(n, n);
  for (int j = n - 1; j >= 0; --j) {
    Complex acc = a(j, j);
    for (int k = j + 1; k < n; ++k) acc -= b(j, k) * std::conj(b(j, k));
    const double rad = acc.real();
    if (!(rad > 0.0) || !std::isfinite(rad)) {
      throw std::domain_error("cholesky_upper: matrix is not positive definite");
    }
    const double d = std::sqrt(rad);
    b(j, j) = d;
    for (int i = 0; i < j; ++i) {
      Complex s = a(i, j);
      for (int k = j + 1; k < n; ++k) s -= b(i, k) * std::conj(b(j, k));
      b(i, j) = s / d;
    }
  }
  return b;
}

double condition_estimate(const ComplexMatrix& x) {
  Eigen::JacobiSVD<ComplexMatrix> svd(x);
  const double smin = svd.singularValues().minCoeff();
  const double smax = svd.singularValues().maxCoeff();
  if (smin <= 0.0) return std::numeric_limits<double>::infinity();
  return smax / smin;
}

ComplexMatrix polar_unitary(const ComplexMatrix& x) {
  Eigen::JacobiSVD<ComplexMatrix> svd(x, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixU() * svd.matrixV().adjoint();
}

// --- typed wrappers ---------------------------------------------------------

Unitary::Unitary(ComplexMatrix mat, double tolerance) : m(std::move(mat)) {
  require_square_finite(m, "Unitary");
  const int n = dim();
  const double res = (m.adjoint() * m - ComplexMatrix::Identity(n, n)).norm();
  if (res > tolerance) {
    throw std::domain_error("Unitary: residual " + std::to_string(res) +
                            " exceeds tolerance");
  }
}

Unitary Unitary::inverse() const { return Unitary(m.adjoint()); }

AntiHermitian::AntiHermitian(ComplexMatrix mat, double tolerance) : m(std::move(mat)) {
  require_square_finite(m, "AntiHermitian");
  const double res = (m + m.adjoint()).norm();
  if (res > tolerance) {
    throw std::domain_error("AntiHermitian: residual " + std::to_string(res) +
                            " exceeds tolerance");
  }
}

Hermitian::Hermitian(ComplexMatrix mat, double tolerance) : m(std::move(mat)) {
  require_square_finite(m, "Hermitian");
  const double res = (m - m.adjoint()).norm();
  if (res > tolerance) {
    throw std::domain_error("Hermitian: residual " + std::to_string(res) +
                            " exceeds tolerance");
  }
}

PositiveHermitian::PositiveHermitian(Hermitian herm) : h(std::move(herm)) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(h.m);
  if (es.eigenvalues().minCoeff() <= 0.0) {
    throw std::domain_error("PositiveHermitian: non-positive eigenvalue");
  }
}

PositiveHermitian::PositiveHermitian(ComplexMatrix mat)
    : PositiveHermitian(Hermitian(std::move(mat))) {}

PosTriangular::PosTriangular(ComplexMatrix mat, double tolerance) : m(std::move(mat)) {
  require_square_finite(m, "PosTriangular");
  const int n = dim();
  double lower = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < i; ++j) lower += std::norm(m(i, j));
  }
  if (std::sqrt(lower) > tolerance) {
    throw std::domain_error("PosTriangular: strictly lower part not zero");
  }
  for (int j = 0; j < n; ++j) {
    if (std::abs(m(j, j).imag()) > tolerance || m(j, j).real() <= 0.0) {
      throw std::domain_error("PosTriangular: diagonal must be real positive");
    }
    m(j, j) = m(j, j).real();
    for (int i = j + 1; i < n; ++i) m(i, j) = 0.0;
  }
}

PosTriangular PosTriangular::inverse() const {
  const int n = dim();
  ComplexMatrix inv = m.triangularView<Eigen::Upper>().solve(
      ComplexMatrix::Identity(n, n));
  return PosTriangular(std::move(inv));
}

double torus_gap(const Eigen::VectorXcd& diag) {
  const int n = static_cast<int>(diag.size());
  double gap = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      gap = std::min(gap, std::abs(diag[i] - diag[j]));
    }
  }
  return n > 1 ? gap : std::numeric_limits<double>::infinity();
}

RegularTorusElement RegularTorusElement::from_angles(const RealVector& angles,
                                                     double eps_reg) {
  const int n = static_cast<int>(angles.size());
  if (n < 1) throw std::invalid_argument("RegularTorusElement: empty angle list");
  RegularTorusElement t;
  t.q = angles;
  t.Q = ComplexMatrix::Zero(n, n);
  for (int j = 0; j < n; ++j) t.Q(j, j) = std::polar(1.0, angles[j]);
  if (t.gap() < eps_reg) {
    throw std::domain_error("RegularTorusElement: regularity gap below threshold");
  }
  return t;
}

RegularTorusElement RegularTorusElement::from_matrix(const ComplexMatrix& Q,
                                                     double eps_reg) {
  require_square_finite(Q, "RegularTorusElement");
  const int n = static_cast<int>(Q.rows());
  RealVector angles(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i != j && std::abs(Q(i, j)) > tol::triangular * 10) {
        throw std::domain_error("RegularTorusElement: matrix not diagonal");
      }
    }
    if (std::abs(std::abs(Q(i, i)) - 1.0) > tol::unitary * 10) {
      throw std::domain_error("RegularTorusElement: diagonal not unimodular");
    }
    angles[i] = std::arg(Q(i, i));
  }
  return from_angles(angles, eps_reg);
}

double RegularTorusElement::gap() const { return torus_gap(Q.diagonal()); }

ComplexMatrix RegularTorusElement::inverse() const { return Q.adjoint(); }

// --- randomness -------------------------------------------------------------

std::uint64_t Rng::raw() {
  // splitmix64 step
  std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double Rng::uniform() {
  return static_cast<double>(raw() >> 11) * 0x1.0p-53;
}

double Rng::normal() {
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
}

Complex Rng::complex_normal() {
  const double re = normal();
  const double im = normal();
  return Complex(re, im);
}

std::uint64_t mix_seed(std::uint64_t base, std::uint64_t stream) {
  Rng r(base ^ (0xA24BAED4963EE407ULL + stream * 0x9FB21C651E98DF25ULL));
  return r.raw();
}

namespace {

ComplexMatrix ginibre(int n, Rng& rng, double scale) {
  ComplexMatrix a(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) a(i, j) = scale * rng.complex_normal();
  }
  return a;
}

}  // namespace

Unitary random_unitary(int n, std::uint64_t seed) {
  Rng rng(seed);
  ComplexMatrix a = ginibre(n, rng, 1.0);
  Eigen::HouseholderQR<ComplexMatrix> qr(a);
  ComplexMatrix q = qr.householderQ();
  ComplexMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  // Fix the phase convention so the triangular factor has positive diagonal.
  for (int j = 0; j < n; ++j) {
    Complex d = r(j, j);
    if (std::abs(d) == 0.0) d = 1.0;
    q.col(j) *= d / std::abs(d);
  }
  return Unitary(std::move(q));
}

Hermitian random_hermitian(int n, std::uint64_t seed, double scale) {
  Rng rng(seed);
  ComplexMatrix a = ginibre(n, rng, scale);
  return Hermitian(hermitian_part(a));
}

PositiveHermitian random_positive(int n, std::uint64_t seed, double scale) {
  Hermitian h = random_hermitian(n, seed, scale);
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(h.m);
  Eigen::VectorXd lam = es.eigenvalues().array().exp();
  ComplexMatrix p = es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().adjoint();
  return PositiveHermitian(hermitian_part(p));
}

RegularTorusElement random_torus_regular(int n, std::uint64_t seed, double eps_reg) {
  Rng rng(seed);
  for (int attempt = 0; attempt < 1000; ++attempt) {
    RealVector angles(n);
    for (int j = 0; j < n; ++j) angles[j] = 2.0 * kPi * rng.uniform();
    Eigen::VectorXcd diag(n);
    for (int j = 0; j < n; ++j) diag[j] = std::polar(1.0, angles[j]);
    if (torus_gap(diag) >= eps_reg) {
      return RegularTorusElement::from_angles(angles, eps_reg);
    }
  }
  throw std::domain_error("random_torus_regular: rejection loop exhausted");
}

PosTriangular random_pos_triangular(int n, std::uint64_t seed, double scale) {
  Rng rng(seed);
  ComplexMatrix b = ComplexMatrix::Zero(n, n);
  for (int j = 0; j < n; ++j) b(j, j) = std::exp(scale * rng.normal());
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) b(i, j) = scale * rng.complex_normal();
  }
  return PosTriangular(std::move(b));
}

ComplexMatrix random_invertible(int n, std::uint64_t seed, double scale) {
  // Condition guard keeps factorization residuals well below the contract
  // tolerances (the triangular factors see the squared condition number).
  for (int attempt = 0; attempt < 1000; ++attempt) {
    Rng rng(mix_seed(seed, static_cast<std::uint64_t>(attempt)));
    ComplexMatrix k = ginibre(n, rng, scale);
    if (condition_estimate(k) < 300.0) return k;
  }
  throw std::domain_error("random_invertible: rejection loop exhausted");
}

std::string digest(const ComplexMatrix& x) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  auto feed = [&h](double v) {
    std::uint64_t bits;
    static_assert(sizeof(bits) == sizeof(v));
    std::memcpy(&bits, &v, sizeof(bits));
    for (int b = 0; b < 8; ++b) {
      h ^= (bits >> (8 * b)) & 0xFF;
      h *= 0x100000001B3ULL;
    }
  };
  for (int i = 0; i < x.rows(); ++i) {
    for (int j = 0; j < x.cols(); ++j) {
      feed(x(i, j).real());
      feed(x(i, j).imag());
    }
  }
  std::ostringstream os;
  os << std::hex << h;
  return os.str();
}

}  // namespace biham
