// matrix.hpp — complex dense matrix kit: the bilinear form Im tr(XY), the
// subalgebras u(n), b(n), Herm(n) and their gradations, dual bases, typed
// matrix wrappers with invariant checks, and seeded random sampling.

#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

namespace biham {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;

namespace tol {
inline constexpr double unitary = 1e-10;
inline constexpr double hermitian = 1e-12;
inline constexpr double triangular = 1e-12;
inline constexpr double subspace = 1e-9;
inline constexpr double regular_gap = 1e-8;
inline constexpr double condition_limit = 1e12;
}  // namespace tol

// ---------------------------------------------------------------------------
// Bilinear form and subspace decompositions
// ---------------------------------------------------------------------------

// <X,Y> = Im tr(XY).  Symmetric, ad-invariant, non-degenerate on gl(n,C)
// viewed as a real vector space.
double pairing(const ComplexMatrix& x, const ComplexMatrix& y);

ComplexMatrix commutator(const ComplexMatrix& x, const ComplexMatrix& y);
ComplexMatrix hermitian_part(const ComplexMatrix& x);
ComplexMatrix anti_hermitian_part(const ComplexMatrix& x);

// X = X_u + X_b with X_u anti-Hermitian and X_b upper triangular with real
// diagonal.  The decomposition is unique.
struct UbParts {
  ComplexMatrix u;
  ComplexMatrix b;
};
UbParts project_ub(const ComplexMatrix& x);

// Principal gradation: strictly upper / diagonal / strictly lower parts.
struct GradeParts {
  ComplexMatrix plus;
  ComplexMatrix zero;
  ComplexMatrix minus;
  ComplexMatrix off() const { return plus + minus; }
};
GradeParts grade_split(const ComplexMatrix& x);

// Real subspaces of gl(n,C) used throughout.
enum class Space {
  UN,        // u(n): anti-Hermitian
  BN,        // b(n): upper triangular, real diagonal
  Herm,      // Hermitian
  Gl,        // all of gl(n,C)
  UNDiag,    // u(n)_0: imaginary diagonal
  BNDiag,    // b(n)_0: real diagonal
  BNUpper,   // b(n)_+: strictly upper triangular
  UNOff      // off-diagonal part of u(n)
};

const char* space_name(Space s);
int space_dim(Space s, int n);

// Standard real basis of the subspace; see space_dim for sizes.
std::vector<ComplexMatrix> basis(Space s, int n);

// Orthogonal-complement-free linear projection onto the subspace (entrywise).
ComplexMatrix project_space(Space s, const ComplexMatrix& x);

// Unique w in W with pairing(w, v_i) = ell_i over the standard basis {v_i}
// of V.  Requires the Gram matrix of the (V, W) pair to be invertible;
// throws std::invalid_argument otherwise.
ComplexMatrix dualize(const std::vector<double>& ell, Space v, Space w, int n);

// Enforces membership of x in the subspace: projects and checks that the
// residual stays below `residual_tol`.
ComplexMatrix enforce_space(Space s, const ComplexMatrix& x,
                            double residual_tol = tol::subspace);

// ---------------------------------------------------------------------------
// Matrix functions
// ---------------------------------------------------------------------------

// exp(X) by scaling/squaring with a Taylor core.  Intended for the small
// matrices used here; preserves triangularity of triangular inputs.
ComplexMatrix expm(const ComplexMatrix& x);

// exp(i t H) for Hermitian H via eigendecomposition, unitary up to roundoff.
ComplexMatrix exp_i_hermitian(const ComplexMatrix& h, double t = 1.0);

// Upper-triangular b with positive diagonal and b b^dagger = a.
// Throws std::domain_error if a is not positive definite.
ComplexMatrix cholesky_upper(const ComplexMatrix& a);

// 2-norm condition number from singular values (inf when singular).
double condition_estimate(const ComplexMatrix& x);

// Closest unitary to x in Frobenius norm (polar factor, via SVD).
ComplexMatrix polar_unitary(const ComplexMatrix& x);

void require_square_finite(const ComplexMatrix& x, const char* who);

// ---------------------------------------------------------------------------
// Typed matrix wrappers
// ---------------------------------------------------------------------------

struct Unitary {
  ComplexMatrix m;
  explicit Unitary(ComplexMatrix mat, double tolerance = tol::unitary);
  int dim() const { return static_cast<int>(m.rows()); }
  Unitary inverse() const;
};

struct AntiHermitian {
  ComplexMatrix m;
  explicit AntiHermitian(ComplexMatrix mat, double tolerance = tol::hermitian * 1e3);
  int dim() const { return static_cast<int>(m.rows()); }
};

struct Hermitian {
  ComplexMatrix m;
  explicit Hermitian(ComplexMatrix mat, double tolerance = tol::hermitian);
  int dim() const { return static_cast<int>(m.rows()); }
};

struct PositiveHermitian {
  Hermitian h;
  explicit PositiveHermitian(Hermitian herm);
  explicit PositiveHermitian(ComplexMatrix mat);
  const ComplexMatrix& m() const { return h.m; }
  int dim() const { return h.dim(); }
};

struct PosTriangular {
  ComplexMatrix m;
  explicit PosTriangular(ComplexMatrix mat, double tolerance = tol::triangular * 10);
  int dim() const { return static_cast<int>(m.rows()); }
  PosTriangular inverse() const;
};

// Diagonal unitary with pairwise distinct eigenvalues.  Stores both the
// angles q and the matrix Q = diag(e^{i q_j}).
struct RegularTorusElement {
  RealVector q;
  ComplexMatrix Q;

  static RegularTorusElement from_angles(const RealVector& angles,
                                         double eps_reg = tol::regular_gap);
  static RegularTorusElement from_matrix(const ComplexMatrix& Q,
                                         double eps_reg = tol::regular_gap);
  int dim() const { return static_cast<int>(q.size()); }
  // min_{i != j} |Q_i - Q_j|
  double gap() const;
  ComplexMatrix inverse() const;
};

double torus_gap(const Eigen::VectorXcd& diag);

// ---------------------------------------------------------------------------
// Seeded randomness.  All draws are reproducible across platforms: the
// generator consumes mt19937_64 words directly, never the distribution
// templates of <random>.
// ---------------------------------------------------------------------------

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}
  std::uint64_t raw();
  double uniform();            // [0, 1)
  double normal();             // standard normal, Box-Muller
  Complex complex_normal();    // real/imag independent standard normals

 private:
  std::uint64_t state_;
};

// Derives a stream seed from a base seed, splitmix-style.
std::uint64_t mix_seed(std::uint64_t base, std::uint64_t stream);

Unitary random_unitary(int n, std::uint64_t seed);
Hermitian random_hermitian(int n, std::uint64_t seed, double scale = 1.0);
PositiveHermitian random_positive(int n, std::uint64_t seed, double scale = 0.5);
RegularTorusElement random_torus_regular(int n, std::uint64_t seed,
                                         double eps_reg = tol::regular_gap);
PosTriangular random_pos_triangular(int n, std::uint64_t seed, double scale = 0.5);

// Invertible complex matrix (Ginibre draw, condition-guarded).
ComplexMatrix random_invertible(int n, std::uint64_t seed, double scale = 1.0);

// FNV-1a digest of the raw entries, for worst-case reporting.
std::string digest(const ComplexMatrix& x);

}  // namespace biham
