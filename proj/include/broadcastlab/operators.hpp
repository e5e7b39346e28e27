#pragma once

// Dense complex operator algebra on finite-dimensional Hilbert spaces.

#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "broadcastlab/errors.hpp"

namespace broadcastlab {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;

namespace defaults {
inline constexpr double hermitian_reject = 1e-8;  // relative ‖A − A†‖ beyond which input is refused
inline constexpr double state = 1e-10;
inline constexpr double effect = 1e-10;
inline constexpr double povm = 1e-10;
inline constexpr std::size_t dimension_cap = 32;
}  // namespace defaults

/// Maximum Hilbert-space dimension accepted by the expensive analyses.
/// BROADCASTLAB_CAP in the environment overrides the compiled default.
std::size_t dimension_cap();
void require_within_cap(Index dim, const char* what);

/// Self-adjoint operator. Construction symmetrizes to (A + A†)/2 and records
/// the relative asymmetry that was removed.
class HermitianOperator {
 public:
  explicit HermitianOperator(const Matrix& m, double reject_above = defaults::hermitian_reject);

  const Matrix& matrix() const noexcept { return m_; }
  Index dim() const noexcept { return m_.rows(); }
  double symmetrization_residual() const noexcept { return residual_; }

 private:
  Matrix m_;
  double residual_ = 0.0;
};

class DensityOperator {
 public:
  explicit DensityOperator(HermitianOperator h, double tol = defaults::state);
  explicit DensityOperator(const Matrix& m, double tol = defaults::state)
      : DensityOperator(HermitianOperator(m), tol) {}

  const Matrix& matrix() const noexcept { return h_.matrix(); }
  const HermitianOperator& hermitian() const noexcept { return h_; }
  Index dim() const noexcept { return h_.dim(); }

 private:
  HermitianOperator h_;
};

class Effect {
 public:
  explicit Effect(HermitianOperator h, double tol = defaults::effect);
  explicit Effect(const Matrix& m, double tol = defaults::effect)
      : Effect(HermitianOperator(m), tol) {}

  const Matrix& matrix() const noexcept { return h_.matrix(); }
  const HermitianOperator& hermitian() const noexcept { return h_; }
  Index dim() const noexcept { return h_.dim(); }

 private:
  HermitianOperator h_;
};

class DiscretePOVM {
 public:
  /// Labels default to "0", "1", ... when omitted.
  DiscretePOVM(std::vector<Effect> effects, std::vector<std::string> labels = {},
               double tol = defaults::povm);

  const std::vector<Effect>& effects() const noexcept { return effects_; }
  const std::vector<std::string>& labels() const noexcept { return labels_; }
  const Effect& operator[](std::size_t i) const { return effects_[i]; }
  std::size_t size() const noexcept { return effects_.size(); }
  Index dim() const noexcept { return effects_.front().dim(); }

 private:
  std::vector<Effect> effects_;
  std::vector<std::string> labels_;
};

// ---------------------------------------------------------------------------
// spectral analysis

struct EigenDecomposition {
  RealVector values;  // descending
  Matrix vectors;     // columns are eigenvectors; unitary
};

/// Eigenvalues sorted descending. Each eigenvector is rescaled so that its
/// largest-magnitude component (first one on ties) is real and positive.
EigenDecomposition eig_hermitian(const HermitianOperator& a);
EigenDecomposition eig_hermitian(const Matrix& a);

// ---------------------------------------------------------------------------
// norms and elementary constructions

double op_norm(const Matrix& a);
double trace_norm(const Matrix& a);
inline double frobenius_norm(const Matrix& a) { return a.norm(); }
/// max |λ| of a Hermitian matrix; the symmetric part is used.
double hermitian_spectral_bound(const Matrix& a);

Matrix kron(const Matrix& a, const Matrix& b);
inline Matrix commutator(const Matrix& a, const Matrix& b) { return a * b - b * a; }
Matrix identity(Index d);
Matrix projector(const Vector& v);  // |v⟩⟨v| / ⟨v|v⟩

/// Positive and negative parts from the spectral decomposition, A = A⁺ − A⁻.
std::pair<Matrix, Matrix> positive_negative_parts(const HermitianOperator& a);

/// Nearest PSD matrix in Frobenius norm (eigenvalue clipping).
Matrix clip_to_psd(const Matrix& a);
/// Eigenvalue clipping followed by trace renormalization.
Matrix project_to_density(const Matrix& a);

double min_eigenvalue(const Matrix& hermitian);

// ---------------------------------------------------------------------------
// bipartite operations on H1 ⊗ H2

struct Bipartition {
  Index first;
  Index second;
  Index total() const noexcept { return first * second; }
};

enum class Subsystem { first = 1, second = 2 };

/// Traces out `side`. tr_2(A ⊗ B) = tr(B)·A.
Matrix partial_trace(const Matrix& a, Bipartition dims, Subsystem side);
/// Transposes the `side` factor. (X ⊗ Y)^{T1} = Xᵀ ⊗ Y.
Matrix partial_transpose(const Matrix& a, Bipartition dims, Subsystem side = Subsystem::first);
/// Unitary swap V|a b⟩ = |b a⟩ on C^d ⊗ C^d.
Matrix swap_operator(Index d);

// ---------------------------------------------------------------------------
// simultaneous diagonalization

struct SimultaneousDiagonalization {
  bool commuting = false;
  Matrix basis;                    // unitary, valid when commuting
  double max_commutator = 0.0;     // max ‖[A_i, A_j]‖_op over pairs
  std::pair<std::size_t, std::size_t> worst_pair{0, 0};
  double offdiag_residual = 0.0;   // max ‖offdiag(U† A_i U)‖_F, valid when commuting
};

/// Pairs count as commuting while ‖[A,B]‖_op ≤ tol · max_i ‖A_i‖_op.
SimultaneousDiagonalization simultaneous_diagonalize(std::span<const HermitianOperator> family,
                                                     double tol = 1e-10);

// ---------------------------------------------------------------------------
// vectorization (column stacking): vec(A X B) = (Bᵀ ⊗ A) vec(X)

Vector vec(const Matrix& x);
Matrix unvec(const Vector& v, Index rows, Index cols);
inline Matrix unvec(const Vector& v, Index d) { return unvec(v, d, d); }

/// Applies a superoperator matrix to a d_in × d_in operator.
Matrix apply_superop(const Matrix& superop, const Matrix& x);

}  // namespace broadcastlab
