#pragma once

// Fixed points of Heisenberg maps, the Cesàro projector ψ₀, the broadcasting
// product and atomic decompositions of the resulting commutative algebra.

#include <cstdint>
#include <functional>
#include <vector>

#include "broadcastlab/channels.hpp"

namespace broadcastlab {

namespace defaults {
inline constexpr double fixed_space = 1e-9;
inline constexpr double algebra = 1e-8;
inline constexpr int atom_redraws = 8;
}  // namespace defaults

class FixedPointSpace {
 public:
  const std::vector<Matrix>& basis() const noexcept { return basis_; }
  std::size_t dimension() const noexcept { return basis_.size(); }
  Index dim() const noexcept { return d_; }
  double tol() const noexcept { return tol_; }
  double threshold() const noexcept { return threshold_; }
  /// Singular values of (M − id), ascending.
  const std::vector<double>& singular_values() const noexcept { return ladder_; }
  /// max ‖M(B) − B‖_F over the basis.
  double max_residual() const noexcept { return max_residual_; }
  /// Spectral projector onto the eigenvalue-1 eigenspace (d² × d²).
  const Matrix& projector() const noexcept { return projector_; }
  const Matrix& superop() const noexcept { return superop_; }

  /// Coordinates of a Hermitian operator in the basis (real).
  RealVector coordinates(const Matrix& a) const;
  Matrix from_coordinates(const RealVector& c) const;
  Matrix project(const Matrix& a) const;  // ψ₀(A)
  double fixed_residual(const Matrix& a) const;

 private:
  friend FixedPointSpace fixed_space(const Matrix&, Index, double);
  Index d_ = 0;
  double tol_ = 0.0;
  double threshold_ = 0.0;
  std::vector<Matrix> basis_;
  std::vector<double> ladder_;
  double max_residual_ = 0.0;
  Matrix projector_;
  Matrix superop_;
};

/// Fixed points of the map with superoperator `superop` (d² × d², column
/// stacking). Singular values of (superop − id) at most tol·max(1, σ_max)
/// span the fixed space. Throws NoSpectralGapError when some singular value
/// lies within two decades of that threshold.
FixedPointSpace fixed_space(const Matrix& superop, Index d, double tol = defaults::fixed_space);
/// Fixed points of the Heisenberg action Λ*.
FixedPointSpace fixed_space(const Channel& ch, double tol = defaults::fixed_space);

struct CesaroResult {
  Matrix value;
  std::size_t terms = 0;
  bool converged = false;     // step change reached early_stop_tol
  double step_change = 0.0;   // ‖avg_n − avg_{n−1}‖_F at exit
  double fixed_residual = 0.0;  // ‖M(avg) − avg‖_F
};

/// (1/n) Σ_{k<n} M^k(A) for the map with superoperator `superop`.
CesaroResult cesaro_apply(const Matrix& superop, const Matrix& a, std::size_t n_terms,
                          double early_stop_tol);
CesaroResult cesaro_apply(const Channel& ch, const Matrix& a, std::size_t n_terms,
                          double early_stop_tol);

/// Fixed points of a symmetric broadcasting map Φ* together with the product
/// A∙B = ψ₀(Φ*(A ⊗ B)).
class BroadcastingAlgebra {
 public:
  using ProductMap = std::function<Matrix(const Matrix&, const Matrix&)>;

  /// Φ* given by the symmetric lift of a measure-prepare channel.
  static BroadcastingAlgebra from_eb(const MeasurePrepareChannel& eb, double tol = defaults::fixed_space);
  /// Φ* given by a swap-symmetric Kraus channel C^d → C^d ⊗ C^d.
  static BroadcastingAlgebra from_symmetric(const KrausChannel& theta_sym,
                                            double tol = defaults::fixed_space);

  const FixedPointSpace& space() const noexcept { return space_; }
  Index dim() const noexcept { return space_.dim(); }
  const Matrix& psi0() const noexcept { return space_.projector(); }

  /// Φ*(A ⊗ B).
  Matrix joint(const Matrix& a, const Matrix& b) const { return product_map_(a, b); }
  /// ψ₀(Φ*(A ⊗ B)) without operand checks.
  Matrix raw_product(const Matrix& a, const Matrix& b) const;
  /// c[a][b] = coordinates of B_a ∙ B_b.
  const std::vector<std::vector<RealVector>>& product_table() const noexcept { return table_; }
  RealVector product_coordinates(const RealVector& x, const RealVector& y) const;

  /// Residuals measured at construction.
  double idempotency_residual() const noexcept { return idempotency_; }
  double cp_min_eigenvalue() const noexcept { return cp_min_eig_; }
  double commutativity_residual() const noexcept { return commutativity_; }
  double associativity_residual() const noexcept { return associativity_; }
  double unit_residual() const noexcept { return unit_; }

 private:
  BroadcastingAlgebra(FixedPointSpace space, ProductMap product);
  void build_table();

  FixedPointSpace space_;
  ProductMap product_map_;
  std::vector<std::vector<RealVector>> table_;
  double idempotency_ = 0.0;
  double cp_min_eig_ = 0.0;
  double commutativity_ = 0.0;
  double associativity_ = 0.0;
  double unit_ = 0.0;
};

/// A∙B. Operands farther than tol·max(1, ‖·‖) from the fixed space raise.
Matrix broadcasting_product(const BroadcastingAlgebra& alg, const Matrix& a, const Matrix& b,
                            double tol = defaults::algebra);

/// ‖ψ₀(Φ*(A ⊗ B)) − ψ₀(AB)‖_F.
double choi_effros_compare(const BroadcastingAlgebra& alg, const Matrix& a, const Matrix& b);

/// Real eigenvalues of the multiplication operator X∙(·) for Hermitian X.
RealVector product_spectrum(const BroadcastingAlgebra& alg, const Matrix& x);

struct AtomicDecomposition {
  std::vector<Matrix> povm;    // ∙-minimal projections G_i
  std::vector<Matrix> states;  // σ_i with tr(σ_i G_j) = δ_ij
  std::vector<double> state_repair;  // ‖σ_i before cone projection − σ_i‖_F
  int draws = 0;               // generic elements tried
  double min_gap = 0.0;        // smallest eigenvalue separation accepted
  double biorthogonality_residual = 0.0;
  double completeness_residual = 0.0;
  double idempotence_residual = 0.0;

  /// Σ_i tr(σ_i A) G_i.
  Matrix reconstruct(const Matrix& a) const;
  /// The measure-prepare channel ρ ↦ Σ_i tr(G_i ρ) σ_i.
  MeasurePrepareChannel channel() const;
};

/// Throws numerical_failure when every draw has a degenerate ∙-spectrum.
AtomicDecomposition atomic_decomposition(const BroadcastingAlgebra& alg, std::uint64_t seed,
                                         double tol = defaults::algebra);

}  // namespace broadcastlab
