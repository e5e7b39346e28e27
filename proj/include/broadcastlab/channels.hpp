#pragma once

// Quantum channels in Kraus, Choi and measure-and-prepare form.

#include <variant>
#include <vector>

#include "broadcastlab/operators.hpp"

namespace broadcastlab {

enum class Picture { schrodinger, heisenberg };

namespace defaults {
inline constexpr double trace_preservation = 1e-10;
inline constexpr double choi_psd = 1e-10;
inline constexpr double kraus_cutoff = 1e-12;
}  // namespace defaults

class KrausChannel {
 public:
  /// Each operator is d_out × d_in.
  explicit KrausChannel(std::vector<Matrix> ops, double tol = defaults::trace_preservation);

  const std::vector<Matrix>& ops() const noexcept { return ops_; }
  Index d_in() const noexcept { return d_in_; }
  Index d_out() const noexcept { return d_out_; }

  Matrix schrodinger(const Matrix& rho) const;
  Matrix heisenberg(const Matrix& a) const;

 private:
  std::vector<Matrix> ops_;
  Index d_in_ = 0;
  Index d_out_ = 0;
};

/// J = Σ_{kl} |k⟩⟨l| ⊗ Λ(|k⟩⟨l|) on C^{d_in} ⊗ C^{d_out}.
class ChoiMatrix {
 public:
  ChoiMatrix(const Matrix& j, Index d_in, Index d_out, double tol = defaults::choi_psd);

  const Matrix& matrix() const noexcept { return j_; }
  Index d_in() const noexcept { return d_in_; }
  Index d_out() const noexcept { return d_out_; }
  Bipartition dims() const noexcept { return {d_in_, d_out_}; }

  Matrix schrodinger(const Matrix& rho) const;  // tr_1[(ρᵀ ⊗ I) J]
  Matrix heisenberg(const Matrix& a) const;     // (tr_2[J (I ⊗ A)])ᵀ

 private:
  Matrix j_;
  Index d_in_ = 0;
  Index d_out_ = 0;
};

/// Λ(T) = Σ_i tr(G_i T) σ_i,  Λ*(A) = Σ_i tr(σ_i A) G_i.
class MeasurePrepareChannel {
 public:
  MeasurePrepareChannel(DiscretePOVM povm, std::vector<DensityOperator> states);

  const DiscretePOVM& povm() const noexcept { return povm_; }
  const std::vector<DensityOperator>& states() const noexcept { return states_; }
  std::size_t size() const noexcept { return states_.size(); }
  Index d_in() const noexcept { return povm_.dim(); }
  Index d_out() const noexcept { return states_.front().dim(); }

  Matrix schrodinger(const Matrix& rho) const;
  Matrix heisenberg(const Matrix& a) const;

  /// Rank-one Kraus operators √(g_a s_b) |s_b⟩⟨g_a| from the spectral
  /// decompositions of every G_i and σ_i.
  KrausChannel to_kraus() const;

 private:
  DiscretePOVM povm_;
  std::vector<DensityOperator> states_;
};

using Channel = std::variant<KrausChannel, ChoiMatrix, MeasurePrepareChannel>;

Index d_in(const Channel& ch);
Index d_out(const Channel& ch);
Matrix apply(const Channel& ch, const Matrix& operand, Picture picture);

/// Matrix of the Schrödinger map on column-stacked operators (d_out² × d_in²).
Matrix schrodinger_superop(const Channel& ch);
/// Matrix of the Heisenberg map (d_in² × d_out²); the adjoint of the above.
Matrix heisenberg_superop(const Channel& ch);

ChoiMatrix choi_transform(const Channel& ch);
/// Keeps eigencomponents of J above `cutoff`.
KrausChannel choi_to_kraus(const ChoiMatrix& j, double cutoff = defaults::kraus_cutoff);

/// Φ*(A) = Σ_i tr((σ_i ⊗ σ_i) A) G_i, mapping L(H ⊗ H) → L(H).
class SymmetricChannel {
 public:
  explicit SymmetricChannel(MeasurePrepareChannel base);

  const MeasurePrepareChannel& base() const noexcept { return base_; }
  Index dim() const noexcept { return base_.d_in(); }

  Matrix heisenberg(const Matrix& a) const;
  /// Φ*(A ⊗ B) without forming the tensor product.
  Matrix heisenberg_product(const Matrix& a, const Matrix& b) const;
  /// Φ*(A ⊗ I) and Φ*(I ⊗ A); both go through the base channel's Λ*.
  Matrix marginal_first(const Matrix& a) const;
  Matrix marginal_second(const Matrix& a) const;
  /// Φ(ρ) = Σ_i tr(G_i ρ) σ_i ⊗ σ_i.
  Matrix schrodinger(const Matrix& rho) const;
  KrausChannel to_kraus() const;

 private:
  MeasurePrepareChannel base_;
};

SymmetricChannel symmetric_lift(const MeasurePrepareChannel& eb);

/// Θ_sym = ½(Θ + V_swap ∘ Θ) for Θ: L(C^d) → L(C^d ⊗ C^d).
KrausChannel symmetrize(const KrausChannel& theta);

/// Kraus set {√(1/d)|i⟩⟨j|}: Λ(ρ) = tr(ρ) I/d.
KrausChannel depolarizing_channel(Index d);
KrausChannel identity_channel(Index d);
KrausChannel unitary_channel(const Matrix& u);
/// Dephasing in the columns of `basis`; Λ(ρ) = Σ_k ⟨e_k|ρ|e_k⟩ |e_k⟩⟨e_k|.
MeasurePrepareChannel pinching_channel(const Matrix& basis);

}  // namespace broadcastlab
