#pragma once

// Deciders and witnesses for contextuality non-confirming sets of states and
// measurements.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "broadcastlab/channels.hpp"

namespace broadcastlab {

namespace defaults {
inline constexpr double commutator = 1e-10;
inline constexpr double pvm = 1e-10;
inline constexpr std::size_t pvm_max_sets = 20;
inline constexpr std::size_t dykstra_budget = 20000;
inline constexpr double dykstra_tol = 1e-7;
inline constexpr std::size_t dykstra_window = 500;
inline constexpr double axiom = 1e-9;
}  // namespace defaults

inline constexpr const char* kPptNote = "PPT exact for 2⊗2 and 2⊗3, relaxation otherwise";

// ---------------------------------------------------------------------------
// state sets

enum class StateVerdict { non_confirming, confirming };
const char* to_string(StateVerdict v) noexcept;

struct StateSetVerdict {
  StateVerdict verdict = StateVerdict::non_confirming;
  double max_commutator = 0.0;  // over all pairs
  std::pair<std::size_t, std::size_t> pair{0, 0};
  std::optional<MeasurePrepareChannel> witness;  // pinching in the common eigenbasis
  std::optional<KrausChannel> broadcaster;       // C^d → C^d ⊗ C^d
  Matrix basis;
  double witness_residual = 0.0;      // max ‖Λ(ρ) − ρ‖_tr
  double broadcaster_residual = 0.0;  // max over marginals of ‖tr_j B(ρ) − ρ‖_tr
  std::vector<std::string> notes;
};

StateSetVerdict check_states(const std::vector<DensityOperator>& states, double tol = defaults::commutator);
/// Throws NotCommutingError for a non-commuting family.
KrausChannel broadcaster_from_commuting(const std::vector<DensityOperator>& states,
                                        double tol = defaults::commutator);

// ---------------------------------------------------------------------------
// PVM partition embedding

struct LabeledProjection {
  std::string label;
  Matrix projection;
};

struct PartitionAtom {
  std::uint32_t index = 0;            // bit k−1 set iff the atom lies inside K_k
  std::vector<std::string> outcomes;  // labels in this atom
  Matrix projection;
  Index rank = 0;                     // 0 for atoms outside J
};

struct PartitionEmbedding {
  std::vector<PartitionAtom> atoms;             // nonempty atoms, ascending index
  std::vector<std::vector<std::uint32_t>> index_sets;  // I_k as atom indices
  std::optional<MeasurePrepareChannel> channel;
  std::vector<double> residuals;  // ‖Λ*(A(K_k)) − A(K_k)‖_op
  double max_residual() const;
};

/// `subsets` lists each K_k by outcome label.
PartitionEmbedding pvm_embed(const std::vector<LabeledProjection>& outcomes,
                             const std::vector<std::vector<std::string>>& subsets,
                             double tol = defaults::pvm);
/// Commuting projections A(K_k) given directly; atoms are the products of
/// A(K_k) and I − A(K_k).
PartitionEmbedding pvm_embed(const std::vector<Matrix>& projections, double tol = defaults::pvm);

// ---------------------------------------------------------------------------
// EB fixed-point feasibility for a set of effects

struct FeasibilityProblem {
  std::vector<Matrix> effects;
  Index dim = 0;
  std::size_t budget = defaults::dykstra_budget;
  double tol = defaults::dykstra_tol;
  std::size_t stall_window = defaults::dykstra_window;
  std::size_t history_stride = 100;
};

enum class FeasibilityStatus { feasible, infeasible_stalled, inconclusive };
const char* to_string(FeasibilityStatus s) noexcept;

struct WitnessCheck {
  double psd_violation = 0.0;   // max(0, −λ_min(J))
  double ppt_violation = 0.0;   // max(0, −λ_min(J^{T1}))
  double trace_residual = 0.0;  // ‖tr_2 J − I‖_F
  std::vector<double> fixed_residuals;  // ‖Λ*(E_k) − E_k‖_F
  double max() const;
};

struct MeasSetVerdict {
  FeasibilityStatus status = FeasibilityStatus::inconclusive;
  Matrix choi;                      // final iterate
  std::optional<MeasurePrepareChannel> witness;
  std::vector<double> residuals;    // every history_stride cycles, plus the last
  double best_residual = 0.0;
  double final_residual = 0.0;
  std::size_t cycles = 0;
  std::vector<std::string> notes;
};

/// Re-verifies a Choi matrix against the problem's constraints.
WitnessCheck check_witness(const FeasibilityProblem& problem, const Matrix& choi);
MeasSetVerdict check_measurements_feasibility(const FeasibilityProblem& problem);

// ---------------------------------------------------------------------------
// approximate criterion

struct ApproxCheck {
  std::vector<double> deviations;  // max |eig(Λ*(E) − E)|
  std::vector<bool> pass;
  double epsilon = 0.0;
  bool all_pass = true;
};

ApproxCheck approx_check(const std::vector<Matrix>& effects, const MeasurePrepareChannel& channel,
                         double epsilon);

// ---------------------------------------------------------------------------
// positive linear extension of an effect functional

/// T(E) evaluated at a fixed list of sample points.
using EffectFunctional = std::function<RealVector(const Matrix&)>;

class EffectFunctionalExtension {
 public:
  /// Checks normalization, bounds, homogeneity and additivity of `t` on the
  /// generating effects; throws AxiomViolationError on failure.
  EffectFunctionalExtension(EffectFunctional t, Index dim, const std::vector<Matrix>& generators,
                            double tol = defaults::axiom);

  Index dim() const noexcept { return d_; }
  Index samples() const noexcept { return samples_; }

  /// ‖A‖ T(A/‖A‖) on positive A.
  RealVector positive(const Matrix& a) const;
  /// T'(A⁺) − T'(A⁻) from the spectral decomposition.
  RealVector hermitian(const Matrix& a) const;
  /// T'(B) − T'(C) for a caller-supplied decomposition A = B − C.
  RealVector hermitian(const Matrix& b, const Matrix& c) const;
  /// ½(T''(A + A†) + i T''(−i(A − A†))).
  Vector operator()(const Matrix& a) const;

  /// Values on the matrix units |k⟩⟨l|, row k·d + l.
  const Matrix& table() const noexcept { return table_; }
  /// Σ_kl A_kl T̃(|k⟩⟨l|).
  Vector from_table(const Matrix& a) const;

  /// max ‖T̃(αA + βB) − αT̃(A) − βT̃(B)‖ over `trials` random triples.
  double linearity_residual(std::uint64_t seed, int trials) const;
  /// Most negative real part of T̃ on random positive operators.
  double positivity_floor(std::uint64_t seed, int trials) const;

 private:
  EffectFunctional t_;
  Index d_;
  Index samples_ = 0;
  Matrix table_;
};

}  // namespace broadcastlab
