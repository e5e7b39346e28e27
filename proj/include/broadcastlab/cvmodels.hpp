#pragma once

// Truncated Fock-space models: the Husimi-Q channel, the photon-number shift
// channel and binned position measurements.

#include <cstdint>
#include <vector>

#include "broadcastlab/contextuality.hpp"

namespace broadcastlab {

namespace defaults {
inline constexpr Index qchannel_max_levels = 64;
inline constexpr double quadrature = 1e-10;
}  // namespace defaults

struct FockTruncation {
  Index levels;
  explicit FockTruncation(Index n);
};

/// A trace-non-increasing map given by its superoperator (column stacking).
struct TruncatedChannel {
  Index levels = 0;
  Matrix superop;                    // Schrödinger action, levels² × levels²
  std::vector<double> trace_defects;  // 1 − tr Λ(|n⟩⟨n|) per basis state
  double trace_defect_bound = 0.0;

  Matrix apply(const Matrix& rho) const { return apply_superop(superop, rho); }
  Matrix heisenberg_superop() const { return superop.adjoint(); }
};

// ---------------------------------------------------------------------------
// Husimi-Q channel

/// ⟨m|Λ(|j⟩⟨k|)|n⟩ in closed form; zero unless m + k = n + j.
double qchannel_element(Index m, Index n, Index j, Index k);
/// The same element from a product rule in polar coordinates (Gauss–Laguerre
/// radially, trapezoidal in angle) applied to the coherent-state integral.
double qchannel_element_quadrature(Index m, Index n, Index j, Index k);

/// Λ restricted to levels < N. The map preserves the offset q = m − n and is
/// real symmetric on every offset block, so it is stored block-wise.
class QChannel {
 public:
  explicit QChannel(FockTruncation trunc);

  Index levels() const noexcept { return n_; }
  /// Block for offset q ∈ (−N, N); row i pairs with (m, n) = (i + max(q,0), i + max(−q,0)).
  const Eigen::MatrixXd& block(Index q) const { return blocks_[static_cast<std::size_t>(q + n_ - 1)]; }
  /// Λ(A); identical to Λ*(A) within the truncation.
  Matrix apply(const Matrix& a) const;
  TruncatedChannel truncated() const;
  const std::vector<double>& trace_defects() const noexcept { return defects_; }
  double trace_defect_bound() const noexcept { return defect_bound_; }

 private:
  friend Matrix qchannel_cesaro(const QChannel&, const Matrix&, std::size_t);
  Index n_;
  std::vector<Eigen::MatrixXd> blocks_;
  std::vector<Eigen::MatrixXd> block_vectors_;
  std::vector<RealVector> block_values_;
  std::vector<double> defects_;
  double defect_bound_ = 0.0;
};

QChannel qchannel_build(FockTruncation trunc);

struct QuadratureAgreement {
  double max_deviation = 0.0;
  Index worst[4] = {0, 0, 0, 0};
  std::size_t elements = 0;
};
/// Closed form against quadrature for all indices below `bound`.
QuadratureAgreement qchannel_validate(Index bound);

struct CesaroWindowRow {
  std::size_t length = 0;
  double window_distance = 0.0;  // ‖B − (tr B / w) I_w‖_F
  double relative = 0.0;         // window_distance / (same quantity for the input)
  double flatness = 0.0;         // window_distance / ‖B‖_F
};

struct CesaroWindowSeries {
  std::string input;  // "identity", "number", "random_<i>"
  double input_window_distance = 0.0;
  std::vector<CesaroWindowRow> rows;
};

struct QWindowReport {
  Index levels = 0;
  Index window = 0;
  std::vector<double> ladder;   // largest eigenvalues over all offset blocks, descending
  double top_eigenvalue = 0.0;
  double slem = 0.0;            // second-largest eigenvalue modulus
  double trace_defect_bound = 0.0;
  double self_adjointness = 0.0;
  double identity_window_deviation = 0.0;  // ‖window of Λ(I) − I_w‖_F
  std::vector<CesaroWindowSeries> series;
};

/// (1/n) Σ_{k<n} Λ^k(A), evaluated from the block eigendecompositions.
Matrix qchannel_cesaro(const QChannel& ch, const Matrix& a, std::size_t n);

QWindowReport qchannel_fixed_analysis(const QChannel& ch, Index window, const std::vector<std::size_t>& lengths,
                                      std::size_t random_inputs, std::uint64_t seed,
                                      std::size_t ladder_size = 12);

/// max |tr(Λ(A)B) − tr(AΛ(B))| over random Hermitian pairs, relative to ‖A‖‖B‖.
double qchannel_self_adjointness(const QChannel& ch, std::uint64_t seed, int trials);

// ---------------------------------------------------------------------------
// shift channel

/// |n⟩⟨n| ↦ |n+1⟩⟨n+1| for n < N − 1; the top level is absorbed and
/// off-diagonal entries are discarded.
TruncatedChannel shift_channel(FockTruncation trunc);

struct WindowMassRow {
  std::string initial;
  std::size_t steps = 0;
  double mass = 0.0;
  double bound = 0.0;  // w / n
};

struct ShiftStudy {
  Index levels = 0;
  Index window = 0;
  double ladder_error = 0.0;  // max ‖Λ^k(|0⟩⟨0|) − |k⟩⟨k|‖_F over k < N
  std::vector<WindowMassRow> window_mass;
  std::size_t fixed_dimension = 0;
  double smallest_singular_value = 0.0;
  double threshold = 0.0;
  double trace_defect_bound = 0.0;
};

ShiftStudy shift_channel_study(FockTruncation trunc, Index window, const std::vector<std::size_t>& steps,
                               std::size_t random_initials, std::uint64_t seed,
                               double fixed_tol = 1e-9);

// ---------------------------------------------------------------------------
// binned position measurement

/// Hermite functions h_0..h_{n−1} at x.
RealVector hermite_functions(double x, Index n);
/// ⟨m|Q([lo, hi])|n⟩ = ∫ h_m h_n over [lo, hi]; infinite ends allowed.
Matrix interval_effect(double lo, double hi, Index levels, double tol = defaults::quadrature);

struct BinnedPosition {
  std::vector<Matrix> bins;  // n_bins equal bins on [a, b]
  Matrix complement;         // I − Σ bins
};

BinnedPosition binned_position_pvm(double a, double b, Index n_bins, FockTruncation trunc,
                                   double tol = defaults::quadrature);

struct RepairedPvm {
  std::vector<Matrix> projections;  // bins then complement
  double repair_distance = 0.0;     // max ‖E_i − P_i‖_op
  double max_commutator = 0.0;      // among the unrepaired effects
};

/// Nearest commuting projections: eigenbasis of a generic combination, each
/// vector assigned to the effect with the largest expectation.
RepairedPvm repair_to_pvm(const std::vector<Matrix>& effects);

struct PositionEmbeddingRow {
  Index n_bins = 0;
  double repair_distance = 0.0;
  double embedded_residual = 0.0;  // on the repaired projections
  double original_residual = 0.0;  // max ‖Λ*(E_k) − E_k‖_op on the raw bins
  double max_commutator = 0.0;
  double completeness_defect = 0.0;  // ‖Σ bins + complement − I‖_op
};

PositionEmbeddingRow position_embedding(double a, double b, Index n_bins, FockTruncation trunc);

}  // namespace broadcastlab
