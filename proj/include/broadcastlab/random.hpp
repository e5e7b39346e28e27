#pragma once

// Seeded generators for states, observables, measurements and channels.

#include <cstdint>
#include <random>
#include <vector>

#include "broadcastlab/channels.hpp"

namespace broadcastlab {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double normal() { return normal_(engine_); }
  double uniform() { return uniform_(engine_); }
  /// Uniform integer in [lo, hi].
  Index integer(Index lo, Index hi) { return std::uniform_int_distribution<Index>(lo, hi)(engine_); }
  Complex complex_normal() { return {normal(), normal()}; }
  Matrix ginibre(Index rows, Index cols);
  std::mt19937_64& engine() noexcept { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

/// Haar-distributed unitary (QR of a Ginibre matrix with phase correction).
Matrix random_unitary(Index d, Rng& rng);
Matrix random_hermitian(Index d, Rng& rng);
/// Induced-measure density matrix of the given rank (full rank when 0).
Matrix random_density(Index d, Rng& rng, Index rank = 0);
Vector random_pure(Index d, Rng& rng);
/// Positive weights summing to one.
RealVector random_simplex(Index n, Rng& rng);

/// Density matrices diagonal in one random basis. Spectra are drawn with
/// occasional repeated eigenvalues.
std::vector<Matrix> random_commuting_densities(Index d, std::size_t count, Rng& rng);
/// Random densities that do not all commute (the first two never do).
std::vector<Matrix> random_noncommuting_densities(Index d, std::size_t count, Rng& rng);

/// Orthogonal projections onto blocks of a random basis; ranks partition d.
std::vector<Matrix> random_pvm(Index d, std::size_t outcomes, Rng& rng);

/// Measure-prepare channel with random POVM and random states; generically
/// its fixed-point algebra is ℂI.
MeasurePrepareChannel random_mp_channel(Index d, std::size_t outcomes, Rng& rng);

/// Measure-prepare channel with a nontrivial fixed-point algebra. The space
/// is split into `atoms` orthogonal subspaces plus a remainder; every atom
/// carries several outcomes whose states live inside the atom, and its POVM
/// elements leak into the remainder. The fixed points are spanned by the
/// per-atom outcome sums, which are not projections when a remainder exists.
MeasurePrepareChannel random_structured_eb(Index d, std::size_t atoms, Rng& rng);

KrausChannel random_kraus_channel(Index d_in, Index d_out, std::size_t n_ops, Rng& rng);

}  // namespace broadcastlab
