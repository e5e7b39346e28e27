#include "broadcastlab/random.hpp"

#include <cmath>

namespace broadcastlab {

Matrix Rng::ginibre(Index rows, Index cols) {
  Matrix g(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) g(i, j) = complex_normal();
  return g;
}

Matrix random_unitary(Index d, Rng& rng) {
  const Matrix g = rng.ginibre(d, d);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Index j = 0; j < d; ++j) {
    const double mag = std::abs(r(j, j));
    if (mag > 0.0) q.col(j) *= r(j, j) / mag;
  }
  return q;
}

Matrix random_hermitian(Index d, Rng& rng) {
  const Matrix g = rng.ginibre(d, d);
  return 0.5 * (g + g.adjoint());
}

Matrix random_density(Index d, Rng& rng, Index rank) {
  if (rank <= 0 || rank > d) rank = d;
  const Matrix g = rng.ginibre(d, rank);
  Matrix rho = g * g.adjoint();
  rho /= rho.trace().real();
  return 0.5 * (rho + rho.adjoint());
}

Vector random_pure(Index d, Rng& rng) {
  Vector v = rng.ginibre(d, 1).col(0);
  return v / v.norm();
}

RealVector random_simplex(Index n, Rng& rng) {
  RealVector w(n);
  for (Index i = 0; i < n; ++i) w(i) = -std::log(1.0 - rng.uniform());
  return w / w.sum();
}

std::vector<Matrix> random_commuting_densities(Index d, std::size_t count, Rng& rng) {
  const Matrix u = random_unitary(d, rng);
  std::vector<Matrix> out;
  for (std::size_t s = 0; s < count; ++s) {
    RealVector p = random_simplex(d, rng);
    if (d > 1 && rng.uniform() < 0.3) {
      const Index i = rng.integer(0, d - 2);
      const double m = 0.5 * (p(i) + p(i + 1));
      p(i) = m;
      p(i + 1) = m;
    }
    Matrix rho = u * p.cast<Complex>().asDiagonal() * u.adjoint();
    out.push_back(0.5 * (rho + rho.adjoint()));
  }
  return out;
}

std::vector<Matrix> random_noncommuting_densities(Index d, std::size_t count, Rng& rng) {
  std::vector<Matrix> out;
  for (std::size_t s = 0; s < count; ++s) out.push_back(random_density(d, rng));
  return out;
}

namespace {

// Ranks ≥ 1 summing to d.
std::vector<Index> random_ranks(Index d, std::size_t parts, Rng& rng) {
  std::vector<Index> ranks(parts, 1);
  for (Index extra = d - static_cast<Index>(parts); extra > 0; --extra)
    ++ranks[static_cast<std::size_t>(rng.integer(0, static_cast<Index>(parts) - 1))];
  return ranks;
}

Matrix inverse_sqrt_psd(const Matrix& s) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(s);
  const RealVector v = solver.eigenvalues().cwiseMax(1e-300).cwiseSqrt().cwiseInverse();
  return solver.eigenvectors() * v.cast<Complex>().asDiagonal() * solver.eigenvectors().adjoint();
}

Matrix sqrt_psd(const Matrix& s) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(0.5 * (s + s.adjoint()));
  const RealVector v = solver.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return solver.eigenvectors() * v.cast<Complex>().asDiagonal() * solver.eigenvectors().adjoint();
}

// Random PSD operators on C^d summing to the identity.
std::vector<Matrix> random_povm_elements(Index d, std::size_t outcomes, Rng& rng) {
  std::vector<Matrix> w;
  Matrix sum = Matrix::Zero(d, d);
  for (std::size_t i = 0; i < outcomes; ++i) {
    const Matrix g = rng.ginibre(d, d);
    w.push_back(g * g.adjoint());
    sum += w.back();
  }
  const Matrix t = inverse_sqrt_psd(0.5 * (sum + sum.adjoint()));
  for (auto& x : w) {
    x = t * x * t;
    x = 0.5 * (x + x.adjoint());
  }
  return w;
}

}  // namespace

std::vector<Matrix> random_pvm(Index d, std::size_t outcomes, Rng& rng) {
  if (outcomes < 1 || static_cast<Index>(outcomes) > d) {
    throw Error(ErrorKind::invalid_input, "random_pvm: need 1 ≤ outcomes ≤ d");
  }
  const Matrix u = random_unitary(d, rng);
  const auto ranks = random_ranks(d, outcomes, rng);
  std::vector<Matrix> out;
  Index start = 0;
  for (Index r : ranks) {
    const Matrix cols = u.middleCols(start, r);
    out.push_back(cols * cols.adjoint());
    start += r;
  }
  return out;
}

MeasurePrepareChannel random_mp_channel(Index d, std::size_t outcomes, Rng& rng) {
  std::vector<Effect> effects;
  std::vector<DensityOperator> states;
  for (auto& g : random_povm_elements(d, outcomes, rng)) effects.emplace_back(g);
  for (std::size_t i = 0; i < outcomes; ++i) states.emplace_back(random_density(d, rng));
  return MeasurePrepareChannel(DiscretePOVM(std::move(effects)), std::move(states));
}

MeasurePrepareChannel random_structured_eb(Index d, std::size_t atoms, Rng& rng) {
  if (atoms < 1 || static_cast<Index>(atoms) > d) {
    throw Error(ErrorKind::invalid_input, "random_structured_eb: need 1 ≤ atoms ≤ d");
  }
  const Matrix u = random_unitary(d, rng);
  // Slot `atoms` is the remainder; it stays empty when d == atoms.
  std::vector<Index> sizes(atoms + 1, 1);
  sizes[atoms] = 0;
  for (Index extra = d - static_cast<Index>(atoms); extra > 0; --extra)
    ++sizes[static_cast<std::size_t>(rng.integer(0, static_cast<Index>(atoms)))];

  std::vector<Matrix> frames;
  Index start = 0;
  for (Index s : sizes) {
    frames.push_back(u.middleCols(start, s));
    start += s;
  }
  const Matrix& rem = frames[atoms];
  const Index r = rem.cols();

  std::vector<Matrix> leak(atoms, Matrix::Zero(d, d));
  if (r > 0) {
    const auto parts = random_povm_elements(r, atoms, rng);
    for (std::size_t i = 0; i < atoms; ++i) leak[i] = rem * parts[i] * rem.adjoint();
  }

  std::vector<Effect> effects;
  std::vector<DensityOperator> states;
  for (std::size_t i = 0; i < atoms; ++i) {
    const Matrix& f = frames[i];
    const Matrix total = f * f.adjoint() + leak[i];
    const Matrix root = sqrt_psd(total);
    const auto outcomes = static_cast<std::size_t>(rng.integer(1, 3));
    const auto split = random_povm_elements(d, outcomes, rng);
    for (std::size_t a = 0; a < outcomes; ++a) {
      Matrix g = root * split[a] * root;
      effects.emplace_back(Matrix(0.5 * (g + g.adjoint())));
      Matrix s = f * random_density(f.cols(), rng) * f.adjoint();
      states.emplace_back(Matrix(0.5 * (s + s.adjoint()) / s.trace().real()));
    }
  }
  return MeasurePrepareChannel(DiscretePOVM(std::move(effects)), std::move(states));
}

KrausChannel random_kraus_channel(Index d_in, Index d_out, std::size_t n_ops, Rng& rng) {
  const Index rows = d_out * static_cast<Index>(n_ops);
  if (rows < d_in) throw Error(ErrorKind::invalid_input, "random_kraus_channel: too few Kraus operators");
  const Matrix g = rng.ginibre(rows, d_in);
  Eigen::HouseholderQR<Matrix> qr(g);
  const Matrix v = qr.householderQ() * Matrix::Identity(rows, d_in);
  std::vector<Matrix> ops;
  for (std::size_t i = 0; i < n_ops; ++i) ops.push_back(v.middleRows(static_cast<Index>(i) * d_out, d_out));
  return KrausChannel(std::move(ops));
}

}  // namespace broadcastlab
