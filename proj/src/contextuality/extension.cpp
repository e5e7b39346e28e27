#include <algorithm>
#include <limits>

#include "broadcastlab/contextuality.hpp"
#include "broadcastlab/random.hpp"

namespace broadcastlab {

namespace {

double max_abs(const RealVector& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

}  // namespace

EffectFunctionalExtension::EffectFunctionalExtension(EffectFunctional t, Index dim,
                                                     const std::vector<Matrix>& generators, double tol)
    : t_(std::move(t)), d_(dim) {
  if (!t_) throw Error(ErrorKind::invalid_input, "EffectFunctionalExtension: empty functional");
  if (dim < 1) throw Error(ErrorKind::invalid_input, "EffectFunctionalExtension: dimension must be positive");
  const Matrix id = identity(d_);
  const RealVector at_identity = t_(id);
  samples_ = at_identity.size();
  if (samples_ < 1) throw Error(ErrorKind::invalid_input, "EffectFunctionalExtension: no sample points");
  const double norm_dev = max_abs(at_identity - RealVector::Ones(samples_));
  if (norm_dev > tol) throw AxiomViolationError("normalization T(I) = 1", "identity", norm_dev);

  std::vector<RealVector> values;
  for (std::size_t i = 0; i < generators.size(); ++i) {
    const Matrix& e = generators[i];
    if (e.rows() != d_ || e.cols() != d_) {
      throw Error(ErrorKind::dimension_mismatch, "EffectFunctionalExtension: generator " + std::to_string(i));
    }
    Effect(e, tol);
    const std::string where = "generator " + std::to_string(i);
    const RealVector v = t_(e);
    if (v.size() != samples_) {
      throw Error(ErrorKind::invalid_input, "EffectFunctionalExtension: sample count changes at " + where);
    }
    if (v.minCoeff() < -tol) throw AxiomViolationError("bounds 0 ≤ T(E) ≤ 1", where, -v.minCoeff());
    if (v.maxCoeff() > 1.0 + tol) throw AxiomViolationError("bounds 0 ≤ T(E) ≤ 1", where, v.maxCoeff() - 1.0);
    for (double s : {0.25, 0.5, 0.75}) {
      const double dev = max_abs(t_(s * e) - s * v);
      if (dev > tol) {
        throw AxiomViolationError("homogeneity T(tE) = tT(E)", where + " at t=" + std::to_string(s), dev);
      }
    }
    const double comp = max_abs(t_(id - e) + v - RealVector::Ones(samples_));
    if (comp > tol) throw AxiomViolationError("additivity T(E + F) = T(E) + T(F)", where + " and its complement", comp);
    values.push_back(v);
  }
  for (std::size_t i = 0; i < generators.size(); ++i)
    for (std::size_t j = i + 1; j < generators.size(); ++j) {
      const Matrix sum = generators[i] + generators[j];
      if (hermitian_spectral_bound(sum) > 1.0 + 1e-12 || min_eigenvalue(sum) < -1e-12) continue;
      const double dev = max_abs(t_(sum) - values[i] - values[j]);
      if (dev > tol) {
        throw AxiomViolationError("additivity T(E + F) = T(E) + T(F)",
                                  "generators " + std::to_string(i) + " and " + std::to_string(j), dev);
      }
    }

  table_.resize(d_ * d_, samples_);
  Matrix unit = Matrix::Zero(d_, d_);
  for (Index k = 0; k < d_; ++k)
    for (Index l = 0; l < d_; ++l) {
      unit(k, l) = 1.0;
      table_.row(k * d_ + l) = (*this)(unit).transpose();
      unit(k, l) = 0.0;
    }
}

RealVector EffectFunctionalExtension::positive(const Matrix& a) const {
  const Matrix h = 0.5 * (a + a.adjoint());
  const double norm = op_norm(h);
  if (norm == 0.0) return RealVector::Zero(samples_);
  if (min_eigenvalue(h) < -1e-12 * norm) {
    throw Error(ErrorKind::invalid_input, "EffectFunctionalExtension::positive: operand is not positive");
  }
  return norm * t_(h / norm);
}

RealVector EffectFunctionalExtension::hermitian(const Matrix& a) const {
  const auto [pos, neg] = positive_negative_parts(HermitianOperator(a));
  return positive(pos) - positive(neg);
}

RealVector EffectFunctionalExtension::hermitian(const Matrix& b, const Matrix& c) const {
  return positive(b) - positive(c);
}

Vector EffectFunctionalExtension::operator()(const Matrix& a) const {
  if (a.rows() != d_ || a.cols() != d_) {
    throw Error(ErrorKind::dimension_mismatch, "EffectFunctionalExtension: operand dimension");
  }
  const Matrix re = a + a.adjoint();
  const Matrix im = Complex(0.0, -1.0) * (a - a.adjoint());
  return 0.5 * (hermitian(re).cast<Complex>() + Complex(0.0, 1.0) * hermitian(im).cast<Complex>());
}

Vector EffectFunctionalExtension::from_table(const Matrix& a) const {
  Vector out = Vector::Zero(samples_);
  for (Index k = 0; k < d_; ++k)
    for (Index l = 0; l < d_; ++l) out += a(k, l) * table_.row(k * d_ + l).transpose();
  return out;
}

double EffectFunctionalExtension::linearity_residual(std::uint64_t seed, int trials) const {
  Rng rng(seed);
  double worst = 0.0;
  for (int t = 0; t < trials; ++t) {
    const Matrix a = rng.ginibre(d_, d_);
    const Matrix b = rng.ginibre(d_, d_);
    const Complex alpha = rng.complex_normal();
    const Complex beta = rng.complex_normal();
    const Vector lhs = (*this)(alpha * a + beta * b);
    const Vector rhs = alpha * (*this)(a) + beta * (*this)(b);
    worst = std::max(worst, (lhs - rhs).cwiseAbs().maxCoeff());
  }
  return worst;
}

double EffectFunctionalExtension::positivity_floor(std::uint64_t seed, int trials) const {
  Rng rng(seed);
  double floor = std::numeric_limits<double>::infinity();
  for (int t = 0; t < trials; ++t) {
    const Matrix g = rng.ginibre(d_, rng.integer(1, d_));
    const Vector v = (*this)(g * g.adjoint());
    floor = std::min(floor, v.real().minCoeff());
  }
  return floor;
}

}  // namespace broadcastlab
