#include "broadcastlab/operators.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <sstream>

namespace broadcastlab {

// errors.hpp has no translation unit of its own.
const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::invalid_input: return "invalid_input";
    case ErrorKind::dimension_mismatch: return "dimension_mismatch";
    case ErrorKind::invariant_violation: return "invariant_violation";
    case ErrorKind::cap_exceeded: return "cap_exceeded";
    case ErrorKind::not_commuting: return "not_commuting";
    case ErrorKind::no_spectral_gap: return "no_spectral_gap";
    case ErrorKind::axiom_violation: return "axiom_violation";
    case ErrorKind::numerical_failure: return "numerical_failure";
  }
  return "unknown";
}

namespace {

std::string describe_pair(std::size_t i, std::size_t j, double norm) {
  std::ostringstream os;
  os << "operators " << i << " and " << j << " do not commute: ‖[A,B]‖_op = " << norm;
  return os.str();
}

std::string describe_ladder(const std::vector<double>& ladder, double threshold) {
  std::ostringstream os;
  os.precision(3);
  os << "no spectral gap around threshold " << threshold << "; singular values:";
  for (double s : ladder) os << ' ' << s;
  return os.str();
}

}  // namespace

NotCommutingError::NotCommutingError(std::size_t first, std::size_t second, double norm)
    : Error(ErrorKind::not_commuting, describe_pair(first, second, norm)),
      pair_{first, second},
      norm_(norm) {}

NoSpectralGapError::NoSpectralGapError(std::vector<double> ladder, double threshold)
    : Error(ErrorKind::no_spectral_gap, describe_ladder(ladder, threshold)),
      ladder_(std::move(ladder)),
      threshold_(threshold) {}

AxiomViolationError::AxiomViolationError(std::string axiom, std::string where, double deviation)
    : Error(ErrorKind::axiom_violation,
            "axiom '" + axiom + "' violated at " + where + " (deviation " +
                std::to_string(deviation) + ")"),
      axiom_(std::move(axiom)),
      where_(std::move(where)),
      deviation_(deviation) {}

std::size_t dimension_cap() {
  if (const char* env = std::getenv("BROADCASTLAB_CAP")) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
  }
  return defaults::dimension_cap;
}

void require_within_cap(Index dim, const char* what) {
  const auto cap = dimension_cap();
  if (dim < 0 || static_cast<std::size_t>(dim) > cap) {
    throw Error(ErrorKind::cap_exceeded, std::string(what) + ": dimension " + std::to_string(dim) +
                                             " exceeds cap " + std::to_string(cap));
  }
}

namespace {

void require_square(const Matrix& m, const char* what) {
  if (m.rows() != m.cols() || m.rows() < 1) {
    throw Error(ErrorKind::dimension_mismatch,
                std::string(what) + ": expected a non-empty square matrix, got " +
                    std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  }
}

void require_finite(const Matrix& m, const char* what) {
  if (!m.allFinite()) {
    throw Error(ErrorKind::invariant_violation, std::string(what) + ": entries must be finite");
  }
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

}  // namespace

HermitianOperator::HermitianOperator(const Matrix& m, double reject_above) {
  require_square(m, "HermitianOperator");
  require_finite(m, "HermitianOperator");
  const double scale = op_norm(m);
  const double asym = op_norm(m - m.adjoint());
  residual_ = scale > 0.0 ? asym / scale : asym;
  if (residual_ > reject_above) {
    throw Error(ErrorKind::invariant_violation,
                "HermitianOperator: relative asymmetry " + fmt(residual_) + " exceeds " +
                    fmt(reject_above));
  }
  m_ = 0.5 * (m + m.adjoint());
}

DensityOperator::DensityOperator(HermitianOperator h, double tol) : h_(std::move(h)) {
  const double tr = h_.matrix().trace().real();
  if (std::abs(tr - 1.0) > tol) {
    throw Error(ErrorKind::invariant_violation,
                "DensityOperator: |trace - 1| = " + fmt(std::abs(tr - 1.0)) + " exceeds " + fmt(tol));
  }
  const double lmin = min_eigenvalue(h_.matrix());
  if (lmin < -tol) {
    throw Error(ErrorKind::invariant_violation,
                "DensityOperator: eigenvalue " + fmt(lmin) + " below -" + fmt(tol));
  }
}

Effect::Effect(HermitianOperator h, double tol) : h_(std::move(h)) {
  const auto e = eig_hermitian(h_);
  const double lmax = e.values(0);
  const double lmin = e.values(e.values.size() - 1);
  if (lmin < -tol || lmax > 1.0 + tol) {
    throw Error(ErrorKind::invariant_violation,
                "Effect: eigenvalues must lie in [0, 1], found range [" + fmt(lmin) + ", " +
                    fmt(lmax) + "]");
  }
}

DiscretePOVM::DiscretePOVM(std::vector<Effect> effects, std::vector<std::string> labels, double tol)
    : effects_(std::move(effects)), labels_(std::move(labels)) {
  if (effects_.empty()) throw Error(ErrorKind::invalid_input, "DiscretePOVM: no effects");
  const Index d = effects_.front().dim();
  Matrix sum = Matrix::Zero(d, d);
  for (const auto& e : effects_) {
    if (e.dim() != d) throw Error(ErrorKind::dimension_mismatch, "DiscretePOVM: mixed dimensions");
    sum += e.matrix();
  }
  const double dev = op_norm(sum - identity(d));
  if (dev > tol) {
    throw Error(ErrorKind::invariant_violation,
                "DiscretePOVM: ‖Σ E_i − I‖_op = " + fmt(dev) + " exceeds " + fmt(tol));
  }
  if (labels_.empty()) {
    for (std::size_t i = 0; i < effects_.size(); ++i) labels_.push_back(std::to_string(i));
  } else if (labels_.size() != effects_.size()) {
    throw Error(ErrorKind::invalid_input, "DiscretePOVM: label count differs from effect count");
  }
}

// ---------------------------------------------------------------------------

EigenDecomposition eig_hermitian(const HermitianOperator& a) {
  const Index d = a.dim();
  Eigen::SelfAdjointEigenSolver<Matrix> solver(a.matrix());
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorKind::numerical_failure, "eig_hermitian: eigensolver did not converge");
  }
  EigenDecomposition out;
  out.values = solver.eigenvalues().reverse();
  out.vectors = solver.eigenvectors().rowwise().reverse();
  for (Index c = 0; c < d; ++c) {
    auto col = out.vectors.col(c);
    Index arg = 0;
    double best = -1.0;
    for (Index r = 0; r < d; ++r) {
      // 1e-12 slack so numerically tied components resolve to the first one.
      const double mag = std::abs(col(r));
      if (mag > best * (1.0 + 1e-12)) {
        best = mag;
        arg = r;
      }
    }
    if (best > 0.0) col *= std::conj(col(arg)) / best;
    col(arg) = std::abs(col(arg));
  }
  return out;
}

EigenDecomposition eig_hermitian(const Matrix& a) { return eig_hermitian(HermitianOperator(a)); }

double op_norm(const Matrix& a) {
  if (a.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(a);
  return svd.singularValues()(0);
}

double trace_norm(const Matrix& a) {
  if (a.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(a);
  return svd.singularValues().sum();
}

double hermitian_spectral_bound(const Matrix& a) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(0.5 * (a + a.adjoint()), Eigen::EigenvaluesOnly);
  return solver.eigenvalues().cwiseAbs().maxCoeff();
}

double min_eigenvalue(const Matrix& hermitian) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(0.5 * (hermitian + hermitian.adjoint()),
                                               Eigen::EigenvaluesOnly);
  return solver.eigenvalues()(0);
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

Matrix identity(Index d) { return Matrix::Identity(d, d); }

Matrix projector(const Vector& v) {
  const double n2 = v.squaredNorm();
  if (n2 == 0.0) throw Error(ErrorKind::invalid_input, "projector: zero vector");
  return v * v.adjoint() / n2;
}

std::pair<Matrix, Matrix> positive_negative_parts(const HermitianOperator& a) {
  const auto e = eig_hermitian(a);
  const RealVector pos = e.values.cwiseMax(0.0);
  const RealVector neg = (-e.values).cwiseMax(0.0);
  Matrix p = e.vectors * pos.cast<Complex>().asDiagonal() * e.vectors.adjoint();
  Matrix n = e.vectors * neg.cast<Complex>().asDiagonal() * e.vectors.adjoint();
  return {0.5 * (p + p.adjoint()), 0.5 * (n + n.adjoint())};
}

Matrix clip_to_psd(const Matrix& a) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(0.5 * (a + a.adjoint()));
  const RealVector vals = solver.eigenvalues().cwiseMax(0.0);
  Matrix out = solver.eigenvectors() * vals.cast<Complex>().asDiagonal() *
               solver.eigenvectors().adjoint();
  return 0.5 * (out + out.adjoint());
}

Matrix project_to_density(const Matrix& a) {
  Matrix p = clip_to_psd(a);
  const double tr = p.trace().real();
  if (tr <= 0.0) {
    throw Error(ErrorKind::numerical_failure, "project_to_density: no positive spectral weight");
  }
  return p / tr;
}

// ---------------------------------------------------------------------------

namespace {

void require_bipartite(const Matrix& a, Bipartition dims, const char* what) {
  if (dims.first < 1 || dims.second < 1 || a.rows() != dims.total() || a.cols() != dims.total()) {
    throw Error(ErrorKind::dimension_mismatch,
                std::string(what) + ": matrix is " + std::to_string(a.rows()) + "x" +
                    std::to_string(a.cols()) + " but factorization is " +
                    std::to_string(dims.first) + "x" + std::to_string(dims.second));
  }
}

}  // namespace

Matrix partial_trace(const Matrix& a, Bipartition dims, Subsystem side) {
  require_bipartite(a, dims, "partial_trace");
  const Index d1 = dims.first, d2 = dims.second;
  if (side == Subsystem::second) {
    Matrix out = Matrix::Zero(d1, d1);
    for (Index i = 0; i < d1; ++i)
      for (Index j = 0; j < d1; ++j) out(i, j) = a.block(i * d2, j * d2, d2, d2).trace();
    return out;
  }
  Matrix out = Matrix::Zero(d2, d2);
  for (Index i = 0; i < d1; ++i) out += a.block(i * d2, i * d2, d2, d2);
  return out;
}

Matrix partial_transpose(const Matrix& a, Bipartition dims, Subsystem side) {
  require_bipartite(a, dims, "partial_transpose");
  const Index d1 = dims.first, d2 = dims.second;
  Matrix out(a.rows(), a.cols());
  for (Index i = 0; i < d1; ++i)
    for (Index j = 0; j < d1; ++j) {
      if (side == Subsystem::first)
        out.block(i * d2, j * d2, d2, d2) = a.block(j * d2, i * d2, d2, d2);
      else
        out.block(i * d2, j * d2, d2, d2) = a.block(i * d2, j * d2, d2, d2).transpose();
    }
  return out;
}

Matrix swap_operator(Index d) {
  Matrix v = Matrix::Zero(d * d, d * d);
  for (Index a = 0; a < d; ++a)
    for (Index b = 0; b < d; ++b) v(b * d + a, a * d + b) = 1.0;
  return v;
}

// ---------------------------------------------------------------------------

namespace {

// Splits the columns of `block` into eigenspaces of `a` restricted to it.
void refine(const Matrix& a, const Matrix& block, double cluster_tol, std::vector<Matrix>& out) {
  const Matrix reduced = block.adjoint() * a * block;
  const auto e = eig_hermitian(HermitianOperator(0.5 * (reduced + reduced.adjoint()), 1.0));
  const Matrix rotated = block * e.vectors;
  Index start = 0;
  for (Index i = 1; i <= e.values.size(); ++i) {
    if (i == e.values.size() || e.values(i - 1) - e.values(i) > cluster_tol) {
      out.push_back(rotated.middleCols(start, i - start));
      start = i;
    }
  }
}

}  // namespace

SimultaneousDiagonalization simultaneous_diagonalize(std::span<const HermitianOperator> family,
                                                     double tol) {
  SimultaneousDiagonalization result;
  if (family.empty()) throw Error(ErrorKind::invalid_input, "simultaneous_diagonalize: empty family");
  const Index d = family.front().dim();
  double scale = 0.0;
  for (const auto& a : family) {
    if (a.dim() != d) {
      throw Error(ErrorKind::dimension_mismatch, "simultaneous_diagonalize: mixed dimensions");
    }
    scale = std::max(scale, op_norm(a.matrix()));
  }
  for (std::size_t i = 0; i < family.size(); ++i)
    for (std::size_t j = i + 1; j < family.size(); ++j) {
      const double c = op_norm(commutator(family[i].matrix(), family[j].matrix()));
      if (c > result.max_commutator) {
        result.max_commutator = c;
        result.worst_pair = {i, j};
      }
    }
  if (result.max_commutator > tol * std::max(scale, 1e-300)) return result;

  const double cluster_tol = 1e-9 * std::max(scale, 1.0);
  std::vector<Matrix> blocks{identity(d)};
  for (const auto& a : family) {
    std::vector<Matrix> next;
    for (const auto& b : blocks) refine(a.matrix(), b, cluster_tol, next);
    blocks = std::move(next);
  }
  // Degenerate joint eigenspaces: one more pass with a fixed generic
  // combination removes rotation error accumulated during refinement.
  Matrix generic = Matrix::Zero(d, d);
  for (std::size_t i = 0; i < family.size(); ++i)
    generic += (1.0 + 0.6180339887498949 * static_cast<double>(i)) * family[i].matrix();
  Matrix basis(d, d);
  Index col = 0;
  for (const auto& b : blocks) {
    if (b.cols() > 1) {
      std::vector<Matrix> parts;
      refine(generic, b, 0.0, parts);
      for (const auto& p : parts) {
        basis.middleCols(col, p.cols()) = p;
        col += p.cols();
      }
    } else {
      basis.col(col++) = b.col(0);
    }
  }

  // column order: by position of the largest-magnitude component, so an
  // already diagonal family returns the identity
  std::vector<Index> order(static_cast<std::size_t>(d)), lead(static_cast<std::size_t>(d));
  for (Index k = 0; k < d; ++k) {
    order[static_cast<std::size_t>(k)] = k;
    basis.col(k).cwiseAbs().maxCoeff(&lead[static_cast<std::size_t>(k)]);
  }
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
    return lead[static_cast<std::size_t>(a)] < lead[static_cast<std::size_t>(b)];
  });
  result.commuting = true;
  result.basis.resize(d, d);
  for (Index k = 0; k < d; ++k) result.basis.col(k) = basis.col(order[static_cast<std::size_t>(k)]);
  for (const auto& a : family) {
    Matrix rotated = result.basis.adjoint() * a.matrix() * result.basis;
    rotated.diagonal().setZero();
    result.offdiag_residual = std::max(result.offdiag_residual, rotated.norm());
  }
  return result;
}

// ---------------------------------------------------------------------------

Vector vec(const Matrix& x) { return Eigen::Map<const Vector>(x.data(), x.size()); }

Matrix unvec(const Vector& v, Index rows, Index cols) {
  if (v.size() != rows * cols) {
    throw Error(ErrorKind::dimension_mismatch, "unvec: size does not match requested shape");
  }
  return Eigen::Map<const Matrix>(v.data(), rows, cols);
}

Matrix apply_superop(const Matrix& superop, const Matrix& x) {
  if (superop.cols() != x.size()) {
    throw Error(ErrorKind::dimension_mismatch, "apply_superop: operand dimension mismatch");
  }
  const auto d_out = static_cast<Index>(std::llround(std::sqrt(static_cast<double>(superop.rows()))));
  return unvec(superop * vec(x), d_out, d_out);
}

}  // namespace broadcastlab
