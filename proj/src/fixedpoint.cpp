#include "broadcastlab/fixedpoint.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numeric>

#include "broadcastlab/random.hpp"

namespace broadcastlab {

namespace {

Eigen::VectorXd realify(const Matrix& h) {
  const Index n = h.size();
  Eigen::VectorXd out(2 * n);
  const Vector v = vec(h);
  out.head(n) = v.real();
  out.tail(n) = v.imag();
  return out;
}

Matrix unrealify(const Eigen::VectorXd& r, Index d) {
  const Index n = d * d;
  Vector v(n);
  for (Index i = 0; i < n; ++i) v(i) = Complex(r(i), r(n + i));
  Matrix m = unvec(v, d);
  return 0.5 * (m + m.adjoint());
}

struct Svd {
  Matrix u, v;
  RealVector s;  // descending
};

// BDCSVD in Eigen 3.4.0 occasionally returns wrong factors (seen on exactly
// idempotent maps with repeated singular values). Check the factorization and
// redo it with Jacobi when it does not reproduce the input.
Svd full_svd(const Matrix& a) {
  Eigen::BDCSVD<Matrix> fast(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const double scale = std::max(1.0, a.norm());
  const double err = (a * fast.matrixV() - fast.matrixU() * fast.singularValues().cast<Complex>().asDiagonal()).norm();
  if (err <= 1e-12 * scale * std::sqrt(static_cast<double>(a.rows()))) {
    return {fast.matrixU(), fast.matrixV(), fast.singularValues()};
  }
  Eigen::JacobiSVD<Matrix> slow(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return {slow.matrixU(), slow.matrixV(), slow.singularValues()};
}

}  // namespace

RealVector FixedPointSpace::coordinates(const Matrix& a) const {
  RealVector c(static_cast<Index>(basis_.size()));
  for (std::size_t k = 0; k < basis_.size(); ++k)
    c(static_cast<Index>(k)) = (basis_[k].adjoint().cwiseProduct(a.transpose())).sum().real();
  return c;
}

Matrix FixedPointSpace::from_coordinates(const RealVector& c) const {
  Matrix out = Matrix::Zero(d_, d_);
  for (std::size_t k = 0; k < basis_.size(); ++k) out += c(static_cast<Index>(k)) * basis_[k];
  return out;
}

Matrix FixedPointSpace::project(const Matrix& a) const { return unvec(projector_ * vec(a), d_); }

double FixedPointSpace::fixed_residual(const Matrix& a) const {
  const Vector v = vec(a);
  return (superop_ * v - v).norm();
}

FixedPointSpace fixed_space(const Matrix& superop, Index d, double tol) {
  require_within_cap(d, "fixed_space");
  if (superop.rows() != d * d || superop.cols() != d * d) {
    throw Error(ErrorKind::dimension_mismatch, "fixed_space: superoperator must be d² × d²");
  }
  if (!(tol > 0.0)) throw Error(ErrorKind::invalid_input, "fixed_space: tol must be positive");
  const Index n = d * d;
  const Matrix shifted = superop - Matrix::Identity(n, n);
  const Svd svd = full_svd(shifted);
  const RealVector& s = svd.s;

  FixedPointSpace fs;
  fs.d_ = d;
  fs.tol_ = tol;
  fs.superop_ = superop;
  fs.threshold_ = tol * std::max(1.0, s(0));
  fs.ladder_.assign(s.data(), s.data() + s.size());
  std::reverse(fs.ladder_.begin(), fs.ladder_.end());

  Index m = 0;
  for (Index i = 0; i < n; ++i) {
    const double v = s(i);
    if (v > fs.threshold_ * 1e-2 && v < fs.threshold_ * 1e2) throw NoSpectralGapError(fs.ladder_, fs.threshold_);
    if (v <= fs.threshold_) ++m;
  }

  fs.projector_ = Matrix::Zero(n, n);
  if (m == 0) return fs;

  const Matrix r = svd.v.rightCols(m);
  const Matrix l = svd.u.rightCols(m);
  const Matrix overlap = l.adjoint() * r;
  Eigen::FullPivLU<Matrix> lu(overlap);
  if (!lu.isInvertible()) {
    throw Error(ErrorKind::numerical_failure, "fixed_space: eigenvalue 1 is not semisimple");
  }
  fs.projector_ = r * lu.solve(l.adjoint());

  // The fixed space of a Hermiticity-preserving map is closed under †, so
  // Hermitian and anti-Hermitian parts of the null vectors span it over ℝ.
  Eigen::MatrixXd cand(2 * n, 2 * m);
  for (Index k = 0; k < m; ++k) {
    const Matrix x = unvec(r.col(k), d);
    cand.col(2 * k) = realify(0.5 * (x + x.adjoint()));
    cand.col(2 * k + 1) = realify(Complex(0.0, -0.5) * (x - x.adjoint()));
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> rsvd(cand, Eigen::ComputeThinU);
  const auto& rs = rsvd.singularValues();
  if (rs(m - 1) < 1e-6 * rs(0) || rs(m) > 1e-6 * rs(0)) {
    throw Error(ErrorKind::numerical_failure, "fixed_space: fixed space is not closed under adjoint");
  }
  for (Index k = 0; k < m; ++k) fs.basis_.push_back(unrealify(rsvd.matrixU().col(k), d));

  for (const auto& b : fs.basis_) fs.max_residual_ = std::max(fs.max_residual_, fs.fixed_residual(b));

  const Matrix id = identity(d);
  if (fs.fixed_residual(id) <= 1e-10 * std::sqrt(static_cast<double>(d))) {
    Matrix rest = id;
    for (const auto& b : fs.basis_) rest -= (b.adjoint().cwiseProduct(id.transpose())).sum() * b;
    if (rest.norm() > 1e-8 * std::sqrt(static_cast<double>(d))) {
      throw Error(ErrorKind::numerical_failure, "fixed_space: identity is fixed but outside the computed basis");
    }
  }
  return fs;
}

FixedPointSpace fixed_space(const Channel& ch, double tol) {
  if (d_in(ch) != d_out(ch)) {
    throw Error(ErrorKind::dimension_mismatch, "fixed_space: channel must map L(H) to L(H)");
  }
  require_within_cap(d_in(ch), "fixed_space");
  return fixed_space(heisenberg_superop(ch), d_in(ch), tol);
}

// ---------------------------------------------------------------------------

CesaroResult cesaro_apply(const Matrix& superop, const Matrix& a, std::size_t n_terms,
                          double early_stop_tol) {
  if (n_terms < 1) throw Error(ErrorKind::invalid_input, "cesaro_apply: n_terms must be ≥ 1");
  const Index d = a.rows();
  if (a.cols() != d || superop.cols() != d * d || superop.rows() != d * d) {
    throw Error(ErrorKind::dimension_mismatch, "cesaro_apply: operand does not match superoperator");
  }
  Vector cur = vec(a);
  Vector sum = cur;
  Vector avg = cur;
  CesaroResult res;
  res.terms = 1;
  for (std::size_t n = 2; n <= n_terms; ++n) {
    cur = superop * cur;
    sum += cur;
    Vector next = sum / static_cast<double>(n);
    res.step_change = (next - avg).norm();
    avg = std::move(next);
    res.terms = n;
    if (res.step_change <= early_stop_tol) {
      res.converged = true;
      break;
    }
  }
  res.value = unvec(avg, d);
  res.fixed_residual = (superop * avg - avg).norm();
  return res;
}

CesaroResult cesaro_apply(const Channel& ch, const Matrix& a, std::size_t n_terms,
                          double early_stop_tol) {
  return cesaro_apply(heisenberg_superop(ch), a, n_terms, early_stop_tol);
}

// ---------------------------------------------------------------------------

BroadcastingAlgebra BroadcastingAlgebra::from_eb(const MeasurePrepareChannel& eb, double tol) {
  auto lift = std::make_shared<SymmetricChannel>(symmetric_lift(eb));
  FixedPointSpace space = fixed_space(Channel(eb), tol);
  return BroadcastingAlgebra(std::move(space), [lift](const Matrix& a, const Matrix& b) {
    return lift->heisenberg_product(a, b);
  });
}

BroadcastingAlgebra BroadcastingAlgebra::from_symmetric(const KrausChannel& theta_sym, double tol) {
  const Index d = theta_sym.d_in();
  if (theta_sym.d_out() != d * d) {
    throw Error(ErrorKind::dimension_mismatch, "BroadcastingAlgebra: channel must map C^d to C^d ⊗ C^d");
  }
  require_within_cap(d, "BroadcastingAlgebra");
  auto theta = std::make_shared<KrausChannel>(theta_sym);
  const Matrix id = identity(d);
  Matrix marginal(d * d, d * d);
  Matrix unit = Matrix::Zero(d, d);
  for (Index l = 0; l < d; ++l)
    for (Index k = 0; k < d; ++k) {
      unit(k, l) = 1.0;
      marginal.col(l * d + k) = vec(theta->heisenberg(kron(unit, id)));
      unit(k, l) = 0.0;
    }
  FixedPointSpace space = fixed_space(marginal, d, tol);
  return BroadcastingAlgebra(std::move(space), [theta](const Matrix& a, const Matrix& b) {
    return theta->heisenberg(kron(a, b));
  });
}

BroadcastingAlgebra::BroadcastingAlgebra(FixedPointSpace space, ProductMap product)
    : space_(std::move(space)), product_map_(std::move(product)) {
  const Matrix& p = space_.projector();
  idempotency_ = p.size() ? op_norm(p * p - p) : 0.0;

  const Index d = space_.dim();
  Matrix choi(d * d, d * d);
  Matrix unit = Matrix::Zero(d, d);
  for (Index k = 0; k < d; ++k)
    for (Index l = 0; l < d; ++l) {
      unit(k, l) = 1.0;
      choi.block(k * d, l * d, d, d) = space_.project(unit);
      unit(k, l) = 0.0;
    }
  cp_min_eig_ = min_eigenvalue(choi);
  build_table();
}

Matrix BroadcastingAlgebra::raw_product(const Matrix& a, const Matrix& b) const {
  return space_.project(product_map_(a, b));
}

void BroadcastingAlgebra::build_table() {
  const auto& basis = space_.basis();
  const std::size_t m = basis.size();
  table_.assign(m, std::vector<RealVector>(m));
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t b = 0; b < m; ++b)
      table_[a][b] = space_.coordinates(raw_product(basis[a], basis[b]));

  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t b = 0; b < m; ++b)
      commutativity_ = std::max(commutativity_, (table_[a][b] - table_[b][a]).norm());

  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t b = 0; b < m; ++b)
      for (std::size_t c = 0; c < m; ++c) {
        RealVector left = RealVector::Zero(static_cast<Index>(m));
        RealVector right = RealVector::Zero(static_cast<Index>(m));
        for (std::size_t e = 0; e < m; ++e) {
          left += table_[a][b](static_cast<Index>(e)) * table_[e][c];
          right += table_[b][c](static_cast<Index>(e)) * table_[a][e];
        }
        associativity_ = std::max(associativity_, (left - right).norm());
      }

  if (m > 0) {
    const RealVector one = space_.coordinates(identity(space_.dim()));
    for (std::size_t a = 0; a < m; ++a) {
      RealVector ea = RealVector::Zero(static_cast<Index>(m));
      ea(static_cast<Index>(a)) = 1.0;
      unit_ = std::max(unit_, (product_coordinates(one, ea) - ea).norm());
    }
  }
}

RealVector BroadcastingAlgebra::product_coordinates(const RealVector& x, const RealVector& y) const {
  const Index m = static_cast<Index>(table_.size());
  RealVector out = RealVector::Zero(m);
  for (Index a = 0; a < m; ++a) {
    if (x(a) == 0.0) continue;
    for (Index b = 0; b < m; ++b) out += x(a) * y(b) * table_[a][b];
  }
  return out;
}

Matrix broadcasting_product(const BroadcastingAlgebra& alg, const Matrix& a, const Matrix& b,
                            double tol) {
  const auto& sp = alg.space();
  for (const Matrix* x : {&a, &b}) {
    if (x->rows() != sp.dim() || x->cols() != sp.dim()) {
      throw Error(ErrorKind::dimension_mismatch, "broadcasting_product: operand dimension mismatch");
    }
    const double r = sp.fixed_residual(*x);
    if (r > tol * std::max(1.0, x->norm())) {
      throw Error(ErrorKind::invariant_violation,
                  "broadcasting_product: operand lies outside the fixed space (residual " +
                      std::to_string(r) + ")");
    }
  }
  return alg.raw_product(sp.project(a), sp.project(b));
}

double choi_effros_compare(const BroadcastingAlgebra& alg, const Matrix& a, const Matrix& b) {
  const auto& sp = alg.space();
  return (sp.project(alg.joint(a, b)) - sp.project(a * b)).norm();
}

namespace {

Eigen::MatrixXd multiplication_matrix(const BroadcastingAlgebra& alg, const RealVector& x) {
  const Index m = static_cast<Index>(alg.product_table().size());
  Eigen::MatrixXd l(m, m);
  for (Index a = 0; a < m; ++a) {
    RealVector ea = RealVector::Zero(m);
    ea(a) = 1.0;
    l.col(a) = alg.product_coordinates(x, ea);
  }
  return l;
}

}  // namespace

RealVector product_spectrum(const BroadcastingAlgebra& alg, const Matrix& x) {
  const Eigen::MatrixXd l = multiplication_matrix(alg, alg.space().coordinates(x));
  if (l.size() == 0) return RealVector();
  Eigen::EigenSolver<Eigen::MatrixXd> es(l, false);
  RealVector out = es.eigenvalues().real();
  std::sort(out.data(), out.data() + out.size(), std::greater<>());
  return out;
}

// ---------------------------------------------------------------------------

Matrix AtomicDecomposition::reconstruct(const Matrix& a) const {
  Matrix out = Matrix::Zero(a.rows(), a.cols());
  for (std::size_t i = 0; i < povm.size(); ++i)
    out += (states[i].cwiseProduct(a.transpose())).sum() * povm[i];
  return out;
}

MeasurePrepareChannel AtomicDecomposition::channel() const {
  std::vector<Effect> effects;
  std::vector<DensityOperator> dens;
  for (const auto& g : povm) effects.emplace_back(g, 1e-8);
  for (const auto& s : states) dens.emplace_back(s, 1e-8);
  return MeasurePrepareChannel(DiscretePOVM(std::move(effects), {}, 1e-8), std::move(dens));
}

AtomicDecomposition atomic_decomposition(const BroadcastingAlgebra& alg, std::uint64_t seed, double tol) {
  const auto& sp = alg.space();
  const Index m = static_cast<Index>(sp.dimension());
  if (m == 0) throw Error(ErrorKind::invalid_input, "atomic_decomposition: empty fixed space");
  Rng rng(seed);
  AtomicDecomposition out;

  Eigen::MatrixXd vectors;
  RealVector values;
  for (int draw = 1; draw <= defaults::atom_redraws; ++draw) {
    out.draws = draw;
    RealVector x(m);
    for (Index k = 0; k < m; ++k) x(k) = rng.normal();
    const Eigen::MatrixXd l = multiplication_matrix(alg, x);
    Eigen::EigenSolver<Eigen::MatrixXd> es(l);
    if (es.info() != Eigen::Success) continue;
    const Eigen::VectorXcd ev = es.eigenvalues();
    const double scale = std::max(1.0, ev.cwiseAbs().maxCoeff());
    if (ev.imag().cwiseAbs().maxCoeff() > tol * scale) continue;

    std::vector<Index> order(static_cast<std::size_t>(m));
    std::iota(order.begin(), order.end(), Index{0});
    std::sort(order.begin(), order.end(), [&](Index i, Index j) { return ev(i).real() > ev(j).real(); });
    double gap = m > 1 ? std::numeric_limits<double>::infinity() : scale;
    for (Index i = 1; i < m; ++i)
      gap = std::min(gap, ev(order[i - 1]).real() - ev(order[i]).real());
    if (gap <= 1e-6 * scale) continue;

    out.min_gap = gap;
    values.resize(m);
    vectors.resize(m, m);
    for (Index i = 0; i < m; ++i) {
      Eigen::VectorXcd v = es.eigenvectors().col(order[i]);
      Index arg = 0;
      v.cwiseAbs().maxCoeff(&arg);
      v *= std::conj(v(arg)) / std::abs(v(arg));
      vectors.col(i) = v.real();
      values(i) = ev(order[i]).real();
    }
    break;
  }
  if (vectors.size() == 0) {
    throw Error(ErrorKind::numerical_failure,
                "atomic_decomposition: degenerate product spectrum after " +
                    std::to_string(defaults::atom_redraws) + " draws");
  }

  // Scale each eigenvector g so that g∙g = g.
  Eigen::MatrixXd coords(m, m);
  for (Index i = 0; i < m; ++i) {
    const RealVector g = vectors.col(i);
    const RealVector gg = alg.product_coordinates(g, g);
    const double c = gg.dot(g) / g.dot(g);
    if (std::abs(c) < 1e-12) throw Error(ErrorKind::numerical_failure, "atomic_decomposition: nilpotent element");
    coords.col(i) = g / c;
  }
  const Eigen::MatrixXd characters = coords.inverse();  // row i: φ_i on the basis

  const Matrix padj = sp.projector().adjoint();
  for (Index i = 0; i < m; ++i) {
    out.povm.push_back(sp.from_coordinates(coords.col(i)));
    const Matrix y = sp.from_coordinates(characters.row(i).transpose());
    Matrix raw = unvec(padj * vec(y), sp.dim());
    raw = 0.5 * (raw + raw.adjoint());
    Matrix s = project_to_density(raw);
    out.state_repair.push_back((raw - s).norm());
    out.states.push_back(std::move(s));
  }

  Matrix sum = Matrix::Zero(sp.dim(), sp.dim());
  for (Index i = 0; i < m; ++i) {
    sum += out.povm[i];
    const RealVector g = coords.col(i);
    out.idempotence_residual = std::max(out.idempotence_residual, (alg.product_coordinates(g, g) - g).norm());
    for (Index j = 0; j < m; ++j) {
      const double t = (out.states[i].cwiseProduct(out.povm[j].transpose())).sum().real();
      out.biorthogonality_residual = std::max(out.biorthogonality_residual, std::abs(t - (i == j ? 1.0 : 0.0)));
    }
  }
  out.completeness_residual = op_norm(sum - identity(sp.dim()));
  return out;
}

}  // namespace broadcastlab
