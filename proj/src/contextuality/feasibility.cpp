#include <algorithm>
#include <cmath>
#include <limits>

#include "broadcastlab/contextuality.hpp"

namespace broadcastlab {

const char* to_string(FeasibilityStatus s) noexcept {
  switch (s) {
    case FeasibilityStatus::feasible: return "feasible";
    case FeasibilityStatus::infeasible_stalled: return "infeasible_stalled";
    case FeasibilityStatus::inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

double WitnessCheck::max() const {
  double m = std::max({psd_violation, ppt_violation, trace_residual});
  for (double r : fixed_residuals) m = std::max(m, r);
  return m;
}

namespace {

// Isometric coordinates for Hermitian D × D matrices: diagonal entries, then
// √2·Re and √2·Im of the strict upper triangle.
Eigen::VectorXd herm_coords(const Matrix& h) {
  const Index n = h.rows();
  Eigen::VectorXd x(n * n);
  Index p = 0;
  for (Index i = 0; i < n; ++i) x(p++) = h(i, i).real();
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j) {
      x(p++) = std::sqrt(2.0) * h(i, j).real();
      x(p++) = std::sqrt(2.0) * h(i, j).imag();
    }
  return x;
}

Matrix herm_from_coords(const Eigen::VectorXd& x, Index n) {
  Matrix h(n, n);
  Index p = 0;
  for (Index i = 0; i < n; ++i) h(i, i) = x(p++);
  const double s = 1.0 / std::sqrt(2.0);
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j) {
      const Complex v(s * x(p), s * x(p + 1));
      p += 2;
      h(i, j) = v;
      h(j, i) = std::conj(v);
    }
  return h;
}

Matrix heisenberg_from_choi(const Matrix& j, Index d, const Matrix& e) {
  return partial_trace(j * kron(identity(d), e), {d, d}, Subsystem::second).transpose();
}

struct AffineSet {
  Eigen::MatrixXd m;
  Eigen::VectorXd b;
  Eigen::MatrixXd pinv;
};

AffineSet build_affine(const FeasibilityProblem& pr) {
  const Index d = pr.dim;
  const Index big = d * d;
  const Index cols = big * big;
  const Index block = d * d;
  const Index rows = block * static_cast<Index>(1 + pr.effects.size());
  AffineSet a;
  a.m.resize(rows, cols);
  for (Index c = 0; c < cols; ++c) {
    Eigen::VectorXd unit = Eigen::VectorXd::Zero(cols);
    unit(c) = 1.0;
    const Matrix j = herm_from_coords(unit, big);
    a.m.col(c).head(block) = herm_coords(partial_trace(j, {d, d}, Subsystem::second));
    for (std::size_t k = 0; k < pr.effects.size(); ++k) {
      const Matrix h = heisenberg_from_choi(j, d, pr.effects[k]);
      a.m.col(c).segment(block * static_cast<Index>(k + 1), block) = herm_coords(0.5 * (h + h.adjoint()));
    }
  }
  a.b.resize(rows);
  a.b.head(block) = herm_coords(identity(d));
  for (std::size_t k = 0; k < pr.effects.size(); ++k)
    a.b.segment(block * static_cast<Index>(k + 1), block) = herm_coords(pr.effects[k]);
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(a.m);
  cod.setThreshold(1e-11);
  a.pinv = cod.pseudoInverse();
  return a;
}

Matrix ppt_project(const Matrix& j, Index d) {
  const Bipartition bp{d, d};
  return partial_transpose(clip_to_psd(partial_transpose(j, bp)), bp);
}

void validate(const FeasibilityProblem& pr) {
  if (pr.dim < 1) throw Error(ErrorKind::invalid_input, "feasibility: dimension must be positive");
  require_within_cap(pr.dim * pr.dim, "check_measurements_feasibility (d²)");
  if (pr.effects.empty()) throw Error(ErrorKind::invalid_input, "feasibility: no effects");
  if (!(pr.tol > 0.0)) throw Error(ErrorKind::invalid_input, "feasibility: tol must be positive");
  if (pr.budget < 1 || pr.stall_window < 1 || pr.history_stride < 1) {
    throw Error(ErrorKind::invalid_input, "feasibility: budget, window and stride must be positive");
  }
  for (std::size_t k = 0; k < pr.effects.size(); ++k) {
    if (pr.effects[k].rows() != pr.dim || pr.effects[k].cols() != pr.dim) {
      throw Error(ErrorKind::dimension_mismatch, "feasibility: effect " + std::to_string(k) + " has wrong dimension");
    }
    Effect(pr.effects[k]);
  }
}

// Measure-prepare form of a Choi matrix whose Kraus operators are all rank
// one; empty when some Kraus operator has rank two or more.
std::optional<MeasurePrepareChannel> rank_one_regrouping(const Matrix& j, Index d, std::string& why) {
  const Matrix jp = clip_to_psd(j);
  const auto e = eig_hermitian(HermitianOperator(jp));
  std::vector<Matrix> ops;
  for (Index c = 0; c < e.values.size(); ++c) {
    if (e.values(c) <= 1e-12) continue;
    Matrix k(d, d);
    for (Index col = 0; col < d; ++col)
      for (Index row = 0; row < d; ++row) k(row, col) = std::sqrt(e.values(c)) * e.vectors(col * d + row, c);
    ops.push_back(std::move(k));
  }
  Matrix s = Matrix::Zero(d, d);
  for (const auto& k : ops) s += k.adjoint() * k;
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (s + s.adjoint()));
  if (es.eigenvalues().minCoeff() <= 0.0) {
    why = "Kraus operators are not trace preserving after cone repair";
    return std::nullopt;
  }
  const Matrix fix = es.eigenvectors() * es.eigenvalues().cwiseSqrt().cwiseInverse().cast<Complex>().asDiagonal() *
                     es.eigenvectors().adjoint();
  std::vector<Effect> effects;
  std::vector<DensityOperator> states;
  for (auto& k : ops) {
    k = k * fix;
    Eigen::JacobiSVD<Matrix> svd(k, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    if (sv.size() > 1 && sv(1) > 1e-6 * sv(0)) {
      why = "a Kraus operator of the witness has rank two or more";
      return std::nullopt;
    }
    const Vector a = svd.matrixU().col(0);
    const Vector b = svd.matrixV().col(0);
    effects.emplace_back(Matrix(sv(0) * sv(0) * b * b.adjoint()), 1e-8);
    states.emplace_back(Matrix(a * a.adjoint()), 1e-8);
  }
  try {
    return MeasurePrepareChannel(DiscretePOVM(std::move(effects), {}, 1e-6), std::move(states));
  } catch (const Error& err) {
    why = err.what();
    return std::nullopt;
  }
}

}  // namespace

WitnessCheck check_witness(const FeasibilityProblem& problem, const Matrix& choi) {
  const Index d = problem.dim;
  if (choi.rows() != d * d || choi.cols() != d * d) {
    throw Error(ErrorKind::dimension_mismatch, "check_witness: Choi matrix has wrong dimension");
  }
  const Matrix j = 0.5 * (choi + choi.adjoint());
  WitnessCheck w;
  w.psd_violation = std::max(0.0, -min_eigenvalue(j));
  w.ppt_violation = std::max(0.0, -min_eigenvalue(partial_transpose(j, {d, d})));
  w.trace_residual = (partial_trace(j, {d, d}, Subsystem::second) - identity(d)).norm();
  for (const auto& e : problem.effects) w.fixed_residuals.push_back((heisenberg_from_choi(j, d, e) - e).norm());
  return w;
}

MeasSetVerdict check_measurements_feasibility(const FeasibilityProblem& problem) {
  validate(problem);
  const Index d = problem.dim;
  const AffineSet aff = build_affine(problem);
  auto affine_project = [&](const Eigen::VectorXd& x) -> Eigen::VectorXd {
    return x - aff.pinv * (aff.m * x - aff.b);
  };

  const Index big = d * d;
  Eigen::VectorXd x = herm_coords(identity(big) / static_cast<double>(d));
  Eigen::VectorXd p_psd = Eigen::VectorXd::Zero(x.size());
  Eigen::VectorXd p_ppt = Eigen::VectorXd::Zero(x.size());

  MeasSetVerdict v;
  v.notes.push_back(kPptNote);
  std::vector<double> best_at;
  best_at.reserve(problem.budget);
  double best = std::numeric_limits<double>::infinity();
  bool stalled = false;
  for (std::size_t cycle = 1; cycle <= problem.budget; ++cycle) {
    Eigen::VectorXd y = herm_coords(clip_to_psd(herm_from_coords(x + p_psd, big)));
    p_psd = x + p_psd - y;
    x = y;
    y = herm_coords(ppt_project(herm_from_coords(x + p_ppt, big), d));
    p_ppt = x + p_ppt - y;
    x = affine_project(y);

    const Matrix j = herm_from_coords(x, big);
    const double r = std::max({std::max(0.0, -min_eigenvalue(j)),
                               std::max(0.0, -min_eigenvalue(partial_transpose(j, {d, d}))),
                               (aff.m * x - aff.b).norm()});
    best = std::min(best, r);
    best_at.push_back(best);
    v.cycles = cycle;
    v.final_residual = r;
    if (cycle % problem.history_stride == 0) v.residuals.push_back(r);
    if (r <= problem.tol) {
      v.status = FeasibilityStatus::feasible;
      break;
    }
    if (cycle > problem.stall_window && best > 10.0 * problem.tol) {
      const double then = best_at[cycle - 1 - problem.stall_window];
      if (then - best < 0.01 * then) {
        stalled = true;
        break;
      }
    }
  }
  if (v.residuals.empty() || v.cycles % problem.history_stride != 0) v.residuals.push_back(v.final_residual);
  v.best_residual = best;
  v.choi = herm_from_coords(x, big);

  if (v.status == FeasibilityStatus::feasible) {
    const auto check = check_witness(problem, v.choi);
    if (check.max() > 10.0 * problem.tol) {
      v.status = FeasibilityStatus::inconclusive;
      v.notes.push_back("independent re-check of the Choi matrix failed");
    } else if (d <= 3) {
      std::string why;
      v.witness = rank_one_regrouping(v.choi, d, why);
      if (!v.witness) v.notes.push_back("measure-prepare form not extracted: " + why);
    } else {
      v.notes.push_back("witness is PPT only; separability is not certified for this dimension");
    }
  } else if (stalled) {
    v.status = FeasibilityStatus::infeasible_stalled;
    v.notes.push_back("residual plateaued above 10·tol; this is not an infeasibility certificate");
  } else {
    v.status = FeasibilityStatus::inconclusive;
    v.notes.push_back("iteration budget exhausted before convergence or plateau");
  }
  return v;
}

}  // namespace broadcastlab
