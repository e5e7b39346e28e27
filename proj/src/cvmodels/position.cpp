#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "broadcastlab/cvmodels.hpp"

namespace broadcastlab {

RealVector hermite_functions(double x, Index n) {
  RealVector h = RealVector::Zero(n);
  if (std::abs(x) > 38.0) return h;
  h(0) = std::pow(std::numbers::pi, -0.25) * std::exp(-0.5 * x * x);
  if (n > 1) h(1) = std::sqrt(2.0) * x * h(0);
  for (Index m = 1; m + 1 < n; ++m) {
    const double md = static_cast<double>(m);
    h(m + 1) = std::sqrt(2.0 / (md + 1.0)) * x * h(m) - std::sqrt(md / (md + 1.0)) * h(m - 1);
  }
  return h;
}

namespace {

struct Estimate {
  Eigen::MatrixXd kronrod;
  double error;
};

Estimate g7k15(double lo, double hi, Index n) {
  using kronrod = boost::math::quadrature::gauss_kronrod<double, 15>;
  using gauss = boost::math::quadrature::gauss<double, 7>;
  const auto& x = kronrod::abscissa();
  const auto& wk = kronrod::weights();
  const auto& wg = gauss::weights();
  const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
  Eigen::MatrixXd k = Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (int sign : {1, -1}) {
      if (i == 0 && sign < 0) continue;
      const RealVector h = hermite_functions(mid + sign * half * x[i], n);
      const Eigen::MatrixXd outer = h * h.transpose();
      k += wk[i] * outer;
      if (i % 2 == 0) g += wg[i / 2] * outer;
    }
  }
  k *= half;
  g *= half;
  return {k, (k - g).cwiseAbs().maxCoeff()};
}

}  // namespace

Matrix interval_effect(double lo, double hi, Index levels, double tol) {
  if (!(lo < hi)) throw Error(ErrorKind::invalid_input, "interval_effect: need lo < hi");
  if (levels < 1) throw Error(ErrorKind::invalid_input, "interval_effect: levels must be positive");
  // Beyond the classical turning point the Hermite functions decay like a
  // Gaussian; 15 units past it they are far below double precision.
  const double reach = std::sqrt(2.0 * static_cast<double>(levels) + 1.0) + 15.0;
  lo = std::max(lo, -reach);
  hi = std::min(hi, reach);
  if (!(lo < hi)) return Matrix::Zero(levels, levels);

  const double total = hi - lo;
  Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(levels, levels);
  struct Piece {
    double lo, hi;
    int depth;
  };
  std::vector<Piece> stack{{lo, hi, 0}};
  while (!stack.empty()) {
    const Piece p = stack.back();
    stack.pop_back();
    Estimate e = g7k15(p.lo, p.hi, levels);
    const double allowed = std::max(tol * (p.hi - p.lo) / total, 1e-16);
    if (e.error <= allowed) {
      sum += e.kronrod;
      continue;
    }
    if (p.depth >= 40) {
      throw Error(ErrorKind::numerical_failure,
                  "interval_effect: quadrature did not converge on [" + std::to_string(p.lo) + ", " +
                      std::to_string(p.hi) + "]");
    }
    const double mid = 0.5 * (p.lo + p.hi);
    stack.push_back({mid, p.hi, p.depth + 1});
    stack.push_back({p.lo, mid, p.depth + 1});
  }
  const Eigen::MatrixXd sym = 0.5 * (sum + sum.transpose());
  return sym.cast<Complex>();
}

BinnedPosition binned_position_pvm(double a, double b, Index n_bins, FockTruncation trunc, double tol) {
  if (!(a < b)) throw Error(ErrorKind::invalid_input, "binned_position_pvm: need a < b");
  if (n_bins < 1) throw Error(ErrorKind::invalid_input, "binned_position_pvm: need at least one bin");
  const Index n = trunc.levels;
  BinnedPosition out;
  Matrix sum = Matrix::Zero(n, n);
  const double width = (b - a) / static_cast<double>(n_bins);
  for (Index i = 0; i < n_bins; ++i) {
    const double lo = a + width * static_cast<double>(i);
    const double hi = i + 1 == n_bins ? b : lo + width;
    out.bins.push_back(interval_effect(lo, hi, n, tol));
    sum += out.bins.back();
  }
  out.complement = identity(n) - sum;
  return out;
}

namespace {

// Jacobi sweeps maximizing Σ_k Σ_i (UᵀA_kU)_ii² for real symmetric A_k.
Eigen::MatrixXd joint_diagonalize(std::vector<Eigen::MatrixXd> a, Eigen::MatrixXd u) {
  const Index n = u.rows();
  for (auto& m : a) m = u.transpose() * m * u;
  for (int sweep = 0; sweep < 100; ++sweep) {
    double largest = 0.0;
    for (Index p = 0; p < n; ++p)
      for (Index q = p + 1; q < n; ++q) {
        Eigen::Matrix2d g = Eigen::Matrix2d::Zero();
        for (const auto& m : a) {
          const Eigen::Vector2d h(m(p, p) - m(q, q), 2.0 * m(p, q));
          g += h * h.transpose();
        }
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(g);
        Eigen::Vector2d v = es.eigenvectors().col(1);
        if (v(0) < 0.0) v = -v;
        // v = (cos 2θ, sin 2θ)
        const double c = std::sqrt(0.5 * (1.0 + v(0)));
        const double s = v(1) / (2.0 * c);
        if (std::abs(s) < 1e-15) continue;
        largest = std::max(largest, std::abs(s));
        for (auto& m : a) {
          const Eigen::VectorXd mp = m.col(p), mq = m.col(q);
          m.col(p) = c * mp + s * mq;
          m.col(q) = -s * mp + c * mq;
          const Eigen::RowVectorXd rp = m.row(p), rq = m.row(q);
          m.row(p) = c * rp + s * rq;
          m.row(q) = -s * rp + c * rq;
        }
        const Eigen::VectorXd up = u.col(p), uq = u.col(q);
        u.col(p) = c * up + s * uq;
        u.col(q) = -s * up + c * uq;
      }
    if (largest < 1e-12) break;
  }
  return u;
}

}  // namespace

RepairedPvm repair_to_pvm(const std::vector<Matrix>& effects) {
  if (effects.empty()) throw Error(ErrorKind::invalid_input, "repair_to_pvm: no effects");
  const Index n = effects.front().rows();
  RepairedPvm out;
  Matrix generic = Matrix::Zero(n, n);
  bool real = true;
  for (std::size_t i = 0; i < effects.size(); ++i) {
    const double weight = 1.0 + static_cast<double>(i) + std::fmod(static_cast<double>(i) * std::numbers::phi, 1.0);
    generic += weight * effects[i];
    real = real && effects[i].imag().cwiseAbs().maxCoeff() == 0.0;
    for (std::size_t j = 0; j < i; ++j)
      out.max_commutator = std::max(out.max_commutator, op_norm(commutator(effects[i], effects[j])));
  }
  auto e = eig_hermitian(HermitianOperator(0.5 * (generic + generic.adjoint())));
  if (real && out.max_commutator > 0.0) {
    // start from the real eigenbasis of the generic combination
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (generic.real() + generic.real().transpose()));
    std::vector<Eigen::MatrixXd> reals;
    for (const auto& m : effects) reals.push_back(m.real());
    e.vectors = joint_diagonalize(std::move(reals), es.eigenvectors()).cast<Complex>();
  }
  out.projections.assign(effects.size(), Matrix::Zero(n, n));
  for (Index c = 0; c < n; ++c) {
    const Vector v = e.vectors.col(c);
    std::size_t best = 0;
    double best_val = -1.0;
    for (std::size_t i = 0; i < effects.size(); ++i) {
      const double val = (v.adjoint() * effects[i] * v)(0, 0).real();
      if (val > best_val) {
        best_val = val;
        best = i;
      }
    }
    out.projections[best] += v * v.adjoint();
  }
  for (std::size_t i = 0; i < effects.size(); ++i)
    out.repair_distance = std::max(out.repair_distance, op_norm(effects[i] - out.projections[i]));
  return out;
}

PositionEmbeddingRow position_embedding(double a, double b, Index n_bins, FockTruncation trunc) {
  const BinnedPosition bp = binned_position_pvm(a, b, n_bins, trunc);
  std::vector<Matrix> effects = bp.bins;
  effects.push_back(bp.complement);
  const RepairedPvm rep = repair_to_pvm(effects);

  std::vector<LabeledProjection> outcomes;
  std::vector<std::vector<std::string>> subsets;
  for (Index i = 0; i < n_bins; ++i) {
    const std::string label = "bin" + std::to_string(i);
    outcomes.push_back({label, rep.projections[static_cast<std::size_t>(i)]});
    subsets.push_back({label});
  }
  outcomes.push_back({"outside", rep.projections.back()});
  const PartitionEmbedding emb = pvm_embed(outcomes, subsets, 1e-9);

  PositionEmbeddingRow row;
  row.n_bins = n_bins;
  row.repair_distance = rep.repair_distance;
  row.max_commutator = rep.max_commutator;
  row.embedded_residual = emb.max_residual();
  for (const auto& e : bp.bins)
    row.original_residual = std::max(row.original_residual, op_norm(emb.channel->heisenberg(e) - e));
  Matrix total = bp.complement;
  for (const auto& e : bp.bins) total += e;
  row.completeness_defect = op_norm(total - identity(trunc.levels));
  return row;
}

}  // namespace broadcastlab
