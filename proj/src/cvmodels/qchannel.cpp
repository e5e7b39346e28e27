#include <algorithm>
#include <cmath>
#include <numbers>

#include "broadcastlab/cvmodels.hpp"
#include "broadcastlab/random.hpp"

namespace broadcastlab {

FockTruncation::FockTruncation(Index n) : levels(n) {
  if (n < 2) throw Error(ErrorKind::invalid_input, "FockTruncation: at least two levels required");
}

double qchannel_element(Index m, Index n, Index j, Index k) {
  if (m < 0 || n < 0 || j < 0 || k < 0) throw Error(ErrorKind::invalid_input, "qchannel_element: negative index");
  if (m + k != n + j) return 0.0;
  const auto p = static_cast<double>(m + k);
  const double lg = std::lgamma(p + 1.0) - (p + 1.0) * std::numbers::ln2 -
                    0.5 * (std::lgamma(m + 1.0) + std::lgamma(n + 1.0) + std::lgamma(j + 1.0) +
                           std::lgamma(k + 1.0));
  return std::exp(lg);
}

namespace {

struct LaguerreRule {
  RealVector nodes;
  RealVector weights;
};

// Golub–Welsch for the weight e^{−t} on [0, ∞).
const LaguerreRule& laguerre_rule() {
  static const LaguerreRule rule = [] {
    constexpr Index n = 48;
    Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(n, n);
    for (Index i = 0; i < n; ++i) {
      jac(i, i) = 2.0 * static_cast<double>(i) + 1.0;
      if (i + 1 < n) jac(i, i + 1) = jac(i + 1, i) = static_cast<double>(i + 1);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jac, Eigen::EigenvaluesOnly);
    LaguerreRule r;
    r.nodes = es.eigenvalues();
    r.weights.resize(n);
    // Eigenvector weights are only accurate in absolute terms; the far nodes
    // carry tiny weights that multiply large powers of t. Newton-polish each
    // node and take w = t / ((n+1) L_{n+1}(t))².
    auto laguerre = [](double t, Index deg, double& prev) {
      double l0 = 1.0, l1 = 1.0 - t;
      for (Index k = 1; k < deg; ++k) {
        const double kd = static_cast<double>(k);
        const double l2 = ((2.0 * kd + 1.0 - t) * l1 - kd * l0) / (kd + 1.0);
        l0 = l1;
        l1 = l2;
      }
      prev = l0;
      return l1;
    };
    for (Index i = 0; i < n; ++i) {
      double t = r.nodes(i), prev = 0.0;
      for (int it = 0; it < 6; ++it) {
        const double ln = laguerre(t, n, prev);
        const double dln = static_cast<double>(n) * (ln - prev) / t;
        t -= ln / dln;
      }
      const double next = ((2.0 * n + 1.0 - t) * laguerre(t, n, prev) - n * prev) / (n + 1.0);
      r.nodes(i) = t;
      r.weights(i) = t / std::pow((n + 1.0) * next, 2);
    }
    return r;
  }();
  return rule;
}

}  // namespace

double qchannel_element_quadrature(Index m, Index n, Index j, Index k) {
  // (1/π) ∫ ⟨m|z⟩⟨z|n⟩⟨z|j⟩⟨k|z⟩ d²z with z = r e^{iθ}, t = 2r².
  const auto& rule = laguerre_rule();
  constexpr int angles = 96;
  const double s = static_cast<double>(m + n + j + k);
  const double q = static_cast<double>(m - n - j + k);
  const double norm = 0.5 * (std::lgamma(m + 1.0) + std::lgamma(n + 1.0) + std::lgamma(j + 1.0) + std::lgamma(k + 1.0));
  Complex total = 0.0;
  for (Index a = 0; a < rule.nodes.size(); ++a) {
    const double t = rule.nodes(a);
    const double radial = rule.weights(a) * std::exp(0.5 * s * std::log(0.5 * t) - norm) / 4.0;
    for (int b = 0; b < angles; ++b) {
      const double theta = 2.0 * std::numbers::pi * b / angles;
      total += radial * (2.0 * std::numbers::pi / angles) * std::polar(1.0, q * theta);
    }
  }
  return total.real() / std::numbers::pi;
}

QChannel::QChannel(FockTruncation trunc) : n_(trunc.levels) {
  if (n_ > defaults::qchannel_max_levels) {
    throw Error(ErrorKind::cap_exceeded, "QChannel: " + std::to_string(n_) + " levels exceed the limit of " +
                                             std::to_string(defaults::qchannel_max_levels));
  }
  for (Index q = -(n_ - 1); q <= n_ - 1; ++q) {
    const Index len = n_ - std::abs(q);
    const Index om = std::max<Index>(q, 0), on = std::max<Index>(-q, 0);
    Eigen::MatrixXd b(len, len);
    for (Index i = 0; i < len; ++i)
      for (Index c = 0; c < len; ++c) b(i, c) = qchannel_element(i + om, i + on, c + om, c + on);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (b + b.transpose()));
    block_values_.push_back(es.eigenvalues());
    block_vectors_.push_back(es.eigenvectors());
    blocks_.push_back(std::move(b));
  }
  const Eigen::MatrixXd& diag = block(0);
  for (Index j = 0; j < n_; ++j) {
    defects_.push_back(1.0 - diag.col(j).sum());
    defect_bound_ = std::max(defect_bound_, defects_.back());
  }
}

QChannel qchannel_build(FockTruncation trunc) { return QChannel(trunc); }

Matrix QChannel::apply(const Matrix& a) const {
  if (a.rows() != n_ || a.cols() != n_) throw Error(ErrorKind::dimension_mismatch, "QChannel::apply");
  Matrix out = Matrix::Zero(n_, n_);
  for (Index q = -(n_ - 1); q <= n_ - 1; ++q) {
    const Index len = n_ - std::abs(q);
    const Index om = std::max<Index>(q, 0), on = std::max<Index>(-q, 0);
    Vector v(len);
    for (Index i = 0; i < len; ++i) v(i) = a(i + om, i + on);
    const Vector w = block(q).cast<Complex>() * v;
    for (Index i = 0; i < len; ++i) out(i + om, i + on) = w(i);
  }
  return out;
}

TruncatedChannel QChannel::truncated() const {
  TruncatedChannel t;
  t.levels = n_;
  t.superop = Matrix::Zero(n_ * n_, n_ * n_);
  for (Index q = -(n_ - 1); q <= n_ - 1; ++q) {
    const Index len = n_ - std::abs(q);
    const Index om = std::max<Index>(q, 0), on = std::max<Index>(-q, 0);
    for (Index i = 0; i < len; ++i)
      for (Index c = 0; c < len; ++c) t.superop((i + on) * n_ + (i + om), (c + on) * n_ + (c + om)) = block(q)(i, c);
  }
  t.trace_defects = defects_;
  t.trace_defect_bound = defect_bound_;
  return t;
}

QuadratureAgreement qchannel_validate(Index bound) {
  QuadratureAgreement out;
  for (Index m = 0; m < bound; ++m)
    for (Index n = 0; n < bound; ++n)
      for (Index j = 0; j < bound; ++j)
        for (Index k = 0; k < bound; ++k) {
          const double dev = std::abs(qchannel_element(m, n, j, k) - qchannel_element_quadrature(m, n, j, k));
          ++out.elements;
          if (dev > out.max_deviation) {
            out.max_deviation = dev;
            out.worst[0] = m;
            out.worst[1] = n;
            out.worst[2] = j;
            out.worst[3] = k;
          }
        }
  return out;
}

Matrix qchannel_cesaro(const QChannel& ch, const Matrix& a, std::size_t n) {
  const Index levels = ch.levels();
  if (a.rows() != levels || a.cols() != levels) throw Error(ErrorKind::dimension_mismatch, "qchannel_cesaro");
  if (n < 1) throw Error(ErrorKind::invalid_input, "qchannel_cesaro: length must be ≥ 1");
  const double len_n = static_cast<double>(n);
  Matrix out = Matrix::Zero(levels, levels);
  for (Index q = -(levels - 1); q <= levels - 1; ++q) {
    const auto idx = static_cast<std::size_t>(q + levels - 1);
    const RealVector& lam = ch.block_values_[idx];
    const Eigen::MatrixXd& vecs = ch.block_vectors_[idx];
    RealVector c(lam.size());
    for (Index i = 0; i < lam.size(); ++i) {
      const double l = lam(i);
      c(i) = std::abs(1.0 - l) < 1e-14 ? 1.0 : (1.0 - std::pow(l, len_n)) / (len_n * (1.0 - l));
    }
    const Index len = levels - std::abs(q);
    const Index om = std::max<Index>(q, 0), on = std::max<Index>(-q, 0);
    Vector v(len);
    for (Index i = 0; i < len; ++i) v(i) = a(i + om, i + on);
    const Eigen::MatrixXd avg = vecs * c.asDiagonal() * vecs.transpose();
    const Vector w = avg.cast<Complex>() * v;
    for (Index i = 0; i < len; ++i) out(i + om, i + on) = w(i);
  }
  return out;
}

namespace {

double window_distance(const Matrix& a, Index w) {
  const Matrix b = a.topLeftCorner(w, w);
  const Complex c = b.trace() / static_cast<double>(w);
  return (b - c * identity(w)).norm();
}

}  // namespace

double qchannel_self_adjointness(const QChannel& ch, std::uint64_t seed, int trials) {
  Rng rng(seed);
  double worst = 0.0;
  for (int t = 0; t < trials; ++t) {
    const Matrix a = random_hermitian(ch.levels(), rng);
    const Matrix b = random_hermitian(ch.levels(), rng);
    const Complex lhs = (ch.apply(a) * b).trace();
    const Complex rhs = (a * ch.apply(b)).trace();
    worst = std::max(worst, std::abs(lhs - rhs) / (a.norm() * b.norm()));
  }
  return worst;
}

QWindowReport qchannel_fixed_analysis(const QChannel& ch, Index window, const std::vector<std::size_t>& lengths,
                                      std::size_t random_inputs, std::uint64_t seed, std::size_t ladder_size) {
  const Index n = ch.levels();
  if (window < 1 || 2 * window > n) {
    throw Error(ErrorKind::invalid_input, "qchannel_fixed_analysis: window must satisfy 1 ≤ w ≤ N/2");
  }
  QWindowReport rep;
  rep.levels = n;
  rep.window = window;
  rep.trace_defect_bound = ch.trace_defect_bound();

  std::vector<double> all;
  for (Index q = -(n - 1); q <= n - 1; ++q) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(ch.block(q), Eigen::EigenvaluesOnly);
    for (Index i = 0; i < es.eigenvalues().size(); ++i) all.push_back(es.eigenvalues()(i));
  }
  std::sort(all.begin(), all.end(), [](double x, double y) { return std::abs(x) > std::abs(y); });
  rep.top_eigenvalue = all.front();
  rep.slem = all.size() > 1 ? std::abs(all[1]) : 0.0;
  rep.ladder.assign(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(std::min(ladder_size, all.size())));
  rep.self_adjointness = qchannel_self_adjointness(ch, seed ^ 0x5a5a5a5aULL, 8);
  rep.identity_window_deviation =
      (ch.apply(identity(n)).topLeftCorner(window, window) - identity(window)).norm();

  std::vector<std::pair<std::string, Matrix>> inputs;
  inputs.emplace_back("identity", identity(n));
  Matrix number = Matrix::Zero(n, n);
  for (Index i = 0; i < n; ++i) number(i, i) = static_cast<double>(i);
  inputs.emplace_back("number", number);
  Rng rng(seed);
  for (std::size_t i = 0; i < random_inputs; ++i) inputs.emplace_back("random_" + std::to_string(i), random_hermitian(n, rng));

  for (const auto& [name, a] : inputs) {
    CesaroWindowSeries s;
    s.input = name;
    s.input_window_distance = window_distance(a, window);
    for (std::size_t len : lengths) {
      const Matrix avg = qchannel_cesaro(ch, a, len);
      CesaroWindowRow row;
      row.length = len;
      row.window_distance = window_distance(avg, window);
      row.relative = s.input_window_distance > 0.0 ? row.window_distance / s.input_window_distance : 0.0;
      const double bnorm = avg.topLeftCorner(window, window).norm();
      row.flatness = bnorm > 0.0 ? row.window_distance / bnorm : 0.0;
      s.rows.push_back(row);
    }
    rep.series.push_back(std::move(s));
  }
  return rep;
}

}  // namespace broadcastlab
