#include "broadcastlab/channels.hpp"

#include <cmath>
#include <sstream>

namespace broadcastlab {

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

void require_dim(const Matrix& x, Index rows, Index cols, const char* what) {
  if (x.rows() != rows || x.cols() != cols) {
    throw Error(ErrorKind::dimension_mismatch,
                std::string(what) + ": expected " + std::to_string(rows) + "x" +
                    std::to_string(cols) + " operand, got " + std::to_string(x.rows()) + "x" +
                    std::to_string(x.cols()));
  }
}

// Superoperator of an arbitrary linear map, assembled column by column from
// its action on matrix units.
template <class F>
Matrix superop_from_map(F&& f, Index d_in, Index d_out) {
  Matrix s(d_out * d_out, d_in * d_in);
  Matrix unit = Matrix::Zero(d_in, d_in);
  for (Index l = 0; l < d_in; ++l)
    for (Index k = 0; k < d_in; ++k) {
      unit(k, l) = 1.0;
      s.col(l * d_in + k) = vec(f(unit));
      unit(k, l) = 0.0;
    }
  return s;
}

}  // namespace

// ---------------------------------------------------------------------------

KrausChannel::KrausChannel(std::vector<Matrix> ops, double tol) : ops_(std::move(ops)) {
  if (ops_.empty()) throw Error(ErrorKind::invalid_input, "KrausChannel: no Kraus operators");
  d_out_ = ops_.front().rows();
  d_in_ = ops_.front().cols();
  if (d_in_ < 1 || d_out_ < 1) throw Error(ErrorKind::invalid_input, "KrausChannel: empty operator");
  Matrix sum = Matrix::Zero(d_in_, d_in_);
  for (const auto& k : ops_) {
    require_dim(k, d_out_, d_in_, "KrausChannel");
    if (!k.allFinite()) throw Error(ErrorKind::invariant_violation, "KrausChannel: non-finite entry");
    sum.noalias() += k.adjoint() * k;
  }
  const double dev = op_norm(sum - identity(d_in_));
  if (dev > tol) {
    throw Error(ErrorKind::invariant_violation,
                "KrausChannel: not trace preserving, ‖Σ K†K − I‖_op = " + fmt(dev));
  }
}

Matrix KrausChannel::schrodinger(const Matrix& rho) const {
  require_dim(rho, d_in_, d_in_, "KrausChannel::schrodinger");
  Matrix out = Matrix::Zero(d_out_, d_out_);
  for (const auto& k : ops_) out.noalias() += k * rho * k.adjoint();
  return out;
}

Matrix KrausChannel::heisenberg(const Matrix& a) const {
  require_dim(a, d_out_, d_out_, "KrausChannel::heisenberg");
  Matrix out = Matrix::Zero(d_in_, d_in_);
  for (const auto& k : ops_) out.noalias() += k.adjoint() * a * k;
  return out;
}

// ---------------------------------------------------------------------------

ChoiMatrix::ChoiMatrix(const Matrix& j, Index d_in, Index d_out, double tol)
    : d_in_(d_in), d_out_(d_out) {
  if (d_in < 1 || d_out < 1) throw Error(ErrorKind::invalid_input, "ChoiMatrix: dimensions must be positive");
  require_dim(j, d_in * d_out, d_in * d_out, "ChoiMatrix");
  j_ = HermitianOperator(j).matrix();
  const double scale = std::max(1.0, op_norm(j_));
  const double lmin = min_eigenvalue(j_);
  if (lmin < -tol * scale) {
    throw Error(ErrorKind::invariant_violation,
                "ChoiMatrix: not positive semidefinite, minimum eigenvalue " + fmt(lmin));
  }
  const double dev = op_norm(partial_trace(j_, dims(), Subsystem::second) - identity(d_in));
  if (dev > tol * scale) {
    throw Error(ErrorKind::invariant_violation,
                "ChoiMatrix: not trace preserving, ‖tr_2 J − I‖_op = " + fmt(dev));
  }
}

Matrix ChoiMatrix::schrodinger(const Matrix& rho) const {
  require_dim(rho, d_in_, d_in_, "ChoiMatrix::schrodinger");
  return partial_trace(kron(rho.transpose(), identity(d_out_)) * j_, dims(), Subsystem::first);
}

Matrix ChoiMatrix::heisenberg(const Matrix& a) const {
  require_dim(a, d_out_, d_out_, "ChoiMatrix::heisenberg");
  return partial_trace(j_ * kron(identity(d_in_), a), dims(), Subsystem::second).transpose();
}

// ---------------------------------------------------------------------------

MeasurePrepareChannel::MeasurePrepareChannel(DiscretePOVM povm, std::vector<DensityOperator> states)
    : povm_(std::move(povm)), states_(std::move(states)) {
  if (states_.size() != povm_.size()) {
    throw Error(ErrorKind::invalid_input,
                "MeasurePrepareChannel: " + std::to_string(povm_.size()) + " effects but " +
                    std::to_string(states_.size()) + " states");
  }
  const Index d = states_.front().dim();
  for (const auto& s : states_)
    if (s.dim() != d) throw Error(ErrorKind::dimension_mismatch, "MeasurePrepareChannel: mixed state dimensions");
}

Matrix MeasurePrepareChannel::schrodinger(const Matrix& rho) const {
  require_dim(rho, d_in(), d_in(), "MeasurePrepareChannel::schrodinger");
  Matrix out = Matrix::Zero(d_out(), d_out());
  for (std::size_t i = 0; i < size(); ++i)
    out += (povm_[i].matrix().cwiseProduct(rho.transpose())).sum() * states_[i].matrix();
  return out;
}

Matrix MeasurePrepareChannel::heisenberg(const Matrix& a) const {
  require_dim(a, d_out(), d_out(), "MeasurePrepareChannel::heisenberg");
  Matrix out = Matrix::Zero(d_in(), d_in());
  for (std::size_t i = 0; i < size(); ++i)
    out += (states_[i].matrix().cwiseProduct(a.transpose())).sum() * povm_[i].matrix();
  return out;
}

KrausChannel MeasurePrepareChannel::to_kraus() const {
  constexpr double floor = 1e-14;
  std::vector<Matrix> ops;
  for (std::size_t i = 0; i < size(); ++i) {
    const auto g = eig_hermitian(povm_[i].hermitian());
    const auto s = eig_hermitian(states_[i].hermitian());
    for (Index a = 0; a < g.values.size(); ++a) {
      if (g.values(a) <= floor) continue;
      for (Index b = 0; b < s.values.size(); ++b) {
        if (s.values(b) <= floor) continue;
        ops.push_back(std::sqrt(g.values(a) * s.values(b)) * s.vectors.col(b) *
                      g.vectors.col(a).adjoint());
      }
    }
  }
  return KrausChannel(std::move(ops), 1e-9);
}

// ---------------------------------------------------------------------------

Index d_in(const Channel& ch) {
  return std::visit([](const auto& c) { return c.d_in(); }, ch);
}

Index d_out(const Channel& ch) {
  return std::visit([](const auto& c) { return c.d_out(); }, ch);
}

Matrix apply(const Channel& ch, const Matrix& operand, Picture picture) {
  return std::visit(
      [&](const auto& c) {
        return picture == Picture::schrodinger ? c.schrodinger(operand) : c.heisenberg(operand);
      },
      ch);
}

Matrix schrodinger_superop(const Channel& ch) {
  if (const auto* k = std::get_if<KrausChannel>(&ch)) {
    Matrix s = Matrix::Zero(k->d_out() * k->d_out(), k->d_in() * k->d_in());
    for (const auto& op : k->ops()) s += kron(op.conjugate(), op);
    return s;
  }
  if (const auto* mp = std::get_if<MeasurePrepareChannel>(&ch)) {
    Matrix s = Matrix::Zero(mp->d_out() * mp->d_out(), mp->d_in() * mp->d_in());
    for (std::size_t i = 0; i < mp->size(); ++i)
      s += vec(mp->states()[i].matrix()) * vec(mp->povm()[i].matrix().transpose()).transpose();
    return s;
  }
  const auto& j = std::get<ChoiMatrix>(ch);
  return superop_from_map([&](const Matrix& x) { return j.schrodinger(x); }, j.d_in(), j.d_out());
}

Matrix heisenberg_superop(const Channel& ch) { return schrodinger_superop(ch).adjoint(); }

ChoiMatrix choi_transform(const Channel& ch) {
  if (const auto* j = std::get_if<ChoiMatrix>(&ch)) return *j;
  const Index din = d_in(ch), dout = d_out(ch);
  Matrix j = Matrix::Zero(din * dout, din * dout);
  if (const auto* mp = std::get_if<MeasurePrepareChannel>(&ch)) {
    for (std::size_t i = 0; i < mp->size(); ++i)
      j += kron(mp->povm()[i].matrix().transpose(), mp->states()[i].matrix());
  } else {
    Matrix unit = Matrix::Zero(din, din);
    for (Index k = 0; k < din; ++k)
      for (Index l = 0; l < din; ++l) {
        unit(k, l) = 1.0;
        j.block(k * dout, l * dout, dout, dout) = apply(ch, unit, Picture::schrodinger);
        unit(k, l) = 0.0;
      }
  }
  return ChoiMatrix(j, din, dout, 1e-9);
}

KrausChannel choi_to_kraus(const ChoiMatrix& j, double cutoff) {
  const auto e = eig_hermitian(HermitianOperator(j.matrix()));
  const Index din = j.d_in(), dout = j.d_out();
  std::vector<Matrix> ops;
  for (Index c = 0; c < e.values.size(); ++c) {
    if (e.values(c) <= cutoff) continue;
    const double w = std::sqrt(e.values(c));
    Matrix k(dout, din);
    for (Index col = 0; col < din; ++col)
      for (Index row = 0; row < dout; ++row) k(row, col) = w * e.vectors(col * dout + row, c);
    ops.push_back(std::move(k));
  }
  if (ops.empty()) throw Error(ErrorKind::invariant_violation, "choi_to_kraus: no eigenvalue above cutoff");
  return KrausChannel(std::move(ops), 1e-8);
}

// ---------------------------------------------------------------------------

SymmetricChannel::SymmetricChannel(MeasurePrepareChannel base) : base_(std::move(base)) {
  if (base_.d_in() != base_.d_out()) {
    throw Error(ErrorKind::dimension_mismatch, "SymmetricChannel: base channel must map L(H) to L(H)");
  }
}

Matrix SymmetricChannel::heisenberg(const Matrix& a) const {
  const Index d = dim();
  require_dim(a, d * d, d * d, "SymmetricChannel::heisenberg");
  Matrix out = Matrix::Zero(d, d);
  for (std::size_t i = 0; i < base_.size(); ++i) {
    const Matrix& s = base_.states()[i].matrix();
    const Matrix ss = kron(s, s);
    out += (ss.cwiseProduct(a.transpose())).sum() * base_.povm()[i].matrix();
  }
  return out;
}

Matrix SymmetricChannel::heisenberg_product(const Matrix& a, const Matrix& b) const {
  const Index d = dim();
  require_dim(a, d, d, "SymmetricChannel::heisenberg_product");
  require_dim(b, d, d, "SymmetricChannel::heisenberg_product");
  Matrix out = Matrix::Zero(d, d);
  for (std::size_t i = 0; i < base_.size(); ++i) {
    const Matrix& s = base_.states()[i].matrix();
    const Complex ta = (s.cwiseProduct(a.transpose())).sum();
    const Complex tb = (s.cwiseProduct(b.transpose())).sum();
    out += ta * tb * base_.povm()[i].matrix();
  }
  return out;
}

Matrix SymmetricChannel::marginal_first(const Matrix& a) const { return base_.heisenberg(a); }
Matrix SymmetricChannel::marginal_second(const Matrix& a) const { return base_.heisenberg(a); }

Matrix SymmetricChannel::schrodinger(const Matrix& rho) const {
  const Index d = dim();
  require_dim(rho, d, d, "SymmetricChannel::schrodinger");
  Matrix out = Matrix::Zero(d * d, d * d);
  for (std::size_t i = 0; i < base_.size(); ++i) {
    const Matrix& s = base_.states()[i].matrix();
    out += (base_.povm()[i].matrix().cwiseProduct(rho.transpose())).sum() * kron(s, s);
  }
  return out;
}

KrausChannel SymmetricChannel::to_kraus() const {
  constexpr double floor = 1e-14;
  std::vector<Matrix> ops;
  for (std::size_t i = 0; i < base_.size(); ++i) {
    const auto g = eig_hermitian(base_.povm()[i].hermitian());
    const auto s = eig_hermitian(base_.states()[i].hermitian());
    for (Index a = 0; a < g.values.size(); ++a) {
      if (g.values(a) <= floor) continue;
      for (Index b = 0; b < s.values.size(); ++b) {
        if (s.values(b) <= floor) continue;
        for (Index c = 0; c < s.values.size(); ++c) {
          if (s.values(c) <= floor) continue;
          const double w = std::sqrt(g.values(a) * s.values(b) * s.values(c));
          ops.push_back(w * kron(s.vectors.col(b), s.vectors.col(c)) * g.vectors.col(a).adjoint());
        }
      }
    }
  }
  return KrausChannel(std::move(ops), 1e-9);
}

SymmetricChannel symmetric_lift(const MeasurePrepareChannel& eb) { return SymmetricChannel(eb); }

KrausChannel symmetrize(const KrausChannel& theta) {
  const Index d = theta.d_in();
  if (theta.d_out() != d * d) {
    throw Error(ErrorKind::dimension_mismatch,
                "symmetrize: output dimension " + std::to_string(theta.d_out()) +
                    " is not the square of input dimension " + std::to_string(d));
  }
  const Matrix v = swap_operator(d);
  const double h = std::sqrt(0.5);
  std::vector<Matrix> ops;
  ops.reserve(2 * theta.ops().size());
  for (const auto& k : theta.ops()) ops.push_back(h * k);
  for (const auto& k : theta.ops()) ops.push_back(h * (v * k));
  return KrausChannel(std::move(ops));
}

KrausChannel depolarizing_channel(Index d) {
  std::vector<Matrix> ops;
  const double w = std::sqrt(1.0 / static_cast<double>(d));
  for (Index i = 0; i < d; ++i)
    for (Index j = 0; j < d; ++j) {
      Matrix k = Matrix::Zero(d, d);
      k(i, j) = w;
      ops.push_back(std::move(k));
    }
  return KrausChannel(std::move(ops));
}

KrausChannel identity_channel(Index d) { return KrausChannel({identity(d)}); }

KrausChannel unitary_channel(const Matrix& u) { return KrausChannel({u}); }

MeasurePrepareChannel pinching_channel(const Matrix& basis) {
  std::vector<Effect> effects;
  std::vector<DensityOperator> states;
  for (Index k = 0; k < basis.cols(); ++k) {
    const Matrix p = projector(basis.col(k));
    effects.emplace_back(p);
    states.emplace_back(p);
  }
  return MeasurePrepareChannel(DiscretePOVM(std::move(effects)), std::move(states));
}

}  // namespace broadcastlab
