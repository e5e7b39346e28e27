#include <algorithm>

#include "broadcastlab/contextuality.hpp"

namespace broadcastlab {

const char* to_string(StateVerdict v) noexcept {
  return v == StateVerdict::confirming ? "confirming" : "non_confirming";
}

namespace {

struct PairScan {
  double max_norm = 0.0;
  std::pair<std::size_t, std::size_t> pair{0, 0};
};

PairScan scan_pairs(const std::vector<DensityOperator>& states) {
  PairScan s;
  for (std::size_t i = 0; i < states.size(); ++i)
    for (std::size_t j = i + 1; j < states.size(); ++j) {
      const double c = op_norm(commutator(states[i].matrix(), states[j].matrix()));
      if (c > s.max_norm) {
        s.max_norm = c;
        s.pair = {i, j};
      }
    }
  return s;
}

void require_family(const std::vector<DensityOperator>& states, const char* what) {
  if (states.empty()) throw Error(ErrorKind::invalid_input, std::string(what) + ": empty state list");
  const Index d = states.front().dim();
  for (const auto& s : states)
    if (s.dim() != d) throw Error(ErrorKind::dimension_mismatch, std::string(what) + ": mixed dimensions");
}

Matrix common_basis(const std::vector<DensityOperator>& states, double tol) {
  std::vector<HermitianOperator> family;
  double scale = 0.0;
  for (const auto& s : states) {
    family.push_back(s.hermitian());
    scale = std::max(scale, op_norm(s.matrix()));
  }
  // The absolute commutator test already passed; the relative test inside
  // simultaneous_diagonalize must not reject the same family.
  const auto sd = simultaneous_diagonalize(family, 2.0 * tol / std::max(scale, 1e-300));
  if (!sd.commuting) {
    throw NotCommutingError(sd.worst_pair.first, sd.worst_pair.second, sd.max_commutator);
  }
  return sd.basis;
}

double marginal_residual(const KrausChannel& b, const Matrix& rho) {
  const Index d = rho.rows();
  const Matrix out = b.schrodinger(rho);
  const double r1 = trace_norm(partial_trace(out, {d, d}, Subsystem::second) - rho);
  const double r2 = trace_norm(partial_trace(out, {d, d}, Subsystem::first) - rho);
  return std::max(r1, r2);
}

}  // namespace

KrausChannel broadcaster_from_commuting(const std::vector<DensityOperator>& states, double tol) {
  require_family(states, "broadcaster_from_commuting");
  const auto scan = scan_pairs(states);
  if (scan.max_norm > tol) throw NotCommutingError(scan.pair.first, scan.pair.second, scan.max_norm);
  const Matrix basis = common_basis(states, tol);
  return symmetric_lift(pinching_channel(basis)).to_kraus();
}

StateSetVerdict check_states(const std::vector<DensityOperator>& states, double tol) {
  require_family(states, "check_states");
  StateSetVerdict v;
  const auto scan = scan_pairs(states);
  v.max_commutator = scan.max_norm;
  v.pair = scan.pair;
  if (scan.max_norm > tol) {
    v.verdict = StateVerdict::confirming;
    v.notes.push_back("states " + std::to_string(scan.pair.first) + " and " +
                      std::to_string(scan.pair.second) + " do not commute");
    return v;
  }

  v.verdict = StateVerdict::non_confirming;
  v.basis = common_basis(states, tol);
  v.witness = pinching_channel(v.basis);
  v.broadcaster = symmetric_lift(*v.witness).to_kraus();
  for (const auto& s : states) {
    v.witness_residual = std::max(v.witness_residual, trace_norm(v.witness->schrodinger(s.matrix()) - s.matrix()));
    v.broadcaster_residual = std::max(v.broadcaster_residual, marginal_residual(*v.broadcaster, s.matrix()));
  }
  if (v.witness_residual > 1e-9) {
    throw Error(ErrorKind::numerical_failure,
                "check_states: pinching witness leaves a state unfixed (trace-norm residual " +
                    std::to_string(v.witness_residual) + ")");
  }
  v.notes.push_back("witness is the dephasing channel in the common eigenbasis");
  v.notes.push_back("commuting family: every Koashi–Imoto factor J_j is one-dimensional");
  return v;
}

}  // namespace broadcastlab
