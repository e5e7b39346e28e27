#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "broadcastlab/contextuality.hpp"

namespace broadcastlab {

double PartitionEmbedding::max_residual() const {
  return residuals.empty() ? 0.0 : *std::max_element(residuals.begin(), residuals.end());
}

namespace {

void require_pvm(const std::vector<LabeledProjection>& outcomes, double tol) {
  if (outcomes.empty()) throw Error(ErrorKind::invalid_input, "pvm_embed: no outcomes");
  const Index d = outcomes.front().projection.rows();
  Matrix sum = Matrix::Zero(d, d);
  std::set<std::string> seen;
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    const Matrix& p = outcomes[i].projection;
    if (p.rows() != d || p.cols() != d) throw Error(ErrorKind::dimension_mismatch, "pvm_embed: mixed dimensions");
    if (!seen.insert(outcomes[i].label).second) {
      throw Error(ErrorKind::invalid_input, "pvm_embed: duplicate outcome label '" + outcomes[i].label + "'");
    }
    if (op_norm(p - p.adjoint()) > tol || op_norm(p * p - p) > tol) {
      throw Error(ErrorKind::invariant_violation,
                  "pvm_embed: outcome '" + outcomes[i].label + "' is not an orthogonal projection");
    }
    for (std::size_t j = 0; j < i; ++j)
      if (op_norm(p * outcomes[j].projection) > tol) {
        throw Error(ErrorKind::invariant_violation, "pvm_embed: outcomes '" + outcomes[j].label + "' and '" +
                                                        outcomes[i].label + "' are not orthogonal");
      }
    sum += p;
  }
  if (op_norm(sum - identity(d)) > tol) {
    throw Error(ErrorKind::invariant_violation, "pvm_embed: outcome projections do not sum to the identity");
  }
}

}  // namespace

PartitionEmbedding pvm_embed(const std::vector<LabeledProjection>& outcomes,
                             const std::vector<std::vector<std::string>>& subsets, double tol) {
  if (subsets.empty()) throw Error(ErrorKind::invalid_input, "pvm_embed: no subsets");
  if (subsets.size() > defaults::pvm_max_sets) {
    throw Error(ErrorKind::cap_exceeded, "pvm_embed: " + std::to_string(subsets.size()) +
                                             " subsets exceed the limit of " +
                                             std::to_string(defaults::pvm_max_sets));
  }
  require_pvm(outcomes, tol);
  const Index d = outcomes.front().projection.rows();

  std::map<std::string, std::size_t> position;
  for (std::size_t i = 0; i < outcomes.size(); ++i) position[outcomes[i].label] = i;

  // Membership signature of every outcome.
  std::vector<std::uint32_t> signature(outcomes.size(), 0);
  std::vector<Matrix> subset_projection(subsets.size(), Matrix::Zero(d, d));
  for (std::size_t k = 0; k < subsets.size(); ++k) {
    std::set<std::string> used;
    for (const auto& label : subsets[k]) {
      auto it = position.find(label);
      if (it == position.end()) {
        throw Error(ErrorKind::invalid_input,
                    "pvm_embed: subsets[" + std::to_string(k) + "] names unknown outcome '" + label + "'");
      }
      if (!used.insert(label).second) continue;
      signature[it->second] |= (std::uint32_t{1} << k);
      subset_projection[k] += outcomes[it->second].projection;
    }
  }

  std::map<std::uint32_t, PartitionAtom> atoms;
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    auto& atom = atoms[signature[i]];
    if (atom.outcomes.empty()) {
      atom.index = signature[i];
      atom.projection = Matrix::Zero(d, d);
    }
    atom.outcomes.push_back(outcomes[i].label);
    atom.projection += outcomes[i].projection;
  }

  PartitionEmbedding emb;
  std::vector<Effect> effects;
  std::vector<DensityOperator> states;
  for (auto& [index, atom] : atoms) {
    const double tr = atom.projection.trace().real();
    atom.rank = static_cast<Index>(std::llround(tr));
    if (atom.rank > 0) {
      effects.emplace_back(atom.projection, 1e-9);
      states.emplace_back(Matrix(atom.projection / static_cast<double>(atom.rank)), 1e-9);
    }
    emb.atoms.push_back(atom);
  }
  emb.index_sets.resize(subsets.size());
  for (std::size_t k = 0; k < subsets.size(); ++k)
    for (const auto& atom : emb.atoms)
      if (atom.index & (std::uint32_t{1} << k)) emb.index_sets[k].push_back(atom.index);

  emb.channel.emplace(DiscretePOVM(std::move(effects), {}, 1e-9), std::move(states));
  for (const auto& p : subset_projection)
    emb.residuals.push_back(op_norm(emb.channel->heisenberg(p) - p));
  return emb;
}

PartitionEmbedding pvm_embed(const std::vector<Matrix>& projections, double tol) {
  if (projections.empty()) throw Error(ErrorKind::invalid_input, "pvm_embed: no projections");
  if (projections.size() > defaults::pvm_max_sets) {
    throw Error(ErrorKind::cap_exceeded, "pvm_embed: too many projections");
  }
  const Index d = projections.front().rows();
  for (std::size_t i = 0; i < projections.size(); ++i) {
    const Matrix& p = projections[i];
    if (p.rows() != d || p.cols() != d) throw Error(ErrorKind::dimension_mismatch, "pvm_embed: mixed dimensions");
    if (op_norm(p * p - p) > tol || op_norm(p - p.adjoint()) > tol) {
      throw Error(ErrorKind::invariant_violation,
                  "pvm_embed: input " + std::to_string(i) + " is not an orthogonal projection");
    }
    for (std::size_t j = 0; j < i; ++j)
      if (op_norm(commutator(p, projections[j])) > tol) {
        throw Error(ErrorKind::invariant_violation, "pvm_embed: inputs " + std::to_string(j) + " and " +
                                                        std::to_string(i) + " are not from one PVM");
      }
  }
  const std::size_t n = projections.size();
  std::vector<LabeledProjection> outcomes;
  std::vector<std::vector<std::string>> subsets(n);
  for (std::uint32_t s = 0; s < (std::uint32_t{1} << n); ++s) {
    Matrix p = identity(d);
    for (std::size_t k = 0; k < n; ++k)
      p = p * ((s & (std::uint32_t{1} << k)) ? projections[k] : Matrix(identity(d) - projections[k]));
    p = 0.5 * (p + p.adjoint());
    if (p.trace().real() < 0.5) continue;
    const std::string label = "X" + std::to_string(s);
    outcomes.push_back({label, p});
    for (std::size_t k = 0; k < n; ++k)
      if (s & (std::uint32_t{1} << k)) subsets[k].push_back(label);
  }
  return pvm_embed(outcomes, subsets, std::max(tol, 1e-9));
}

}  // namespace broadcastlab
