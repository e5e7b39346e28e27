// Acceptance suite: one PASS/FAIL line per criterion. Exit status is the
// number of failing criteria (capped at 1 for ctest).

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>

#include "broadcastlab/cli.hpp"
#include "broadcastlab/contextuality.hpp"
#include "broadcastlab/cvmodels.hpp"
#include "broadcastlab/fixedpoint.hpp"
#include "broadcastlab/io.hpp"
#include "broadcastlab/random.hpp"

#include "oracles.hpp"

using namespace broadcastlab;
using io::Json;

namespace {

constexpr std::uint64_t kSeed = 20241015;

struct Verdict {
  bool pass = true;
  std::string detail;
  Json report = Json::object();

  void require(bool ok, const std::string& what) {
    if (!ok) {
      if (pass) detail = what;
      pass = false;
    }
  }
};

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::vector<Matrix> raw(const std::vector<DensityOperator>& v) {
  std::vector<Matrix> out;
  for (const auto& s : v) out.push_back(s.matrix());
  return out;
}

// ---------------------------------------------------------------------------

Verdict state_families() {
  Verdict v;
  Rng rng(kSeed + 1);
  double worst_witness = 0.0, worst_marginal = 0.0;
  int mismatches = 0;
  for (int kind = 0; kind < 2; ++kind)
    for (int t = 0; t < 100; ++t) {
      const Index d = rng.integer(2, 5);
      const auto count = static_cast<std::size_t>(rng.integer(2, 4));
      const auto mats = kind == 0 ? random_commuting_densities(d, count, rng) : random_noncommuting_densities(d, count, rng);
      std::vector<DensityOperator> states;
      for (const auto& m : mats) states.emplace_back(m);
      const StateSetVerdict sv = check_states(states);
      const bool direct_commuting = oracle::max_commutator(mats) <= defaults::commutator;
      const bool non_confirming = sv.verdict == StateVerdict::non_confirming;
      if (direct_commuting != non_confirming) ++mismatches;
      if (non_confirming) {
        if (!sv.witness || !sv.broadcaster) {
          ++mismatches;
          continue;
        }
        std::vector<Matrix> g, s;
        for (const auto& e : sv.witness->povm().effects()) g.push_back(e.matrix());
        for (const auto& st : sv.witness->states()) s.push_back(st.matrix());
        for (const auto& rho : mats) {
          worst_witness = std::max(worst_witness, oracle::trace_norm(oracle::mp_schrodinger(g, s, rho) - rho));
          Matrix out = Matrix::Zero(d * d, d * d);
          for (const auto& k : sv.broadcaster->ops()) out += k * rho * k.adjoint();
          worst_marginal = std::max(worst_marginal, oracle::trace_norm(oracle::partial_trace(out, d, d, true) - rho));
          worst_marginal = std::max(worst_marginal, oracle::trace_norm(oracle::partial_trace(out, d, d, false) - rho));
        }
      }
    }
  v.require(mismatches == 0, std::to_string(mismatches) + " verdicts disagree with the commutator test");
  v.require(worst_witness <= 1e-9, "witness residual " + fmt(worst_witness));
  v.require(worst_marginal <= 1e-10, "marginal residual " + fmt(worst_marginal));
  v.report = {{"mismatches", mismatches}, {"witness_residual", worst_witness}, {"marginal_residual", worst_marginal}};
  if (v.pass) v.detail = "200 families agree; witness " + fmt(worst_witness) + ", marginals " + fmt(worst_marginal);
  return v;
}

Verdict pvm_partitions() {
  Verdict v;
  Rng rng(kSeed + 2);
  double worst = 0.0;
  for (int t = 0; t < 50; ++t) {
    const Index d = rng.integer(2, 8);
    const auto outcomes = static_cast<std::size_t>(rng.integer(2, d));
    const auto pvm = random_pvm(d, outcomes, rng);
    std::vector<LabeledProjection> labeled;
    for (std::size_t i = 0; i < pvm.size(); ++i) labeled.push_back({"o" + std::to_string(i), pvm[i]});
    const auto n = static_cast<std::size_t>(rng.integer(1, 4));
    std::vector<std::vector<std::string>> subsets(n);
    std::vector<Matrix> targets(n, Matrix::Zero(d, d));
    for (std::size_t k = 0; k < n; ++k) {
      for (std::size_t i = 0; i < pvm.size(); ++i)
        if (rng.uniform() < 0.5) subsets[k].push_back(labeled[i].label);
      if (subsets[k].empty()) subsets[k].push_back(labeled[static_cast<std::size_t>(rng.integer(0, d - 1)) % pvm.size()].label);
      for (const auto& l : subsets[k]) targets[k] += pvm[std::stoul(l.substr(1))];
    }
    const PartitionEmbedding e = pvm_embed(labeled, subsets);
    std::vector<Matrix> g, s;
    for (const auto& x : e.channel->povm().effects()) g.push_back(x.matrix());
    for (const auto& x : e.channel->states()) s.push_back(x.matrix());
    for (const auto& a : targets) worst = std::max(worst, oracle::op_norm(oracle::mp_heisenberg(g, s, a) - a));
  }
  v.require(worst <= 1e-12, "random instance residual " + fmt(worst));

  // Two sets over four rank-one outcomes: a outside both, b only in K1, c only in K2, d in both.
  std::vector<LabeledProjection> labeled;
  for (Index i = 0; i < 4; ++i) {
    Matrix p = Matrix::Zero(4, 4);
    p(i, i) = 1.0;
    labeled.push_back({std::string(1, static_cast<char>('a' + i)), p});
  }
  const PartitionEmbedding e = pvm_embed(labeled, {{"b", "d"}, {"c", "d"}});
  bool structure = e.atoms.size() == 4;
  const std::vector<std::string> expect{"a", "b", "c", "d"};
  for (std::size_t i = 0; structure && i < 4; ++i)
    structure = e.atoms[i].index == i && e.atoms[i].outcomes == std::vector<std::string>{expect[i]};
  structure = structure && e.index_sets == std::vector<std::vector<std::uint32_t>>{{1, 3}, {2, 3}};
  v.require(structure, "two-set partition structure differs");
  v.report = {{"random_residual", worst}, {"two_set_structure", structure}, {"two_set_index_sets", e.index_sets}};
  if (v.pass) v.detail = "50 instances, max residual " + fmt(worst) + "; I_1={1,3}, I_2={2,3}";
  return v;
}

struct AlgebraCase {
  MeasurePrepareChannel channel;
  BroadcastingAlgebra algebra;
  Matrix psi0;  // oracle limit on row-major flattened operators
};

std::vector<AlgebraCase> algebra_cases() {
  Rng rng(kSeed + 3);
  std::vector<AlgebraCase> out;
  for (int t = 0; t < 50; ++t) {
    const Index d = rng.integer(2, 5);
    // most cases carry a nontrivial fixed algebra; every fifth is generic
    const MeasurePrepareChannel ch = t % 5 == 4 ? random_mp_channel(d, static_cast<std::size_t>(rng.integer(2, 4)), rng)
                                                : random_structured_eb(d, static_cast<std::size_t>(rng.integer(1, d)), rng);
    std::vector<Matrix> g, s;
    for (const auto& x : ch.povm().effects()) g.push_back(x.matrix());
    for (const auto& x : ch.states()) s.push_back(x.matrix());
    auto [lim, settled] = oracle::power_limit([&](const Matrix& a) { return oracle::mp_heisenberg(g, s, a); }, d);
    if (!settled) throw std::runtime_error("oracle power iteration did not settle");
    out.push_back({ch, BroadcastingAlgebra::from_eb(ch), lim});
  }
  return out;
}

Matrix apply_limit(const Matrix& lim, const Matrix& a) { return oracle::unflatten(lim * oracle::flatten(a), a.rows()); }

Verdict algebra_suite(const std::vector<AlgebraCase>& cases) {
  Verdict v;
  Rng rng(kSeed + 4);
  double comm = 0.0, assoc = 0.0, unit = 0.0, bipos = 0.0, ce = 0.0, lib_vs_oracle = 0.0;
  std::size_t nontrivial = 0;
  for (const auto& c : cases) {
    const Index d = c.algebra.dim();
    const SymmetricChannel phi = symmetric_lift(c.channel);
    std::vector<Matrix> g, s;
    for (const auto& x : c.channel.povm().effects()) g.push_back(x.matrix());
    for (const auto& x : c.channel.states()) s.push_back(x.matrix());
    // Φ*(A ⊗ B) = Σ_i tr(σ_i A) tr(σ_i B) G_i
    auto joint = [&](const Matrix& a, const Matrix& b) {
      Matrix out = Matrix::Zero(d, d);
      for (std::size_t i = 0; i < g.size(); ++i) out += (s[i] * a).trace() * (s[i] * b).trace() * g[i];
      return out;
    };
    auto prod = [&](const Matrix& a, const Matrix& b) { return apply_limit(c.psi0, joint(a, b)); };
    if (c.algebra.space().dimension() > 1) ++nontrivial;

    std::vector<Matrix> fixed;
    for (int k = 0; k < 20; ++k) fixed.push_back(apply_limit(c.psi0, random_hermitian(d, rng)));
    const Matrix id = Matrix::Identity(d, d);
    for (int k = 0; k < 20; ++k) {
      const Matrix& a = fixed[static_cast<std::size_t>(k)];
      const Matrix& b = fixed[static_cast<std::size_t>((k + 1) % 20)];
      const Matrix& x = fixed[static_cast<std::size_t>((k + 2) % 20)];
      const Matrix ab = prod(a, b);
      comm = std::max(comm, (ab - prod(b, a)).norm());
      assoc = std::max(assoc, (prod(ab, x) - prod(a, prod(b, x))).norm());
      unit = std::max(unit, (prod(id, a) - a).norm());
      ce = std::max(ce, (ab - apply_limit(c.psi0, a * b)).norm());
      lib_vs_oracle = std::max(lib_vs_oracle, (broadcasting_product(c.algebra, a, b) - ab).norm());
      const Matrix pa = apply_limit(c.psi0, random_density(d, rng));
      const Matrix pb = apply_limit(c.psi0, random_density(d, rng));
      bipos = std::max(bipos, -oracle::min_eig(prod(pa, pb)));
    }
    comm = std::max(comm, c.algebra.commutativity_residual());
    assoc = std::max(assoc, c.algebra.associativity_residual());
    unit = std::max(unit, c.algebra.unit_residual());
    bipos = std::max(bipos, -c.algebra.cp_min_eigenvalue());
    (void)phi;
  }
  v.require(comm <= 1e-8, "commutativity " + fmt(comm));
  v.require(assoc <= 1e-8, "associativity " + fmt(assoc));
  v.require(unit <= 1e-8, "unit " + fmt(unit));
  v.require(bipos <= 1e-8, "positivity " + fmt(bipos));
  v.require(ce <= 1e-8, "product against ψ₀(AB) " + fmt(ce));
  v.require(lib_vs_oracle <= 1e-8, "library product against oracle " + fmt(lib_vs_oracle));
  v.report = {{"commutativity", comm}, {"associativity", assoc}, {"unit", unit}, {"positivity", bipos},
              {"choi_effros", ce}, {"library_vs_oracle", lib_vs_oracle}, {"nontrivial_algebras", nontrivial}};
  if (v.pass) {
    v.detail = "50 channels (" + std::to_string(nontrivial) + " nontrivial); comm " + fmt(comm) + ", assoc " +
               fmt(assoc) + ", unit " + fmt(unit) + ", pos " + fmt(bipos) + ", ψ₀(AB) " + fmt(ce);
  }
  return v;
}

Verdict atomic_suite(const std::vector<AlgebraCase>& cases) {
  Verdict v;
  Rng rng(kSeed + 5);
  double bio = 0.0, recon = 0.0, fixed_lambda = 0.0, fixed_atoms = 0.0;
  double min_perturbed = 1e300;
  for (const auto& c : cases) {
    const Index d = c.algebra.dim();
    const AtomicDecomposition dec = atomic_decomposition(c.algebra, kSeed);
    const std::size_t m = dec.povm.size();
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j)
        bio = std::max(bio, std::abs((dec.states[i] * dec.povm[j]).trace() - (i == j ? 1.0 : 0.0)));
    for (const auto& b : c.algebra.space().basis())
      recon = std::max(recon, (oracle::mp_heisenberg(dec.povm, dec.states, b) - b).norm());

    std::vector<Matrix> g, s;
    for (const auto& x : c.channel.povm().effects()) g.push_back(x.matrix());
    for (const auto& x : c.channel.states()) s.push_back(x.matrix());
    // fixed state from the predual limit, then a perturbation off the fixed set
    auto [lim, settled] = oracle::power_limit([&](const Matrix& r) { return oracle::mp_schrodinger(g, s, r); }, d);
    if (!settled) throw std::runtime_error("oracle predual iteration did not settle");
    const Matrix rho_fixed = apply_limit(lim, random_density(d, rng));
    fixed_lambda = std::max(fixed_lambda, (oracle::mp_schrodinger(g, s, rho_fixed) - rho_fixed).norm());
    fixed_atoms = std::max(fixed_atoms, (oracle::mp_schrodinger(dec.povm, dec.states, rho_fixed) - rho_fixed).norm());
    const Matrix rho_pert = 0.8 * rho_fixed + 0.2 * random_density(d, rng, 1);
    const double by_lambda = (oracle::mp_schrodinger(g, s, rho_pert) - rho_pert).norm();
    const double by_atoms = (oracle::mp_schrodinger(dec.povm, dec.states, rho_pert) - rho_pert).norm();
    min_perturbed = std::min(min_perturbed, std::min(by_lambda, by_atoms));
  }
  v.require(bio <= 1e-8, "biorthogonality " + fmt(bio));
  v.require(recon <= 1e-8, "reconstruction " + fmt(recon));
  v.require(fixed_lambda <= 1e-8 && fixed_atoms <= 1e-8, "fixed state residual " + fmt(std::max(fixed_lambda, fixed_atoms)));
  v.require(min_perturbed > 1e-6, "perturbed state looks fixed (" + fmt(min_perturbed) + ")");
  v.report = {{"biorthogonality", bio}, {"reconstruction", recon}, {"fixed_state_channel", fixed_lambda},
              {"fixed_state_atoms", fixed_atoms}, {"perturbed_min", min_perturbed}};
  if (v.pass) {
    v.detail = "tr(σ_i G_j) " + fmt(bio) + ", reconstruction " + fmt(recon) + ", fixed-state agreement " +
               fmt(std::max(fixed_lambda, fixed_atoms)) + ", perturbed ≥ " + fmt(min_perturbed);
  }
  return v;
}

Verdict feasibility_suite() {
  Verdict v;
  auto p = [](Index d, Index i) {
    Matrix m = Matrix::Zero(d, d);
    m(i, i) = 1.0;
    return m;
  };
  FeasibilityProblem good;
  good.effects = {p(2, 0), p(2, 1)};
  good.dim = 2;
  const MeasSetVerdict a = check_measurements_feasibility(good);
  // independent re-check of the returned Choi matrix J on C^2 ⊗ C^2
  const Matrix& j = a.choi;
  double psd = -oracle::min_eig(j);
  Matrix jt = j;
  for (Index r = 0; r < 4; ++r)
    for (Index c = 0; c < 4; ++c) jt(r, c) = j((c / 2) * 2 + r % 2, (r / 2) * 2 + c % 2);
  const double ppt = -oracle::min_eig(jt);
  const double tp = (oracle::partial_trace(j, 2, 2, true) - Matrix::Identity(2, 2)).norm();
  double fix = 0.0;
  for (const auto& e : good.effects) {
    // Λ*(E) = (tr_2[J (I ⊗ E)])ᵀ
    Matrix ie = Matrix::Zero(4, 4);
    ie.topLeftCorner(2, 2) = e;
    ie.bottomRightCorner(2, 2) = e;
    fix = std::max(fix, (Matrix(oracle::partial_trace(j * ie, 2, 2, true).transpose()) - e).norm());
  }
  v.require(a.status == FeasibilityStatus::feasible, std::string("qubit PVM verdict ") + to_string(a.status));
  v.require(a.cycles <= 20000, "cycles " + std::to_string(a.cycles));
  v.require(std::max({psd, ppt, tp, fix}) <= 1e-7, "independent witness check " + fmt(std::max({psd, ppt, tp, fix})));

  Matrix plus = Matrix::Constant(2, 2, 0.5), minus = -plus;
  minus(0, 0) = minus(1, 1) = 0.5;
  FeasibilityProblem bad;
  bad.effects = {p(2, 0), p(2, 1), plus, minus};
  bad.dim = 2;
  const MeasSetVerdict b = check_measurements_feasibility(bad);
  v.require(b.status == FeasibilityStatus::infeasible_stalled, std::string("σ_z/σ_x verdict ") + to_string(b.status));
  v.require(b.best_residual >= 1e-3, "stalled residual " + fmt(b.best_residual));
  bool caveat = false;
  for (const auto& n : b.notes) caveat = caveat || n == kPptNote;
  v.require(caveat, "relaxation note missing");
  v.report = {{"feasible_status", to_string(a.status)}, {"feasible_residual", a.final_residual},
              {"feasible_cycles", a.cycles}, {"witness_check", std::max({psd, ppt, tp, fix})},
              {"stalled_status", to_string(b.status)}, {"stalled_residual", b.best_residual},
              {"stalled_cycles", b.cycles}, {"notes", b.notes}};
  if (v.pass) {
    v.detail = "qubit PVM feasible at " + fmt(a.final_residual) + " after " + std::to_string(a.cycles) +
               " cycles; σ_z/σ_x stalled at " + fmt(b.best_residual);
  }
  return v;
}

Verdict qchannel_suite() {
  Verdict v;
  double quad = 0.0;
  for (int m = 0; m < 12; ++m)
    for (int n = 0; n < 12; ++n)
      for (int j = 0; j < 12; ++j)
        for (int k = 0; k < 12; ++k)
          quad = std::max(quad, std::abs(qchannel_element(m, n, j, k) - oracle::qchannel_element(m, n, j, k)));
  const QuadratureAgreement internal = qchannel_validate(12);

  const QChannel ch = qchannel_build(FockTruncation(24));
  Matrix vac = Matrix::Zero(24, 24);
  vac(0, 0) = 1.0;
  const Matrix img = ch.apply(vac);
  double thermal = 0.0;
  for (Index m = 0; m < 24; ++m) thermal = std::max(thermal, std::abs(img(m, m) - std::pow(0.5, static_cast<double>(m + 1))));

  const std::vector<std::size_t> lengths{1, 10, 100, 1000, 10000, 100000};
  const QWindowReport rep = qchannel_fixed_analysis(ch, 8, lengths, 5, kSeed + 6);
  double final_rel = 0.0, final_flat = 0.0;
  bool decreasing = true;
  for (const auto& s : rep.series) {
    if (s.input.rfind("random_", 0) != 0) continue;
    for (std::size_t i = 1; i < s.rows.size(); ++i) decreasing = decreasing && s.rows[i].window_distance < s.rows[i - 1].window_distance;
    final_rel = std::max(final_rel, s.rows.back().relative);
    final_flat = std::max(final_flat, s.rows.back().flatness);
  }
  Rng rng(kSeed + 7);
  double sa = 0.0;
  for (int t = 0; t < 20; ++t) {
    const Matrix a = random_hermitian(24, rng), b = random_hermitian(24, rng);
    sa = std::max(sa, std::abs((ch.apply(a) * b).trace() - (a * ch.apply(b)).trace()));
  }
  v.require(quad <= 1e-8, "closed form vs quadrature " + fmt(quad));
  v.require(thermal <= 1e-10, "vacuum image " + fmt(thermal));
  v.require(decreasing, "window distance not decreasing in Cesàro length");
  v.require(final_rel <= 1e-3, "relative window distance " + fmt(final_rel));
  v.require(sa <= 1e-10, "self-adjointness " + fmt(sa));
  v.report = {{"quadrature", quad}, {"internal_quadrature", internal.max_deviation}, {"vacuum_image", thermal},
              {"final_relative", final_rel}, {"final_flatness", final_flat}, {"slem", rep.slem},
              {"top_eigenvalue", rep.top_eigenvalue}, {"self_adjointness", sa},
              {"trace_defect_bound", rep.trace_defect_bound}};
  if (v.pass) {
    v.detail = "quadrature " + fmt(quad) + ", vacuum " + fmt(thermal) + ", window relative " + fmt(final_rel) +
               " (flatness " + fmt(final_flat) + ", top eigenvalue " + fmt(rep.top_eigenvalue) + "), HS " + fmt(sa);
  }
  return v;
}

Verdict shift_suite() {
  Verdict v;
  const Index n = 16, w = 4;
  const ShiftStudy st = shift_channel_study(FockTruncation(n), w, {10, 100, 1000}, 5, kSeed + 8);
  // direct simulation of the window mass for the vacuum and the maximally mixed state
  double worst_excess = -1.0, oracle_gap = 0.0;
  Matrix vac = Matrix::Zero(n, n);
  vac(0, 0) = 1.0;
  const Matrix mixed = Matrix::Identity(n, n) / static_cast<double>(n);
  for (const Matrix* rho : {static_cast<const Matrix*>(&vac), &mixed}) {
    const auto orbit = oracle::shift_orbit(*rho, 1000);
    for (int steps : {10, 100, 1000}) {
      double mass = 0.0;
      for (int t = 0; t < steps; ++t) mass += orbit[static_cast<std::size_t>(t)].topLeftCorner(w, w).trace().real();
      mass /= steps;
      for (const auto& row : st.window_mass)
        if (row.steps == static_cast<std::size_t>(steps) && row.initial == (rho == &vac ? "vacuum" : "maximally_mixed"))
          oracle_gap = std::max(oracle_gap, std::abs(row.mass - mass));
    }
  }
  for (const auto& row : st.window_mass) worst_excess = std::max(worst_excess, row.mass - row.bound);
  v.require(st.ladder_error == 0.0, "ladder error " + fmt(st.ladder_error));
  v.require(worst_excess <= 1e-15, "window mass above w/n by " + fmt(worst_excess));
  v.require(oracle_gap <= 1e-13, "window mass vs direct simulation " + fmt(oracle_gap));
  v.require(st.fixed_dimension == 0, "fixed dimension " + std::to_string(st.fixed_dimension));
  v.report = {{"ladder_error", st.ladder_error}, {"worst_excess", worst_excess}, {"oracle_gap", oracle_gap},
              {"fixed_dimension", st.fixed_dimension}, {"smallest_singular_value", st.smallest_singular_value}};
  if (v.pass) {
    v.detail = "ladder exact; mass − w/n ≤ " + fmt(worst_excess) + "; fixed dimension 0 (σ_min " +
               fmt(st.smallest_singular_value) + ")";
  }
  return v;
}

Verdict extension_suite() {
  Verdict v;
  Rng rng(kSeed + 9);
  const Index d = 3;
  std::vector<Matrix> rhos;
  for (int i = 0; i < 4; ++i) rhos.push_back(random_density(d, rng));
  EffectFunctional t = [rhos](const Matrix& e) {
    RealVector out(static_cast<Index>(rhos.size()));
    for (std::size_t i = 0; i < rhos.size(); ++i) out(static_cast<Index>(i)) = (rhos[i] * e).trace().real();
    return out;
  };
  std::vector<Matrix> gens;
  for (int i = 0; i < 6; ++i) {
    const Matrix r = random_density(d, rng);
    gens.push_back(r / oracle::op_norm(r));
  }
  const EffectFunctionalExtension ext(t, d, gens);
  double indep = 0.0;
  for (int k = 0; k < 50; ++k) {
    const Matrix a = random_hermitian(d, rng);
    Eigen::SelfAdjointEigenSolver<Matrix> es(a);
    const Eigen::VectorXd lam = es.eigenvalues();
    const Matrix pos = es.eigenvectors() * lam.cwiseMax(0.0).cast<Complex>().asDiagonal() * es.eigenvectors().adjoint();
    const Matrix neg = pos - a;
    const Matrix p1 = random_density(d, rng) * 2.0, p2 = random_density(d, rng) * 0.7;
    const RealVector first = ext.hermitian(pos + p1, neg + p1);
    const RealVector second = ext.hermitian(pos + p2, neg + p2);
    indep = std::max(indep, (first - second).cwiseAbs().maxCoeff());
  }
  double agree = 0.0;
  for (int k = 0; k < 100; ++k) {
    const Matrix x = rng.ginibre(d, d);
    const Vector ext_val = ext(x);
    for (std::size_t i = 0; i < rhos.size(); ++i)
      agree = std::max(agree, std::abs(ext_val(static_cast<Index>(i)) - (rhos[i] * x).trace()));
  }
  v.require(indep <= 1e-12, "decomposition dependence " + fmt(indep));
  v.require(agree <= 1e-10, "state functional mismatch " + fmt(agree));
  v.report = {{"decomposition_independence", indep}, {"state_agreement", agree}};
  if (v.pass) v.detail = "decomposition spread " + fmt(indep) + ", state functional " + fmt(agree);
  return v;
}

Json run_all(std::vector<Verdict>& out, std::vector<double>& times) {
  auto timed = [&](const std::function<Verdict()>& f) {
    const auto t0 = std::chrono::steady_clock::now();
    out.push_back(f());
    times.push_back(seconds_since(t0));
  };
  timed(state_families);
  timed(pvm_partitions);
  const auto t0 = std::chrono::steady_clock::now();
  const auto cases = algebra_cases();
  const double setup = seconds_since(t0);
  timed([&] { return algebra_suite(cases); });
  times.back() += setup;
  timed([&] { return atomic_suite(cases); });
  timed(feasibility_suite);
  timed(qchannel_suite);
  timed(shift_suite);
  timed(extension_suite);
  Json all = Json::array();
  for (const auto& v : out) all.push_back({{"pass", v.pass}, {"report", v.report}});
  return all;
}

std::string cli_report(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return std::to_string(code) + "\n" + out.str();
}

}  // namespace

int main(int argc, char** argv) {
  const std::string data = argc > 1 ? argv[1] : "tests/data";
  const char* names[] = {"state-family consistency", "pvm partition exactness", "broadcasting algebra",
                         "atomic reconstruction",    "measurement feasibility", "q-channel",
                         "shift channel",            "functional extension",    "determinism"};
  std::vector<Verdict> first, second;
  std::vector<double> times, times2;
  Json rep1, rep2;
  try {
    rep1 = run_all(first, times);
    rep2 = run_all(second, times2);
  } catch (const std::exception& e) {
    std::cout << "acceptance aborted: " << e.what() << "\n";
    return 1;
  }
  first[0].require(times[0] < 30.0, "runtime " + fmt(times[0]) + " s");
  first[4].require(times[4] < 60.0, "runtime " + fmt(times[4]) + " s");

  Verdict det;
  det.require(io::dump(rep1) == io::dump(rep2), "acceptance reports differ between runs");
  const std::vector<std::vector<std::string>> commands{
      {"check-states", "-i", data + "/commuting_states.json", "--seed", "7"},
      {"check-meas", "-i", data + "/zx_effects.json", "--seed", "7"},
      {"pvm-embed", "-i", data + "/pvm_n2.json"},
      {"fixpoints", "-i", data + "/mp_channel.json", "--seed", "7"},
      {"cv-q", "--levels", "16", "--window", "4", "--seed", "7"},
      {"cv-shift", "--seed", "7"},
      {"cv-position", "--bins", "2,4", "--levels", "16"},
  };
  for (const auto& c : commands) {
    const std::string a = cli_report(c), b = cli_report(c);
    det.require(a == b, c.front() + " report differs between runs");
    det.require(a.rfind("0\n", 0) == 0, c.front() + " did not complete");
  }
  if (det.pass) det.detail = "criteria reports and " + std::to_string(commands.size()) + " CLI reports byte-identical";
  first.push_back(det);
  times.push_back(0.0);

  int failed = 0;
  for (std::size_t i = 0; i < first.size(); ++i) {
    std::cout << "criterion " << i + 1 << " [" << names[i] << "]: " << (first[i].pass ? "PASS" : "FAIL") << " ("
              << first[i].detail << ")";
    if (i < 8) std::cout << " " << fmt(times[i]) << " s";
    std::cout << "\n";
    failed += first[i].pass ? 0 : 1;
  }
  std::cout << (first.size() - static_cast<std::size_t>(failed)) << "/" << first.size() << " criteria passed\n";
  return failed == 0 ? 0 : 1;
}
