#include <cmath>
#include <vector>

#include "doctest.h"

#include "broadcastlab/contextuality.hpp"
#include "broadcastlab/random.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace broadcastlab;

namespace {

std::vector<DensityOperator> dens(const std::vector<Matrix>& ms) {
  std::vector<DensityOperator> out;
  for (const auto& m : ms) out.emplace_back(m);
  return out;
}

}  // namespace

TEST_SUITE("contextuality") {

TEST_CASE("state sets") {
  Rng rng(89);
  const auto single = check_states(dens({random_density(3, rng)}));
  CHECK(single.verdict == StateVerdict::non_confirming);

  const auto zp = check_states(dens({fx::ket_proj(2, 0), fx::plus()}));
  CHECK(zp.verdict == StateVerdict::confirming);
  CHECK(zp.max_commutator == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(oracle::op_norm(fx::ket_proj(2, 0) * fx::plus() - fx::plus() * fx::ket_proj(2, 0)) == doctest::Approx(0.5));
  CHECK_FALSE(zp.witness);

  const auto diag = check_states(dens({fx::diag({0.5, 0.5}), fx::diag({1.0 / 3.0, 2.0 / 3.0})}));
  REQUIRE(diag.verdict == StateVerdict::non_confirming);
  REQUIRE(diag.witness);
  CHECK(diag.witness_residual <= 1e-12);
  for (const Matrix& r : {fx::diag({0.5, 0.5}), fx::diag({1.0 / 3.0, 2.0 / 3.0})})
    CHECK(oracle::trace_norm(diag.witness->schrodinger(r) - r) <= 1e-12);
}

TEST_CASE("commuting families: witness, broadcaster and fixed points agree") {
  Rng rng(97);
  for (int t = 0; t < 100; ++t) {
    const Index d = 2 + t % 4;
    const auto states = random_commuting_densities(d, 1 + t % 4, rng);
    const auto v = check_states(dens(states));
    REQUIRE(v.verdict == StateVerdict::non_confirming);
    REQUIRE(v.broadcaster);
    CHECK(v.broadcaster_residual <= 1e-10);
    for (const auto& r : states) {
      const Matrix out = v.broadcaster->schrodinger(r);
      CHECK(oracle::trace_norm(oracle::partial_trace(out, d, d, true) - r) <= 1e-10);
      CHECK(oracle::trace_norm(oracle::partial_trace(out, d, d, false) - r) <= 1e-10);
      CHECK(oracle::trace_norm(v.witness->schrodinger(r) - r) <= 1e-10);
    }
  }
}

TEST_CASE("broadcaster for commuting states") {
  const KrausChannel b = broadcaster_from_commuting(dens({fx::ket_proj(2, 0)}));
  CHECK((b.schrodinger(fx::ket_proj(2, 0)) - fx::ket_proj(4, 0)).norm() <= 1e-14);
  try {
    broadcaster_from_commuting(dens({fx::ket_proj(2, 0), fx::plus()}));
    FAIL("expected NotCommuting");
  } catch (const NotCommutingError& e) {
    CHECK(e.kind() == ErrorKind::not_commuting);
    CHECK(e.commutator_norm() == doctest::Approx(0.5));
    CHECK(e.pair() == std::pair<std::size_t, std::size_t>{0, 1});
  }
}

TEST_CASE("pvm_embed: two subsets") {
  std::vector<LabeledProjection> out;
  for (int k = 0; k < 4; ++k) out.push_back({std::string(1, static_cast<char>('a' + k)), fx::ket_proj(4, k)});
  const auto emb = pvm_embed(out, {{"b", "d"}, {"c", "d"}});
  // atom index: bit 0 ↔ K_1, bit 1 ↔ K_2
  REQUIRE(emb.atoms.size() == 4);
  CHECK(emb.atoms[0].outcomes == std::vector<std::string>{"a"});
  CHECK(emb.atoms[1].outcomes == std::vector<std::string>{"b"});
  CHECK(emb.atoms[2].outcomes == std::vector<std::string>{"c"});
  CHECK(emb.atoms[3].outcomes == std::vector<std::string>{"d"});
  CHECK(emb.index_sets[0] == std::vector<std::uint32_t>{1, 3});
  CHECK(emb.index_sets[1] == std::vector<std::uint32_t>{2, 3});
  CHECK(emb.max_residual() <= 1e-14);
}

TEST_CASE("pvm_embed: single projector") {
  Rng rng(101);
  const Vector v = random_pure(3, rng);
  const Matrix p = projector(v);
  const auto emb = pvm_embed(std::vector<Matrix>{p});
  REQUIRE(emb.channel);
  CHECK(emb.atoms.size() == 2);
  CHECK((emb.channel->heisenberg(p) - p).norm() <= 1e-13);
  CHECK((emb.channel->heisenberg(identity(3) - p) - (identity(3) - p)).norm() <= 1e-13);
}

TEST_CASE("pvm_embed: random unions in d=6") {
  Rng rng(103);
  for (int t = 0; t < 10; ++t) {
    const auto pvm = random_pvm(6, 5, rng);
    std::vector<LabeledProjection> out;
    for (std::size_t i = 0; i < pvm.size(); ++i) out.push_back({"o" + std::to_string(i), pvm[i]});
    std::vector<std::vector<std::string>> subsets;
    for (int k = 0; k < 3; ++k) {
      std::vector<std::string> s;
      for (std::size_t i = 0; i < pvm.size(); ++i)
        if (rng.uniform() < 0.5) s.push_back(out[i].label);
      subsets.push_back(s);
    }
    const auto emb = pvm_embed(out, subsets);
    REQUIRE(emb.channel);
    for (const auto& s : subsets) {
      Matrix a = Matrix::Zero(6, 6);
      for (const auto& l : s)
        for (const auto& o : out)
          if (o.label == l) a += o.projection;
      CHECK(oracle::op_norm(emb.channel->heisenberg(a) - a) <= 1e-12);
    }
  }
}

TEST_CASE("pvm_embed rejects non-PVM input and too many subsets") {
  CHECK_THROWS_AS(pvm_embed(std::vector<Matrix>{fx::ket_proj(2, 0), fx::plus()}), Error);
  std::vector<Matrix> many(21, fx::ket_proj(2, 0));
  try {
    pvm_embed(many);
    FAIL("no guard");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::cap_exceeded);
  }
}

TEST_CASE("feasibility: simple cases") {
  FeasibilityProblem pvm{{fx::ket_proj(2, 0), fx::ket_proj(2, 1)}, 2};
  const auto v = check_measurements_feasibility(pvm);
  CHECK(v.status == FeasibilityStatus::feasible);
  CHECK(check_witness(pvm, v.choi).max() <= pvm.tol);
  // the exact embedding satisfies the same constraints
  const auto emb = pvm_embed(std::vector<Matrix>{fx::ket_proj(2, 0)});
  CHECK(check_witness(pvm, choi_transform(Channel(*emb.channel)).matrix()).max() <= 1e-12);

  FeasibilityProblem unit{{identity(2)}, 2};
  CHECK(check_measurements_feasibility(unit).status == FeasibilityStatus::feasible);

  FeasibilityProblem zx{{fx::ket_proj(2, 0), fx::ket_proj(2, 1), fx::plus(), fx::minus()}, 2};
  const auto bad = check_measurements_feasibility(zx);
  CHECK(bad.status == FeasibilityStatus::infeasible_stalled);
  CHECK(bad.best_residual > 10 * zx.tol);
  CHECK_FALSE(bad.witness);
}

TEST_CASE("feasibility: qutrit PVM and embedded unions") {
  Rng rng(107);
  const auto pvm = random_pvm(3, 3, rng);
  FeasibilityProblem p3{{pvm[0], pvm[1]}, 3};
  const auto v = check_measurements_feasibility(p3);
  CHECK(v.status == FeasibilityStatus::feasible);
  const auto chk = check_witness(p3, v.choi);
  CHECK(chk.psd_violation <= p3.tol);
  CHECK(chk.ppt_violation <= p3.tol);
  if (v.witness) {
    for (const auto& e : p3.effects) CHECK((v.witness->heisenberg(e) - e).norm() <= 1e-5);
  }

  const auto pvm2 = random_pvm(3, 2, rng);
  FeasibilityProblem sub{{pvm2[0], identity(3) - pvm2[0]}, 3};
  CHECK(check_measurements_feasibility(sub).status == FeasibilityStatus::feasible);
}

TEST_CASE("feasibility witness check is independent of the solver") {
  FeasibilityProblem p{{fx::ket_proj(2, 0)}, 2};
  // identity channel Choi fixes everything but is not PPT
  Matrix j = Matrix::Zero(4, 4);
  for (int k : {0, 3})
    for (int l : {0, 3}) j(k, l) = 1.0;
  const auto w = check_witness(p, j);
  // unnormalized: J^{T1} is the swap, eigenvalue −1
  CHECK(w.ppt_violation == doctest::Approx(1.0));
  CHECK(w.psd_violation <= 1e-14);
  CHECK(w.trace_residual <= 1e-14);
}

TEST_CASE("approximate criterion") {
  Rng rng(109);
  const auto mp = random_mp_channel(3, 3, rng);
  const auto one = approx_check({identity(3)}, mp, 1e-3);
  CHECK(one.deviations[0] <= 1e-14);
  CHECK(one.all_pass);

  const auto emb = pvm_embed(std::vector<Matrix>{fx::diag({1, 0, 0}), fx::diag({1, 1, 0})});
  const auto exact = approx_check({fx::diag({1, 0, 0}), fx::diag({1, 1, 0})}, *emb.channel, 1e-12);
  CHECK(exact.deviations[0] <= 1e-12);
  CHECK(exact.deviations[1] <= 1e-12);

  const auto pin = pinching_channel(identity(2));
  const auto sx = approx_check({fx::plus()}, pin, 0.1);
  CHECK(sx.deviations[0] == doctest::Approx(0.5));
  CHECK_FALSE(sx.all_pass);
  CHECK(approx_check({fx::plus()}, pin, 0.6).all_pass);
  CHECK_THROWS_AS(approx_check({fx::plus()}, pin, 0.0), Error);
}

TEST_CASE("effect functional extension: linear input") {
  Rng rng(113);
  const Matrix rho = random_density(3, rng);
  const EffectFunctional t = [rho](const Matrix& e) {
    RealVector v(1);
    v(0) = (rho * e).trace().real();
    return v;
  };
  std::vector<Matrix> gens;
  for (int i = 0; i < 3; ++i) gens.push_back(projector(random_pure(3, rng)));
  const EffectFunctionalExtension ext(t, 3, gens);
  for (int k = 0; k < 100; ++k) {
    const Matrix a = rng.ginibre(3, 3);
    CHECK(std::abs(ext(a)(0) - (rho * a).trace()) <= 1e-12);
  }
  CHECK(ext.linearity_residual(1, 20) <= 1e-9);
  CHECK(ext.positivity_floor(2, 20) >= -1e-12);
}

TEST_CASE("effect functional extension: decomposition independence and homogeneity") {
  const Matrix rho = fx::diag({0.7, 0.3});
  const EffectFunctional t = [rho](const Matrix& e) {
    RealVector v(2);
    v(0) = (rho * e).trace().real();
    v(1) = (fx::plus() * e).trace().real();
    return v;
  };
  const EffectFunctionalExtension ext(t, 2, {fx::ket_proj(2, 0), fx::plus()});
  const Matrix p0 = fx::ket_proj(2, 0), p1 = fx::ket_proj(2, 1);
  const RealVector a = ext.hermitian(p0, p1);
  const RealVector b = ext.hermitian(p0 + 0.3 * identity(2), p1 + 0.3 * identity(2));
  CHECK((a - b).norm() <= 1e-12);
  CHECK((a - ext.hermitian(fx::sz())).norm() <= 1e-12);
  for (const Matrix& p : {p0, fx::plus()}) CHECK((ext.positive(2.5 * p) - 2.5 * ext.positive(p)).norm() <= 1e-12);
}

TEST_CASE("effect functional extension rejects axiom violations") {
  const EffectFunctional unnormalized = [](const Matrix& e) {
    RealVector v(1);
    v(0) = 0.9 * e.trace().real() / static_cast<double>(e.rows());
    return v;
  };
  try {
    EffectFunctionalExtension(unnormalized, 2, {fx::ket_proj(2, 0)});
    FAIL("accepted T(I) ≠ 1");
  } catch (const AxiomViolationError& e) {
    CHECK(e.kind() == ErrorKind::axiom_violation);
    CHECK(e.axiom().find("normalization") != std::string::npos);
  }
  const EffectFunctional nonlinear = [](const Matrix& e) {
    RealVector v(1);
    const double x = e(0, 0).real();
    v(0) = 0.5 * (x * x + e(1, 1).real());
    if (std::abs(e(0, 0) - 1.0) < 1e-14 && std::abs(e(1, 1) - 1.0) < 1e-14) v(0) = 1.0;
    return v;
  };
  try {
    EffectFunctionalExtension(nonlinear, 2, {fx::ket_proj(2, 0)});
    FAIL("accepted a nonlinear functional");
  } catch (const AxiomViolationError& e) {
    CHECK(e.deviation() > 1e-9);
    CHECK_FALSE(e.where().empty());
  }
}

}
