#include <cmath>
#include <limits>
#include <vector>

#include "doctest.h"

#include "broadcastlab/cvmodels.hpp"
#include "broadcastlab/fixedpoint.hpp"
#include "broadcastlab/random.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace broadcastlab;

TEST_SUITE("cvmodels") {

TEST_CASE("Q channel closed form") {
  CHECK(qchannel_element(0, 0, 0, 0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(oracle::qchannel_element(0, 0, 0, 0) == doctest::Approx(0.5).epsilon(1e-12));
  for (int m = 0; m < 10; ++m) CHECK(qchannel_element(m, m, 0, 0) == doctest::Approx(std::pow(0.5, m + 1)).epsilon(1e-13));
  CHECK(qchannel_element(1, 0, 0, 0) == 0.0);
  CHECK(qchannel_element(2, 1, 3, 1) == 0.0);
  CHECK(std::abs(oracle::qchannel_element(2, 1, 3, 1)) <= 1e-14);
  CHECK(qchannel_element(2, 1, 2, 1) != 0.0);
}

TEST_CASE("Q channel closed form matches independent quadrature") {
  double worst = 0.0;
  for (int m = 0; m < 6; ++m)
    for (int n = 0; n < 6; ++n)
      for (int j = 0; j < 6; ++j) {
        const int k = n + j - m;
        if (k < 0 || k >= 6) continue;
        worst = std::max(worst, std::abs(qchannel_element(m, n, j, k) - oracle::qchannel_element(m, n, j, k)));
      }
  CHECK(worst <= 1e-10);
  const auto agree = qchannel_validate(12);
  CHECK(agree.max_deviation <= 1e-8);
  CHECK(agree.elements > 0);
}

TEST_CASE("truncated Q channel") {
  const QChannel q = qchannel_build(FockTruncation(12));
  const Matrix out = q.apply(fx::ket_proj(12, 0));
  double total = 0.0;
  for (Index m = 0; m < 12; ++m) {
    CHECK(out(m, m).real() == doctest::Approx(std::pow(0.5, m + 1)).epsilon(1e-13));
    total += out(m, m).real();
  }
  CHECK(total == doctest::Approx(1.0 - std::pow(0.5, 12)));
  CHECK(q.trace_defects().front() == doctest::Approx(std::pow(0.5, 12)).epsilon(1e-10));
  CHECK(qchannel_self_adjointness(q, 3, 10) <= 1e-12);
  // block storage agrees with the dense superoperator
  Rng rng(127);
  const Matrix a = random_hermitian(12, rng);
  CHECK((q.apply(a) - q.truncated().apply(a)).norm() <= 1e-13);
  CHECK_THROWS_AS(FockTruncation(0), Error);
}

TEST_CASE("Q channel window analysis reports truncation defects") {
  const QChannel q = qchannel_build(FockTruncation(24));
  const auto rep = qchannel_fixed_analysis(q, 8, {1, 100, 10000}, 2, 5);
  CHECK(rep.top_eigenvalue < 1.0);
  CHECK(rep.identity_window_deviation < 1e-2);
  CHECK(rep.trace_defect_bound > 0.0);
  for (const auto& s : rep.series) {
    if (s.input == "identity") continue;  // already flat at length 1
    REQUIRE(s.rows.size() == 3);
    CHECK(s.rows[0].relative == doctest::Approx(1.0));
    CHECK(s.rows[2].relative < s.rows[1].relative);
  }
}

TEST_CASE("shift channel") {
  const TruncatedChannel sh = shift_channel(FockTruncation(6));
  Matrix rho = fx::ket_proj(6, 0);
  for (int k = 0; k < 3; ++k) rho = sh.apply(rho);
  CHECK((rho - fx::ket_proj(6, 3)).norm() == 0.0);
  // coherences are discarded, the top level is absorbed
  Matrix coh = Matrix::Zero(6, 6);
  coh(0, 1) = coh(1, 0) = 0.5;
  CHECK(sh.apply(coh).norm() == 0.0);
  CHECK(sh.apply(fx::ket_proj(6, 5)).norm() == 0.0);

  Rng rng(131);
  const Matrix r = random_density(6, rng);
  const auto orbit = oracle::shift_orbit(r, 5);
  Matrix cur = r;
  for (int t = 1; t < 5; ++t) {
    cur = sh.apply(cur);
    CHECK((cur - orbit[static_cast<std::size_t>(t)]).norm() <= 1e-15);
  }
  CHECK(fixed_space(sh.superop, 6).dimension() == 0);
}

TEST_CASE("shift channel study") {
  const auto st = shift_channel_study(FockTruncation(16), 4, {10, 100, 1000}, 2, 7);
  CHECK(st.ladder_error == 0.0);
  CHECK(st.fixed_dimension == 0);
  CHECK(st.smallest_singular_value > st.threshold);
  for (const auto& row : st.window_mass) CHECK(row.mass <= row.bound + 1e-12);
}

TEST_CASE("Hermite functions are orthonormal") {
  // Gauss–Hermite-free check: trapezoid on a wide grid is spectrally accurate here
  const Index n = 8;
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(n, n);
  const double h = 0.01;
  for (double x = -15.0; x <= 15.0; x += h) {
    const RealVector v = hermite_functions(x, n);
    g += h * v * v.transpose();
  }
  CHECK((g - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("interval effects") {
  const Matrix whole = interval_effect(-20.0, 20.0, 16);
  CHECK((whole - identity(16)).cwiseAbs().maxCoeff() <= 1e-10);
  const double inf = std::numeric_limits<double>::infinity();
  const Matrix half = interval_effect(-inf, 0.0, 16);
  for (Index m = 0; m < 16; ++m) CHECK(half(m, m).real() == doctest::Approx(0.5).epsilon(1e-10));
  const Matrix sym = interval_effect(-1.0, 1.0, 10);
  for (Index m = 0; m < 10; ++m)
    for (Index k = 0; k < 10; ++k)
      if ((m + k) % 2) CHECK(std::abs(sym(m, k)) <= 1e-12);
  CHECK_THROWS_AS(interval_effect(1.0, 0.0, 4), Error);
}

TEST_CASE("binned position measurement") {
  const auto bp = binned_position_pvm(-3.0, 3.0, 4, FockTruncation(16));
  REQUIRE(bp.bins.size() == 4);
  Matrix total = bp.complement;
  for (const auto& b : bp.bins) total += b;
  CHECK((total - identity(16)).norm() <= 1e-14);
  for (const auto& b : bp.bins) CHECK(oracle::min_eig(b) >= -1e-12);
  CHECK_THROWS_AS(binned_position_pvm(0.0, 1.0, 0, FockTruncation(4)), Error);
}

TEST_CASE("repair to commuting projections") {
  // already a PVM: nothing to repair
  Rng rng(137);
  const auto pvm = random_pvm(5, 3, rng);
  const auto same = repair_to_pvm(pvm);
  CHECK(same.repair_distance <= 1e-10);
  CHECK(same.max_commutator <= 1e-12);

  const auto row = position_embedding(-3.0, 3.0, 4, FockTruncation(32));
  CHECK(row.embedded_residual <= 1e-12);
  CHECK(row.embedded_residual <= row.repair_distance);
  CHECK(row.max_commutator > 0.0);
  CHECK(row.completeness_defect <= 1e-13);
}

}
