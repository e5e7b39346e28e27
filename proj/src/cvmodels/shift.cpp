#include <algorithm>

#include "broadcastlab/cvmodels.hpp"
#include "broadcastlab/fixedpoint.hpp"
#include "broadcastlab/random.hpp"

namespace broadcastlab {

TruncatedChannel shift_channel(FockTruncation trunc) {
  const Index n = trunc.levels;
  TruncatedChannel t;
  t.levels = n;
  t.superop = Matrix::Zero(n * n, n * n);
  for (Index k = 0; k + 1 < n; ++k) t.superop((k + 1) * n + (k + 1), k * n + k) = 1.0;
  t.trace_defects.assign(static_cast<std::size_t>(n), 0.0);
  t.trace_defects.back() = 1.0;
  t.trace_defect_bound = 1.0;
  return t;
}

namespace {

// Action on populations; the channel never creates coherences.
Eigen::MatrixXd population_map(const TruncatedChannel& t) {
  const Index n = t.levels;
  Eigen::MatrixXd p(n, n);
  for (Index r = 0; r < n; ++r)
    for (Index c = 0; c < n; ++c) p(r, c) = t.superop(r * n + r, c * n + c).real();
  return p;
}

double cesaro_window_mass(const Eigen::MatrixXd& pop, const RealVector& initial, std::size_t steps, Index w) {
  RealVector cur = initial;
  double mass = 0.0;
  for (std::size_t k = 0; k < steps; ++k) {
    mass += cur.head(w).sum();
    cur = pop * cur;
  }
  return mass / static_cast<double>(steps);
}

}  // namespace

ShiftStudy shift_channel_study(FockTruncation trunc, Index window, const std::vector<std::size_t>& steps,
                               std::size_t random_initials, std::uint64_t seed, double fixed_tol) {
  const Index n = trunc.levels;
  if (window < 1 || window > n) throw Error(ErrorKind::invalid_input, "shift_channel_study: window outside 1..N");
  const TruncatedChannel ch = shift_channel(trunc);
  ShiftStudy st;
  st.levels = n;
  st.window = window;
  st.trace_defect_bound = ch.trace_defect_bound;

  Matrix rho = Matrix::Zero(n, n);
  rho(0, 0) = 1.0;
  for (Index k = 0; k < n; ++k) {
    Matrix expect = Matrix::Zero(n, n);
    expect(k, k) = 1.0;
    st.ladder_error = std::max(st.ladder_error, (rho - expect).norm());
    rho = ch.apply(rho);
  }

  std::vector<std::pair<std::string, RealVector>> initials;
  RealVector vac = RealVector::Zero(n);
  vac(0) = 1.0;
  initials.emplace_back("vacuum", vac);
  initials.emplace_back("maximally_mixed", RealVector::Constant(n, 1.0 / static_cast<double>(n)));
  Rng rng(seed);
  for (std::size_t i = 0; i < random_initials; ++i)
    initials.emplace_back("random_" + std::to_string(i), random_density(n, rng).diagonal().real());

  const Eigen::MatrixXd pop = population_map(ch);
  for (const auto& [name, p0] : initials)
    for (std::size_t s : steps) {
      if (s < 1) throw Error(ErrorKind::invalid_input, "shift_channel_study: step counts must be ≥ 1");
      WindowMassRow row;
      row.initial = name;
      row.steps = s;
      row.mass = cesaro_window_mass(pop, p0, s, window);
      row.bound = static_cast<double>(window) / static_cast<double>(s);
      st.window_mass.push_back(row);
    }

  const FixedPointSpace fs = fixed_space(ch.superop, n, fixed_tol);
  st.fixed_dimension = fs.dimension();
  st.smallest_singular_value = fs.singular_values().front();
  st.threshold = fs.threshold();
  return st;
}

}  // namespace broadcastlab
