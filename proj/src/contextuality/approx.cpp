#include "broadcastlab/contextuality.hpp"

namespace broadcastlab {

ApproxCheck approx_check(const std::vector<Matrix>& effects, const MeasurePrepareChannel& channel,
                         double epsilon) {
  if (!(epsilon > 0.0)) throw Error(ErrorKind::invalid_input, "approx_check: epsilon must be positive");
  ApproxCheck out;
  out.epsilon = epsilon;
  for (const auto& e : effects) {
    const double dev = hermitian_spectral_bound(channel.heisenberg(e) - e);
    out.deviations.push_back(dev);
    out.pass.push_back(dev < epsilon);
    out.all_pass = out.all_pass && dev < epsilon;
  }
  return out;
}

}  // namespace broadcastlab
