// Prints the coverage curve of the center common stream next to a
// Monte-Carlo estimate.
#include <cstdio>

#include "crs/crs.hpp"

int main() {
  crs::SystemParams params;
  const crs::PowerSplit split(0.7, 0.5);
  const auto pw = crs::stream_powers(params.P, split);
  const crs::SinrDistribution dist(crs::SinrKind::Common, crs::ReceiverClass::Center, pw, params);

  crs::SimConfig sim;
  sim.samples = 200000;
  std::printf("%10s %12s %12s %10s\n", "t", "closed-form", "monte-carlo", "stderr");
  for (double f : {0.01, 0.1, 0.3, 0.5, 0.7, 0.9, 0.99}) {
    const double t = f * dist.spec().theta;
    const auto mc = crs::estimate_coverage(crs::SinrKind::Common, crs::ReceiverClass::Center, t, params, pw, sim);
    std::printf("%10.5f %12.6f %12.6f %10.2e\n", t, dist.coverage(t), mc.estimate, mc.stderr_);
  }
}
