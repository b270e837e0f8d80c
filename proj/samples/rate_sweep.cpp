// Center, edge and sum rates of the coded/uncoded subcases across beta,
// analytic next to 10^5 Monte-Carlo draws.
#include <cstdio>

#include "crs/crs.hpp"

int main() {
  crs::SystemParams params;
  params.alpha = 3.0;  // keeps the edge receiver in coverage at the default radii
  crs::SimConfig sim;
  sim.samples = 100000;

  const auto subcases = crs::all_subcases(crs::Mode::CC_MPC, params.K);
  std::printf("%5s %-16s %9s %9s %9s %9s %9s %9s\n", "beta", "subcase", "R_c", "mc", "R_e", "mc", "R_sum", "mc");
  for (double beta : {0.3, 0.5, 0.7, 0.9}) {
    const crs::PowerSplit split(beta, 0.5);
    const crs::RateAnalyzer analyzer(params, split);
    const auto mc = crs::estimate_rates(subcases, params, split, sim);
    for (std::size_t k = 0; k < subcases.size(); ++k) {
      const auto a = analyzer.report(subcases[k]);
      std::printf("%5.2f %-16s %9.4f %9.4f %9.4f %9.4f %9.4f %9.4f\n", beta, subcases[k].label().c_str(),
                  a.R_center(), mc[k].R_center(), a.R_edge(), mc[k].R_edge(), a.R_sum(), mc[k].R_sum());
    }
  }
}
