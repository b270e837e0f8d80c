// Coded-caching placement for K=5, M=6, N=10 and the XOR delivery for one
// demand vector.
#include <iostream>

#include "crs/caching.hpp"

int main() {
  const auto cfg = crs::CCConfig::make(5, 6, 10);
  const auto map = crs::cc_place(cfg);

  std::cout << "t = " << cfg.t << ", subfiles per file = " << cfg.subfiles_per_file() << '\n';
  for (int r = 1; r <= cfg.K; ++r) {
    std::cout << "receiver " << r << " stores";
    for (const auto& id : map.stored(1, r)) std::cout << ' ' << crs::format_set(id.W);
    std::cout << " of every file\n";
  }

  const std::vector<int> demands{1, 2, 3, 4, 5};
  for (const auto& x : crs::cc_delivery_schedule(cfg, demands)) {
    std::cout << "to " << crs::format_set(x.S) << ':';
    for (std::size_t k = 0; k < x.parts.size(); ++k) std::cout << (k ? " ^ " : " ") << x.parts[k];
    std::cout << '\n';
  }
  std::cout << "load per receiver = " << crs::xor_load(cfg) << '\n';
}
