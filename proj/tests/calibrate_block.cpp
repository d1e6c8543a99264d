// Block-event probability from the naive simulator, for freezing the
// acceptance threshold. Usage: calibrate_block [replicas] [seed]
#include <cmath>
#include <cstdio>
#include <cstdlib>

#include "oracles.hpp"

int main(int argc, char** argv) {
  const int replicas = argc > 1 ? std::atoi(argv[1]) : 200;
  const std::uint64_t seed = argc > 2 ? std::strtoull(argv[2], nullptr, 10) : 20261018;
  for (int n : {0, 2, 4}) {
    int hits = 0;
    for (int r = 0; r < replicas; ++r) {
      oracle::NaiveSim sim({{1.0, {0.0, 0.0, 1.0}}}, 1, seed + static_cast<std::uint64_t>(r));
      hits += oracle::naive_block_event(sim, n, 12, 40, 1, 256) ? 1 : 0;
    }
    const double p = static_cast<double>(hits) / replicas;
    std::printf("n=%d replicas=%d hits=%d p=%.4f se=%.4f\n", n, replicas, hits, p,
                std::sqrt(p * (1 - p) / std::max(1, replicas - 1)));
  }
}
