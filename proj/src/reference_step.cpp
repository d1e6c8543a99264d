// Serial per-particle transcription of the update
//   eta_{t+1}(x) = 1_B(x) sum_v E_{t,x-v}(v, eta_t(x-v)),
//   E_{t,x}(v,p) = sum_{k=1}^p 1{D_{t,x,k} = v} #{i >= 0 : F_{t,x}(i) <= U_{t,x,k}},
// with the count clamped to the support size K. No site batching, no
// parallelism: this is the baseline the fast kernel is checked against.

#include <algorithm>
#include <map>

#include "brwre/particles.hpp"
#include "brwre/rng.hpp"

namespace brwre::reference {

namespace {

Count offspring_by_indicator_sum(const OffspringLaw& q, double u) {
  const auto pmf = q.pmf();
  Count n = 0;
  double f = 0.0;
  for (std::size_t i = 0; i < pmf.size(); ++i) {
    f += pmf[i];
    if (f <= u) ++n;
  }
  return std::min<Count>(n, q.max_children());
}

}  // namespace

Configuration step(const QuenchedEnvironment& env, std::uint32_t t, const Configuration& current,
                   const TruncationBox& box, std::uint64_t dynamics_seed, Count site_cap) {
  const int d = env.dimension();
  const auto dirs = static_cast<std::uint32_t>(2 * d);
  std::map<Site, Count> next;
  for (const auto& [x, p] : current.entries()) {
    const OffspringLaw& q = env.query(t, x);
    const auto ukey = rng::cell_key(dynamics_seed, rng::Stream::offspring, t, x, d);
    const auto dkey = rng::cell_key(dynamics_seed, rng::Stream::displacement, t, x, d);
    for (Count k = 1; k <= p; ++k) {
      const double u = rng::to_unit(rng::draw(ukey, k));
      const std::uint32_t dir = rng::to_below(rng::draw(dkey, k), dirs);
      for (std::uint32_t v = 0; v < dirs; ++v) {
        if (v != dir) continue;
        const Count children = offspring_by_indicator_sum(q, u);
        const Site y = x + unit_step(static_cast<int>(v));
        if (children > 0 && box.contains(y, d)) next[y] += children;
      }
    }
  }
  std::vector<Configuration::Entry> entries(next.begin(), next.end());
  return Configuration::from_entries(std::move(entries), site_cap);
}

}  // namespace brwre::reference
