#include "brwre/stats.hpp"

#include <algorithm>
#include <cmath>

namespace brwre {

MCEstimate bernoulli_estimate(std::size_t successes, std::size_t trials) {
  MCEstimate e;
  e.replicas = trials;
  if (trials == 0) {
    e.wilson_high = 1.0;
    return e;
  }
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  e.mean = p;
  e.std_error = trials > 1 ? std::sqrt(p * (1.0 - p) / (n - 1.0)) : 0.0;
  const double z2 = kZ95 * kZ95;
  const double denom = 1.0 + z2 / n;
  const double centre = (p + z2 / (2.0 * n)) / denom;
  const double half = kZ95 * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
  e.wilson_low = std::clamp(centre - half, 0.0, p);
  e.wilson_high = std::clamp(centre + half, p, 1.0);
  return e;
}

MCEstimate mean_estimate(std::span<const double> values) {
  MCEstimate e;
  e.replicas = values.size();
  if (values.empty()) return e;
  const double shift = values.front();
  double s = 0.0;
  for (double v : values) s += v - shift;
  const double n = static_cast<double>(values.size());
  const double dmean = s / n;
  e.mean = shift + dmean;
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) {
      const double dv = (v - shift) - dmean;
      ss += dv * dv;
    }
    e.std_error = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
  }
  e.wilson_low = e.mean - kZ95 * e.std_error;
  e.wilson_high = e.mean + kZ95 * e.std_error;
  return e;
}

}  // namespace brwre
