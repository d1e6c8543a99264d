#pragma once

#include <cmath>
#include <cstddef>
#include <span>

namespace brwre {

/// Monte Carlo estimate. For Bernoulli statistics wilson_low/high is the 95%
/// Wilson score interval; for real-valued statistics it is mean -/+ 1.96 SE.
struct MCEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t replicas = 0;
  double wilson_low = 0.0;
  double wilson_high = 0.0;
};

inline constexpr double kZ95 = 1.959963984540054;

MCEstimate bernoulli_estimate(std::size_t successes, std::size_t trials);

/// Sample mean and standard error sd / sqrt(n), with sd the (n-1)-normalised
/// sample deviation. Deviations are taken from the first sample, so n equal
/// values give exactly that value and SE 0.
MCEstimate mean_estimate(std::span<const double> values);

/// SE of p^k by the delta method.
inline double power_std_error(double p, double se, int k) { return k * std::pow(p, k - 1) * se; }

}  // namespace brwre
