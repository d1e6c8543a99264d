#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "brwre/envmodel.hpp"
#include "brwre/site.hpp"

namespace brwre {

/// Unnormalised polymer weights at time u. The weight of the paths ending at
/// x is weight(x) * exp(log_scale).
struct PolymerLayer {
  std::vector<std::pair<Site, double>> weights;  // site-sorted, all > 0
  double log_scale = 0.0;
  std::uint32_t time = 0;

  double log_total() const;
};

struct PartitionFunction {
  double log_z = 0.0;
  /// log Z_u for u = 0..t (log Z_0 = 0).
  std::vector<double> log_z_by_time;
  PolymerLayer layer;
};

/// Exact Z_t = E_S[prod_{u<t} m_{u,S_u}] by the forward recursion
/// W_{u+1}(x) = (1/2d) sum_v m_{u,x-v} W_u(x-v) on a dense cone grid, with
/// the layer maximum folded into log_scale after each step. Sites inside a
/// layer are updated in parallel; every reduction runs in a fixed site order,
/// so the result does not depend on the thread count.
///
/// Throws PreconditionError naming (u, x) if a reached site has mean 0.
PartitionFunction partition_function(const QuenchedEnvironment& env, std::uint32_t t);

/// log Z_t by enumerating all (2d)^t nearest-neighbour paths. Refuses
/// (DomainError) when (2d)^t exceeds kBruteForceMaxPaths.
inline constexpr std::uint64_t kBruteForceMaxPaths = 10'000'000;
double partition_function_bruteforce(const QuenchedEnvironment& env, std::uint32_t t);

enum class FreeEnergyMethod { point, slope };

std::string to_string(FreeEnergyMethod m);
/// "point" or "slope"; throws std::invalid_argument otherwise.
FreeEnergyMethod parse_free_energy_method(const std::string& s);

struct FreeEnergyEstimate {
  double psi_hat = 0.0;
  double std_error = 0.0;
  std::uint32_t t_used = 0;
  std::size_t replicas = 0;
  FreeEnergyMethod method = FreeEnergyMethod::slope;
  /// Per replica (index r, environment seed master_seed + r).
  std::vector<double> log_z_over_t;
  std::vector<double> slopes;
};

/// Least-squares slope of log Z_u against u over u = ceil(t/2)..t.
double upper_half_slope(std::span<const double> log_z_by_time);

/// Psi estimate from independent environments with seeds master_seed + r.
/// point: mean of (1/t) log Z_t; slope: mean of upper_half_slope.
/// Throws PreconditionError if the law fails the integrability assumption.
FreeEnergyEstimate free_energy(const EnvironmentLaw& law, int d, std::uint32_t t, std::size_t replicas,
                               std::uint64_t master_seed, FreeEnergyMethod method);

/// |log Z_t^rho - t log rho - log Z_t| on one shared environment seed.
double perturbation_identity_check(const EnvironmentLaw& law, double rho, int d, std::uint32_t t,
                                   std::uint64_t seed);

namespace reference {

/// Serial sparse push-form recursion over a std::map; test oracle and
/// benchmark baseline for partition_function.
PartitionFunction partition_function(const QuenchedEnvironment& env, std::uint32_t t);

}  // namespace reference

}  // namespace brwre
