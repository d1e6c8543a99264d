#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "brwre/envmodel.hpp"
#include "brwre/particles.hpp"
#include "brwre/polymer.hpp"
#include "brwre/stats.hpp"

namespace brwre {

/// annealed: fresh environment per replica (the law P^gamma);
/// quenched: one environment for all replicas, fresh dynamics only.
enum class Sampling { annealed, quenched };

struct SurvivalOptions {
  std::uint32_t horizon = 200;
  Count cap = 1'000'000;
  std::size_t replicas = 1000;
  Sampling sampling = Sampling::annealed;
};

struct ReplicaOutcome {
  std::optional<std::uint32_t> tau;
  bool capped = false;
  Count final_total = 0;
  std::size_t final_occupied = 0;

  bool survived() const noexcept { return capped || !tau.has_value(); }
};

struct SurvivalResult {
  MCEstimate estimate;
  std::vector<ReplicaOutcome> replicas;
};

/// Fraction of replicas alive at the horizon or capped. An empty initial
/// configuration has tau = 0 and is excluded: the estimate then has 0 replicas.
SurvivalResult survival_probability(const EnvironmentLaw& law, const Configuration& initial, int d,
                                    const SurvivalOptions& options, std::uint64_t master_seed);

struct SweepOptions {
  std::uint32_t horizon = 200;
  Count cap = 1'000'000;
  std::size_t replicas = 1000;
  std::uint32_t t_polymer = 100;
  std::size_t polymer_replicas = 20;
  FreeEnergyMethod method = FreeEnergyMethod::slope;
};

struct SweepResult {
  std::vector<double> rho_grid;
  std::vector<MCEstimate> survival_proxy;
  FreeEnergyEstimate psi_hat;
  double rho_c_predicted = 1.0;
  /// survived[i][r]: replica r survived under gamma^{rho_grid[i]}.
  std::vector<std::vector<std::uint8_t>> survived;
  /// Replicas whose proxy decreases somewhere along the increasing grid.
  std::size_t monotonicity_violations = 0;
  std::vector<std::string> warnings;
};

/// Predicts rho_c = exp(-Psi_hat(gamma)) and estimates the survival proxy of
/// gamma^rho for every grid point from A = {0:1}. Replica r uses the same
/// environment and dynamics seeds for every rho (the survival ladder), so the
/// rho = 1 point reproduces survival_probability and the proxy is monotone in
/// rho replica by replica. Throws PreconditionError unless the law passes
/// hyp1; a base law failing hyp2 only adds a warning (gamma^rho passes hyp2
/// for every rho < 1).
SweepResult rho_sweep(const EnvironmentLaw& law, int d, std::span<const double> rho_grid,
                      const SweepOptions& options, std::uint64_t master_seed);

/// Closed catalogue of non-decreasing functionals of a configuration.
class MonotoneFunctional {
 public:
  enum class Kind { total_mass, occupied_count, site_indicator, halfspace_count };

  static MonotoneFunctional total_mass() { return MonotoneFunctional(Kind::total_mass); }
  static MonotoneFunctional occupied_count() { return MonotoneFunctional(Kind::occupied_count); }
  static MonotoneFunctional site_indicator(const Site& x);
  /// Particles on {x : x_axis >= threshold}, axis 0-based.
  static MonotoneFunctional halfspace_count(int axis, Coord threshold);

  /// min(f, cap), cap > 0.
  MonotoneFunctional capped(double cap) const;

  /// "total", "occupied", "site:x1,...,xd", "halfspace:i:c" (axis i 1-based,
  /// counts x_i >= c), each optionally followed by "@cap". Anything else is
  /// refused with DomainError.
  static MonotoneFunctional parse(std::string_view spec, int d);

  double operator()(const Configuration& field) const;
  std::string name(int d) const;
  Kind kind() const noexcept { return kind_; }

 private:
  explicit MonotoneFunctional(Kind k) : kind_(k) {}
  Kind kind_;
  Site site_{};
  int axis_ = 0;
  Coord threshold_ = 0;
  std::optional<double> cap_;
};

/// The functionals the shipped FKG suite runs on.
std::vector<MonotoneFunctional> fkg_catalog(int d);

struct FkgReport {
  std::string f;
  std::string g;
  double mean_f = 0.0;
  double mean_g = 0.0;
  double covariance = 0.0;
  double std_error = 0.0;
  std::size_t replicas = 0;
  bool pass = false;  // covariance >= -3 SE
};

struct FkgOptions {
  std::uint32_t t = 20;
  std::size_t replicas = 10'000;
  Count site_cap = Count{1} << 20;
};

/// Annealed covariance test for one pair.
FkgReport fkg_test(const EnvironmentLaw& law, int d, const Configuration& initial, const MonotoneFunctional& f,
                   const MonotoneFunctional& g, const FkgOptions& options, std::uint64_t master_seed);

/// Every unordered pair (including f = g) of `catalog` on one shared set of replicas.
std::vector<FkgReport> fkg_suite(const EnvironmentLaw& law, int d, const Configuration& initial,
                                 std::span<const MonotoneFunctional> catalog, const FkgOptions& options,
                                 std::uint64_t master_seed);

struct DiagnosticsOptions {
  std::size_t replicas = 1000;
  Count site_cap = Count{1} << 16;
  // (a) growth of |eta_t| conditioned on survival, from {0:1}
  std::uint32_t growth_horizon = 50;
  Count growth_cap = 1'000'000;
  // (b) P(n e_1 + A_n in _{B_n} eta^{(N)}_{2n}) against N, n even
  int fill_n = 2;
  std::vector<Count> fill_N = {0, 1, 2, 4, 8, 16, 32, 64};
  // (c) survival proxy from A_n against n
  std::vector<int> diamond_survival_n = {0, 2, 4, 6, 8};
  std::uint32_t diamond_survival_horizon = 100;
  Count diamond_survival_cap = 100'000;
  // (d) P(|_L eta_t| >= N) against L, from {0:1}
  std::uint32_t saturation_t = 10;
  Count saturation_N = 10;
  std::vector<Coord> saturation_L = {1, 2, 4, 8, 16};
};

struct GrowthPoint {
  std::uint32_t t = 0;
  /// Mean over surviving replicas of |eta_t|; capped replicas keep their
  /// last recorded total.
  MCEstimate conditional_total;
};

struct CurvePoint {
  double x = 0.0;
  MCEstimate estimate;
};

struct DiagnosticsReport {
  std::vector<GrowthPoint> growth;
  std::size_t growth_survivors = 0;
  std::vector<CurvePoint> fill;
  std::vector<CurvePoint> diamond_survival;
  std::vector<CurvePoint> saturation;
  /// Replicas breaking the coupled monotonicity of the curve (expected 0).
  std::size_t fill_violations = 0;
  std::size_t diamond_survival_violations = 0;
  std::size_t saturation_violations = 0;
};

DiagnosticsReport diagnostics(const EnvironmentLaw& law, int d, std::uint64_t master_seed,
                              const DiagnosticsOptions& options);

}  // namespace brwre
