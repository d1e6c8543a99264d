#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "brwre/errors.hpp"
#include "brwre/site.hpp"

namespace brwre {

inline constexpr double kLawTolerance = 1e-12;

/// Finite-support offspring distribution q on {0, ..., K} with its mean.
///
/// Trailing zero entries are trimmed, so two laws compare equal exactly when
/// they put the same mass on every k.
class OffspringLaw {
 public:
  /// Throws LawError unless all entries are finite, nonnegative and sum to 1
  /// within kLawTolerance.
  explicit OffspringLaw(std::vector<double> pmf);

  static OffspringLaw dirac(std::uint32_t k);

  std::span<const double> pmf() const noexcept { return pmf_; }
  double prob(std::size_t k) const noexcept { return k < pmf_.size() ? pmf_[k] : 0.0; }
  double mean() const noexcept { return mean_; }
  std::uint32_t max_children() const noexcept { return static_cast<std::uint32_t>(pmf_.size() - 1); }

  /// q = delta_0.
  bool is_dirac_zero() const noexcept { return pmf_.size() == 1; }

  /// Mass on {2, 3, ...}; computed as a tail sum so it is exactly zero for
  /// laws supported on {0, 1}.
  double branching_mass() const noexcept { return branching_mass_; }

  /// Inverse CDF: min{k : F(k) > u}; returns K when rounding leaves F(K) <= u.
  std::uint32_t sample(double u) const noexcept {
    const auto n = static_cast<std::uint32_t>(cdf_.size());
    for (std::uint32_t k = 0; k + 1 < n; ++k)
      if (cdf_[k] > u) return k;
    return n - 1;
  }

  /// rho * q + (1 - rho) * delta_0.
  OffspringLaw thinned(double rho) const;

  friend bool operator==(const OffspringLaw& a, const OffspringLaw& b) { return a.pmf_ == b.pmf_; }

 private:
  std::vector<double> pmf_;
  std::vector<double> cdf_;
  double mean_ = 0.0;
  double branching_mass_ = 0.0;
};

/// Free-function form of OffspringLaw::sample.
inline std::uint32_t sample_offspring(const OffspringLaw& q, double u) noexcept { return q.sample(u); }

struct Component {
  double weight;
  OffspringLaw law;
};

/// Finite mixture gamma = sum_j w_j delta_{q_j} over offspring laws.
class EnvironmentLaw {
 public:
  /// Validates weights and merges components with identical pmfs, keeping the
  /// order of first occurrence. Throws LawError naming the offending component.
  explicit EnvironmentLaw(std::vector<Component> components);

  /// Builds from raw (weight, pmf) pairs; a malformed pmf is reported as
  /// "component j: ...".
  static EnvironmentLaw from_raw(const std::vector<std::pair<double, std::vector<double>>>& raw);
  static EnvironmentLaw deterministic(OffspringLaw law);

  std::span<const Component> components() const noexcept { return components_; }
  std::size_t size() const noexcept { return components_.size(); }

  /// Index of the component drawn by the uniform variate u.
  std::size_t select(double u) const noexcept {
    const std::size_t n = cumulative_.size();
    for (std::size_t j = 0; j + 1 < n; ++j)
      if (cumulative_[j] > u) return j;
    return n - 1;
  }

  /// E[m] under gamma.
  double annealed_mean() const noexcept;
  /// E[log m] under gamma; -inf when a positive-weight component has mean 0.
  double mean_log_mean() const noexcept;

 private:
  std::vector<Component> components_;
  std::vector<double> cumulative_;
};

/// gamma^rho: every component q replaced by rho q + (1 - rho) delta_0, weights kept.
/// Throws DomainError unless 0 < rho <= 1.
EnvironmentLaw perturb(const EnvironmentLaw& law, double rho);

enum class Dichotomy { H, H_complement };

struct ValidationReport {
  bool hyp1_ok = false;
  bool hyp2_ok = false;
  Dichotomy dichotomy = Dichotomy::H_complement;
  std::vector<std::string> messages;
};

ValidationReport validate(const EnvironmentLaw& law);

std::string to_string(Dichotomy d);

/// The i.i.d. field (q_{t,x}) realised lazily: query(t, x) is a pure function
/// of (seed, t, x). Immutable; safe to share between threads.
class QuenchedEnvironment {
 public:
  QuenchedEnvironment(EnvironmentLaw law, std::uint64_t seed, int dimension);

  std::size_t component_at(std::uint64_t t, const Site& x) const noexcept;

  const OffspringLaw& query(std::uint64_t t, const Site& x) const noexcept {
    return law_.components()[component_at(t, x)].law;
  }

  double mean_at(std::uint64_t t, const Site& x) const noexcept { return query(t, x).mean(); }

  /// Same seed and dimension, law replaced by gamma^rho; the component drawn at
  /// every (t, x) is unchanged, so m^rho_{t,x} = rho m_{t,x} site by site.
  QuenchedEnvironment perturbed(double rho) const;

  const EnvironmentLaw& law() const noexcept { return law_; }
  std::uint64_t seed() const noexcept { return seed_; }
  int dimension() const noexcept { return dimension_; }

 private:
  EnvironmentLaw law_;
  std::uint64_t seed_;
  int dimension_;
};

}  // namespace brwre
