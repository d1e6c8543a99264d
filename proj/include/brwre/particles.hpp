#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "brwre/envmodel.hpp"
#include "brwre/site.hpp"

namespace brwre {

using Count = std::uint64_t;
inline constexpr Count kUnbounded = std::numeric_limits<Count>::max();

/// Finitely many particles on Z^d: a site-sorted list of (site, count) with
/// no zero counts.
class Configuration {
 public:
  using Entry = std::pair<Site, Count>;

  Configuration() = default;

  /// Sorts, merges duplicate sites and drops zero counts. Counts above
  /// `site_cap` are clamped to it.
  static Configuration from_entries(std::vector<Entry> entries, Count site_cap = kUnbounded);
  static Configuration single(const Site& x, Count n = 1);
  /// One particle on every listed site.
  static Configuration uniform(std::span<const Site> sites);

  std::span<const Entry> entries() const noexcept { return entries_; }
  Count total() const noexcept { return total_; }
  std::size_t occupied() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }

  Count at(const Site& x) const noexcept;
  bool occupies(const Site& x) const noexcept { return at(x) > 0; }

  friend bool operator==(const Configuration&, const Configuration&) = default;

 private:
  std::vector<Entry> entries_;
  Count total_ = 0;
};

/// a(x) <= b(x) for every x.
bool dominated_by(const Configuration& a, const Configuration& b);

/// Region B of the truncated process: particles born outside B are discarded.
class TruncationBox {
 public:
  enum class Kind { none, centered_cube, explicit_set };

  static TruncationBox none() { return TruncationBox(); }
  /// {-L, ..., L}^d
  static TruncationBox centered_cube(Coord half_width);
  static TruncationBox explicit_set(std::vector<Site> sites);
  /// {lo_1..hi_1} x ... x {lo_d..hi_d}, materialised as an explicit set.
  static TruncationBox rectangle(const Site& lo, const Site& hi, int d);

  Kind kind() const noexcept { return kind_; }
  Coord half_width() const noexcept { return half_width_; }
  std::span<const Site> sites() const noexcept { return sites_; }

  bool contains(const Site& x, int d) const noexcept;

  friend bool operator==(const TruncationBox&, const TruncationBox&) = default;

 private:
  Kind kind_ = Kind::none;
  Coord half_width_ = 0;
  std::vector<Site> sites_;
};

/// One time step of the BRWRE from time t to t + 1.
///
/// The k-th particle (k = 1..p) on an occupied site x draws U_{t,x,k} and
/// D_{t,x,k} from the counter-based streams of `dynamics_seed`; it leaves
/// sample_offspring(q_{t,x}, U) children, all placed on x + D. Children born
/// outside `box` are discarded; surviving site counts are clamped at
/// `site_cap`. Independent per site; parallelised over sites when called
/// outside a parallel region.
Configuration step(const QuenchedEnvironment& env, std::uint32_t t, const Configuration& current,
                   const TruncationBox& box, std::uint64_t dynamics_seed, Count site_cap = kUnbounded);

struct RunOptions {
  std::uint32_t horizon = 200;
  TruncationBox box;
  /// Stop once the total population reaches this many particles.
  Count cap = 1'000'000;
  /// Per-site clamp applied after every step (kUnbounded: none).
  Count site_cap = kUnbounded;
  /// Keep the configuration of every step in Trajectory::fields.
  bool keep_fields = true;
};

struct Trajectory {
  /// fields[t] for t = 0..final_time when kept.
  std::vector<Configuration> fields;
  Configuration final_field;
  std::uint32_t final_time = 0;
  /// Extinction time; nullopt while the population is alive.
  std::optional<std::uint32_t> tau;
  bool capped = false;
  std::vector<Count> totals;
  std::vector<std::size_t> occupied;
  TruncationBox box;

  /// Finite-horizon survival proxy: alive at the end, or cap reached.
  bool survived() const noexcept { return capped || !tau.has_value(); }
};

using StepObserver = std::function<void(std::uint32_t t, const Configuration&)>;

/// Iterates `step` from A until extinction, the horizon, or the cap. The
/// observer, if any, sees every configuration including the initial one.
/// Throws DomainError if A has a site outside the box.
Trajectory run(const QuenchedEnvironment& env, const Configuration& initial, const RunOptions& options,
               std::uint64_t dynamics_seed, const StepObserver& observer = {});

/// Runs from A and A' on identical randomness. Throws DomainError unless A <= A'.
std::pair<Trajectory, Trajectory> run_coupled(const QuenchedEnvironment& env, const Configuration& a,
                                              const Configuration& a_prime, const RunOptions& options,
                                              std::uint64_t dynamics_seed);

/// One trajectory per entry of `half_widths` (strictly increasing cube
/// truncations) followed by the untruncated process, all on shared randomness.
std::vector<Trajectory> run_truncation_chain(const QuenchedEnvironment& env, const Configuration& initial,
                                             std::uint32_t horizon, std::span<const Coord> half_widths,
                                             Count cap, std::uint64_t dynamics_seed, bool keep_fields = true);

struct FaceCounts {
  Count particles_on_face = 0;
  Count occupied_on_face = 0;
  Count particles_on_positive_orthant_face = 0;
  Count occupied_on_positive_orthant_face = 0;

  friend bool operator==(const FaceCounts&, const FaceCounts&) = default;
};

/// Accumulates lateral-face counts {||x||_inf = L} and their positive-orthant
/// part {x_1 = L, x_i >= 0 for i >= 2} over successive configurations.
class FaceCounter {
 public:
  FaceCounter(Coord half_width, int d) : half_width_(half_width), d_(d) {}
  void add(const Configuration& field);
  const FaceCounts& counts() const noexcept { return counts_; }

 private:
  Coord half_width_;
  int d_;
  FaceCounts counts_;
};

/// Face counts of a kept trajectory over t = 0..T. Throws DomainError unless
/// the trajectory was truncated to centered_cube(L), kept its fields, and
/// reached time T or went extinct before it.
FaceCounts face_counts(const Trajectory& trajectory, Coord half_width, std::uint32_t horizon, int d);

/// Serial per-particle implementations kept as a test oracle and benchmark
/// baseline for the kernels above. Same streams, so results must agree exactly.
namespace reference {

Configuration step(const QuenchedEnvironment& env, std::uint32_t t, const Configuration& current,
                   const TruncationBox& box, std::uint64_t dynamics_seed, Count site_cap = kUnbounded);

}  // namespace reference

}  // namespace brwre
