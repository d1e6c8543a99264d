#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "brwre/envmodel.hpp"
#include "brwre/particles.hpp"
#include "brwre/stats.hpp"

namespace brwre {

/// A_n = {x : ||x||_1 <= n, x_1 + ... + x_d even}, sites in sorted order.
struct Diamond {
  int n = 0;
  int d = 1;
  std::vector<Site> sites;
};

Diamond diamond(int n, int d);

/// x + diamond.sites is a subset of the occupied sites of `field`.
bool contains_translate(const Configuration& field, const Site& x, const Diamond& diamond);

struct BlockEventSpec {
  int n = 1;
  Coord L = 1;
  std::uint32_t T = 1;
  int d = 1;
  /// Per-site clamp of the simulated process. Clamping is monotone and keeps
  /// the process below the unclamped one on shared randomness, so the
  /// estimated probability can only be conservative.
  Count site_cap = 256;
};

/// Throws DomainError unless 0 <= n <= L, T >= 1 and d is supported.
void check_block_spec(const BlockEventSpec& spec);

struct BlockWitness {
  std::uint32_t t;
  Site x;
};

struct BlockEventResult {
  bool occurred = false;
  std::optional<BlockWitness> witness;
};

/// Runs the process from one particle on every site of A_n, truncated to the
/// cube {-(2L+2n), ..., 2L+2n}^d, and looks for the first t in {T..2T} (then
/// lexicographically first x in {L+n..2L+n} x {0..2L}^{d-1}) with
/// x + A_n contained in the occupied set at time t.
BlockEventResult block_event(const QuenchedEnvironment& env, const BlockEventSpec& spec,
                             std::uint64_t dynamics_seed);

struct BlockEventStudy {
  MCEstimate probability;
  std::vector<BlockEventResult> replicas;
};

/// Annealed block-event probability: replica r uses the environment and
/// dynamics seeds of the (master_seed, block, r) ladder rung.
BlockEventStudy block_event_probability(const EnvironmentLaw& law, const BlockEventSpec& spec,
                                        std::size_t replicas, std::uint64_t master_seed);

/// Per-replica record of the orthant and face observables of the process
/// started from A_n and truncated to {-L..L}^d.
struct OrthantRow {
  Count total_particles = 0;     // |_L eta_{t_top}|
  Count orthant_particles = 0;   // restricted to {0..L}^d
  Count total_occupied = 0;
  Count orthant_occupied = 0;
  FaceCounts faces;              // over t = 0..T_face
};

struct OrthantOptions {
  int n = 1;
  Coord L = 2;
  std::uint32_t t_top = 4;
  std::uint32_t T_face = 4;
  std::size_t replicas = 1000;
  Count site_cap = 1u << 16;
};

/// Annealed table of orthant and face statistics (one row per replica, in
/// replica order). Throws DomainError unless L > n.
std::vector<OrthantRow> orthant_statistics(const EnvironmentLaw& law, int d, const OrthantOptions& options,
                                           std::uint64_t master_seed);

/// One threshold of a P(X <= a)^k <= P(Y <= b) check.
struct InequalityCheck {
  double threshold = 0.0;
  double lhs = 0.0;           // P(X <= a)^k
  double rhs = 0.0;           // P(Y <= b)
  double combined_se = 0.0;   // sqrt(SE(lhs)^2 + SE(rhs)^2)
  bool pass = false;          // lhs <= rhs + 3 combined_se
};

enum class Observable { particles, occupied };

/// P(|orthant| <= N)^{2^d} <= P(|total| <= N 2^d) for each N in the grid.
std::vector<InequalityCheck> square_root_trick_check(std::span<const OrthantRow> table, int d,
                                                     std::span<const Count> thresholds, Observable which);

/// P(N_+ <= M)^{d 2^d} <= P(N <= M d 2^d) for each M in the grid.
std::vector<InequalityCheck> face_inequality_check(std::span<const OrthantRow> table, int d,
                                                   std::span<const Count> thresholds, Observable which);

}  // namespace brwre
