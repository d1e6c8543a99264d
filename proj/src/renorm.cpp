#include "brwre/renorm.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "brwre/rng.hpp"

namespace brwre {

Diamond diamond(int n, int d) {
  check_dimension(d);
  if (n < 0) throw DomainError("diamond radius must be >= 0");
  Diamond out{n, d, {}};
  Site x;
  for (int i = 0; i < d; ++i) x[i] = -n;
  while (true) {
    if (l1_norm(x, d) <= n && coordinate_sum(x, d) % 2 == 0) out.sites.push_back(x);
    int i = 0;
    for (; i < d; ++i) {
      if (x[i] < n) {
        ++x[i];
        break;
      }
      x[i] = -n;
    }
    if (i == d) break;
  }
  std::sort(out.sites.begin(), out.sites.end());
  return out;
}

bool contains_translate(const Configuration& field, const Site& x, const Diamond& diamond) {
  if (field.occupied() < diamond.sites.size()) return false;
  return std::all_of(diamond.sites.begin(), diamond.sites.end(),
                     [&](const Site& s) { return field.occupies(x + s); });
}

void check_block_spec(const BlockEventSpec& spec) {
  check_dimension(spec.d);
  if (spec.n < 0 || spec.L < 1 || spec.n > spec.L)
    throw DomainError("block event needs 0 <= n <= L and L >= 1 (n = " + std::to_string(spec.n) +
                      ", L = " + std::to_string(spec.L) + ")");
  if (spec.T < 1) throw DomainError("block event needs T >= 1");
  if (spec.site_cap < 1) throw DomainError("block event site cap must be >= 1");
}

namespace {

std::optional<Site> find_translate(const Configuration& field, const BlockEventSpec& spec, const Diamond& a) {
  const int d = spec.d;
  Site lo;
  Site hi;
  lo[0] = spec.L + spec.n;
  hi[0] = 2 * spec.L + spec.n;
  for (int i = 1; i < d; ++i) {
    lo[i] = 0;
    hi[i] = 2 * spec.L;
  }
  // Lexicographic order with x_1 most significant.
  Site x = lo;
  while (true) {
    if (contains_translate(field, x, a)) return x;
    int i = d - 1;
    for (; i >= 0; --i) {
      if (x[i] < hi[i]) {
        ++x[i];
        break;
      }
      x[i] = lo[i];
    }
    if (i < 0) return std::nullopt;
  }
}

}  // namespace

BlockEventResult block_event(const QuenchedEnvironment& env, const BlockEventSpec& spec,
                             std::uint64_t dynamics_seed) {
  check_block_spec(spec);
  if (env.dimension() != spec.d) throw DomainError("environment dimension differs from the block spec");
  const Diamond a = diamond(spec.n, spec.d);
  const TruncationBox box = TruncationBox::centered_cube(2 * spec.L + 2 * spec.n);
  Configuration current = Configuration::uniform(a.sites);

  BlockEventResult result;
  for (std::uint32_t t = 0;; ++t) {
    if (current.empty()) return result;
    if (t >= spec.T) {
      if (auto x = find_translate(current, spec, a)) {
        result.occurred = true;
        result.witness = BlockWitness{t, *x};
        return result;
      }
    }
    if (t == 2 * spec.T) return result;
    current = step(env, t, current, box, dynamics_seed, spec.site_cap);
  }
}

BlockEventStudy block_event_probability(const EnvironmentLaw& law, const BlockEventSpec& spec,
                                        std::size_t replicas, std::uint64_t master_seed) {
  check_block_spec(spec);
  BlockEventStudy study;
  study.replicas.resize(replicas);
  const auto n = static_cast<std::ptrdiff_t>(replicas);
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t r = 0; r < n; ++r) {
    const auto seeds = rng::replica_seeds(master_seed, rng::Tag::block, static_cast<std::uint64_t>(r));
    const QuenchedEnvironment env(law, seeds.environment, spec.d);
    study.replicas[static_cast<std::size_t>(r)] = block_event(env, spec, seeds.dynamics);
  }
  const auto hits = static_cast<std::size_t>(
      std::count_if(study.replicas.begin(), study.replicas.end(), [](const auto& b) { return b.occurred; }));
  study.probability = bernoulli_estimate(hits, replicas);
  return study;
}

std::vector<OrthantRow> orthant_statistics(const EnvironmentLaw& law, int d, const OrthantOptions& options,
                                           std::uint64_t master_seed) {
  check_dimension(d);
  if (options.L <= options.n) throw DomainError("orthant statistics need L > n");
  const Diamond a = diamond(options.n, d);
  const Configuration initial = Configuration::uniform(a.sites);

  RunOptions run_opt;
  run_opt.horizon = std::max(options.t_top, options.T_face);
  run_opt.box = TruncationBox::centered_cube(options.L);
  run_opt.cap = kUnbounded;
  run_opt.site_cap = options.site_cap;
  run_opt.keep_fields = false;

  std::vector<OrthantRow> table(options.replicas);
  const auto n = static_cast<std::ptrdiff_t>(options.replicas);
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t r = 0; r < n; ++r) {
    const auto seeds = rng::replica_seeds(master_seed, rng::Tag::orthant, static_cast<std::uint64_t>(r));
    const QuenchedEnvironment env(law, seeds.environment, d);
    OrthantRow row;
    FaceCounter faces(options.L, d);
    run(env, initial, run_opt, seeds.dynamics, [&](std::uint32_t t, const Configuration& field) {
      if (t <= options.T_face) faces.add(field);
      if (t != options.t_top) return;
      row.total_particles = field.total();
      row.total_occupied = field.occupied();
      for (const auto& [x, c] : field.entries()) {
        bool inside = true;
        for (int i = 0; i < d && inside; ++i) inside = x[i] >= 0;
        if (!inside) continue;
        row.orthant_particles += c;
        row.orthant_occupied += 1;
      }
    });
    row.faces = faces.counts();
    table[static_cast<std::size_t>(r)] = row;
  }
  return table;
}

namespace {

InequalityCheck power_inequality(std::span<const OrthantRow> table, double threshold, int power,
                                 double rhs_threshold, auto&& small_part, auto&& whole) {
  std::size_t below_part = 0;
  std::size_t below_whole = 0;
  for (const auto& row : table) {
    if (static_cast<double>(small_part(row)) <= threshold) ++below_part;
    if (static_cast<double>(whole(row)) <= rhs_threshold) ++below_whole;
  }
  const auto p = bernoulli_estimate(below_part, table.size());
  const auto q = bernoulli_estimate(below_whole, table.size());
  InequalityCheck c;
  c.threshold = threshold;
  c.lhs = std::pow(p.mean, power);
  c.rhs = q.mean;
  const double se_lhs = power_std_error(p.mean, p.std_error, power);
  c.combined_se = std::sqrt(se_lhs * se_lhs + q.std_error * q.std_error);
  c.pass = c.lhs <= c.rhs + 3.0 * c.combined_se;
  return c;
}

}  // namespace

std::vector<InequalityCheck> square_root_trick_check(std::span<const OrthantRow> table, int d,
                                                     std::span<const Count> thresholds, Observable which) {
  const int k = 1 << d;
  std::vector<InequalityCheck> out;
  for (const Count n : thresholds) {
    const double a = static_cast<double>(n);
    if (which == Observable::particles)
      out.push_back(power_inequality(table, a, k, a * k, [](const OrthantRow& r) { return r.orthant_particles; },
                                     [](const OrthantRow& r) { return r.total_particles; }));
    else
      out.push_back(power_inequality(table, a, k, a * k, [](const OrthantRow& r) { return r.orthant_occupied; },
                                     [](const OrthantRow& r) { return r.total_occupied; }));
  }
  return out;
}

std::vector<InequalityCheck> face_inequality_check(std::span<const OrthantRow> table, int d,
                                                   std::span<const Count> thresholds, Observable which) {
  const int k = d * (1 << d);
  std::vector<InequalityCheck> out;
  for (const Count m : thresholds) {
    const double a = static_cast<double>(m);
    if (which == Observable::particles)
      out.push_back(power_inequality(
          table, a, k, a * k, [](const OrthantRow& r) { return r.faces.particles_on_positive_orthant_face; },
          [](const OrthantRow& r) { return r.faces.particles_on_face; }));
    else
      out.push_back(power_inequality(
          table, a, k, a * k, [](const OrthantRow& r) { return r.faces.occupied_on_positive_orthant_face; },
          [](const OrthantRow& r) { return r.faces.occupied_on_face; }));
  }
  return out;
}

}  // namespace brwre
