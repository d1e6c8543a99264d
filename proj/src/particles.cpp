#include "brwre/particles.hpp"

#include <algorithm>
#include <string>

#include "brwre/parallel.hpp"
#include "brwre/rng.hpp"

namespace brwre {

namespace {

constexpr std::size_t kParallelSites = 64;

Count saturating_add(Count a, Count b) noexcept { return b > kUnbounded - a ? kUnbounded : a + b; }

}  // namespace

Configuration Configuration::from_entries(std::vector<Entry> entries, Count site_cap) {
  std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) { return a.first < b.first; });
  Configuration out;
  out.entries_.reserve(entries.size());
  for (auto& e : entries) {
    if (e.second == 0) continue;
    if (!out.entries_.empty() && out.entries_.back().first == e.first)
      out.entries_.back().second = saturating_add(out.entries_.back().second, e.second);
    else
      out.entries_.push_back(e);
  }
  for (auto& e : out.entries_) {
    e.second = std::min(e.second, site_cap);
    out.total_ = saturating_add(out.total_, e.second);
  }
  return out;
}

Configuration Configuration::single(const Site& x, Count n) { return from_entries({{x, n}}); }

Configuration Configuration::uniform(std::span<const Site> sites) {
  std::vector<Entry> e;
  e.reserve(sites.size());
  for (const auto& s : sites) e.emplace_back(s, 1);
  return from_entries(std::move(e));
}

Count Configuration::at(const Site& x) const noexcept {
  auto it = std::lower_bound(entries_.begin(), entries_.end(), x,
                             [](const Entry& e, const Site& s) { return e.first < s; });
  return (it != entries_.end() && it->first == x) ? it->second : 0;
}

bool dominated_by(const Configuration& a, const Configuration& b) {
  // Both lists are site-sorted: one merge pass.
  auto eb = b.entries();
  std::size_t j = 0;
  for (const auto& [x, n] : a.entries()) {
    while (j < eb.size() && eb[j].first < x) ++j;
    if (j == eb.size() || eb[j].first != x || eb[j].second < n) return false;
  }
  return true;
}

TruncationBox TruncationBox::centered_cube(Coord half_width) {
  if (half_width < 0) throw DomainError("cube half-width must be >= 0");
  TruncationBox b;
  b.kind_ = Kind::centered_cube;
  b.half_width_ = half_width;
  return b;
}

TruncationBox TruncationBox::explicit_set(std::vector<Site> sites) {
  std::sort(sites.begin(), sites.end());
  sites.erase(std::unique(sites.begin(), sites.end()), sites.end());
  TruncationBox b;
  b.kind_ = Kind::explicit_set;
  b.sites_ = std::move(sites);
  return b;
}

TruncationBox TruncationBox::rectangle(const Site& lo, const Site& hi, int d) {
  check_dimension(d);
  std::vector<Site> sites;
  for (int i = 0; i < d; ++i)
    if (lo[i] > hi[i]) return explicit_set({});
  Site x = lo;
  while (true) {
    sites.push_back(x);
    int i = 0;
    for (; i < d; ++i) {
      if (x[i] < hi[i]) {
        ++x[i];
        break;
      }
      x[i] = lo[i];
    }
    if (i == d) break;
  }
  return explicit_set(std::move(sites));
}

bool TruncationBox::contains(const Site& x, int d) const noexcept {
  switch (kind_) {
    case Kind::none:
      return true;
    case Kind::centered_cube:
      return linf_norm(x, d) <= half_width_;
    case Kind::explicit_set:
      return std::binary_search(sites_.begin(), sites_.end(), x);
  }
  return false;
}

Configuration step(const QuenchedEnvironment& env, std::uint32_t t, const Configuration& current,
                   const TruncationBox& box, std::uint64_t dynamics_seed, Count site_cap) {
  const int d = env.dimension();
  const int dirs = 2 * d;
  const auto entries = current.entries();
  const auto n_sites = static_cast<std::ptrdiff_t>(entries.size());
  std::vector<Count> born(entries.size() * static_cast<std::size_t>(dirs), 0);

#pragma omp parallel for schedule(static) if (n_sites >= static_cast<std::ptrdiff_t>(kParallelSites) && !parallel::in_parallel_region())
  for (std::ptrdiff_t i = 0; i < n_sites; ++i) {
    const auto& [x, p] = entries[static_cast<std::size_t>(i)];
    const OffspringLaw& q = env.query(t, x);
    if (q.is_dirac_zero()) continue;
    const auto ukey = rng::cell_key(dynamics_seed, rng::Stream::offspring, t, x, d);
    const auto dkey = rng::cell_key(dynamics_seed, rng::Stream::displacement, t, x, d);
    Count* slot = born.data() + i * dirs;
    for (Count k = 1; k <= p; ++k) {
      const std::uint32_t children = q.sample(rng::to_unit(rng::draw(ukey, k)));
      if (children == 0) continue;
      const std::uint32_t dir = rng::to_below(rng::draw(dkey, k), static_cast<std::uint32_t>(dirs));
      slot[dir] = saturating_add(slot[dir], children);
    }
  }

  std::vector<Configuration::Entry> next;
  next.reserve(entries.size() * 2);
  for (std::size_t i = 0; i < entries.size(); ++i) {
    for (int j = 0; j < dirs; ++j) {
      const Count n = born[i * static_cast<std::size_t>(dirs) + static_cast<std::size_t>(j)];
      if (n == 0) continue;
      const Site y = entries[i].first + unit_step(j);
      if (box.contains(y, d)) next.emplace_back(y, n);
    }
  }
  return Configuration::from_entries(std::move(next), site_cap);
}

namespace {

void check_inside(const Configuration& a, const TruncationBox& box, int d) {
  for (const auto& [x, n] : a.entries())
    if (!box.contains(x, d)) throw DomainError("initial site (" + to_string(x, d) + ") lies outside the truncation box");
}

void record(Trajectory& tr, std::uint32_t t, const Configuration& field, bool keep) {
  tr.totals.push_back(field.total());
  tr.occupied.push_back(field.occupied());
  tr.final_time = t;
  if (keep) tr.fields.push_back(field);
}

}  // namespace

Trajectory run(const QuenchedEnvironment& env, const Configuration& initial, const RunOptions& options,
               std::uint64_t dynamics_seed, const StepObserver& observer) {
  const int d = env.dimension();
  check_inside(initial, options.box, d);

  Trajectory tr;
  tr.box = options.box;
  Configuration current = initial;
  record(tr, 0, current, options.keep_fields);
  if (observer) observer(0, current);
  if (current.empty()) {
    tr.tau = 0;
  } else if (current.total() >= options.cap) {
    tr.capped = true;
  }

  for (std::uint32_t t = 0; t < options.horizon && !tr.tau && !tr.capped; ++t) {
    current = step(env, t, current, options.box, dynamics_seed, options.site_cap);
    record(tr, t + 1, current, options.keep_fields);
    if (observer) observer(t + 1, current);
    if (current.empty())
      tr.tau = t + 1;
    else if (current.total() >= options.cap)
      tr.capped = true;
  }
  tr.final_field = std::move(current);
  return tr;
}

std::pair<Trajectory, Trajectory> run_coupled(const QuenchedEnvironment& env, const Configuration& a,
                                              const Configuration& a_prime, const RunOptions& options,
                                              std::uint64_t dynamics_seed) {
  if (!dominated_by(a, a_prime)) throw DomainError("run_coupled requires A <= A' pointwise");
  return {run(env, a, options, dynamics_seed), run(env, a_prime, options, dynamics_seed)};
}

std::vector<Trajectory> run_truncation_chain(const QuenchedEnvironment& env, const Configuration& initial,
                                             std::uint32_t horizon, std::span<const Coord> half_widths,
                                             Count cap, std::uint64_t dynamics_seed, bool keep_fields) {
  for (std::size_t i = 1; i < half_widths.size(); ++i)
    if (half_widths[i] <= half_widths[i - 1]) throw DomainError("truncation sizes must be strictly increasing");
  std::vector<Trajectory> out;
  out.reserve(half_widths.size() + 1);
  RunOptions opt;
  opt.horizon = horizon;
  opt.cap = cap;
  opt.keep_fields = keep_fields;
  for (const Coord l : half_widths) {
    opt.box = TruncationBox::centered_cube(l);
    out.push_back(run(env, initial, opt, dynamics_seed));
  }
  opt.box = TruncationBox::none();
  out.push_back(run(env, initial, opt, dynamics_seed));
  return out;
}

void FaceCounter::add(const Configuration& field) {
  for (const auto& [x, n] : field.entries()) {
    if (linf_norm(x, d_) != half_width_) continue;
    counts_.particles_on_face += n;
    counts_.occupied_on_face += 1;
    bool orthant = x[0] == half_width_;
    for (int i = 1; i < d_ && orthant; ++i) orthant = x[i] >= 0;
    if (orthant) {
      counts_.particles_on_positive_orthant_face += n;
      counts_.occupied_on_positive_orthant_face += 1;
    }
  }
}

FaceCounts face_counts(const Trajectory& trajectory, Coord half_width, std::uint32_t horizon, int d) {
  if (trajectory.box.kind() != TruncationBox::Kind::centered_cube || trajectory.box.half_width() != half_width)
    throw DomainError("face_counts needs a trajectory truncated to the centred cube of half-width " +
                      std::to_string(half_width));
  if (trajectory.fields.empty()) throw DomainError("face_counts needs a trajectory with kept fields");
  if (trajectory.final_time < horizon && !trajectory.tau)
    throw DomainError("trajectory stopped at t = " + std::to_string(trajectory.final_time) +
                      " before the face-count horizon " + std::to_string(horizon));
  FaceCounter counter(half_width, d);
  const std::size_t last = std::min<std::size_t>(horizon, trajectory.fields.size() - 1);
  for (std::size_t t = 0; t <= last; ++t) counter.add(trajectory.fields[t]);
  return counter.counts();
}

}  // namespace brwre
