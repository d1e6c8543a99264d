#include <doctest.h>

#include <algorithm>
#include <set>

#include "brwre/errors.hpp"
#include "brwre/renorm.hpp"
#include "oracles.hpp"

using namespace brwre;

namespace {

std::set<std::vector<int>> as_points(const Diamond& a) {
  std::set<std::vector<int>> out;
  for (const auto& s : a.sites) {
    std::vector<int> p;
    for (int i = 0; i < a.d; ++i) p.push_back(s[i]);
    out.insert(p);
  }
  return out;
}

}  // namespace

TEST_CASE("diamond: examples") {
  CHECK(diamond(0, 3).sites == std::vector<Site>{Site{}});
  CHECK(as_points(diamond(2, 1)) == std::set<std::vector<int>>{{-2}, {0}, {2}});
  CHECK(as_points(diamond(2, 2)) ==
        std::set<std::vector<int>>{{0, 0}, {2, 0}, {-2, 0}, {0, 2}, {0, -2}, {1, 1}, {1, -1}, {-1, 1}, {-1, -1}});
  CHECK_THROWS(diamond(-1, 1));
}

TEST_CASE("diamond: matches a direct scan and is symmetric (property)") {
  for (int d = 1; d <= 3; ++d)
    for (int n = 0; n <= 6; ++n) {
      const auto a = diamond(n, d);
      const auto pts = as_points(a);
      const auto scan = oracle::diamond(n, d);
      CHECK(pts == std::set<std::vector<int>>(scan.begin(), scan.end()));
      CHECK(std::is_sorted(a.sites.begin(), a.sites.end()));
      for (const auto& p : pts) {
        std::vector<int> flipped = p;
        flipped[0] = -flipped[0];
        CHECK(pts.contains(flipped));
        std::vector<int> perm = p;
        std::reverse(perm.begin(), perm.end());
        CHECK(pts.contains(perm));
        std::vector<int> rotated = p;
        std::rotate(rotated.begin(), rotated.begin() + 1, rotated.end());
        CHECK(pts.contains(rotated));
      }
    }
}

TEST_CASE("contains_translate") {
  const auto a = diamond(2, 2);
  const Site x{{5, -3}};
  std::vector<Site> shifted;
  for (const auto& s : a.sites) shifted.push_back(x + s);
  const auto field = Configuration::uniform(shifted);
  CHECK(contains_translate(field, x, a));
  CHECK_FALSE(contains_translate(field, x + Site::axis(0, 2), a));

  std::vector<Configuration::Entry> missing;
  for (std::size_t i = 1; i < shifted.size(); ++i) missing.emplace_back(shifted[i], 1);
  CHECK_FALSE(contains_translate(Configuration::from_entries(missing), x, a));

  std::vector<Site> cube;
  for (int i = -4; i <= 4; ++i)
    for (int j = -4; j <= 4; ++j) cube.push_back(Site{{i, j}});
  CHECK(contains_translate(Configuration::uniform(cube), Site{{1, 1}}, a));
}

TEST_CASE("block event: spec checks and trivial cases") {
  CHECK_THROWS_AS(check_block_spec({5, 4, 10, 1}), DomainError);
  CHECK_THROWS_AS(check_block_spec({1, 4, 0, 1}), DomainError);

  const QuenchedEnvironment dead(EnvironmentLaw::deterministic(OffspringLaw({1.0})), 1, 1);
  const auto r = block_event(dead, {2, 4, 5, 1}, 1);
  CHECK_FALSE(r.occurred);
  CHECK_FALSE(r.witness.has_value());
}

TEST_CASE("block event: witness is valid and first") {
  const QuenchedEnvironment env(EnvironmentLaw::deterministic(OffspringLaw({0.0, 0.0, 1.0})), 1, 1);
  const BlockEventSpec spec{2, 4, 6, 1};
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto r = block_event(env, spec, s);
    CHECK(r.occurred == r.witness.has_value());
    if (!r.witness) continue;
    const auto& w = *r.witness;
    CHECK(w.t >= spec.T);
    CHECK(w.t <= 2 * spec.T);
    CHECK(w.x[0] >= spec.L + spec.n);
    CHECK(w.x[0] <= 2 * spec.L + spec.n);

    // replay the process and check the witness against every earlier candidate
    const auto a = diamond(spec.n, 1);
    Configuration field = Configuration::uniform(a.sites);
    const auto box = TruncationBox::centered_cube(2 * spec.L + 2 * spec.n);
    for (std::uint32_t t = 0; t < w.t; ++t) {
      if (t >= spec.T)
        for (Coord x = spec.L + spec.n; x <= 2 * spec.L + spec.n; ++x)
          CHECK_FALSE(contains_translate(field, Site::axis(0, x), a));
      field = step(env, t, field, box, s, spec.site_cap);
    }
    CHECK(contains_translate(field, w.x, a));
    for (Coord x = spec.L + spec.n; x < w.x[0]; ++x) CHECK_FALSE(contains_translate(field, Site::axis(0, x), a));
  }
}

TEST_CASE("block event: n = 0 is single-site occupancy in the slab") {
  const QuenchedEnvironment env(EnvironmentLaw::deterministic(OffspringLaw({0.3, 0.0, 0.7})), 2, 2);
  const BlockEventSpec spec{0, 3, 4, 2, kUnbounded};
  for (std::uint64_t s = 0; s < 30; ++s) {
    const auto r = block_event(env, spec, s);
    if (r.witness) CHECK(r.witness->x[1] >= 0);
  }
}

TEST_CASE("block event is monotone in the initial set") {
  // Starting from a superset on shared randomness can only add witnesses.
  const auto law = EnvironmentLaw::from_raw({{0.5, {0.3, 0.2, 0.5}}, {0.5, {0.5, 0.3, 0.2}}});
  const BlockEventSpec spec{2, 3, 4, 1};
  const auto a = diamond(spec.n, 1);
  const auto box = TruncationBox::centered_cube(2 * spec.L + 2 * spec.n);
  RunOptions opt;
  opt.horizon = 2 * spec.T;
  opt.box = box;
  opt.cap = kUnbounded;
  opt.site_cap = spec.site_cap;
  std::size_t violations = 0;
  for (std::uint64_t s = 0; s < 200; ++s) {
    const QuenchedEnvironment env(law, s, 1);
    const auto small = Configuration::uniform(a.sites);
    auto bigger_entries = std::vector<Configuration::Entry>(small.entries().begin(), small.entries().end());
    bigger_entries.emplace_back(Site{}, 3);
    const auto big = Configuration::from_entries(bigger_entries);
    const auto [ts, tb] = run_coupled(env, small, big, opt, s);
    const auto hit = [&](const Trajectory& tr) {
      for (std::uint32_t t = spec.T; t < tr.fields.size(); ++t)
        for (Coord x = spec.L + spec.n; x <= 2 * spec.L + spec.n; ++x)
          if (contains_translate(tr.fields[t], Site::axis(0, x), a)) return true;
      return false;
    };
    if (hit(ts) && !hit(tb)) ++violations;
  }
  CHECK(violations == 0);
}

TEST_CASE("orthant statistics") {
  OrthantOptions opt;
  opt.replicas = 200;
  CHECK_THROWS_AS(orthant_statistics(EnvironmentLaw::deterministic(OffspringLaw({1.0})), 1, {2, 2, 4, 4, 10}, 1),
                  DomainError);
  SUBCASE("pure death gives zeros") {
    const auto table = orthant_statistics(EnvironmentLaw::deterministic(OffspringLaw({1.0})), 2, opt, 1);
    for (const auto& row : table) {
      CHECK(row.total_particles == 0);
      CHECK(row.faces == FaceCounts{});
    }
  }
  SUBCASE("containment in every replica") {
    const auto law = EnvironmentLaw::from_raw({{0.5, {0.0, 0.0, 1.0}}, {0.5, {0.5, 0.5}}});
    for (int d = 1; d <= 2; ++d) {
      const auto table = orthant_statistics(law, d, opt, 3);
      CHECK(table.size() == opt.replicas);
      for (const auto& row : table) {
        CHECK(row.orthant_particles <= row.total_particles);
        CHECK(row.orthant_occupied <= row.total_occupied);
        CHECK(row.total_occupied <= row.total_particles);
        CHECK(row.faces.particles_on_positive_orthant_face <= row.faces.particles_on_face);
        CHECK(row.faces.occupied_on_positive_orthant_face <= row.faces.occupied_on_face);
      }
      const std::vector<Count> grid = {1, 2, 4, 8};
      const auto checks = square_root_trick_check(table, d, grid, Observable::particles);
      CHECK(checks.size() == 4);
      for (const auto& c : checks) {
        CHECK(c.lhs >= 0.0);
        CHECK(c.rhs <= 1.0);
        CHECK(c.pass == (c.lhs <= c.rhs + 3 * c.combined_se));
      }
    }
  }
}

TEST_CASE("inequality checks on a hand-made table") {
  std::vector<OrthantRow> table(4);
  table[0].orthant_particles = 0;
  table[0].total_particles = 0;
  table[1].orthant_particles = 1;
  table[1].total_particles = 5;
  table[2].orthant_particles = 3;
  table[2].total_particles = 3;
  table[3].orthant_particles = 9;
  table[3].total_particles = 20;
  const std::vector<Count> grid = {1};
  const auto c = square_root_trick_check(table, 1, grid, Observable::particles)[0];
  // P(orthant <= 1) = 1/2, squared 1/4; P(total <= 2) = 1/4
  CHECK(c.threshold == 1.0);
  CHECK(c.lhs == doctest::Approx(0.25));
  CHECK(c.rhs == doctest::Approx(0.25));
  CHECK(c.pass);
}
