#include <doctest.h>

#include <cmath>
#include <random>
#include <set>
#include <thread>

#include "brwre/envmodel.hpp"
#include "brwre/errors.hpp"
#include "brwre/rng.hpp"
#include "oracles.hpp"

using namespace brwre;

namespace {

EnvironmentLaw law_of(std::vector<std::pair<double, std::vector<double>>> raw) {
  return EnvironmentLaw::from_raw(raw);
}

}  // namespace

TEST_CASE("offspring law caches mean and trims trailing zeros") {
  OffspringLaw q({0.25, 0.25, 0.5, 0.0, 0.0});
  CHECK(q.pmf().size() == 3);
  CHECK(q.mean() == doctest::Approx(1.25).epsilon(1e-15));
  CHECK(q.max_children() == 2);
  CHECK(q.branching_mass() == doctest::Approx(0.5));
  CHECK(OffspringLaw::dirac(0).is_dirac_zero());
  CHECK(OffspringLaw::dirac(3).mean() == 3.0);
}

TEST_CASE("malformed offspring laws are refused") {
  CHECK_THROWS_AS(OffspringLaw({}), LawError);
  CHECK_THROWS_AS(OffspringLaw({0.5, 0.4}), LawError);
  CHECK_THROWS_AS(OffspringLaw({1.2, -0.2}), LawError);
  CHECK_THROWS_AS(OffspringLaw({NAN, 1.0}), LawError);
  CHECK_NOTHROW(OffspringLaw({0.5, 0.5 + 5e-13}));
}

TEST_CASE("sample_offspring uses the inverse cdf") {
  const OffspringLaw delta0({1.0});
  for (double u : {0.0, 0.3, 0.999999}) CHECK(sample_offspring(delta0, u) == 0);

  const OffspringLaw q({0.3, 0.2, 0.5});
  CHECK(sample_offspring(q, 0.25) == 0);
  CHECK(sample_offspring(q, 0.4) == 1);
  CHECK(sample_offspring(q, 0.9) == 2);
  CHECK(sample_offspring(q, 0.3) == 1);  // F(0) = 0.3 is not > 0.3
  CHECK(sample_offspring(q, 1.0) == 2);
}

TEST_CASE("sample_offspring reproduces its law") {
  const std::vector<std::vector<double>> laws = {
      {0.25, 0.25, 0.5}, {0.5, 0.2, 0.3}, {0.6, 0.3, 0.1}, {0.5, 0.25, 0.25}, {0.0, 0.0, 1.0}, {0.5, 0.5}};
  for (const auto& pmf : laws) {
    const OffspringLaw q(pmf);
    constexpr int n = 100000;
    std::vector<double> freq(pmf.size(), 0.0);
    const std::uint64_t key = rng::cell_key(11, rng::Stream::offspring, 0, Site{}, 1);
    for (int i = 0; i < n; ++i) freq[sample_offspring(q, rng::to_unit(rng::draw(key, i)))] += 1.0 / n;
    CHECK(oracle::total_variation(freq, pmf) <= 0.01);

    // chi-square at significance 0.001
    double chi2 = 0.0;
    int cells = 0;
    for (std::size_t k = 0; k < pmf.size(); ++k) {
      if (pmf[k] == 0.0) {
        CHECK(freq[k] == 0.0);
        continue;
      }
      const double expected = n * pmf[k];
      chi2 += (freq[k] * n - expected) * (freq[k] * n - expected) / expected;
      ++cells;
    }
    const double critical[] = {0.0, 10.828, 13.816, 16.266};
    if (cells >= 2) CHECK(chi2 < critical[cells - 1]);
  }
}

TEST_CASE("environment law validation and canonicalisation") {
  CHECK_THROWS_AS(law_of({{0.5, {1.0}}, {0.4, {0.0, 1.0}}}), LawError);
  CHECK_THROWS_AS(law_of({{-0.1, {1.0}}, {1.1, {0.0, 1.0}}}), LawError);
  try {
    law_of({{0.5, {0.5, 0.4}}, {0.5, {0.0, 1.0}}});
    FAIL("expected LawError");
  } catch (const LawError& e) {
    CHECK(std::string(e.what()).find("component 0") != std::string::npos);
  }
  const auto merged = law_of({{0.25, {0.5, 0.5}}, {0.5, {0.0, 1.0}}, {0.25, {0.5, 0.5, 0.0}}});
  REQUIRE(merged.size() == 2);
  CHECK(merged.components()[0].weight == doctest::Approx(0.5));
  CHECK(merged.components()[0].law == OffspringLaw({0.5, 0.5}));
}

TEST_CASE("validate: examples") {
  SUBCASE("single non-degenerate law") {
    const auto r = validate(law_of({{1.0, {0.25, 0.25, 0.5}}}));
    CHECK(r.hyp1_ok);
    CHECK(r.hyp2_ok);
    CHECK(r.dichotomy == Dichotomy::H_complement);
  }
  SUBCASE("pure death") {
    const auto r = validate(law_of({{1.0, {1.0}}}));
    CHECK_FALSE(r.hyp1_ok);
    CHECK(r.dichotomy == Dichotomy::H);
    CHECK_FALSE(r.messages.empty());
  }
  SUBCASE("support in {0,1}") {
    const auto r = validate(law_of({{0.5, {0.0, 1.0}}, {0.5, {0.5, 0.5}}}));
    CHECK(r.hyp1_ok);
    CHECK_FALSE(r.hyp2_ok);
  }
  SUBCASE("zero-weight components are ignored") {
    const auto r = validate(law_of({{0.0, {1.0}}, {1.0, {0.25, 0.25, 0.5}}}));
    CHECK(r.hyp1_ok);
    CHECK(r.dichotomy == Dichotomy::H_complement);
  }
  SUBCASE("a positive-weight zero-mean component breaks hyp1") {
    const auto r = validate(law_of({{0.1, {1.0}}, {0.9, {0.0, 0.0, 1.0}}}));
    CHECK_FALSE(r.hyp1_ok);
    CHECK(r.hyp2_ok);
    CHECK(r.dichotomy == Dichotomy::H);
  }
}

TEST_CASE("perturb: examples") {
  const auto half = perturb(law_of({{1.0, {0.0, 1.0}}}), 0.5);
  CHECK(half.components()[0].law == OffspringLaw({0.5, 0.5}));
  CHECK(half.components()[0].law.mean() == 0.5);

  const auto q = perturb(law_of({{1.0, {0.25, 0.25, 0.5}}}), 0.8).components()[0].law;
  CHECK(q.prob(0) == doctest::Approx(0.4).epsilon(1e-14));
  CHECK(q.prob(1) == doctest::Approx(0.2).epsilon(1e-14));
  CHECK(q.prob(2) == doctest::Approx(0.4).epsilon(1e-14));
  CHECK(q.mean() == doctest::Approx(1.0).epsilon(1e-15));

  const auto law = law_of({{0.3, {0.5, 0.2, 0.3}}, {0.7, {0.1, 0.0, 0.0, 0.9}}});
  const auto same = perturb(law, 1.0);
  for (std::size_t j = 0; j < law.size(); ++j) CHECK(same.components()[j].law == law.components()[j].law);

  CHECK_THROWS_AS(perturb(law, 0.0), DomainError);
  CHECK_THROWS_AS(perturb(law, 1.5), DomainError);
  CHECK_THROWS_AS(perturb(law, -0.2), DomainError);
}

TEST_CASE("perturb: mean scaling and composition (property)") {
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<std::pair<double, std::vector<double>>> raw;
    const int comps = 1 + trial % 3;
    for (int j = 0; j < comps; ++j) {
      std::vector<double> pmf(2 + (trial + j) % 4);
      double s = 0.0;
      for (auto& p : pmf) s += (p = unif(gen) + 0.01);
      for (auto& p : pmf) p /= s;
      pmf.back() = 0.0;
      double head = 0.0;
      for (std::size_t k = 0; k + 1 < pmf.size(); ++k) head += pmf[k];
      pmf.back() = 1.0 - head;
      raw.emplace_back(1.0 / comps, pmf);
    }
    raw.back().first = 1.0 - (comps - 1) * (1.0 / comps);
    const auto law = EnvironmentLaw::from_raw(raw);
    const double r1 = 0.05 + 0.95 * unif(gen);
    const double r2 = 0.05 + 0.95 * unif(gen);
    const auto p1 = perturb(law, r1);
    const auto p12 = perturb(p1, r2);
    const auto direct = perturb(law, r1 * r2);
    for (std::size_t j = 0; j < law.size(); ++j) {
      const auto& base = law.components()[j].law;
      CHECK(std::abs(p1.components()[j].law.mean() - r1 * base.mean()) <= 1e-15 * std::max(1.0, base.mean()));
      CHECK(p1.components()[j].weight == law.components()[j].weight);
      const auto& a = p12.components()[j].law;
      const auto& b = direct.components()[j].law;
      for (std::size_t k = 0; k < std::max(a.pmf().size(), b.pmf().size()); ++k)
        CHECK(std::abs(a.prob(k) - b.prob(k)) <= 1e-12);
    }
  }
}

TEST_CASE("quenched environment: purity and marginals") {
  const auto law = law_of({{0.3, {0.5, 0.5}}, {0.7, {0.0, 0.0, 1.0}}});

  SUBCASE("single component") {
    const QuenchedEnvironment env(law_of({{1.0, {0.25, 0.25, 0.5}}}), 5, 2);
    for (int t = 0; t < 10; ++t) CHECK(env.query(t, Site::axis(1, t)).mean() == 1.25);
  }
  SUBCASE("repeatable in any order and across threads") {
    const QuenchedEnvironment env(law, 99, 2);
    std::vector<std::size_t> forward;
    for (int t = 0; t < 30; ++t)
      for (int x = -10; x <= 10; ++x) forward.push_back(env.component_at(t, Site{{x, t - x}}));
    std::vector<std::size_t> backward(forward.size());
    std::size_t i = forward.size();
    for (int t = 29; t >= 0; --t)
      for (int x = 10; x >= -10; --x) backward[--i] = env.component_at(t, Site{{x, t - x}});
    CHECK(forward == backward);

    std::vector<std::size_t> threaded(forward.size());
    std::vector<std::thread> pool;
    for (int w = 0; w < 4; ++w)
      pool.emplace_back([&, w] {
        for (std::size_t k = static_cast<std::size_t>(w); k < threaded.size(); k += 4) {
          const int t = static_cast<int>(k / 21);
          const int x = static_cast<int>(k % 21) - 10;
          threaded[k] = env.component_at(t, Site{{x, t - x}});
        }
      });
    for (auto& th : pool) th.join();
    CHECK(forward == threaded);
  }
  SUBCASE("component frequencies match weights") {
    const QuenchedEnvironment env(law, 2024, 1);
    int first = 0;
    constexpr int n = 100000;
    for (int k = 0; k < n; ++k) first += env.component_at(k / 1000, Site::axis(0, k % 1000 - 500)) == 0 ? 1 : 0;
    CHECK(std::abs(static_cast<double>(first) / n - 0.3) <= 0.01);
  }
  SUBCASE("marginal over seeds") {
    int first = 0;
    constexpr int n = 20000;
    for (int s = 0; s < n; ++s) first += QuenchedEnvironment(law, s, 3).component_at(4, Site{{1, 2, 3}}) == 0 ? 1 : 0;
    CHECK(std::abs(static_cast<double>(first) / n - 0.3) <= 0.015);
  }
  SUBCASE("perturbed environment shares the selection") {
    const QuenchedEnvironment env(law, 17, 1);
    const auto p = env.perturbed(0.4);
    for (int t = 0; t < 20; ++t)
      for (int x = -t; x <= t; ++x) {
        CHECK(p.component_at(t, Site::axis(0, x)) == env.component_at(t, Site::axis(0, x)));
        CHECK(p.mean_at(t, Site::axis(0, x)) == doctest::Approx(0.4 * env.mean_at(t, Site::axis(0, x))));
      }
  }
}

TEST_CASE("annealed summaries") {
  const auto law = law_of({{0.5, {0.0, 0.0, 1.0}}, {0.5, {0.5, 0.5}}});
  CHECK(law.annealed_mean() == doctest::Approx(1.25));
  CHECK(law.mean_log_mean() == doctest::Approx(0.0));
}
