#include "brwre/experiments.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include "brwre/renorm.hpp"
#include "brwre/rng.hpp"

namespace brwre {

namespace {

std::uint64_t replica_index(std::ptrdiff_t r) { return static_cast<std::uint64_t>(r); }

ReplicaOutcome outcome_of(const Trajectory& tr) {
  return {tr.tau, tr.capped, tr.final_field.total(), tr.final_field.occupied()};
}

MCEstimate proportion(const std::vector<std::uint8_t>& hits) {
  const auto k = static_cast<std::size_t>(std::count(hits.begin(), hits.end(), std::uint8_t{1}));
  return bernoulli_estimate(k, hits.size());
}

/// Number of rows r where flags[i][r] > flags[i+1][r] for some i.
std::size_t count_decreasing(const std::vector<std::vector<std::uint8_t>>& flags) {
  if (flags.empty()) return 0;
  std::size_t bad = 0;
  for (std::size_t r = 0; r < flags.front().size(); ++r) {
    for (std::size_t i = 0; i + 1 < flags.size(); ++i) {
      if (flags[i][r] > flags[i + 1][r]) {
        ++bad;
        break;
      }
    }
  }
  return bad;
}

}  // namespace

SurvivalResult survival_probability(const EnvironmentLaw& law, const Configuration& initial, int d,
                                    const SurvivalOptions& options, std::uint64_t master_seed) {
  check_dimension(d);
  SurvivalResult result;
  if (initial.empty()) {
    result.replicas.assign(options.replicas, ReplicaOutcome{0, false, 0, 0});
    return result;
  }
  RunOptions run_opt;
  run_opt.horizon = options.horizon;
  run_opt.cap = options.cap;
  run_opt.keep_fields = false;
  const std::uint64_t quenched_seed = rng::replica_seeds(master_seed, rng::Tag::survival, 0).environment;

  result.replicas.resize(options.replicas);
  const auto n = static_cast<std::ptrdiff_t>(options.replicas);
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t r = 0; r < n; ++r) {
    const auto seeds = rng::replica_seeds(master_seed, rng::Tag::survival, replica_index(r));
    const QuenchedEnvironment env(law, options.sampling == Sampling::annealed ? seeds.environment : quenched_seed, d);
    result.replicas[static_cast<std::size_t>(r)] = outcome_of(run(env, initial, run_opt, seeds.dynamics));
  }
  const auto alive = static_cast<std::size_t>(
      std::count_if(result.replicas.begin(), result.replicas.end(), [](const auto& o) { return o.survived(); }));
  result.estimate = bernoulli_estimate(alive, options.replicas);
  return result;
}

SweepResult rho_sweep(const EnvironmentLaw& law, int d, std::span<const double> rho_grid,
                      const SweepOptions& options, std::uint64_t master_seed) {
  check_dimension(d);
  const auto report = validate(law);
  if (!report.hyp1_ok) throw PreconditionError("rho sweep needs the integrability assumption (hyp1)");
  for (double rho : rho_grid)
    if (!(rho > 0.0 && rho <= 1.0)) throw DomainError("rho grid value " + std::to_string(rho) + " outside (0, 1]");

  SweepResult out;
  out.rho_grid.assign(rho_grid.begin(), rho_grid.end());
  if (!report.hyp2_ok)
    out.warnings.push_back("base law fails hyp2; only the points rho < 1 are non-degenerate");
  out.psi_hat = free_energy(law, d, options.t_polymer, options.polymer_replicas, master_seed, options.method);
  if (out.psi_hat.psi_hat > 0.0) {
    out.rho_c_predicted = std::exp(-out.psi_hat.psi_hat);
  } else {
    out.rho_c_predicted = 1.0;
    out.warnings.push_back("estimated free energy is not positive: no nontrivial critical rho predicted");
  }

  std::vector<EnvironmentLaw> laws;
  laws.reserve(rho_grid.size());
  for (double rho : rho_grid) laws.push_back(perturb(law, rho));

  RunOptions run_opt;
  run_opt.horizon = options.horizon;
  run_opt.cap = options.cap;
  run_opt.keep_fields = false;
  const Configuration origin = Configuration::single(Site{});

  out.survived.assign(rho_grid.size(), std::vector<std::uint8_t>(options.replicas, 0));
  const auto n = static_cast<std::ptrdiff_t>(options.replicas);
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t r = 0; r < n; ++r) {
    const auto seeds = rng::replica_seeds(master_seed, rng::Tag::survival, replica_index(r));
    for (std::size_t i = 0; i < laws.size(); ++i) {
      const QuenchedEnvironment env(laws[i], seeds.environment, d);
      out.survived[i][static_cast<std::size_t>(r)] = run(env, origin, run_opt, seeds.dynamics).survived() ? 1 : 0;
    }
  }

  // Coupling monotonicity is stated along increasing rho.
  std::vector<std::size_t> order(rho_grid.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return rho_grid[a] < rho_grid[b]; });
  std::vector<std::vector<std::uint8_t>> sorted;
  for (auto i : order) sorted.push_back(out.survived[i]);
  out.monotonicity_violations = count_decreasing(sorted);

  for (const auto& flags : out.survived) out.survival_proxy.push_back(proportion(flags));
  return out;
}

MonotoneFunctional MonotoneFunctional::site_indicator(const Site& x) {
  MonotoneFunctional f(Kind::site_indicator);
  f.site_ = x;
  return f;
}

MonotoneFunctional MonotoneFunctional::halfspace_count(int axis, Coord threshold) {
  if (axis < 0 || axis >= kMaxDim) throw DomainError("half-space axis out of range");
  MonotoneFunctional f(Kind::halfspace_count);
  f.axis_ = axis;
  f.threshold_ = threshold;
  return f;
}

MonotoneFunctional MonotoneFunctional::capped(double cap) const {
  if (!(cap > 0.0)) throw DomainError("functional cap must be positive");
  MonotoneFunctional f = *this;
  f.cap_ = cap_ ? std::min(*cap_, cap) : cap;
  return f;
}

MonotoneFunctional MonotoneFunctional::parse(std::string_view spec, int d) {
  const auto refuse = [&](const std::string& why) -> DomainError {
    return DomainError("functional '" + std::string(spec) + "' is not in the monotone catalogue: " + why);
  };
  std::optional<double> cap;
  std::string_view body = spec;
  if (const auto at = spec.find('@'); at != std::string_view::npos) {
    const std::string_view c = spec.substr(at + 1);
    double v = 0.0;
    const auto [p, ec] = std::from_chars(c.data(), c.data() + c.size(), v);
    if (ec != std::errc{} || p != c.data() + c.size() || !(v > 0.0)) throw refuse("bad cap '" + std::string(c) + "'");
    cap = v;
    body = spec.substr(0, at);
  }
  std::optional<MonotoneFunctional> f;
  if (body == "total") {
    f = total_mass();
  } else if (body == "occupied") {
    f = occupied_count();
  } else if (body.starts_with("site:")) {
    try {
      f = site_indicator(parse_site(body.substr(5), d));
    } catch (const std::invalid_argument& e) {
      throw refuse(e.what());
    }
  } else if (body.starts_with("halfspace:")) {
    const std::string_view rest = body.substr(10);
    const auto colon = rest.find(':');
    if (colon == std::string_view::npos) throw refuse("expected halfspace:i:c");
    int axis = 0;
    Coord c = 0;
    const auto a = rest.substr(0, colon);
    const auto b = rest.substr(colon + 1);
    const auto r1 = std::from_chars(a.data(), a.data() + a.size(), axis);
    const auto r2 = std::from_chars(b.data(), b.data() + b.size(), c);
    if (r1.ec != std::errc{} || r1.ptr != a.data() + a.size() || r2.ec != std::errc{} ||
        r2.ptr != b.data() + b.size() || axis < 1 || axis > d)
      throw refuse("expected halfspace:i:c with 1 <= i <= d");
    f = halfspace_count(axis - 1, c);
  } else {
    throw refuse("unknown functional");
  }
  return cap ? f->capped(*cap) : *f;
}

double MonotoneFunctional::operator()(const Configuration& field) const {
  double v = 0.0;
  switch (kind_) {
    case Kind::total_mass:
      v = static_cast<double>(field.total());
      break;
    case Kind::occupied_count:
      v = static_cast<double>(field.occupied());
      break;
    case Kind::site_indicator:
      v = field.occupies(site_) ? 1.0 : 0.0;
      break;
    case Kind::halfspace_count:
      for (const auto& [x, n] : field.entries())
        if (x[axis_] >= threshold_) v += static_cast<double>(n);
      break;
  }
  return cap_ ? std::min(v, *cap_) : v;
}

std::string MonotoneFunctional::name(int d) const {
  std::string s;
  switch (kind_) {
    case Kind::total_mass:
      s = "total";
      break;
    case Kind::occupied_count:
      s = "occupied";
      break;
    case Kind::site_indicator:
      s = "site:" + to_string(site_, d);
      break;
    case Kind::halfspace_count:
      s = "halfspace:" + std::to_string(axis_ + 1) + ":" + std::to_string(threshold_);
      break;
  }
  if (cap_) {
    char buf[32];
    const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, *cap_);
    s += "@" + std::string(buf, p);
  }
  return s;
}

std::vector<MonotoneFunctional> fkg_catalog(int d) {
  check_dimension(d);
  return {
      MonotoneFunctional::total_mass(),
      MonotoneFunctional::occupied_count(),
      MonotoneFunctional::site_indicator(Site{}),
      MonotoneFunctional::halfspace_count(0, 1),
      MonotoneFunctional::total_mass().capped(10.0),
      MonotoneFunctional::occupied_count().capped(4.0),
  };
}

namespace {

FkgReport covariance_report(const MonotoneFunctional& f, const MonotoneFunctional& g, std::span<const double> fv,
                            std::span<const double> gv, int d) {
  FkgReport rep;
  rep.f = f.name(d);
  rep.g = g.name(d);
  rep.replicas = fv.size();
  const auto mf = mean_estimate(fv);
  const auto mg = mean_estimate(gv);
  rep.mean_f = mf.mean;
  rep.mean_g = mg.mean;
  std::vector<double> prod(fv.size());
  for (std::size_t i = 0; i < fv.size(); ++i) prod[i] = (fv[i] - mf.mean) * (gv[i] - mg.mean);
  const auto mp = mean_estimate(prod);
  const double n = static_cast<double>(fv.size());
  rep.covariance = fv.size() > 1 ? mp.mean * n / (n - 1.0) : 0.0;
  rep.std_error = mp.std_error;
  rep.pass = rep.covariance >= -3.0 * rep.std_error;
  return rep;
}

}  // namespace

std::vector<FkgReport> fkg_suite(const EnvironmentLaw& law, int d, const Configuration& initial,
                                 std::span<const MonotoneFunctional> catalog, const FkgOptions& options,
                                 std::uint64_t master_seed) {
  check_dimension(d);
  RunOptions run_opt;
  run_opt.horizon = options.t;
  run_opt.cap = kUnbounded;
  run_opt.site_cap = options.site_cap;
  run_opt.keep_fields = false;

  const std::size_t k = catalog.size();
  std::vector<std::vector<double>> values(k, std::vector<double>(options.replicas, 0.0));
  const auto n = static_cast<std::ptrdiff_t>(options.replicas);
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t r = 0; r < n; ++r) {
    const auto seeds = rng::replica_seeds(master_seed, rng::Tag::fkg, replica_index(r));
    const QuenchedEnvironment env(law, seeds.environment, d);
    const auto tr = run(env, initial, run_opt, seeds.dynamics);
    // An extinct run is empty at time t as well.
    for (std::size_t i = 0; i < k; ++i) values[i][static_cast<std::size_t>(r)] = catalog[i](tr.final_field);
  }

  std::vector<FkgReport> out;
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = i; j < k; ++j) out.push_back(covariance_report(catalog[i], catalog[j], values[i], values[j], d));
  return out;
}

FkgReport fkg_test(const EnvironmentLaw& law, int d, const Configuration& initial, const MonotoneFunctional& f,
                   const MonotoneFunctional& g, const FkgOptions& options, std::uint64_t master_seed) {
  const MonotoneFunctional pair[] = {f, g};
  auto reports = fkg_suite(law, d, initial, pair, options, master_seed);
  return reports[1];  // (f, f), (f, g), (g, g)
}

DiagnosticsReport diagnostics(const EnvironmentLaw& law, int d, std::uint64_t master_seed,
                              const DiagnosticsOptions& options) {
  check_dimension(d);
  if (options.fill_n < 1 || options.fill_n % 2 != 0)
    throw DomainError("fill curve needs a positive even n");
  const std::size_t reps = options.replicas;
  const auto n_reps = static_cast<std::ptrdiff_t>(reps);
  const Configuration origin = Configuration::single(Site{});
  DiagnosticsReport rep;

  // (a)
  {
    RunOptions opt;
    opt.horizon = options.growth_horizon;
    opt.cap = options.growth_cap;
    opt.keep_fields = false;
    std::vector<Trajectory> runs(reps);
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t r = 0; r < n_reps; ++r) {
      const auto seeds = rng::replica_seeds(master_seed, rng::Tag::diagnostics, replica_index(r));
      const QuenchedEnvironment env(law, seeds.environment, d);
      auto tr = run(env, origin, opt, seeds.dynamics);
      tr.final_field = Configuration();
      runs[static_cast<std::size_t>(r)] = std::move(tr);
    }
    std::vector<const Trajectory*> alive;
    for (const auto& tr : runs)
      if (tr.survived()) alive.push_back(&tr);
    rep.growth_survivors = alive.size();
    for (std::uint32_t t = 0; t <= options.growth_horizon; ++t) {
      std::vector<double> v;
      v.reserve(alive.size());
      for (const auto* tr : alive) v.push_back(static_cast<double>(tr->totals[std::min<std::size_t>(t, tr->final_time)]));
      rep.growth.push_back({t, mean_estimate(v)});
    }
  }

  // (b)
  {
    const int n = options.fill_n;
    const Diamond a = diamond(n, d);
    Site lo;
    Site hi;
    lo[0] = 0;
    hi[0] = 2 * n;
    for (int i = 1; i < d; ++i) {
      lo[i] = -n;
      hi[i] = n;
    }
    const TruncationBox box = TruncationBox::rectangle(lo, hi, d);
    const Site shift = Site::axis(0, n);
    RunOptions opt;
    opt.horizon = static_cast<std::uint32_t>(2 * n);
    opt.box = box;
    opt.cap = kUnbounded;
    opt.site_cap = options.site_cap;
    opt.keep_fields = false;
    std::vector<std::vector<std::uint8_t>> hit(options.fill_N.size(), std::vector<std::uint8_t>(reps, 0));
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t r = 0; r < n_reps; ++r) {
      const auto seeds = rng::replica_seeds(master_seed ^ 0xb, rng::Tag::diagnostics, replica_index(r));
      const QuenchedEnvironment env(law, seeds.environment, d);
      for (std::size_t i = 0; i < options.fill_N.size(); ++i) {
        const Count particles = options.fill_N[i];
        const Configuration start = particles == 0 ? Configuration() : Configuration::single(Site{}, particles);
        const auto tr = run(env, start, opt, seeds.dynamics);
        const bool filled = tr.final_time == opt.horizon && contains_translate(tr.final_field, shift, a);
        hit[i][static_cast<std::size_t>(r)] = filled ? 1 : 0;
      }
    }
    for (std::size_t i = 0; i < hit.size(); ++i)
      rep.fill.push_back({static_cast<double>(options.fill_N[i]), proportion(hit[i])});
    rep.fill_violations = count_decreasing(hit);
  }

  // (c)
  {
    RunOptions opt;
    opt.horizon = options.diamond_survival_horizon;
    opt.cap = options.diamond_survival_cap;
    opt.keep_fields = false;
    std::vector<std::vector<std::uint8_t>> alive(options.diamond_survival_n.size(), std::vector<std::uint8_t>(reps, 0));
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t r = 0; r < n_reps; ++r) {
      const auto seeds = rng::replica_seeds(master_seed ^ 0xc, rng::Tag::diagnostics, replica_index(r));
      const QuenchedEnvironment env(law, seeds.environment, d);
      for (std::size_t i = 0; i < options.diamond_survival_n.size(); ++i) {
        const Diamond a = diamond(options.diamond_survival_n[i], d);
        alive[i][static_cast<std::size_t>(r)] =
            run(env, Configuration::uniform(a.sites), opt, seeds.dynamics).survived() ? 1 : 0;
      }
    }
    for (std::size_t i = 0; i < alive.size(); ++i)
      rep.diamond_survival.push_back({static_cast<double>(options.diamond_survival_n[i]), proportion(alive[i])});
    // A_n is nested in n, so the coupling orders the curve along increasing n.
    rep.diamond_survival_violations = std::is_sorted(options.diamond_survival_n.begin(), options.diamond_survival_n.end()) ? count_decreasing(alive) : 0;
  }

  // (d)
  {
    RunOptions opt;
    opt.horizon = options.saturation_t;
    opt.cap = kUnbounded;
    opt.site_cap = options.site_cap;
    opt.keep_fields = false;
    std::vector<std::vector<std::uint8_t>> big(options.saturation_L.size(), std::vector<std::uint8_t>(reps, 0));
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t r = 0; r < n_reps; ++r) {
      const auto seeds = rng::replica_seeds(master_seed ^ 0xd, rng::Tag::diagnostics, replica_index(r));
      const QuenchedEnvironment env(law, seeds.environment, d);
      for (std::size_t i = 0; i < options.saturation_L.size(); ++i) {
        RunOptions o = opt;
        o.box = TruncationBox::centered_cube(options.saturation_L[i]);
        const auto tr = run(env, origin, o, seeds.dynamics);
        big[i][static_cast<std::size_t>(r)] = tr.final_field.total() >= options.saturation_N ? 1 : 0;
      }
    }
    for (std::size_t i = 0; i < big.size(); ++i)
      rep.saturation.push_back({static_cast<double>(options.saturation_L[i]), proportion(big[i])});
    rep.saturation_violations = std::is_sorted(options.saturation_L.begin(), options.saturation_L.end()) ? count_decreasing(big) : 0;
  }
  return rep;
}

}  // namespace brwre
