#include "brwre/cli.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "brwre/experiments.hpp"
#include "brwre/parallel.hpp"
#include "brwre/renorm.hpp"
#include "brwre/rng.hpp"

namespace brwre::cli {

using json = nlohmann::ordered_json;

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

std::string format_number(std::uint64_t v) { return std::to_string(v); }

void write_table(const Table& table, const std::filesystem::path& out_dir, std::uint64_t seed) {
  std::filesystem::create_directories(out_dir);
  const auto path = out_dir / (table.name + ".csv");
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "# seed=" << seed << " table=" << table.name << '\n';
  for (std::size_t i = 0; i < table.header.size(); ++i) out << (i ? "," : "") << table.header[i];
  out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
    out << '\n';
  }
}

namespace {

json estimate_json(const MCEstimate& e) {
  return {{"mean", e.mean},
          {"std_error", e.std_error},
          {"replicas", e.replicas},
          {"wilson_low", e.wilson_low},
          {"wilson_high", e.wilson_high}};
}

json report_json(const ValidationReport& r) {
  return {{"hyp1_ok", r.hyp1_ok},
          {"hyp2_ok", r.hyp2_ok},
          {"dichotomy", to_string(r.dichotomy)},
          {"messages", r.messages}};
}

json params_json(const RunConfig& c) {
  const Params& p = c.params;
  return {{"dimension", c.dimension},
          {"seed", c.seed},
          {"components", c.law_json},
          {"horizon", p.horizon},
          {"cap", p.cap},
          {"replicas", p.replicas},
          {"initial", p.initial},
          {"box", p.box},
          {"sampling", p.sampling},
          {"t", p.t},
          {"method", to_string(p.method)},
          {"polymer_replicas", p.polymer_replicas},
          {"rho_grid", p.rho_grid},
          {"n", p.n},
          {"L", p.L},
          {"T", p.T},
          {"site_cap", p.site_cap},
          {"t_top", p.t_top},
          {"T_face", p.T_face},
          {"fkg_t", p.fkg_t},
          {"functionals", p.functionals},
          {"growth_horizon", p.growth_horizon},
          {"fill_n", p.fill_n},
          {"diamond_survival_horizon", p.diamond_survival_horizon},
          {"saturation_t", p.saturation_t},
          {"saturation_N", p.saturation_N}};
}

/// Every numeric leaf of `results` as a (key, value) row, so each summary
/// number also lives in a table.
void flatten(const json& j, const std::string& prefix, Table& t) {
  if (j.is_object()) {
    for (const auto& [k, v] : j.items()) flatten(v, prefix.empty() ? k : prefix + "." + k, t);
  } else if (j.is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i) flatten(j[i], prefix + "[" + std::to_string(i) + "]", t);
  } else if (j.is_number_float()) {
    t.rows.push_back({prefix, format_number(j.get<double>())});
  } else if (j.is_number()) {
    t.rows.push_back({prefix, j.dump()});
  } else if (j.is_boolean()) {
    t.rows.push_back({prefix, j.get<bool>() ? "1" : "0"});
  }
}

std::string tau_text(const std::optional<std::uint32_t>& tau) { return tau ? std::to_string(*tau) : "not_yet"; }

Sampling parse_sampling(const std::string& s) {
  if (s == "annealed") return Sampling::annealed;
  if (s == "quenched") return Sampling::quenched;
  throw ConfigError(kConfigError, "sampling must be 'annealed' or 'quenched', got '" + s + "'");
}

OutputBundle run_validate(const RunConfig& c) {
  OutputBundle b;
  b.summary["results"] = {{"hyp1_ok", c.report.hyp1_ok}, {"hyp2_ok", c.report.hyp2_ok}};
  Table t{"validate", {"component", "weight", "mean", "q0", "branching_mass"}, {}};
  const auto comps = c.law->components();
  for (std::size_t j = 0; j < comps.size(); ++j)
    t.rows.push_back({std::to_string(j), format_number(comps[j].weight), format_number(comps[j].law.mean()),
                      format_number(comps[j].law.prob(0)), format_number(comps[j].law.branching_mass())});
  b.tables.push_back(std::move(t));
  b.exit_code = !c.report.hyp1_ok ? kHyp1Failure : (!c.report.hyp2_ok ? kHyp2Failure : kSuccess);
  return b;
}

OutputBundle run_simulate(const RunConfig& c) {
  const Params& p = c.params;
  const int d = c.dimension;
  const Configuration initial = parse_initial(p.initial, d);
  const Sampling sampling = parse_sampling(p.sampling);
  RunOptions opt;
  opt.horizon = p.horizon;
  opt.box = parse_box(p.box);
  opt.cap = p.cap;
  opt.keep_fields = false;
  std::vector<Trajectory> runs(p.replicas);
  const std::uint64_t quenched_env = rng::replica_seeds(c.seed, rng::Tag::simulate, 0).environment;
  const auto n = static_cast<std::ptrdiff_t>(p.replicas);
  std::ptrdiff_t outside = -1;
  for (const auto& [x, k] : initial.entries())
    if (!opt.box.contains(x, d)) outside = 0;
  if (outside >= 0) throw DomainError("initial configuration has sites outside the truncation box");
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t r = 0; r < n; ++r) {
    const auto seeds = rng::replica_seeds(c.seed, rng::Tag::simulate, static_cast<std::uint64_t>(r));
    const QuenchedEnvironment env(*c.law, sampling == Sampling::annealed ? seeds.environment : quenched_env, d);
    auto tr = run(env, initial, opt, seeds.dynamics);
    tr.totals.clear();
    tr.occupied.clear();
    runs[static_cast<std::size_t>(r)] = std::move(tr);
  }
  Table t{"simulate", {"replica", "tau", "capped", "final_total", "final_occupied"}, {}};
  std::size_t survived = 0;
  for (std::size_t r = 0; r < runs.size(); ++r) {
    const auto& tr = runs[r];
    if (tr.survived()) ++survived;
    t.rows.push_back({std::to_string(r), tau_text(tr.tau), tr.capped ? "1" : "0",
                      format_number(tr.final_field.total()), format_number(tr.final_field.occupied())});
  }
  OutputBundle b;
  b.summary["results"] = {{"replicas", p.replicas}, {"survived", survived}};
  b.tables.push_back(std::move(t));
  return b;
}

OutputBundle run_polymer(const RunConfig& c) {
  const QuenchedEnvironment env(*c.law, c.seed, c.dimension);
  const auto pf = partition_function(env, c.params.t);
  OutputBundle b;
  b.summary["results"] = {{"t", c.params.t}, {"log_z", pf.log_z}};
  Table t{"polymer", {"u", "log_z"}, {}};
  for (std::size_t u = 0; u < pf.log_z_by_time.size(); ++u)
    t.rows.push_back({std::to_string(u), format_number(pf.log_z_by_time[u])});
  b.tables.push_back(std::move(t));
  return b;
}

OutputBundle run_free_energy(const RunConfig& c) {
  const Params& p = c.params;
  const auto est = free_energy(*c.law, c.dimension, p.t, p.replicas, c.seed, p.method);
  OutputBundle b;
  b.summary["results"] = {{"psi_hat", est.psi_hat},
                          {"std_error", est.std_error},
                          {"t_used", est.t_used},
                          {"replicas", est.replicas},
                          {"method", to_string(est.method)}};
  Table t{"free_energy", {"replica", "env_seed", "log_z_over_t", "slope"}, {}};
  for (std::size_t r = 0; r < est.replicas; ++r)
    t.rows.push_back({std::to_string(r), std::to_string(c.seed + r), format_number(est.log_z_over_t[r]),
                      format_number(est.slopes[r])});
  b.tables.push_back(std::move(t));
  return b;
}

OutputBundle run_survival(const RunConfig& c) {
  const Params& p = c.params;
  SurvivalOptions opt;
  opt.horizon = p.horizon;
  opt.cap = p.cap;
  opt.replicas = p.replicas;
  opt.sampling = parse_sampling(p.sampling);
  const auto res = survival_probability(*c.law, parse_initial(p.initial, c.dimension), c.dimension, opt, c.seed);
  OutputBundle b;
  b.summary["results"] = {{"survival", estimate_json(res.estimate)}};
  Table t{"survival", {"replica", "tau", "capped", "final_total", "final_occupied", "survived"}, {}};
  for (std::size_t r = 0; r < res.replicas.size(); ++r) {
    const auto& o = res.replicas[r];
    t.rows.push_back({std::to_string(r), tau_text(o.tau), o.capped ? "1" : "0", format_number(o.final_total),
                      format_number(o.final_occupied), o.survived() ? "1" : "0"});
  }
  b.tables.push_back(std::move(t));
  return b;
}

OutputBundle run_sweep(const RunConfig& c) {
  const Params& p = c.params;
  SweepOptions opt;
  opt.horizon = p.horizon;
  opt.cap = p.cap;
  opt.replicas = p.replicas;
  opt.t_polymer = p.t;
  opt.polymer_replicas = p.polymer_replicas;
  opt.method = p.method;
  const auto res = rho_sweep(*c.law, c.dimension, p.rho_grid, opt, c.seed);
  OutputBundle b;
  json points = json::array();
  Table t{"sweep_rho", {"rho", "proxy", "wilson_low", "wilson_high"}, {}};
  for (std::size_t i = 0; i < res.rho_grid.size(); ++i) {
    const auto& e = res.survival_proxy[i];
    points.push_back({{"rho", res.rho_grid[i]}, {"proxy", estimate_json(e)}});
    t.rows.push_back({format_number(res.rho_grid[i]), format_number(e.mean), format_number(e.wilson_low),
                      format_number(e.wilson_high)});
  }
  b.summary["results"] = {{"psi_hat", res.psi_hat.psi_hat},
                          {"psi_std_error", res.psi_hat.std_error},
                          {"rho_c_predicted", res.rho_c_predicted},
                          {"monotonicity_violations", res.monotonicity_violations},
                          {"points", points}};
  b.summary["warnings"] = res.warnings;
  b.tables.push_back(std::move(t));
  return b;
}

OutputBundle run_block_event(const RunConfig& c) {
  const Params& p = c.params;
  BlockEventSpec spec;
  spec.n = p.n;
  spec.L = p.L;
  spec.T = p.T;
  spec.d = c.dimension;
  spec.site_cap = p.site_cap;
  const auto study = block_event_probability(*c.law, spec, p.replicas, c.seed);
  OutputBundle b;
  b.summary["results"] = {{"probability", estimate_json(study.probability)}};
  Table t{"block_event", {"replica", "occurred", "witness_t"}, {}};
  for (int i = 0; i < c.dimension; ++i) t.header.push_back("witness_x" + std::to_string(i + 1));
  for (std::size_t r = 0; r < study.replicas.size(); ++r) {
    const auto& e = study.replicas[r];
    std::vector<std::string> row{std::to_string(r), e.occurred ? "1" : "0", e.witness ? std::to_string(e.witness->t) : ""};
    for (int i = 0; i < c.dimension; ++i) row.push_back(e.witness ? std::to_string(e.witness->x[i]) : "");
    t.rows.push_back(std::move(row));
  }
  b.tables.push_back(std::move(t));
  return b;
}

OutputBundle run_orthant(const RunConfig& c) {
  const Params& p = c.params;
  OrthantOptions opt;
  opt.n = p.n;
  opt.L = p.L;
  opt.t_top = p.t_top;
  opt.T_face = p.T_face;
  opt.replicas = p.replicas;
  opt.site_cap = p.site_cap;
  const auto table = orthant_statistics(*c.law, c.dimension, opt, c.seed);
  const std::vector<Count> n_grid = {1, 2, 4, 8};
  const std::vector<Count> m_grid = {1, 2, 4};
  OutputBundle b;
  Table checks{"orthant_checks", {"inequality", "observable", "threshold", "lhs", "rhs", "combined_se", "pass"}, {}};
  std::size_t failures = 0;
  const auto add = [&](const std::string& name, const std::string& obs, const std::vector<InequalityCheck>& rows) {
    for (const auto& r : rows) {
      failures += r.pass ? 0 : 1;
      checks.rows.push_back({name, obs, format_number(r.threshold), format_number(r.lhs), format_number(r.rhs),
                             format_number(r.combined_se), r.pass ? "1" : "0"});
    }
  };
  add("square_root", "particles", square_root_trick_check(table, c.dimension, n_grid, Observable::particles));
  add("square_root", "occupied", square_root_trick_check(table, c.dimension, n_grid, Observable::occupied));
  add("face", "particles", face_inequality_check(table, c.dimension, m_grid, Observable::particles));
  add("face", "occupied", face_inequality_check(table, c.dimension, m_grid, Observable::occupied));
  Table rows{"orthant",
             {"replica", "total_particles", "orthant_particles", "total_occupied", "orthant_occupied", "N", "N_occupied",
              "N_plus", "N_plus_occupied"},
             {}};
  for (std::size_t r = 0; r < table.size(); ++r) {
    const auto& o = table[r];
    rows.rows.push_back({std::to_string(r), format_number(o.total_particles), format_number(o.orthant_particles),
                         format_number(o.total_occupied), format_number(o.orthant_occupied),
                         format_number(o.faces.particles_on_face), format_number(o.faces.occupied_on_face),
                         format_number(o.faces.particles_on_positive_orthant_face),
                         format_number(o.faces.occupied_on_positive_orthant_face)});
  }
  b.summary["results"] = {{"checks", checks.rows.size()}, {"failures", failures}};
  b.tables.push_back(std::move(rows));
  b.tables.push_back(std::move(checks));
  return b;
}

OutputBundle run_fkg(const RunConfig& c) {
  const Params& p = c.params;
  std::vector<MonotoneFunctional> catalog;
  for (const auto& f : p.functionals) catalog.push_back(MonotoneFunctional::parse(f, c.dimension));
  if (catalog.empty()) catalog = fkg_catalog(c.dimension);
  FkgOptions opt;
  opt.t = p.fkg_t;
  opt.replicas = p.replicas;
  const auto reports = fkg_suite(*c.law, c.dimension, parse_initial(p.initial, c.dimension), catalog, opt, c.seed);
  OutputBundle b;
  Table t{"fkg", {"f", "g", "mean_f", "mean_g", "covariance", "std_error", "replicas", "pass"}, {}};
  std::size_t failures = 0;
  json pairs = json::array();
  for (const auto& r : reports) {
    failures += r.pass ? 0 : 1;
    pairs.push_back({{"f", r.f}, {"g", r.g}, {"covariance", r.covariance}, {"std_error", r.std_error}, {"pass", r.pass}});
    t.rows.push_back({r.f, r.g, format_number(r.mean_f), format_number(r.mean_g), format_number(r.covariance),
                      format_number(r.std_error), std::to_string(r.replicas), r.pass ? "1" : "0"});
  }
  b.summary["results"] = {{"pairs", pairs}, {"failures", failures}};
  b.tables.push_back(std::move(t));
  return b;
}

Table curve_table(const std::string& name, const std::string& x, const std::vector<CurvePoint>& curve) {
  Table t{name, {x, "probability", "std_error", "wilson_low", "wilson_high"}, {}};
  for (const auto& pt : curve)
    t.rows.push_back({format_number(pt.x), format_number(pt.estimate.mean), format_number(pt.estimate.std_error),
                      format_number(pt.estimate.wilson_low), format_number(pt.estimate.wilson_high)});
  return t;
}

OutputBundle run_diagnostics(const RunConfig& c) {
  const Params& p = c.params;
  DiagnosticsOptions opt;
  opt.replicas = p.replicas;
  opt.growth_horizon = p.growth_horizon;
  opt.growth_cap = p.cap;
  opt.fill_n = p.fill_n;
  opt.diamond_survival_horizon = p.diamond_survival_horizon;
  opt.saturation_t = p.saturation_t;
  opt.saturation_N = p.saturation_N;
  const auto rep = diagnostics(*c.law, c.dimension, c.seed, opt);
  OutputBundle b;
  Table growth{"diagnostics_growth", {"t", "conditional_total", "std_error"}, {}};
  for (const auto& g : rep.growth)
    growth.rows.push_back({std::to_string(g.t), format_number(g.conditional_total.mean),
                           format_number(g.conditional_total.std_error)});
  b.summary["results"] = {{"growth_survivors", rep.growth_survivors},
                          {"fill_violations", rep.fill_violations},
                          {"diamond_survival_violations", rep.diamond_survival_violations},
                          {"saturation_violations", rep.saturation_violations}};
  b.tables.push_back(std::move(growth));
  b.tables.push_back(curve_table("diagnostics_fill", "N", rep.fill));
  b.tables.push_back(curve_table("diagnostics_diamond_survival", "n", rep.diamond_survival));
  b.tables.push_back(curve_table("diagnostics_saturation", "L", rep.saturation));
  return b;
}

}  // namespace

OutputBundle dispatch(const std::string& subcommand, const RunConfig& config) {
  OutputBundle b;
  if (subcommand == "validate") b = run_validate(config);
  else if (subcommand == "simulate") b = run_simulate(config);
  else if (subcommand == "polymer") b = run_polymer(config);
  else if (subcommand == "free-energy") b = run_free_energy(config);
  else if (subcommand == "survival") b = run_survival(config);
  else if (subcommand == "sweep-rho") b = run_sweep(config);
  else if (subcommand == "block-event") b = run_block_event(config);
  else if (subcommand == "orthant") b = run_orthant(config);
  else if (subcommand == "fkg-test") b = run_fkg(config);
  else if (subcommand == "diagnostics") b = run_diagnostics(config);
  else throw ConfigError(kConfigError, "unknown subcommand '" + subcommand + "'");
  b.summary = [&] {
    json head;
    head["experiment"] = subcommand;
    head["seed"] = config.seed;
    for (auto& [k, v] : b.summary.items()) head[k] = v;
    return head;
  }();

  Table summary_table{subcommand == "validate" ? "validate_summary" : "", {"key", "value"}, {}};
  summary_table.name = subcommand + "_summary";
  for (auto& ch : summary_table.name)
    if (ch == '-') ch = '_';
  flatten(b.summary["results"], "", summary_table);
  b.tables.push_back(std::move(summary_table));

  b.summary["parameters"] = params_json(config);
  b.summary["validation"] = report_json(config.report);
  return b;
}

namespace {

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> replicas;
  std::optional<std::string> out;
  std::optional<int> threads;
  std::optional<std::uint32_t> horizon;
  std::optional<Count> cap;
  std::optional<std::string> initial;
  std::optional<std::string> box;
  std::optional<std::string> sampling;
  std::optional<std::uint32_t> t;
  std::optional<std::string> method;
  std::optional<std::size_t> polymer_replicas;
  std::vector<double> rho;
  std::optional<int> n;
  std::optional<Coord> L;
  std::optional<std::uint32_t> T;
  std::optional<Count> site_cap;
  std::optional<std::uint32_t> t_top;
  std::optional<std::uint32_t> T_face;
  std::optional<std::string> f;
  std::optional<std::string> g;
  std::optional<std::uint32_t> growth_horizon;
  std::optional<int> fill_n;
  std::optional<std::uint32_t> diamond_survival_horizon;
  std::optional<std::uint32_t> saturation_t;
  std::optional<Count> saturation_N;
  bool allow_invalid = false;
};

template <class T>
void apply(const std::optional<T>& o, T& target) {
  if (o) target = *o;
}

void apply_overrides(const Overrides& o, RunConfig& c) {
  apply(o.seed, c.seed);
  Params& p = c.params;
  apply(o.replicas, p.replicas);
  apply(o.threads, p.threads);
  apply(o.horizon, p.horizon);
  apply(o.cap, p.cap);
  apply(o.initial, p.initial);
  apply(o.box, p.box);
  apply(o.sampling, p.sampling);
  apply(o.t, p.t);
  if (o.method) {
    try {
      p.method = parse_free_energy_method(*o.method);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(kConfigError, e.what());
    }
  }
  apply(o.polymer_replicas, p.polymer_replicas);
  if (!o.rho.empty()) p.rho_grid = o.rho;
  apply(o.n, p.n);
  apply(o.L, p.L);
  apply(o.T, p.T);
  apply(o.site_cap, p.site_cap);
  apply(o.t_top, p.t_top);
  apply(o.T_face, p.T_face);
  if (o.f || o.g) {
    p.functionals.clear();
    if (o.f) p.functionals.push_back(*o.f);
    if (o.g) p.functionals.push_back(*o.g);
  }
  apply(o.growth_horizon, p.growth_horizon);
  apply(o.fill_n, p.fill_n);
  apply(o.diamond_survival_horizon, p.diamond_survival_horizon);
  apply(o.saturation_t, p.saturation_t);
  apply(o.saturation_N, p.saturation_N);
  if (o.out) c.out_dir = *o.out;
}

constexpr const char* kExitCodes =
    "Exit codes: 0 success, 1 configuration or usage error, 2 law fails hyp1 (zero-mean component), "
    "3 law fails hyp2 (degenerate branching), 4 runtime error.";

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Branching random walks and directed polymers in random space-time environments."};
  app.footer(kExitCodes);
  app.require_subcommand(1);

  std::string config_path;
  Overrides o;

  const auto common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON environment/experiment config")->required();
    sub->add_option("--seed", o.seed, "master seed (overrides config)");
    sub->add_option("--replicas", o.replicas, "number of replicas");
    sub->add_option("--out", o.out, "directory for CSV tables (default: out)");
    sub->add_option("--threads", o.threads, "worker threads (default: machine parallelism)");
    sub->add_flag("--allow-invalid-law", o.allow_invalid, "run even if the law fails hyp1/hyp2");
  };

  auto* validate_cmd = app.add_subcommand("validate", "check the environment law assumptions");
  common(validate_cmd);

  auto* sim = app.add_subcommand("simulate", "run replicas of the BRWRE");
  common(sim);
  sim->add_option("--initial", o.initial, "origin | diamond:n | x1,..,xd:count;...");
  sim->add_option("--horizon", o.horizon, "time horizon");
  sim->add_option("--box", o.box, "none | cube half-width L");
  sim->add_option("--cap", o.cap, "population cap");
  sim->add_option("--sampling", o.sampling, "annealed | quenched");

  auto* pol = app.add_subcommand("polymer", "log Z_t on the quenched environment of --seed");
  common(pol);
  pol->add_option("--t", o.t, "polymer length");

  auto* fe = app.add_subcommand("free-energy", "estimate Psi(gamma)");
  common(fe);
  fe->add_option("--t", o.t, "polymer length");
  fe->add_option("--method", o.method, "point | slope");

  auto* surv = app.add_subcommand("survival", "survival proxy probability");
  common(surv);
  surv->add_option("--initial", o.initial, "initial configuration");
  surv->add_option("--horizon", o.horizon, "time horizon");
  surv->add_option("--cap", o.cap, "population cap");
  surv->add_option("--sampling", o.sampling, "annealed | quenched");

  auto* sweep = app.add_subcommand("sweep-rho", "coupled survival sweep over gamma^rho with rho_c prediction");
  common(sweep);
  sweep->add_option("--rho", o.rho, "rho grid")->delimiter(',');
  sweep->add_option("--horizon", o.horizon, "time horizon");
  sweep->add_option("--cap", o.cap, "population cap");
  sweep->add_option("--t", o.t, "polymer length for Psi_hat");
  sweep->add_option("--polymer-replicas", o.polymer_replicas, "environments for Psi_hat");
  sweep->add_option("--method", o.method, "point | slope");

  auto* block = app.add_subcommand("block-event", "probability of the block event");
  common(block);
  block->add_option("--n", o.n, "diamond radius");
  block->add_option("--L", o.L, "box scale");
  block->add_option("--T", o.T, "time scale");
  block->add_option("--site-cap", o.site_cap, "per-site particle clamp");

  auto* orth = app.add_subcommand("orthant", "orthant and face statistics with their FKG inequalities");
  common(orth);
  orth->add_option("--n", o.n, "diamond radius");
  orth->add_option("--L", o.L, "truncation half-width (> n)");
  orth->add_option("--t-top", o.t_top, "time of the orthant count");
  orth->add_option("--T-face", o.T_face, "face-count horizon");
  orth->add_option("--site-cap", o.site_cap, "per-site particle clamp");

  auto* fkg = app.add_subcommand("fkg-test", "covariance test of monotone functionals");
  common(fkg);
  fkg->add_option("--initial", o.initial, "initial configuration");
  fkg->add_option("--t", o.t, "time");
  fkg->add_option("--f", o.f, "first functional (default: whole catalogue)");
  fkg->add_option("--g", o.g, "second functional");

  auto* diag = app.add_subcommand("diagnostics", "finite-scale survival curves");
  common(diag);
  diag->add_option("--growth-horizon", o.growth_horizon, "horizon of the conditional growth curve");
  diag->add_option("--cap", o.cap, "population cap of the growth curve");
  diag->add_option("--fill-n", o.fill_n, "even n of the fill curve");
  diag->add_option("--diamond-horizon", o.diamond_survival_horizon, "horizon of the A_n survival curve");
  diag->add_option("--saturation-t", o.saturation_t, "time of the saturation curve");
  diag->add_option("--saturation-N", o.saturation_N, "threshold of the saturation curve");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kSuccess : kConfigError;
  }

  const std::string cmd = app.get_subcommands().front()->get_name();
  try {
    const auto start = std::chrono::steady_clock::now();
    RunConfig cfg = parse_config(config_path, cmd != "validate" && !o.allow_invalid);
    if (o.t && cmd == "fkg-test") {
      cfg.params.fkg_t = *o.t;
      o.t.reset();
    }
    apply_overrides(o, cfg);
    parallel::set_threads(cfg.params.threads);
    OutputBundle bundle = dispatch(cmd, cfg);
    for (const auto& t : bundle.tables) write_table(t, cfg.out_dir, cfg.seed);
    const std::chrono::duration<double> wall = std::chrono::steady_clock::now() - start;
    bundle.summary["tables"] = json::array();
    for (const auto& t : bundle.tables) bundle.summary["tables"].push_back((cfg.out_dir / (t.name + ".csv")).string());
    bundle.summary["meta"] = {{"wall_clock_seconds", wall.count()}, {"threads", parallel::max_threads()}};
    std::cout << bundle.summary.dump(2) << std::endl;
    return bundle.exit_code;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.exit_code();
  } catch (const PreconditionError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntimeError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntimeError;
  }
}

}  // namespace brwre::cli
