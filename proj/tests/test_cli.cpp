#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <unistd.h>

#include "brwre/cli.hpp"

using namespace brwre;
namespace fs = std::filesystem;

namespace {

fs::path scratch() {
  static const fs::path dir = [] {
    auto p = fs::temp_directory_path() / ("brwre_cli_test_" + std::to_string(::getpid()));
    fs::create_directories(p);
    return p;
  }();
  return dir;
}

fs::path write_config(const std::string& name, const std::string& text) {
  const auto p = scratch() / name;
  std::ofstream(p) << text;
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "brwre");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  std::ostringstream sink;
  auto* old_out = std::cout.rdbuf(sink.rdbuf());
  auto* old_err = std::cerr.rdbuf(sink.rdbuf());
  const int code = cli::main(static_cast<int>(argv.size()), argv.data());
  std::cout.rdbuf(old_out);
  std::cerr.rdbuf(old_err);
  return code;
}

const char* kGood = R"({"dimension": 1, "seed": 3, "components": [{"weight": 1, "pmf": [0.25, 0.25, 0.5]}]})";

}  // namespace

TEST_CASE("config defaults and strict keys") {
  const auto cfg = cli::parse_config_text(kGood);
  CHECK(cfg.dimension == 1);
  CHECK(cfg.seed == 3);
  CHECK(cfg.params.horizon == 200);
  CHECK(cfg.params.cap == 1000000);
  CHECK(cfg.params.replicas == 1000);
  CHECK(cfg.report.hyp1_ok);

  try {
    cli::parse_config_text(R"({"components": [{"weight": 1, "pmf": [1]}], "params": {"horizonn": 3}})", false);
    FAIL("expected ConfigError");
  } catch (const cli::ConfigError& e) {
    CHECK(e.exit_code() == 1);
    CHECK(std::string(e.what()).find("horizonn") != std::string::npos);
  }
  try {
    cli::parse_config_text(R"({"components": [{"weight": 1, "pmf": [0.5, 0.4]}]})");
    FAIL("expected ConfigError");
  } catch (const cli::ConfigError& e) {
    CHECK(e.exit_code() == 1);
    CHECK(std::string(e.what()).find("component 0") != std::string::npos);
  }
  try {
    cli::parse_config_text("{\n  \"dimension\": 1,\n  \"seed\": ,\n}");
    FAIL("expected ConfigError");
  } catch (const cli::ConfigError& e) {
    CHECK(e.exit_code() == 1);
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
  CHECK_THROWS_AS(cli::parse_config_text(R"({"dimension": 1})"), cli::ConfigError);
}

TEST_CASE("config: hypothesis failures map to exit codes") {
  try {
    cli::parse_config_text(R"({"components": [{"weight": 1, "pmf": [1]}]})");
    FAIL("expected ConfigError");
  } catch (const cli::ConfigError& e) {
    CHECK(e.exit_code() == 2);
  }
  try {
    cli::parse_config_text(R"({"components": [{"weight": 0.5, "pmf": [0, 1]}, {"weight": 0.5, "pmf": [0.5, 0.5]}]})");
    FAIL("expected ConfigError");
  } catch (const cli::ConfigError& e) {
    CHECK(e.exit_code() == 3);
  }
  CHECK_NOTHROW(cli::parse_config_text(R"({"components": [{"weight": 1, "pmf": [1]}]})", false));
}

TEST_CASE("initial configurations and boxes") {
  CHECK(cli::parse_initial("origin", 2) == Configuration::single(Site{}));
  CHECK(cli::parse_initial("diamond:2", 1).occupied() == 3);
  const auto c = cli::parse_initial("0,1:2;3,-1:1", 2);
  CHECK(c.at(Site{{0, 1}}) == 2);
  CHECK(c.at(Site{{3, -1}}) == 1);
  CHECK_THROWS_AS(cli::parse_initial("0,1", 2), cli::ConfigError);
  CHECK_THROWS_AS(cli::parse_initial("diamond:x", 2), cli::ConfigError);
  CHECK(cli::parse_box("none").kind() == TruncationBox::Kind::none);
  CHECK(cli::parse_box("5").half_width() == 5);
  CHECK_THROWS_AS(cli::parse_box("-2"), cli::ConfigError);
}

TEST_CASE("number formatting round-trips") {
  for (double v : {0.1, 1.0 / 3.0, 1e-300, 123456789.0, -2.5}) CHECK(std::stod(cli::format_number(v)) == v);
  CHECK(cli::format_number(std::uint64_t{42}) == "42");
}

TEST_CASE("validate exit codes") {
  const auto good = write_config("good.json", kGood);
  const auto hyp1 = write_config("hyp1.json", R"({"components": [{"weight": 1, "pmf": [1]}]})");
  const auto hyp2 =
      write_config("hyp2.json", R"({"components": [{"weight": 0.5, "pmf": [0, 1]}, {"weight": 0.5, "pmf": [0.5, 0.5]}]})");
  const auto bad = write_config("bad.json", R"({"components": [{"weight": 1, "pmf": [0.9]}]})");
  const auto typo = write_config("typo.json", R"({"components": [{"weight": 1, "pmf": [1]}], "sede": 1})");
  const auto out = (scratch() / "validate").string();
  CHECK(run_cli({"validate", "--config", good.string(), "--out", out}) == 0);
  CHECK(run_cli({"validate", "--config", hyp1.string(), "--out", out}) == 2);
  CHECK(run_cli({"validate", "--config", hyp2.string(), "--out", out}) == 3);
  CHECK(run_cli({"validate", "--config", bad.string(), "--out", out}) == 1);
  CHECK(run_cli({"validate", "--config", typo.string(), "--out", out}) == 1);
  CHECK(run_cli({"validate", "--config", (scratch() / "missing.json").string()}) == 1);
  CHECK(run_cli({"simulate", "--config", hyp2.string(), "--out", out}) == 3);
  CHECK(run_cli({"bogus"}) == 1);
}

TEST_CASE("free-energy output is byte-identical across runs and thread counts") {
  const auto cfg = write_config("fe.json", R"({"dimension": 2, "seed": 8,
    "components": [{"weight": 0.5, "pmf": [0, 0, 1]}, {"weight": 0.5, "pmf": [0.5, 0.5]}]})");
  const auto a = scratch() / "fe_a";
  const auto b = scratch() / "fe_b";
  REQUIRE(run_cli({"free-energy", "--config", cfg.string(), "--t", "20", "--replicas", "5", "--out", a.string()}) == 0);
  REQUIRE(run_cli({"free-energy", "--config", cfg.string(), "--t", "20", "--replicas", "5", "--out", b.string(),
                   "--threads", "3"}) == 0);
  const auto csv = slurp(a / "free_energy.csv");
  CHECK(csv == slurp(b / "free_energy.csv"));
  CHECK(csv.starts_with("# seed=8"));
  CHECK(slurp(a / "free-energy_summary.csv").empty());
  CHECK(slurp(a / "free_energy_summary.csv").find("psi_hat,") != std::string::npos);
}

TEST_CASE("sweep-rho table and summary") {
  const auto cfg = write_config("sweep.json", R"({"dimension": 1, "seed": 4,
    "components": [{"weight": 0.5, "pmf": [0, 0, 1]}, {"weight": 0.5, "pmf": [0.5, 0.5]}],
    "params": {"horizon": 30, "cap": 1000, "t": 10, "polymer_replicas": 2}})");
  const auto out = scratch() / "sweep";
  REQUIRE(run_cli({"sweep-rho", "--config", cfg.string(), "--replicas", "40", "--rho", "0.5,1", "--out", out.string()}) ==
          0);
  const auto csv = slurp(out / "sweep_rho.csv");
  CHECK(csv.find("rho,proxy,wilson_low,wilson_high\n") != std::string::npos);
  CHECK(slurp(out / "sweep_rho_summary.csv").find("rho_c_predicted,") != std::string::npos);
}

TEST_CASE("every subcommand runs on a small config") {
  const auto cfg = write_config("small.json", R"({"dimension": 1, "seed": 6,
    "components": [{"weight": 0.5, "pmf": [0.25, 0.25, 0.5]}, {"weight": 0.5, "pmf": [0.5, 0.25, 0.25]}],
    "params": {"horizon": 20, "cap": 1000, "t": 10, "polymer_replicas": 2, "n": 1, "L": 3, "T": 4,
               "t_top": 3, "T_face": 3, "fkg_t": 5, "growth_horizon": 5, "diamond_survival_horizon": 10}})");
  const auto out = scratch() / "all";
  for (const std::string cmd : {"simulate", "polymer", "free-energy", "survival", "sweep-rho", "block-event", "orthant",
                                "fkg-test", "diagnostics"}) {
    CAPTURE(cmd);
    CHECK(run_cli({cmd, "--config", cfg.string(), "--replicas", "20", "--out", out.string()}) == 0);
  }
  const auto sim = slurp(out / "simulate.csv");
  CHECK(sim.find("replica,tau,capped,final_total,final_occupied\n") != std::string::npos);
  CHECK(slurp(out / "block_event.csv").find("replica,occurred,witness_t,witness_x1\n") != std::string::npos);
  CHECK(run_cli({"simulate", "--config", cfg.string(), "--initial", "9:1", "--box", "2", "--out", out.string()}) == 4);
}
