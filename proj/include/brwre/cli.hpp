#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "brwre/envmodel.hpp"
#include "brwre/particles.hpp"
#include "brwre/polymer.hpp"

namespace brwre::cli {

/// Process exit codes.
enum ExitCode : int {
  kSuccess = 0,
  kConfigError = 1,
  kHyp1Failure = 2,
  kHyp2Failure = 3,
  kRuntimeError = 4,
};

class ConfigError : public std::runtime_error {
 public:
  ConfigError(int exit_code, const std::string& what) : std::runtime_error(what), exit_code_(exit_code) {}
  int exit_code() const noexcept { return exit_code_; }

 private:
  int exit_code_;
};

/// Experiment parameters; every field has a default.
struct Params {
  std::uint32_t horizon = 200;
  Count cap = 1'000'000;
  std::size_t replicas = 1000;
  std::string initial = "origin";
  std::string box = "none";
  std::string sampling = "annealed";
  // polymer / free energy
  std::uint32_t t = 100;
  FreeEnergyMethod method = FreeEnergyMethod::slope;
  std::size_t polymer_replicas = 20;
  // sweep
  std::vector<double> rho_grid = {0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
  // block event / orthant statistics
  int n = 4;
  Coord L = 12;
  std::uint32_t T = 40;
  Count site_cap = 256;
  std::uint32_t t_top = 8;
  std::uint32_t T_face = 8;
  // fkg
  std::uint32_t fkg_t = 20;
  std::vector<std::string> functionals;  // empty: the shipped catalogue
  // diagnostics
  std::uint32_t growth_horizon = 50;
  int fill_n = 2;
  std::uint32_t diamond_survival_horizon = 100;
  std::uint32_t saturation_t = 10;
  Count saturation_N = 10;
  int threads = 0;  // 0: machine parallelism
};

struct RunConfig {
  int dimension = 1;
  std::uint64_t seed = 0;
  std::optional<EnvironmentLaw> law;  // required
  ValidationReport report;
  Params params;
  std::filesystem::path out_dir = "out";
  nlohmann::json law_json;  // as written, for the parameter echo
};

/// Parses a JSON config. Top-level keys: dimension, seed, components (list of
/// {weight, pmf}), params (object), out. Unknown keys at any level are
/// rejected. Syntax errors report line and column.
///
/// Throws ConfigError: exit 1 for parse/structure problems (including a
/// malformed law, naming the component); with `strict`, exit 2/3 when the
/// law fails hyp1/hyp2.
RunConfig parse_config(const std::filesystem::path& path, bool strict = true);
RunConfig parse_config_text(const std::string& text, bool strict = true);

/// "origin", "diamond:n", or "x1,..,xd:count;x1,..,xd:count;...".
Configuration parse_initial(const std::string& spec, int d);
/// "none" or a cube half-width L.
TruncationBox parse_box(const std::string& spec);

struct Table {
  std::string name;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

struct OutputBundle {
  nlohmann::ordered_json summary;
  std::vector<Table> tables;
  int exit_code = kSuccess;
};

/// Shortest round-trip decimal form.
std::string format_number(double v);
std::string format_number(std::uint64_t v);

/// Writes `<out_dir>/<name>.csv` with a metadata line carrying the seed.
void write_table(const Table& table, const std::filesystem::path& out_dir, std::uint64_t seed);

/// Runs `subcommand` on a parsed config.
OutputBundle dispatch(const std::string& subcommand, const RunConfig& config);

/// Full command-line entry point; returns the process exit code.
int main(int argc, char** argv);

}  // namespace brwre::cli
