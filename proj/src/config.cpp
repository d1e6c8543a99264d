#include <cmath>
#include <limits>
#include <fstream>
#include <set>
#include <sstream>

#include "brwre/cli.hpp"
#include "brwre/renorm.hpp"

namespace brwre::cli {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& msg) { throw ConfigError(kConfigError, msg); }

void reject_unknown(const json& obj, const std::set<std::string>& known, const std::string& where) {
  for (const auto& [key, value] : obj.items())
    if (!known.contains(key)) fail("unknown key \"" + key + "\" in " + where);
}

std::uint64_t get_unsigned(const json& j, const std::string& key) {
  if (j.is_number_unsigned()) return j.get<std::uint64_t>();
  if (j.is_number_integer()) {
    if (j.get<std::int64_t>() < 0) fail("key \"" + key + "\" must be >= 0");
    return j.get<std::uint64_t>();
  }
  if (j.is_number_float()) {
    const double v = j.get<double>();
    if (v >= 0.0 && v == std::floor(v) && v < 1.8e19) return static_cast<std::uint64_t>(v);
  }
  fail("key \"" + key + "\" must be a nonnegative integer");
}

std::int64_t get_signed(const json& j, const std::string& key) {
  if (j.is_number_integer()) return j.get<std::int64_t>();
  if (j.is_number_float()) {
    const double v = j.get<double>();
    if (v == std::floor(v) && std::abs(v) < 9e18) return static_cast<std::int64_t>(v);
  }
  fail("key \"" + key + "\" must be an integer");
}

double get_real(const json& j, const std::string& key) {
  if (!j.is_number()) fail("key \"" + key + "\" must be a number");
  return j.get<double>();
}

std::string get_string(const json& j, const std::string& key) {
  if (!j.is_string()) fail("key \"" + key + "\" must be a string");
  return j.get<std::string>();
}

template <class T>
T narrow(std::uint64_t v, const std::string& key) {
  if (v > static_cast<std::uint64_t>(std::numeric_limits<T>::max())) fail("key \"" + key + "\" is too large");
  return static_cast<T>(v);
}

void parse_params(const json& j, Params& p) {
  if (!j.is_object()) fail("\"params\" must be an object");
  static const std::set<std::string> known = {
      "horizon", "cap", "replicas", "initial", "box", "sampling", "t", "method", "polymer_replicas",
      "rho_grid", "n", "L", "T", "site_cap", "t_top", "T_face", "fkg_t", "functionals",
      "growth_horizon", "fill_n", "diamond_survival_horizon", "saturation_t", "saturation_N", "threads"};
  reject_unknown(j, known, "params");
  for (const auto& [key, v] : j.items()) {
    if (key == "horizon") p.horizon = narrow<std::uint32_t>(get_unsigned(v, key), key);
    else if (key == "cap") p.cap = get_unsigned(v, key);
    else if (key == "replicas") p.replicas = get_unsigned(v, key);
    else if (key == "initial") p.initial = get_string(v, key);
    else if (key == "box") p.box = get_string(v, key);
    else if (key == "sampling") p.sampling = get_string(v, key);
    else if (key == "t") p.t = narrow<std::uint32_t>(get_unsigned(v, key), key);
    else if (key == "method") {
      try {
        p.method = parse_free_energy_method(get_string(v, key));
      } catch (const std::invalid_argument& e) {
        fail(e.what());
      }
    } else if (key == "polymer_replicas") p.polymer_replicas = get_unsigned(v, key);
    else if (key == "rho_grid") {
      if (!v.is_array() || v.empty()) fail("key \"rho_grid\" must be a non-empty array of numbers");
      p.rho_grid.clear();
      for (const auto& r : v) p.rho_grid.push_back(get_real(r, key));
    } else if (key == "n") p.n = static_cast<int>(get_signed(v, key));
    else if (key == "L") p.L = static_cast<Coord>(get_signed(v, key));
    else if (key == "T") p.T = narrow<std::uint32_t>(get_unsigned(v, key), key);
    else if (key == "site_cap") p.site_cap = get_unsigned(v, key);
    else if (key == "t_top") p.t_top = narrow<std::uint32_t>(get_unsigned(v, key), key);
    else if (key == "T_face") p.T_face = narrow<std::uint32_t>(get_unsigned(v, key), key);
    else if (key == "fkg_t") p.fkg_t = narrow<std::uint32_t>(get_unsigned(v, key), key);
    else if (key == "functionals") {
      if (!v.is_array()) fail("key \"functionals\" must be an array of strings");
      p.functionals.clear();
      for (const auto& f : v) p.functionals.push_back(get_string(f, key));
    } else if (key == "growth_horizon") p.growth_horizon = narrow<std::uint32_t>(get_unsigned(v, key), key);
    else if (key == "fill_n") p.fill_n = static_cast<int>(get_signed(v, key));
    else if (key == "diamond_survival_horizon") p.diamond_survival_horizon = narrow<std::uint32_t>(get_unsigned(v, key), key);
    else if (key == "saturation_t") p.saturation_t = narrow<std::uint32_t>(get_unsigned(v, key), key);
    else if (key == "saturation_N") p.saturation_N = get_unsigned(v, key);
    else if (key == "threads") p.threads = static_cast<int>(get_signed(v, key));
  }
}

std::pair<std::size_t, std::size_t> line_column(const std::string& text, std::size_t byte) {
  std::size_t line = 1;
  std::size_t col = 1;
  for (std::size_t i = 0; i + 1 < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

}  // namespace

RunConfig parse_config_text(const std::string& text, bool strict) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    const auto [line, col] = line_column(text, e.byte);
    std::ostringstream os;
    os << "config parse error at line " << line << ", column " << col << ": " << e.what();
    fail(os.str());
  }
  if (!doc.is_object()) fail("config must be a JSON object");
  reject_unknown(doc, {"dimension", "seed", "components", "params", "out"}, "config");

  RunConfig cfg;
  if (doc.contains("dimension")) {
    cfg.dimension = static_cast<int>(get_signed(doc["dimension"], "dimension"));
    try {
      check_dimension(cfg.dimension);
    } catch (const std::invalid_argument& e) {
      fail(e.what());
    }
  }
  if (doc.contains("seed")) cfg.seed = get_unsigned(doc["seed"], "seed");
  if (doc.contains("out")) cfg.out_dir = get_string(doc["out"], "out");
  if (doc.contains("params")) parse_params(doc["params"], cfg.params);

  if (!doc.contains("components")) fail("config has no \"components\" (the environment law is required)");
  const json& comps = doc["components"];
  if (!comps.is_array() || comps.empty()) fail("\"components\" must be a non-empty array");
  std::vector<std::pair<double, std::vector<double>>> raw;
  for (std::size_t j = 0; j < comps.size(); ++j) {
    const json& c = comps[j];
    const std::string where = "components[" + std::to_string(j) + "]";
    if (!c.is_object()) fail(where + " must be an object");
    reject_unknown(c, {"weight", "pmf"}, where);
    if (!c.contains("weight") || !c.contains("pmf")) fail(where + " needs \"weight\" and \"pmf\"");
    if (!c["pmf"].is_array() || c["pmf"].empty()) fail(where + ".pmf must be a non-empty array");
    std::vector<double> pmf;
    for (const auto& p : c["pmf"]) pmf.push_back(get_real(p, "pmf"));
    raw.emplace_back(get_real(c["weight"], "weight"), std::move(pmf));
  }
  try {
    cfg.law = EnvironmentLaw::from_raw(raw);
  } catch (const LawError& e) {
    fail(std::string("invalid environment law: ") + e.what());
  }
  cfg.law_json = comps;
  cfg.report = validate(*cfg.law);
  if (strict) {
    const auto joined = [&] {
      std::string s;
      for (const auto& m : cfg.report.messages) s += (s.empty() ? "" : "; ") + m;
      return s;
    };
    if (!cfg.report.hyp1_ok) throw ConfigError(kHyp1Failure, "environment law fails hyp1: " + joined());
    if (!cfg.report.hyp2_ok) throw ConfigError(kHyp2Failure, "environment law fails hyp2: " + joined());
  }
  return cfg;
}

RunConfig parse_config(const std::filesystem::path& path, bool strict) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail("cannot read config file '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), strict);
}

Configuration parse_initial(const std::string& spec, int d) {
  if (spec == "origin") return Configuration::single(Site{});
  if (spec.starts_with("diamond:")) {
    int n = 0;
    try {
      std::size_t pos = 0;
      n = std::stoi(spec.substr(8), &pos);
      if (pos != spec.size() - 8) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      fail("malformed initial configuration '" + spec + "'");
    }
    if (n < 0) fail("diamond radius must be >= 0");
    return Configuration::uniform(diamond(n, d).sites);
  }
  std::vector<Configuration::Entry> entries;
  std::size_t pos = 0;
  while (pos <= spec.size()) {
    const auto semi = spec.find(';', pos);
    const std::string item = spec.substr(pos, semi == std::string::npos ? std::string::npos : semi - pos);
    const auto colon = item.rfind(':');
    if (colon == std::string::npos) fail("initial entry '" + item + "' must be site:count");
    try {
      const Site x = parse_site(item.substr(0, colon), d);
      std::size_t used = 0;
      const auto count = std::stoull(item.substr(colon + 1), &used);
      if (used != item.size() - colon - 1) throw std::invalid_argument("trailing");
      entries.emplace_back(x, count);
    } catch (const std::exception& e) {
      fail("malformed initial entry '" + item + "': " + e.what());
    }
    if (semi == std::string::npos) break;
    pos = semi + 1;
  }
  return Configuration::from_entries(std::move(entries));
}

TruncationBox parse_box(const std::string& spec) {
  if (spec == "none") return TruncationBox::none();
  try {
    std::size_t used = 0;
    const int l = std::stoi(spec, &used);
    if (used != spec.size() || l < 0) throw std::invalid_argument("bad");
    return TruncationBox::centered_cube(l);
  } catch (const std::exception&) {
    fail("box must be 'none' or a nonnegative half-width, got '" + spec + "'");
  }
}

}  // namespace brwre::cli
