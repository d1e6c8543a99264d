#include "brwre/polymer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

#include "brwre/parallel.hpp"
#include "brwre/stats.hpp"

namespace brwre {

namespace {

// Beyond this many grid cells the dense kernel would need too much memory;
// the sparse recursion is used instead.
constexpr std::uint64_t kMaxDenseCells = std::uint64_t{1} << 25;

[[noreturn]] void zero_mean_error(std::uint32_t u, const Site& x, int d) {
  std::ostringstream os;
  os << "environment has mean 0 at (u = " << u << ", x = (" << to_string(x, d)
     << ")): log Z is undefined (integrability assumption violated)";
  throw PreconditionError(os.str());
}

/// Dense (2R+1)^d grid centred on the origin.
struct ConeGrid {
  int d;
  Coord radius;
  std::int64_t side;
  std::array<std::int64_t, kMaxDim> stride{};
  std::int64_t centre = 0;

  ConeGrid(int dim, Coord r) : d(dim), radius(r), side(2 * std::int64_t{r} + 1) {
    std::int64_t s = 1;
    for (int i = 0; i < d; ++i) {
      stride[static_cast<std::size_t>(i)] = s;
      centre += r * s;
      s *= side;
    }
  }

  std::int64_t cells() const {
    std::int64_t n = 1;
    for (int i = 0; i < d; ++i) n *= side;
    return n;
  }

  std::int64_t index(const Site& x) const {
    std::int64_t idx = centre;
    for (int i = 0; i < d; ++i) idx += x[i] * stride[static_cast<std::size_t>(i)];
    return idx;
  }

  std::int64_t offset(int dir) const {
    const std::int64_t s = stride[static_cast<std::size_t>(dir / 2)];
    return dir % 2 == 0 ? s : -s;
  }
};

/// The j-th site of the sub-box [-r, r]^d in odometer order.
Site sub_box_site(std::int64_t j, Coord r, int d) {
  const std::int64_t w = 2 * std::int64_t{r} + 1;
  Site x;
  for (int i = 0; i < d; ++i) {
    x[i] = static_cast<Coord>(j % w) - r;
    j /= w;
  }
  return x;
}

std::int64_t sub_box_size(Coord r, int d) {
  std::int64_t n = 1;
  for (int i = 0; i < d; ++i) n *= 2 * std::int64_t{r} + 1;
  return n;
}

bool on_layer(const Site& x, std::uint32_t u, int d) {
  const auto n1 = l1_norm(x, d);
  return n1 <= u && ((coordinate_sum(x, d) + u) % 2 + 2) % 2 == 0;
}

PartitionFunction dense_partition_function(const QuenchedEnvironment& env, std::uint32_t t) {
  const int d = env.dimension();
  const double inv_dirs = 1.0 / (2.0 * d);
  const ConeGrid grid(d, static_cast<Coord>(t) + 1);
  std::vector<double> w(static_cast<std::size_t>(grid.cells()), 0.0);
  std::vector<double> flux(w.size(), 0.0);

  PartitionFunction out;
  out.log_z_by_time.assign(t + 1, 0.0);
  double log_scale = 0.0;
  double layer_max = 1.0;
  w[static_cast<std::size_t>(grid.centre)] = 1.0;

  for (std::uint32_t u = 0; u < t; ++u) {
    // flux(x) = W_u(x) m_{u,x} / (2d max_u) on layer u
    const Coord r = static_cast<Coord>(u);
    const std::int64_t n_in = sub_box_size(r, d);
    std::int64_t bad = std::numeric_limits<std::int64_t>::max();
    const double scale = inv_dirs / layer_max;
#pragma omp parallel for schedule(static) reduction(min : bad) if (n_in >= 4096 && !parallel::in_parallel_region())
    for (std::int64_t j = 0; j < n_in; ++j) {
      const Site x = sub_box_site(j, r, d);
      if (!on_layer(x, u, d)) continue;
      const auto idx = static_cast<std::size_t>(grid.index(x));
      const double m = env.mean_at(u, x);
      if (m == 0.0 && w[idx] > 0.0) bad = std::min(bad, j);
      flux[idx] = w[idx] * m * scale;
    }
    if (bad != std::numeric_limits<std::int64_t>::max()) zero_mean_error(u, sub_box_site(bad, r, d), d);
    log_scale += std::log(layer_max);

    // W_{u+1}(y) = sum over the 2d neighbours in fixed direction order
    const Coord r1 = r + 1;
    const std::int64_t n_out = sub_box_size(r1, d);
#pragma omp parallel for schedule(static) if (n_out >= 4096 && !parallel::in_parallel_region())
    for (std::int64_t j = 0; j < n_out; ++j) {
      const Site y = sub_box_site(j, r1, d);
      if (!on_layer(y, u + 1, d)) continue;
      const std::int64_t idx = grid.index(y);
      double s = 0.0;
      for (int dir = 0; dir < 2 * d; ++dir) s += flux[static_cast<std::size_t>(idx - grid.offset(dir))];
      w[static_cast<std::size_t>(idx)] = s;
    }

    double total = 0.0;
    layer_max = 0.0;
    for (std::int64_t j = 0; j < n_out; ++j) {
      const Site y = sub_box_site(j, r1, d);
      if (!on_layer(y, u + 1, d)) continue;
      const double v = w[static_cast<std::size_t>(grid.index(y))];
      total += v;
      layer_max = std::max(layer_max, v);
    }
    if (layer_max == 0.0) {
      // Unreachable under positive means; kept for a clean -inf.
      for (std::uint32_t s = u + 1; s <= t; ++s) out.log_z_by_time[s] = -std::numeric_limits<double>::infinity();
      out.log_z = -std::numeric_limits<double>::infinity();
      out.layer.time = t;
      return out;
    }
    out.log_z_by_time[u + 1] = std::log(total) + log_scale;
  }

  const Coord rt = static_cast<Coord>(t);
  const std::int64_t n_final = sub_box_size(rt, d);
  out.layer.time = t;
  out.layer.log_scale = log_scale + std::log(layer_max);
  for (std::int64_t j = 0; j < n_final; ++j) {
    const Site y = sub_box_site(j, rt, d);
    if (!on_layer(y, t, d)) continue;
    const double v = w[static_cast<std::size_t>(grid.index(y))];
    if (v > 0.0) out.layer.weights.emplace_back(y, v / layer_max);
  }
  std::sort(out.layer.weights.begin(), out.layer.weights.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  out.log_z = out.log_z_by_time[t];
  return out;
}

}  // namespace

double PolymerLayer::log_total() const {
  double s = 0.0;
  for (const auto& [x, v] : weights) s += v;
  return std::log(s) + log_scale;
}

PartitionFunction partition_function(const QuenchedEnvironment& env, std::uint32_t t) {
  const ConeGrid grid(env.dimension(), static_cast<Coord>(t) + 1);
  if (static_cast<std::uint64_t>(grid.cells()) > kMaxDenseCells) return reference::partition_function(env, t);
  return dense_partition_function(env, t);
}

namespace reference {

PartitionFunction partition_function(const QuenchedEnvironment& env, std::uint32_t t) {
  const int d = env.dimension();
  const double inv_dirs = 1.0 / (2.0 * d);
  PartitionFunction out;
  out.log_z_by_time.assign(t + 1, 0.0);
  std::map<Site, double> layer{{Site{}, 1.0}};
  double log_scale = 0.0;
  for (std::uint32_t u = 0; u < t; ++u) {
    std::map<Site, double> next;
    for (const auto& [x, wx] : layer) {
      const double m = env.mean_at(u, x);
      if (m == 0.0) zero_mean_error(u, x, d);
      for (int dir = 0; dir < 2 * d; ++dir) next[x + unit_step(dir)] += inv_dirs * m * wx;
    }
    double total = 0.0;
    double mx = 0.0;
    for (const auto& [x, v] : next) {
      total += v;
      mx = std::max(mx, v);
    }
    out.log_z_by_time[u + 1] = std::log(total) + log_scale;
    for (auto& [x, v] : next) v /= mx;
    log_scale += std::log(mx);
    layer = std::move(next);
  }
  out.log_z = out.log_z_by_time[t];
  out.layer.time = t;
  out.layer.log_scale = log_scale;
  out.layer.weights.assign(layer.begin(), layer.end());
  return out;
}

}  // namespace reference

namespace {

void enumerate_paths(const QuenchedEnvironment& env, std::uint32_t t, std::uint32_t u, const Site& x,
                     long double product, long double& sum) {
  const long double p = product * env.mean_at(u, x);
  if (u + 1 == t) {
    // the last factor is m_{t-1, S_{t-1}}; the final step does not change the product
    sum += p * (2 * env.dimension());
    return;
  }
  for (int dir = 0; dir < 2 * env.dimension(); ++dir) enumerate_paths(env, t, u + 1, x + unit_step(dir), p, sum);
}

}  // namespace

double partition_function_bruteforce(const QuenchedEnvironment& env, std::uint32_t t) {
  const int d = env.dimension();
  long double paths = 1.0L;
  for (std::uint32_t u = 0; u < t; ++u) {
    paths *= 2 * d;
    if (paths > static_cast<long double>(kBruteForceMaxPaths))
      throw DomainError("brute-force enumeration of (2d)^t paths exceeds " + std::to_string(kBruteForceMaxPaths));
  }
  if (t == 0) return 0.0;
  long double sum = 0.0L;
  enumerate_paths(env, t, 0, Site{}, 1.0L, sum);
  return static_cast<double>(std::log(sum / paths));
}

std::string to_string(FreeEnergyMethod m) { return m == FreeEnergyMethod::point ? "point" : "slope"; }

FreeEnergyMethod parse_free_energy_method(const std::string& s) {
  if (s == "point") return FreeEnergyMethod::point;
  if (s == "slope") return FreeEnergyMethod::slope;
  throw std::invalid_argument("unknown free-energy method '" + s + "' (expected point or slope)");
}

double upper_half_slope(std::span<const double> log_z_by_time) {
  const std::size_t t = log_z_by_time.size() - 1;
  const std::size_t lo = (t + 1) / 2;
  const double n = static_cast<double>(t - lo + 1);
  double ubar = 0.0;
  double ybar = 0.0;
  for (std::size_t u = lo; u <= t; ++u) {
    ubar += static_cast<double>(u);
    ybar += log_z_by_time[u];
  }
  ubar /= n;
  ybar /= n;
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t u = lo; u <= t; ++u) {
    const double du = static_cast<double>(u) - ubar;
    sxy += du * (log_z_by_time[u] - ybar);
    sxx += du * du;
  }
  return sxy / sxx;
}

FreeEnergyEstimate free_energy(const EnvironmentLaw& law, int d, std::uint32_t t, std::size_t replicas,
                               std::uint64_t master_seed, FreeEnergyMethod method) {
  check_dimension(d);
  if (t < 2) throw DomainError("free_energy needs t >= 2");
  if (replicas < 2) throw DomainError("free_energy needs at least 2 replicas");
  const auto report = validate(law);
  if (!report.hyp1_ok)
    throw PreconditionError("free energy undefined: " +
                            (report.messages.empty() ? std::string("integrability fails") : report.messages.front()));

  FreeEnergyEstimate est;
  est.t_used = t;
  est.replicas = replicas;
  est.method = method;
  est.log_z_over_t.resize(replicas);
  est.slopes.resize(replicas);
  const auto n = static_cast<std::ptrdiff_t>(replicas);
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t r = 0; r < n; ++r) {
    const QuenchedEnvironment env(law, master_seed + static_cast<std::uint64_t>(r), d);
    const auto pf = partition_function(env, t);
    est.log_z_over_t[static_cast<std::size_t>(r)] = pf.log_z / t;
    est.slopes[static_cast<std::size_t>(r)] = upper_half_slope(pf.log_z_by_time);
  }
  const auto m = mean_estimate(method == FreeEnergyMethod::point ? est.log_z_over_t : est.slopes);
  est.psi_hat = m.mean;
  est.std_error = m.std_error;
  return est;
}

double perturbation_identity_check(const EnvironmentLaw& law, double rho, int d, std::uint32_t t,
                                   std::uint64_t seed) {
  const QuenchedEnvironment env(law, seed, d);
  const QuenchedEnvironment env_rho = env.perturbed(rho);
  const double log_z = partition_function(env, t).log_z;
  const double log_z_rho = partition_function(env_rho, t).log_z;
  return std::abs(log_z_rho - t * std::log(rho) - log_z);
}

}  // namespace brwre
