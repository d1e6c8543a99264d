#include "brwre/envmodel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "brwre/rng.hpp"

namespace brwre {

namespace {

std::vector<double> prefix_sums(std::span<const double> p) {
  std::vector<double> out(p.size());
  double acc = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    acc += p[k];
    out[k] = acc;
  }
  return out;
}

}  // namespace

OffspringLaw::OffspringLaw(std::vector<double> pmf) : pmf_(std::move(pmf)) {
  if (pmf_.empty()) throw LawError("offspring pmf is empty");
  double sum = 0.0;
  for (std::size_t k = 0; k < pmf_.size(); ++k) {
    const double p = pmf_[k];
    if (!std::isfinite(p) || p < 0.0) {
      std::ostringstream os;
      os << "offspring pmf entry " << k << " is " << p << " (must be finite and >= 0)";
      throw LawError(os.str());
    }
    sum += p;
  }
  if (std::abs(sum - 1.0) > kLawTolerance) {
    std::ostringstream os;
    os.precision(17);
    os << "offspring pmf sums to " << sum << ", not 1";
    throw LawError(os.str());
  }
  while (pmf_.size() > 1 && pmf_.back() == 0.0) pmf_.pop_back();

  cdf_ = prefix_sums(pmf_);
  for (std::size_t k = 1; k < pmf_.size(); ++k) mean_ += static_cast<double>(k) * pmf_[k];
  for (std::size_t k = pmf_.size(); k-- > 2;) branching_mass_ += pmf_[k];
}

OffspringLaw OffspringLaw::dirac(std::uint32_t k) {
  std::vector<double> p(k + 1, 0.0);
  p[k] = 1.0;
  return OffspringLaw(std::move(p));
}

OffspringLaw OffspringLaw::thinned(double rho) const {
  if (!(rho > 0.0 && rho <= 1.0)) {
    std::ostringstream os;
    os << "perturbation parameter rho = " << rho << " outside (0, 1]";
    throw DomainError(os.str());
  }
  if (rho == 1.0) return *this;
  OffspringLaw out = *this;
  out.pmf_[0] = rho * pmf_[0] + (1.0 - rho);
  for (std::size_t k = 1; k < pmf_.size(); ++k) out.pmf_[k] = rho * pmf_[k];
  out.cdf_ = prefix_sums(out.pmf_);
  // Scaled directly so that m^rho = rho * m holds to the last bit.
  out.mean_ = rho * mean_;
  out.branching_mass_ = 0.0;
  for (std::size_t k = out.pmf_.size(); k-- > 2;) out.branching_mass_ += out.pmf_[k];
  return out;
}

EnvironmentLaw::EnvironmentLaw(std::vector<Component> components) {
  if (components.empty()) throw LawError("environment law has no components");
  double total = 0.0;
  for (std::size_t j = 0; j < components.size(); ++j) {
    const double w = components[j].weight;
    if (!std::isfinite(w) || w < 0.0) {
      std::ostringstream os;
      os << "component " << j << ": weight " << w << " (must be finite and >= 0)";
      throw LawError(os.str());
    }
    total += w;
  }
  if (std::abs(total - 1.0) > kLawTolerance) {
    std::ostringstream os;
    os.precision(17);
    os << "component weights sum to " << total << ", not 1";
    throw LawError(os.str());
  }
  for (auto& c : components) {
    auto same = std::find_if(components_.begin(), components_.end(),
                             [&](const Component& e) { return e.law == c.law; });
    if (same != components_.end())
      same->weight += c.weight;
    else
      components_.push_back(std::move(c));
  }
  cumulative_.reserve(components_.size());
  double acc = 0.0;
  for (const auto& c : components_) {
    acc += c.weight;
    cumulative_.push_back(acc);
  }
}

EnvironmentLaw EnvironmentLaw::from_raw(const std::vector<std::pair<double, std::vector<double>>>& raw) {
  std::vector<Component> comps;
  comps.reserve(raw.size());
  for (std::size_t j = 0; j < raw.size(); ++j) {
    try {
      comps.push_back({raw[j].first, OffspringLaw(raw[j].second)});
    } catch (const LawError& e) {
      throw LawError("component " + std::to_string(j) + ": " + e.what());
    }
  }
  return EnvironmentLaw(std::move(comps));
}

EnvironmentLaw EnvironmentLaw::deterministic(OffspringLaw law) {
  std::vector<Component> c;
  c.push_back({1.0, std::move(law)});
  return EnvironmentLaw(std::move(c));
}

double EnvironmentLaw::annealed_mean() const noexcept {
  double s = 0.0;
  for (const auto& c : components_) s += c.weight * c.law.mean();
  return s;
}

double EnvironmentLaw::mean_log_mean() const noexcept {
  double s = 0.0;
  for (const auto& c : components_) {
    if (c.weight == 0.0) continue;
    if (c.law.mean() == 0.0) return -std::numeric_limits<double>::infinity();
    s += c.weight * std::log(c.law.mean());
  }
  return s;
}

EnvironmentLaw perturb(const EnvironmentLaw& law, double rho) {
  std::vector<Component> out;
  out.reserve(law.size());
  for (const auto& c : law.components()) out.push_back({c.weight, c.law.thinned(rho)});
  return EnvironmentLaw(std::move(out));
}

ValidationReport validate(const EnvironmentLaw& law) {
  ValidationReport r;
  r.hyp1_ok = true;
  bool some_death = false;
  bool some_branching = false;
  bool some_dirac_zero = false;
  const auto comps = law.components();
  for (std::size_t j = 0; j < comps.size(); ++j) {
    const auto& c = comps[j];
    if (c.weight <= 0.0) continue;
    if (c.law.mean() == 0.0) {
      r.hyp1_ok = false;
      r.messages.push_back("component " + std::to_string(j) +
                           " has mean 0: E[1/m] is infinite (integrability assumption fails)");
    }
    if (c.law.prob(0) > 0.0) some_death = true;
    if (c.law.branching_mass() > 0.0) some_branching = true;
    if (c.law.is_dirac_zero()) some_dirac_zero = true;
  }
  if (!some_death) r.messages.push_back("no component has q(0) > 0: extinction is impossible");
  if (!some_branching)
    r.messages.push_back("no component has q(0) + q(1) < 1: the population cannot grow");
  r.hyp2_ok = some_death && some_branching;
  r.dichotomy = some_dirac_zero ? Dichotomy::H : Dichotomy::H_complement;
  return r;
}

std::string to_string(Dichotomy d) { return d == Dichotomy::H ? "H" : "H_complement"; }

QuenchedEnvironment::QuenchedEnvironment(EnvironmentLaw law, std::uint64_t seed, int dimension)
    : law_(std::move(law)), seed_(seed), dimension_(dimension) {
  check_dimension(dimension);
}

std::size_t QuenchedEnvironment::component_at(std::uint64_t t, const Site& x) const noexcept {
  if (law_.size() == 1) return 0;
  const auto key = rng::cell_key(seed_, rng::Stream::environment, t, x, dimension_);
  return law_.select(rng::to_unit(rng::draw(key, 0)));
}

QuenchedEnvironment QuenchedEnvironment::perturbed(double rho) const {
  return QuenchedEnvironment(perturb(law_, rho), seed_, dimension_);
}

}  // namespace brwre
