#include "sea/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace sea {

namespace {

void check_support(std::span<const std::size_t> support, const EnergySpectrum& spectrum) {
  if (support.empty()) throw std::invalid_argument("equilibrium: support must be non-empty");
  for (std::size_t i : support) {
    if (i >= spectrum.size()) throw std::out_of_range("equilibrium: support index out of range");
  }
}

struct SupportRange {
  double lo;
  double hi;
  double mean;
};

SupportRange support_range(const EnergySpectrum& spectrum, std::span<const std::size_t> support) {
  SupportRange r{spectrum[support[0]], spectrum[support[0]], 0.0};
  detail::CompensatedSum sum;
  for (std::size_t i : support) {
    r.lo = std::min(r.lo, spectrum[i]);
    r.hi = std::max(r.hi, spectrum[i]);
    sum.add(spectrum[i]);
  }
  r.mean = sum.value() / static_cast<double>(support.size());
  return r;
}

// Mean of (e - target) and variance of e under the canonical weights at beta.
struct Residual {
  double value;
  double variance;
};

Residual energy_residual(double beta, double target, const EnergySpectrum& spectrum,
                         std::span<const std::size_t> support, const SupportRange& range) {
  const double shift = beta >= 0.0 ? range.lo : range.hi;
  detail::CompensatedSum z, m1, m2;
  for (std::size_t i : support) {
    const double w = std::exp(-beta * (spectrum[i] - shift));
    const double d = spectrum[i] - target;
    z.add(w);
    m1.add(d * w);
    m2.add(d * d * w);
  }
  const double mean = m1.value() / z.value();
  const double second = m2.value() / z.value();
  return {mean, std::max(0.0, second - mean * mean)};
}

StateDistribution extremal_distribution(const EnergySpectrum& spectrum,
                                        std::span<const std::size_t> support, double level) {
  std::vector<double> p(spectrum.size(), 0.0);
  std::size_t count = 0;
  for (std::size_t i : support) count += spectrum[i] == level ? 1 : 0;
  for (std::size_t i : support) {
    if (spectrum[i] == level) p[i] = 1.0 / static_cast<double>(count);
  }
  return StateDistribution::from_normalized(std::move(p));
}

EquilibriumSolution finite_solution(double beta, const EnergySpectrum& spectrum,
                                    std::span<const std::size_t> support,
                                    const ModelConstants& constants) {
  const bool infinite_t = beta == 0.0;
  return EquilibriumSolution{
      .beta = beta,
      .limit = BetaLimit::finite,
      .temperature = infinite_t ? 0.0 : 1.0 / (constants.k() * beta),
      .infinite_temperature = infinite_t,
      .partition = partition_function(beta, spectrum, support),
      .distribution = canonical_distribution(beta, spectrum, support),
      .support = Support(support.begin(), support.end()),
  };
}

EquilibriumSolution endpoint_solution(bool ground, const EnergySpectrum& spectrum,
                                      std::span<const std::size_t> support,
                                      const SupportRange& range) {
  const double level = ground ? range.lo : range.hi;
  auto dist = extremal_distribution(spectrum, support, level);
  const double degeneracy = static_cast<double>(dist.support().size());
  constexpr double inf = std::numeric_limits<double>::infinity();
  return EquilibriumSolution{
      .beta = ground ? inf : -inf,
      .limit = ground ? BetaLimit::plus_infinity : BetaLimit::minus_infinity,
      .temperature = ground ? 0.0 : -0.0,
      .infinite_temperature = false,
      .partition = PartitionFunction{degeneracy, level, ground ? inf : -inf},
      .distribution = std::move(dist),
      .support = Support(support.begin(), support.end()),
  };
}

}  // namespace

double PartitionFunction::log_unshifted() const {
  return std::log(shifted) - beta * shift;
}

PartitionFunction partition_function(double beta, const EnergySpectrum& spectrum,
                                     std::span<const std::size_t> support) {
  check_support(support, spectrum);
  const SupportRange range = support_range(spectrum, support);
  const double shift = beta >= 0.0 ? range.lo : range.hi;
  detail::CompensatedSum z;
  for (std::size_t i : support) z.add(std::exp(-beta * (spectrum[i] - shift)));
  return PartitionFunction{z.value(), shift, beta};
}

StateDistribution canonical_distribution(double beta, const EnergySpectrum& spectrum,
                                         std::span<const std::size_t> support) {
  const PartitionFunction z = partition_function(beta, spectrum, support);
  std::vector<double> p(spectrum.size(), 0.0);
  // Levels at the shift carry the largest weight; taking them as the
  // complement of the rest avoids the rounding of 1/Z near one.
  detail::CompensatedSum rest;
  std::size_t dominant = 0;
  for (std::size_t i : support) {
    if (spectrum[i] == z.shift) {
      ++dominant;
      continue;
    }
    p[i] = std::exp(-beta * (spectrum[i] - z.shift)) / z.shifted;
    rest.add(p[i]);
  }
  const double top = std::max(0.0, 1.0 - rest.value()) / static_cast<double>(dominant);
  for (std::size_t i : support) {
    if (spectrum[i] == z.shift) p[i] = top;
  }
  return StateDistribution::from_normalized(std::move(p));
}

EquilibriumSolution beta_from_energy(double target, const EnergySpectrum& spectrum,
                                     std::span<const std::size_t> support,
                                     const ModelConstants& constants) {
  check_support(support, spectrum);
  if (!std::isfinite(target)) throw std::domain_error("beta_from_energy: energy must be finite");
  const SupportRange range = support_range(spectrum, support);
  const double width = range.hi - range.lo;
  const double slack = 1e-12 * std::max({1.0, std::abs(range.lo), std::abs(range.hi)});

  if (target < range.lo - slack || target > range.hi + slack) {
    throw std::domain_error("beta_from_energy: energy " + std::to_string(target) +
                            " outside [" + std::to_string(range.lo) + ", " +
                            std::to_string(range.hi) + "]");
  }
  if (width == 0.0) return finite_solution(0.0, spectrum, support, constants);
  if (target <= range.lo) return endpoint_solution(true, spectrum, support, range);
  if (target >= range.hi) return endpoint_solution(false, spectrum, support, range);
  if (target == range.mean) return finite_solution(0.0, spectrum, support, constants);

  // The residual is strictly decreasing in beta (its derivative is -Var(e)).
  // Past |beta| * width ~ 1500 every weight but the extremal ones underflows,
  // so the energy is numerically at the endpoint.
  constexpr double kMaxExponent = 1500.0;
  auto residual = [&](double b) { return energy_residual(b, target, spectrum, support, range); };
  double lo_b = -1.0 / width;
  double hi_b = 1.0 / width;
  while (residual(hi_b).value > 0.0) {
    lo_b = hi_b;
    hi_b *= 2.0;
    if (hi_b * width > kMaxExponent) return endpoint_solution(true, spectrum, support, range);
  }
  while (residual(lo_b).value < 0.0) {
    hi_b = lo_b;
    lo_b *= 2.0;
    if (-lo_b * width > kMaxExponent) return endpoint_solution(false, spectrum, support, range);
  }

  // Safeguarded Newton: take the Newton step when it stays inside the
  // bracket, otherwise bisect.
  double beta = 0.5 * (lo_b + hi_b);
  for (int iter = 0; iter < 400; ++iter) {
    const Residual r = residual(beta);
    if (r.value == 0.0) break;
    if (r.value > 0.0) {
      lo_b = beta;
    } else {
      hi_b = beta;
    }
    double next = r.variance > 0.0 ? beta + r.value / r.variance : 0.5 * (lo_b + hi_b);
    if (!(next > lo_b && next < hi_b)) next = 0.5 * (lo_b + hi_b);
    const double step = std::abs(next - beta);
    beta = next;
    if (step <= 1e-16 * std::max(1.0, std::abs(beta)) ||
        hi_b - lo_b <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(beta))) {
      break;
    }
  }
  return finite_solution(beta, spectrum, support, constants);
}

EquilibriumSolution beta_from_energy(double target, const EnergySpectrum& spectrum,
                                     const ModelConstants& constants) {
  const Support full = spectrum.full_support();
  return beta_from_energy(target, spectrum, full, constants);
}

double Temperature::value() const {
  if (is_infinite()) throw std::domain_error("temperature is infinite (beta = 0)");
  return 1.0 / k_beta;
}

Temperature temperature_of_stable_state(double e, const EnergySpectrum& spectrum,
                                        const ModelConstants& constants) {
  if (!(e > spectrum.min() && e < spectrum.max())) {
    throw std::domain_error("temperature_of_stable_state: energy must lie strictly inside the spectrum");
  }
  const EquilibriumSolution sol = beta_from_energy(e, spectrum, constants);
  if (sol.limit != BetaLimit::finite) {
    throw std::domain_error("temperature_of_stable_state: energy numerically at a spectrum endpoint");
  }
  return Temperature{constants.k() * sol.beta};
}

EquilibriumKind is_equilibrium(const StateDistribution& state, const EnergySpectrum& spectrum,
                               double tol) {
  detail::require_same_size(state.size(), spectrum.size(), "is_equilibrium");
  const double e = std::clamp(energy(state, spectrum), spectrum.min(), spectrum.max());
  const auto stable = beta_from_energy(e, spectrum);
  if (linf_distance(state.probs(), stable.distribution.probs()) <= tol) {
    return EquilibriumKind::stable;
  }
  if (state.support().size() < spectrum.size()) {
    const auto& support = state.support();
    const auto range = support_range(spectrum, support);
    const auto partial = beta_from_energy(std::clamp(e, range.lo, range.hi), spectrum, support);
    if (linf_distance(state.probs(), partial.distribution.probs()) <= tol) {
      return EquilibriumKind::partial;
    }
  }
  return EquilibriumKind::none;
}

const char* to_string(EquilibriumKind kind) {
  switch (kind) {
    case EquilibriumKind::stable: return "stable";
    case EquilibriumKind::partial: return "partial";
    case EquilibriumKind::none: return "none";
  }
  return "none";
}

const char* to_string(BetaLimit limit) {
  switch (limit) {
    case BetaLimit::finite: return "finite";
    case BetaLimit::plus_infinity: return "+inf";
    case BetaLimit::minus_infinity: return "-inf";
  }
  return "finite";
}

}  // namespace sea
