#include "sea/statespace.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace sea {

namespace {

struct BoundaryPoint {
  double beta;
  double energy;
  double entropy;
  StateDistribution state;
};

BoundaryPoint boundary_at_beta(double beta, const EnergySpectrum& spectrum,
                               const ModelConstants& constants) {
  const Support full = spectrum.full_support();
  auto state = canonical_distribution(beta, spectrum, full);
  const double e = energy(state, spectrum);
  const double s = entropy(state, constants);
  return {beta, e, s, std::move(state)};
}

double slack_for(double value) { return 1e-12 * std::max(1.0, std::abs(value)); }

// Ground-level face of the diagram: all states of minimal energy.
BoundaryPoint ground_point(const EnergySpectrum& spectrum, const ModelConstants& constants) {
  std::vector<double> p(spectrum.size(), 0.0);
  std::size_t g = 0;
  for (std::size_t i = 0; i < spectrum.size(); ++i) g += spectrum[i] == spectrum.min() ? 1 : 0;
  for (std::size_t i = 0; i < spectrum.size(); ++i) {
    if (spectrum[i] == spectrum.min()) p[i] = 1.0 / static_cast<double>(g);
  }
  auto state = StateDistribution::from_normalized(std::move(p));
  const double s = entropy(state, constants);
  return {std::numeric_limits<double>::infinity(), spectrum.min(), s, std::move(state)};
}

// Lowest-energy boundary point on the beta >= 0 branch whose entropy is at
// least `target`. The curve samples supply the initial bracket; bisection in
// beta refines it while keeping S(beta_lo) >= target.
BoundaryPoint min_energy_at_entropy(double target, const DiagramCurve& curve) {
  const auto& spectrum = curve.spectrum();
  const auto& constants = curve.constants();
  BoundaryPoint ground = ground_point(spectrum, constants);
  if (target <= ground.entropy || spectrum.distinct_count() == 1) return ground;

  double lo = 0.0;  // S(lo) >= target
  double hi = std::numeric_limits<double>::quiet_NaN();
  for (const auto& s : curve.samples()) {
    if (s.beta < 0.0) break;
    if (s.entropy >= target) {
      lo = s.beta;
      break;
    }
    hi = s.beta;
  }
  if (std::isnan(hi)) {
    hi = std::max(lo, 1.0 / spectrum.range());
    while (boundary_at_beta(hi, spectrum, constants).entropy >= target) {
      lo = hi;
      hi *= 2.0;
      if (hi * spectrum.range() > 1500.0) return ground;
    }
  }
  for (int iter = 0; iter < 200; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (boundary_at_beta(mid, spectrum, constants).entropy >= target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return boundary_at_beta(lo, spectrum, constants);
}

}  // namespace

DiagramCurve::DiagramCurve(std::vector<CurveSample> samples, EnergySpectrum spectrum,
                           ModelConstants constants)
    : samples_(std::move(samples)), spectrum_(std::move(spectrum)), constants_(constants) {
  if (samples_.empty()) throw std::invalid_argument("DiagramCurve: no samples");
  for (std::size_t i = 1; i < samples_.size(); ++i) {
    if (!(samples_[i].energy > samples_[i - 1].energy)) {
      throw std::invalid_argument("DiagramCurve: energies must be strictly increasing");
    }
  }

  // Fritsch-Butland slopes: harmonic mean of neighbouring secants, zero at
  // local extrema, so each monotone branch is interpolated monotonically.
  const std::size_t n = samples_.size();
  slopes_.assign(n, 0.0);
  if (n < 2) return;
  std::vector<double> h(n - 1), delta(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    h[i] = samples_[i + 1].energy - samples_[i].energy;
    delta[i] = (samples_[i + 1].entropy - samples_[i].entropy) / h[i];
  }
  if (n == 2) {
    slopes_[0] = slopes_[1] = delta[0];
    return;
  }
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (delta[i - 1] * delta[i] <= 0.0) continue;
    const double w1 = 2.0 * h[i] + h[i - 1];
    const double w2 = h[i] + 2.0 * h[i - 1];
    slopes_[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
  }
  auto end_slope = [](double h0, double h1, double d0, double d1) {
    double d = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if (d * d0 <= 0.0) return 0.0;
    if (d0 * d1 <= 0.0 && std::abs(d) > std::abs(3.0 * d0)) return 3.0 * d0;
    return d;
  };
  slopes_[0] = end_slope(h[0], h[1], delta[0], delta[1]);
  slopes_[n - 1] = end_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
}

const CurveSample& DiagramCurve::peak() const {
  return *std::max_element(samples_.begin(), samples_.end(),
                           [](const CurveSample& a, const CurveSample& b) { return a.entropy < b.entropy; });
}

double DiagramCurve::smax(double e) const {
  if (!(e >= spectrum_.min() - slack_for(spectrum_.min()) &&
        e <= spectrum_.max() + slack_for(spectrum_.max()))) {
    throw std::domain_error("DiagramCurve::smax: energy outside the spectrum");
  }
  const auto sol = beta_from_energy(std::clamp(e, spectrum_.min(), spectrum_.max()), spectrum_,
                                    constants_);
  return entropy(sol.distribution, constants_);
}

double DiagramCurve::interpolate(double e) const {
  if (samples_.size() < 2 || e <= samples_.front().energy || e >= samples_.back().energy) {
    return smax(e);
  }
  const auto it = std::upper_bound(samples_.begin(), samples_.end(), e,
                                   [](double x, const CurveSample& s) { return x < s.energy; });
  const std::size_t i = static_cast<std::size_t>(it - samples_.begin()) - 1;
  const double h = samples_[i + 1].energy - samples_[i].energy;
  const double t = (e - samples_[i].energy) / h;
  const double h00 = (1 + 2 * t) * (1 - t) * (1 - t);
  const double h10 = t * (1 - t) * (1 - t);
  const double h01 = t * t * (3 - 2 * t);
  const double h11 = t * t * (t - 1);
  return h00 * samples_[i].entropy + h10 * h * slopes_[i] + h01 * samples_[i + 1].entropy +
         h11 * h * slopes_[i + 1];
}

double DiagramCurve::concavity_violation() const {
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i + 1 < samples_.size(); ++i) {
    const auto& a = samples_[i - 1];
    const auto& b = samples_[i];
    const auto& c = samples_[i + 1];
    const double w = (b.energy - a.energy) / (c.energy - a.energy);
    const double chord = a.entropy + w * (c.entropy - a.entropy);
    worst = std::max(worst, chord - b.entropy);
  }
  return samples_.size() < 3 ? 0.0 : worst;
}

DiagramCurve smax_curve(const EnergySpectrum& spectrum, std::size_t n_samples,
                        const ModelConstants& constants) {
  if (n_samples == 0) throw std::invalid_argument("smax_curve: n_samples must be positive");
  std::vector<CurveSample> samples;
  if (spectrum.distinct_count() == 1 || n_samples == 1) {
    const auto point = boundary_at_beta(0.0, spectrum, constants);
    samples.push_back({point.energy, point.entropy, 0.0});
    return DiagramCurve(std::move(samples), spectrum, constants);
  }

  const double scale = 8.0 / spectrum.range();
  const auto half = static_cast<double>(n_samples / 2);
  samples.reserve(n_samples);
  for (std::size_t i = 0; i < n_samples; ++i) {
    const double u = (static_cast<double>(i) - half) / (half + 1.0);
    const double beta = u == 0.0 ? 0.0 : -scale * std::atanh(u);
    const auto point = boundary_at_beta(beta, spectrum, constants);
    // The far tails can saturate in floating point; keep energies strictly
    // increasing.
    if (!samples.empty() && !(point.energy > samples.back().energy)) continue;
    samples.push_back({point.energy, point.entropy, beta});
  }
  return DiagramCurve(std::move(samples), spectrum, constants);
}

bool is_feasible_point(double e, double s, const DiagramCurve& curve) {
  const auto& spectrum = curve.spectrum();
  if (!std::isfinite(e) || !std::isfinite(s)) return false;
  if (e < spectrum.min() - slack_for(spectrum.min()) || e > spectrum.max() + slack_for(spectrum.max())) {
    return false;
  }
  if (s < -slack_for(s)) return false;
  return s <= curve.smax(e) + slack_for(s);
}

double adiabatic_availability(double e, double s, const DiagramCurve& curve) {
  if (s > curve.peak().entropy + slack_for(curve.peak().entropy)) {
    throw std::domain_error("adiabatic_availability: entropy above the curve peak");
  }
  if (!is_feasible_point(e, s, curve)) {
    throw std::domain_error("adiabatic_availability: (E, S) is not a feasible point");
  }
  const double drop = e - min_energy_at_entropy(s, curve).energy;
  return drop < 0.0 && drop > -1e-12 * std::max(1.0, curve.spectrum().range()) ? 0.0 : drop;
}

ReservoirSpec::ReservoirSpec(double temperature) : temperature_(temperature) {
  if (!(temperature > 0.0) || !std::isfinite(temperature)) {
    throw std::invalid_argument("ReservoirSpec: temperature must be strictly positive");
  }
}

namespace {

std::pair<double, double> reservoir_reference(const ReservoirSpec& reservoir,
                                              const EnergySpectrum& spectrum,
                                              const ModelConstants& constants) {
  const double beta = 1.0 / (constants.k() * reservoir.temperature());
  const auto point = boundary_at_beta(beta, spectrum, constants);
  return {point.energy, point.entropy};
}

}  // namespace

double available_energy(double e, double s, const ReservoirSpec& reservoir,
                        const EnergySpectrum& spectrum, const ModelConstants& constants) {
  const auto [e_ref, s_ref] = reservoir_reference(reservoir, spectrum, constants);
  return (e - e_ref) - reservoir.temperature() * (s - s_ref);
}

double entropy_from_available_energy(double e, double omega, const ReservoirSpec& reservoir,
                                     const EnergySpectrum& spectrum,
                                     const ModelConstants& constants) {
  // S1 = S0 + [(E1 - E0) - (Omega1 - Omega0)] / T_R with the reference at Omega0 = 0.
  const auto [e_ref, s_ref] = reservoir_reference(reservoir, spectrum, constants);
  return s_ref + ((e - e_ref) - omega) / reservoir.temperature();
}

const char* to_string(Branch branch) {
  switch (branch) {
    case Branch::positive_temperature: return "positive_temperature";
    case Branch::infinite_temperature: return "infinite_temperature";
    case Branch::negative_temperature: return "negative_temperature";
  }
  return "positive_temperature";
}

FeasibilityVerdict demon_check(double e, double s, const DiagramCurve& curve) {
  const auto& spectrum = curve.spectrum();
  if (!is_feasible_point(e, s, curve)) {
    throw std::domain_error("demon_check: (E, S) is not a feasible point");
  }
  FeasibilityVerdict verdict;
  const double mean_slack = 1e-12 * std::max(1.0, spectrum.range());
  if (e < spectrum.mean() - mean_slack) {
    verdict.branch = Branch::positive_temperature;
  } else if (e > spectrum.mean() + mean_slack) {
    verdict.branch = Branch::negative_temperature;
  } else {
    verdict.branch = Branch::infinite_temperature;
  }

  BoundaryPoint best = min_energy_at_entropy(s, curve);
  if (best.energy < e - mean_slack && best.entropy >= s) {
    verdict.feasible = true;
    verdict.witness_energy = best.energy;
    verdict.witness_entropy = best.entropy;
    verdict.witness = std::move(best.state);
  }
  return verdict;
}

}  // namespace sea
