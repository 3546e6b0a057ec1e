#include "sea/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace sea {

namespace {

// Euclidean projection of v onto {p >= 0, sum p = 1}; returns the threshold
// lambda such that p_i = max(0, v_i - lambda).
double simplex_threshold(std::span<const double> v) {
  std::vector<double> sorted(v.begin(), v.end());
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double cumulative = 0.0;
  double lambda = 0.0;
  for (std::size_t k = 0; k < sorted.size(); ++k) {
    cumulative += sorted[k];
    const double candidate = (cumulative - 1.0) / static_cast<double>(k + 1);
    if (sorted[k] - candidate > 0.0) lambda = candidate;
  }
  return lambda;
}

std::vector<double> slice_point(std::span<const double> y, const EnergySpectrum& spectrum,
                                double mu) {
  std::vector<double> v(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) v[i] = y[i] - mu * spectrum[i];
  const double lambda = simplex_threshold(v);
  for (double& x : v) x = std::max(0.0, x - lambda);
  return v;
}

double slice_energy(std::span<const double> p, const EnergySpectrum& spectrum) {
  detail::CompensatedSum s;
  for (std::size_t i = 0; i < p.size(); ++i) s.add(p[i] * spectrum[i]);
  return s.value();
}

// With the active set fixed, (lambda, mu) solve a 2x2 linear system exactly.
// Returns false if the solution leaves the active set.
bool refine_on_active_set(std::span<const double> y, const EnergySpectrum& spectrum,
                          double target, std::vector<double>& p) {
  std::vector<std::size_t> active;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] > 0.0) active.push_back(i);
  }
  if (active.empty()) return false;
  // sum_A (y - l - m e) = 1,  sum_A e (y - l - m e) = E
  double n = 0, se = 0, see = 0, sy = 0, sey = 0;
  for (std::size_t i : active) {
    n += 1.0;
    se += spectrum[i];
    see += spectrum[i] * spectrum[i];
    sy += y[i];
    sey += spectrum[i] * y[i];
  }
  const double det = n * see - se * se;
  if (!(std::abs(det) > 1e-14 * std::max(1.0, see * n))) return false;
  const double r1 = sy - 1.0;
  const double r2 = sey - target;
  const double lambda = (r1 * see - se * r2) / det;
  const double mu = (n * r2 - se * r1) / det;
  std::vector<double> q(p.size(), 0.0);
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double x = y[i] - lambda - mu * spectrum[i];
    const bool is_active = p[i] > 0.0;
    if (is_active) {
      if (x < 0.0) return false;
      q[i] = x;
    } else if (x > 1e-12) {
      return false;
    }
  }
  p = std::move(q);
  return true;
}

}  // namespace

std::vector<double> project_onto_energy_slice(std::span<const double> y,
                                              const EnergySpectrum& spectrum, double target) {
  detail::require_same_size(y.size(), spectrum.size(), "project_onto_energy_slice");
  if (target < spectrum.min() || target > spectrum.max()) {
    throw std::domain_error("project_onto_energy_slice: energy outside the spectrum");
  }
  if (spectrum.range() == 0.0) {
    std::vector<double> p = slice_point(y, spectrum, 0.0);
    return p;
  }
  // Energy of the simplex projection is non-increasing in mu.
  const double scale = 1.0 / spectrum.range();
  double lo = -scale;
  double hi = scale;
  auto excess = [&](double mu) { return slice_energy(slice_point(y, spectrum, mu), spectrum) - target; };
  while (excess(hi) > 0.0) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e300) break;
  }
  while (excess(lo) < 0.0) {
    hi = lo;
    lo *= 2.0;
    if (lo < -1e300) break;
  }
  for (int iter = 0; iter < 200 && hi - lo > 1e-16 * std::max(1.0, std::abs(lo)); ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (excess(mid) > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  std::vector<double> p = slice_point(y, spectrum, 0.5 * (lo + hi));
  refine_on_active_set(y, spectrum, target, p);
  return p;
}

void shannon_gradient(std::span<const double> p, std::span<double> out) {
  for (std::size_t i = 0; i < p.size(); ++i) out[i] = -std::log(std::max(p[i], 1e-300)) - 1.0;
}

void numeric_gradient(const Functional& functional, std::span<const double> p, double h,
                      std::span<double> out) {
  std::vector<double> x(p.begin(), p.end());
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double saved = x[i];
    x[i] = saved + h;
    const double up = functional(x);
    if (saved >= h) {
      x[i] = saved - h;
      out[i] = (up - functional(x)) / (2.0 * h);
    } else {
      x[i] = saved;
      out[i] = (up - functional(x)) / h;
    }
    x[i] = saved;
  }
}

AscentResult maximize_at_energy(const Functional& functional, const EnergySpectrum& spectrum,
                                double target, std::span<const double> start,
                                const AscentOptions& options, const GradientFn& gradient) {
  AscentResult result;
  result.p = project_onto_energy_slice(start, spectrum, target);
  result.value = functional(result.p);
  std::vector<double> g(result.p.size());
  std::vector<double> trial(result.p.size());
  double eta = 1e-2;

  for (; result.iterations < options.max_iterations; ++result.iterations) {
    if (gradient) {
      gradient(result.p, g);
    } else {
      numeric_gradient(functional, result.p, options.fd_step, g);
    }
    bool accepted = false;
    std::vector<double> q;
    double q_value = 0.0;
    while (eta > 1e-20) {
      for (std::size_t i = 0; i < g.size(); ++i) trial[i] = result.p[i] + eta * g[i];
      q = project_onto_energy_slice(trial, spectrum, target);
      q_value = functional(q);
      double directional = 0.0;
      for (std::size_t i = 0; i < g.size(); ++i) directional += g[i] * (q[i] - result.p[i]);
      if (q_value >= result.value + 1e-4 * directional) {
        accepted = true;
        break;
      }
      eta *= 0.5;
    }
    if (!accepted) {
      result.converged = true;
      break;
    }
    const double moved = linf_distance(q, result.p);
    result.p = std::move(q);
    result.value = q_value;
    if (moved < options.step_tolerance) {
      result.converged = true;
      break;
    }
    eta = std::min(eta * 2.0, 1e6);
  }
  return result;
}

}  // namespace sea
