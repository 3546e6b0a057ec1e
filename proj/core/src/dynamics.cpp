#include "sea/dynamics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

namespace sea {

namespace {

// Support-restricted moments with energies measured from the p-weighted mean.
// Shifting the energy origin is a column/row operation on both determinants,
// so the ratio is unchanged while the entries stay O(spread) instead of O(e^2).
struct Moments {
  double m0 = 0.0;  // sum p
  double m1 = 0.0;  // sum p e'
  double m2 = 0.0;  // sum p e'^2
  double a = 0.0;   // sum p ln p
  double b = 0.0;   // sum e' p ln p
  double shift = 0.0;
};

double clamp_probability(double p) { return p > 0.0 ? p : 0.0; }

double plogp(double p) { return p > 0.0 ? p * std::log(p) : 0.0; }

Moments moments(std::span<const double> p, const Support& support, const EnergySpectrum& spectrum) {
  detail::CompensatedSum s0, s1;
  for (std::size_t i : support) {
    const double pi = clamp_probability(p[i]);
    s0.add(pi);
    s1.add(pi * spectrum[i]);
  }
  Moments m;
  m.m0 = s0.value();
  m.shift = m.m0 > 0.0 ? s1.value() / m.m0 : 0.0;

  detail::CompensatedSum c1, c2, ca, cb;
  for (std::size_t i : support) {
    const double pi = clamp_probability(p[i]);
    const double e = spectrum[i] - m.shift;
    const double x = plogp(pi);
    c1.add(pi * e);
    c2.add(pi * e * e);
    ca.add(x);
    cb.add(e * x);
  }
  m.m1 = c1.value();
  m.m2 = c2.value();
  m.a = ca.value();
  m.b = cb.value();
  return m;
}

void check_inputs(const StateDistribution& state, const EnergySpectrum& spectrum) {
  detail::require_same_size(state.size(), spectrum.size(), "sea_rate");
}

}  // namespace

double RateVector::linf() const {
  double m = 0.0;
  for (double r : rates) m = std::max(m, std::abs(r));
  return m;
}

double degeneracy_cutoff(const EnergySpectrum& spectrum) {
  return 1e-13 * spectrum.range() * spectrum.range();
}

void detail::sea_rate_raw(std::span<const double> p, const Support& support,
                          const EnergySpectrum& spectrum, double tau, double variance_cutoff,
                          std::span<double> out) {
  std::fill(out.begin(), out.end(), 0.0);
  const Moments m = moments(p, support, spectrum);
  const double d2 = m.m0 * m.m2 - m.m1 * m.m1;
  if (!(d2 > variance_cutoff)) return;

  // First-row cofactor expansion of
  //   | p_j ln p_j   p_j   e_j p_j |
  //   | sum p ln p   1     sum e p |
  //   | sum e p ln p sum e p  sum e^2 p |
  const double c1 = d2;
  const double c2 = m.a * m.m2 - m.m1 * m.b;
  const double c3 = m.a * m.m1 - m.m0 * m.b;
  for (std::size_t j : support) {
    const double pj = clamp_probability(p[j]);
    const double ej = spectrum[j] - m.shift;
    const double d3 = plogp(pj) * c1 - pj * c2 + ej * pj * c3;
    out[j] = -(d3 / d2) / tau;
  }
}

RateVector sea_rate(const StateDistribution& state, const EnergySpectrum& spectrum,
                    const ModelConstants& constants) {
  check_inputs(state, spectrum);
  RateVector r{std::vector<double>(state.size(), 0.0)};
  detail::sea_rate_raw(state.probs(), state.support(), spectrum, constants.tau(),
                       degeneracy_cutoff(spectrum), r.rates);
  return r;
}

RateVector sea_rate_oracle(const StateDistribution& state, const EnergySpectrum& spectrum,
                           const ModelConstants& constants) {
  check_inputs(state, spectrum);
  const auto& support = state.support();
  RateVector r{std::vector<double>(state.size(), 0.0)};

  // Weighted means, then covariance of (e, ln p) under p.
  detail::CompensatedSum se, sl;
  for (std::size_t i : support) {
    se.add(state[i] * spectrum[i]);
    sl.add(state[i] * std::log(state[i]));
  }
  const double mean_e = se.value();
  const double mean_l = sl.value();
  detail::CompensatedSum var, cov;
  for (std::size_t i : support) {
    const double de = spectrum[i] - mean_e;
    const double dl = std::log(state[i]) - mean_l;
    var.add(state[i] * de * de);
    cov.add(state[i] * de * dl);
  }
  if (!(var.value() > degeneracy_cutoff(spectrum))) return r;

  // [[1, <e>], [<e>, <e^2>]] (alpha, beta) = -(<ln p>, <e ln p>)
  const double beta = -cov.value() / var.value();
  const double alpha = -mean_l - beta * mean_e;
  for (std::size_t j : support) {
    const double pj = state[j];
    r.rates[j] = -(pj * std::log(pj) + alpha * pj + beta * spectrum[j] * pj) / constants.tau();
  }
  return r;
}

double entropy_production(const StateDistribution& state, const EnergySpectrum& spectrum,
                          const ModelConstants& constants) {
  check_inputs(state, spectrum);
  const auto& support = state.support();
  const Moments m = moments(state.probs(), support, spectrum);
  const double g2 = m.m0 * m.m2 - m.m1 * m.m1;
  if (!(g2 > degeneracy_cutoff(spectrum))) return 0.0;

  // The Gram determinant is invariant under ln p -> ln p - c, so center the
  // log column as well to keep the 3x3 entries small near equilibrium.
  const double lbar = m.a / m.m0;
  detail::CompensatedSum sq, sa, sb;
  for (std::size_t i : support) {
    const double pi = state[i];
    const double l = std::log(pi) - lbar;
    sq.add(pi * l * l);
    sa.add(pi * l);
    sb.add(pi * (spectrum[i] - m.shift) * l);
  }
  const double q = sq.value();
  const double a = sa.value();
  const double b = sb.value();
  //   | q  a   b  |
  //   | a  m0  m1 |
  //   | b  m1  m2 |
  const double g3 = q * g2 - a * (a * m.m2 - m.m1 * b) + b * (a * m.m1 - m.m0 * b);
  return constants.k() / constants.tau() * (g3 / g2);
}

void IntegratorConfig::validate() const {
  if (step && !(*step > 0.0 && std::isfinite(*step))) {
    throw std::invalid_argument("IntegratorConfig: step must be > 0");
  }
  if (method == IntegrationMethod::rk45 && !(tolerance > 0.0 && tolerance <= 1e-2)) {
    throw std::invalid_argument("IntegratorConfig: tolerance must lie in (0, 1e-2]");
  }
  if (!std::isfinite(t_end) || t_end == 0.0) {
    throw std::invalid_argument("IntegratorConfig: t_end must be non-zero and finite");
  }
  if (t_end < 0.0 && !allow_backward) {
    throw std::invalid_argument("IntegratorConfig: negative t_end requires allow_backward");
  }
  if (sample_stride == 0) throw std::invalid_argument("IntegratorConfig: sample_stride must be >= 1");
}

namespace {

class Integrator {
 public:
  Integrator(const StateDistribution& initial, const EnergySpectrum& spectrum,
             const ModelConstants& constants)
      : spectrum_(spectrum),
        constants_(constants),
        support_(initial.support()),
        cutoff_(degeneracy_cutoff(spectrum)),
        p_(initial.probs().begin(), initial.probs().end()),
        e0_(energy(initial, spectrum)) {}

  std::vector<double>& state() { return p_; }

  void rate(std::span<const double> p, std::span<double> out) const {
    detail::sea_rate_raw(p, support_, spectrum_, constants_.tau(), cutoff_, out);
  }

  void rk4_step(double h) {
    const std::size_t n = p_.size();
    std::vector<double> k1(n), k2(n), k3(n), k4(n), tmp(n);
    rate(p_, k1);
    for (std::size_t i : support_) tmp[i] = p_[i] + 0.5 * h * k1[i];
    rate(tmp, k2);
    for (std::size_t i : support_) tmp[i] = p_[i] + 0.5 * h * k2[i];
    rate(tmp, k3);
    for (std::size_t i : support_) tmp[i] = p_[i] + h * k3[i];
    rate(tmp, k4);
    for (std::size_t i : support_) p_[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  }

  // Dormand-Prince 5(4). Returns the scaled error norm; y receives the
  // fifth-order solution.
  double dopri_step(double h, double tol, std::vector<double>& y) const {
    static constexpr double c21 = 1.0 / 5.0;
    static constexpr std::array<double, 2> a3{3.0 / 40.0, 9.0 / 40.0};
    static constexpr std::array<double, 3> a4{44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0};
    static constexpr std::array<double, 4> a5{19372.0 / 6561.0, -25360.0 / 2187.0,
                                              64448.0 / 6561.0, -212.0 / 729.0};
    static constexpr std::array<double, 5> a6{9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0,
                                              49.0 / 176.0, -5103.0 / 18656.0};
    static constexpr std::array<double, 6> b5{35.0 / 384.0, 0.0, 500.0 / 1113.0,
                                              125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0};
    static constexpr std::array<double, 7> b4{5179.0 / 57600.0, 0.0, 7571.0 / 16695.0,
                                              393.0 / 640.0, -92097.0 / 339200.0,
                                              187.0 / 2100.0, 1.0 / 40.0};
    const std::size_t n = p_.size();
    std::array<std::vector<double>, 7> k;
    for (auto& v : k) v.assign(n, 0.0);
    std::vector<double> tmp(p_);

    rate(p_, k[0]);
    for (std::size_t i : support_) tmp[i] = p_[i] + h * c21 * k[0][i];
    rate(tmp, k[1]);
    for (std::size_t i : support_) tmp[i] = p_[i] + h * (a3[0] * k[0][i] + a3[1] * k[1][i]);
    rate(tmp, k[2]);
    for (std::size_t i : support_) {
      tmp[i] = p_[i] + h * (a4[0] * k[0][i] + a4[1] * k[1][i] + a4[2] * k[2][i]);
    }
    rate(tmp, k[3]);
    for (std::size_t i : support_) {
      tmp[i] = p_[i] + h * (a5[0] * k[0][i] + a5[1] * k[1][i] + a5[2] * k[2][i] + a5[3] * k[3][i]);
    }
    rate(tmp, k[4]);
    for (std::size_t i : support_) {
      tmp[i] = p_[i] + h * (a6[0] * k[0][i] + a6[1] * k[1][i] + a6[2] * k[2][i] +
                            a6[3] * k[3][i] + a6[4] * k[4][i]);
    }
    rate(tmp, k[5]);
    y = p_;
    for (std::size_t i : support_) {
      double acc = 0.0;
      for (std::size_t s = 0; s < 6; ++s) acc += b5[s] * k[s][i];
      y[i] = p_[i] + h * acc;
    }
    rate(y, k[6]);
    double err = 0.0;
    for (std::size_t i : support_) {
      double acc = 0.0;
      for (std::size_t s = 0; s < 7; ++s) acc += b4[s] * k[s][i];
      const double y4 = p_[i] + h * acc;
      const double scale = tol * (1.0 + std::abs(p_[i]));
      err = std::max(err, std::abs(y[i] - y4) / scale);
    }
    return err;
  }

  // True if every in-support entry is above -1e-12.
  bool within_roundoff(std::span<const double> p) const {
    return std::all_of(support_.begin(), support_.end(),
                       [&](std::size_t i) { return p[i] > -1e-12; });
  }

  // Applies the support floor after an accepted step and checks drift.
  void finish_step(double t) {
    bool floored = false;
    for (std::size_t i : support_) {
      if (p_[i] < -1e-12) {
        std::ostringstream msg;
        msg << "integrate: probability p_" << i + 1 << " = " << p_[i] << " undershoots zero at t = "
            << t;
        throw IntegrationError(msg.str());
      }
      if (p_[i] <= 0.0) {
        p_[i] = kSupportThreshold;
        floored = true;
      }
    }
    if (floored) {
      detail::CompensatedSum s;
      for (std::size_t i : support_) s.add(p_[i]);
      for (std::size_t i : support_) p_[i] /= s.value();
    }

    detail::CompensatedSum trace, en;
    for (std::size_t i : support_) {
      trace.add(p_[i]);
      en.add(p_[i] * spectrum_[i]);
    }
    const double energy_drift = std::abs(en.value() - e0_) / std::max(1.0, std::abs(e0_));
    const double trace_drift = std::abs(trace.value() - 1.0);
    if (!(energy_drift <= kConservationAbortLimit) || !(trace_drift <= kConservationAbortLimit)) {
      std::ostringstream msg;
      msg << "integrate: conservation drift at t = " << t << " (energy " << energy_drift
          << ", trace " << trace_drift << ")";
      throw IntegrationError(msg.str());
    }
  }

  TrajectoryPoint sample(double t) const {
    auto state = StateDistribution::from_normalized(p_);
    const double e = energy(state, spectrum_);
    const double s = entropy(state, constants_);
    const double rate = entropy_production(state, spectrum_, constants_);
    return TrajectoryPoint{t, std::move(state), e, s, rate};
  }

 private:
  const EnergySpectrum& spectrum_;
  ModelConstants constants_;
  Support support_;
  double cutoff_;
  std::vector<double> p_;
  double e0_;
};

}  // namespace

Trajectory integrate(const StateDistribution& initial, const EnergySpectrum& spectrum,
                     const ModelConstants& constants, const IntegratorConfig& config) {
  config.validate();
  detail::require_same_size(initial.size(), spectrum.size(), "integrate");

  const double direction = config.t_end > 0.0 ? 1.0 : -1.0;
  const double span = std::abs(config.t_end);
  const double h0 = config.step.value_or(constants.tau() / 100.0);

  Integrator run(initial, spectrum, constants);
  Trajectory traj{{}, spectrum, constants};
  traj.points.push_back(run.sample(0.0));

  if (config.method == IntegrationMethod::rk4) {
    const auto steps = static_cast<std::size_t>(std::max(1.0, std::ceil(span / h0 - 1e-9)));
    double t_prev = 0.0;
    for (std::size_t i = 1; i <= steps; ++i) {
      const double t_next = i == steps ? config.t_end : direction * static_cast<double>(i) * h0;
      run.rk4_step(t_next - t_prev);
      run.finish_step(t_next);
      t_prev = t_next;
      if (i % config.sample_stride == 0 || i == steps) traj.points.push_back(run.sample(t_next));
    }
  } else {
    double t = 0.0;
    double h = std::min(h0, span);
    std::size_t accepted = 0;
    std::vector<double> y;
    while (std::abs(t) < span) {
      const bool last = std::abs(t) + h >= span;
      const double step = last ? span - std::abs(t) : h;
      if (step < 1e-14 * std::max(1.0, std::abs(t))) {
        throw IntegrationError("integrate: adaptive step size underflow at t = " +
                               std::to_string(t));
      }
      const double err = run.dopri_step(direction * step, config.tolerance, y);
      if (err <= 1.0 && run.within_roundoff(y)) {
        run.state() = y;
        t = last ? config.t_end : t + direction * step;
        run.finish_step(t);
        ++accepted;
        if (accepted % config.sample_stride == 0 || last) traj.points.push_back(run.sample(t));
        const double grow = err > 0.0 ? 0.9 * std::pow(err, -0.2) : 5.0;
        h = step * std::clamp(grow, 0.2, 5.0);
      } else if (err <= 1.0) {
        h = step * 0.25;
      } else {
        h = step * std::clamp(0.9 * std::pow(err, -0.2), 0.1, 0.9);
      }
    }
  }

  if (direction < 0.0) std::reverse(traj.points.begin(), traj.points.end());
  return traj;
}

}  // namespace sea
