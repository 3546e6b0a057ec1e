#pragma once

// Steepest-entropy-ascent rate law for diagonal (dilute Boltzmann gas)
// states, its entropy production, and a conservative time integrator.

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "sea/core.hpp"

namespace sea {

/// dp/dt per level. Entries outside the state's support are exactly zero.
struct RateVector {
  std::vector<double> rates;

  std::size_t size() const noexcept { return rates.size(); }
  double operator[](std::size_t i) const { return rates[i]; }
  double linf() const;
};

/// Energy variance below which a state is treated as stationary:
/// 1e-13 * (max e - min e)^2.
double degeneracy_cutoff(const EnergySpectrum& spectrum);

/// Rate law in determinant form: dp_j/dt = -(1/tau) D3_j / D2, where D3_j is
/// the 3x3 determinant with first row (p_j ln p_j, p_j, e_j p_j) and D2 the
/// energy variance (2x2 Gram determinant). Sums run over the support only.
RateVector sea_rate(const StateDistribution& state, const EnergySpectrum& spectrum,
                    const ModelConstants& constants = {});

/// Same rates via Lagrange multipliers: dp_j/dt = -(1/tau) p_j (ln p_j + a + b e_j)
/// with (a, b) solving the 2x2 system that enforces trace and energy
/// conservation. Solved in centered (covariance) form.
RateVector sea_rate_oracle(const StateDistribution& state, const EnergySpectrum& spectrum,
                           const ModelConstants& constants = {});

/// Entropy generation rate (k/tau) G3/G2 as a ratio of Gram determinants.
/// Non-negative; zero for canonical and degenerate-support states.
double entropy_production(const StateDistribution& state, const EnergySpectrum& spectrum,
                          const ModelConstants& constants = {});

enum class IntegrationMethod { rk4, rk45 };

struct IntegratorConfig {
  IntegrationMethod method = IntegrationMethod::rk4;
  /// Fixed step for rk4 and initial step for rk45. Defaults to tau/100.
  std::optional<double> step;
  /// Local error tolerance for rk45, in (0, 1e-2].
  double tolerance = 1e-10;
  /// Negative values integrate backward in time and require allow_backward.
  double t_end = 50.0;
  std::size_t sample_stride = 1;
  bool allow_backward = false;

  void validate() const;
};

/// Thrown when integration cannot continue: step-size underflow, a
/// probability undershooting zero beyond round-off, or conservation drift
/// beyond 1e-6.
class IntegrationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Hard limit on |E(t) - E(0)| / max(1, |E(0)|) and |sum p - 1|.
inline constexpr double kConservationAbortLimit = 1e-6;

/// Integrates the rate law from t = 0 to config.t_end. The returned points
/// are ordered by strictly increasing t (a backward run ends at t = 0).
/// Zero probabilities stay exactly zero; in-support entries are floored at
/// kSupportThreshold if a step undershoots by round-off.
Trajectory integrate(const StateDistribution& initial, const EnergySpectrum& spectrum,
                     const ModelConstants& constants, const IntegratorConfig& config);

namespace detail {

/// Rate evaluation on a raw vector (no validation), used by the integrator
/// stages. Negative entries are read as zero. Writes into `out`.
void sea_rate_raw(std::span<const double> p, const Support& support,
                  const EnergySpectrum& spectrum, double tau, double variance_cutoff,
                  std::span<double> out);

}  // namespace detail

}  // namespace sea
