#pragma once

// Energy-entropy diagram of a finite spectrum: the stable-equilibrium
// boundary S_max(E), feasibility of (E, S) points, adiabatic availability,
// available energy with respect to a reservoir, and the demon check.

#include <optional>
#include <vector>

#include "sea/core.hpp"
#include "sea/equilibrium.hpp"

namespace sea {

struct CurveSample {
  double energy = 0.0;
  double entropy = 0.0;
  double beta = 0.0;
};

/// Sampled S_max(E) boundary, ordered by strictly increasing energy. A
/// bounded spectrum has two branches: beta > 0 below the mean level and
/// beta < 0 above it.
class DiagramCurve {
 public:
  DiagramCurve(std::vector<CurveSample> samples, EnergySpectrum spectrum, ModelConstants constants);

  const std::vector<CurveSample>& samples() const noexcept { return samples_; }
  const EnergySpectrum& spectrum() const noexcept { return spectrum_; }
  const ModelConstants& constants() const noexcept { return constants_; }

  /// Sample with the largest entropy (beta = 0 when the spectrum is not
  /// degenerate).
  const CurveSample& peak() const;

  /// S_max(E) evaluated exactly through beta_from_energy.
  double smax(double energy) const;

  /// Monotone piecewise-cubic (Fritsch-Carlson) interpolation of the
  /// samples, applied separately on each branch.
  double interpolate(double energy) const;

  /// Largest amount by which a sample falls below the chord of its two
  /// neighbours; <= 0 for a concave curve.
  double concavity_violation() const;

 private:
  std::vector<CurveSample> samples_;
  EnergySpectrum spectrum_;
  ModelConstants constants_;
  std::vector<double> slopes_;
};

/// Samples the boundary on a grid uniform in u = tanh(beta * range / 8),
/// u in (-1, 1) with u = 0 included. A spectrum with a single distinct level
/// yields a one-point curve.
DiagramCurve smax_curve(const EnergySpectrum& spectrum, std::size_t n_samples = 512,
                        const ModelConstants& constants = {});

/// min e <= E <= max e and 0 <= S <= S_max(E), with 1e-12 slack.
bool is_feasible_point(double energy, double entropy, const DiagramCurve& curve);

/// E - E_min(S), where E_min(S) is the lowest energy on the beta >= 0 branch
/// with S_max(E_min) = S. Throws std::domain_error above the peak entropy.
double adiabatic_availability(double energy, double entropy, const DiagramCurve& curve);

/// Reservoir at a fixed, strictly positive temperature.
class ReservoirSpec {
 public:
  explicit ReservoirSpec(double temperature);
  double temperature() const noexcept { return temperature_; }

 private:
  double temperature_;
};

/// Omega = (E - E_ref) - T_R (S - S_ref), referenced to the system's own
/// canonical state at T_R.
double available_energy(double energy, double entropy, const ReservoirSpec& reservoir,
                        const EnergySpectrum& spectrum, const ModelConstants& constants = {});

/// Entropy recovered from energy and available energy relative to the
/// reservoir reference state; equals the input entropy for every T_R.
double entropy_from_available_energy(double energy, double omega, const ReservoirSpec& reservoir,
                                     const EnergySpectrum& spectrum,
                                     const ModelConstants& constants = {});

enum class Branch { positive_temperature, infinite_temperature, negative_temperature };

const char* to_string(Branch branch);

struct FeasibilityVerdict {
  bool feasible = false;
  std::optional<StateDistribution> witness;
  double witness_energy = 0.0;
  double witness_entropy = 0.0;
  /// Temperature branch of the stable state at the queried energy.
  Branch branch = Branch::positive_temperature;
};

/// Whether some state with energy below E0 and entropy at least S0 exists.
/// The witness, when present, is a canonical state with E' < E0 and S' >= S0.
FeasibilityVerdict demon_check(double energy, double entropy, const DiagramCurve& curve);

}  // namespace sea
