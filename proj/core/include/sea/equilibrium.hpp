#pragma once

// Canonical and partially canonical equilibrium states of a finite spectrum.

#include <span>

#include "sea/core.hpp"

namespace sea {

/// Z expressed relative to a reference level: shifted = sum exp(-beta (e_i - shift)).
/// The shift is the lowest in-support level for beta >= 0 and the highest for
/// beta < 0, so no term exceeds one.
struct PartitionFunction {
  double shifted = 0.0;
  double shift = 0.0;
  double beta = 0.0;

  /// ln of the unshifted partition function.
  double log_unshifted() const;
};

PartitionFunction partition_function(double beta, const EnergySpectrum& spectrum,
                                     std::span<const std::size_t> support);

/// exp(-beta e_j) / Z on the support, zero elsewhere.
StateDistribution canonical_distribution(double beta, const EnergySpectrum& spectrum,
                                         std::span<const std::size_t> support);

enum class BetaLimit { finite, plus_infinity, minus_infinity };

struct EquilibriumSolution {
  /// Finite value, or +/-infinity when limit != finite. Arithmetic on the
  /// solution goes through `limit`, never through an infinite beta.
  double beta = 0.0;
  BetaLimit limit = BetaLimit::finite;
  /// 1/(k beta); +/-0 at the zero-temperature endpoints.
  double temperature = 0.0;
  bool infinite_temperature = false;
  PartitionFunction partition;
  StateDistribution distribution;
  Support support;
};

/// Solves energy(canonical(beta)) = E on the given support. E must lie in
/// [min, max] of the in-support levels; endpoints yield the degenerate
/// zero-temperature states (beta = +/-inf), the in-support mean yields beta = 0.
/// Throws std::domain_error outside the range.
EquilibriumSolution beta_from_energy(double target_energy, const EnergySpectrum& spectrum,
                                     std::span<const std::size_t> support,
                                     const ModelConstants& constants = {});

/// Full-spectrum convenience overload.
EquilibriumSolution beta_from_energy(double target_energy, const EnergySpectrum& spectrum,
                                     const ModelConstants& constants = {});

/// Temperature of the stable state at energy E. Holds k*beta so that the
/// beta = 0 case is represented without dividing by zero.
struct Temperature {
  double k_beta = 0.0;

  bool is_infinite() const noexcept { return k_beta == 0.0; }
  /// 1/(k beta); throws std::domain_error when infinite.
  double value() const;
};

Temperature temperature_of_stable_state(double energy, const EnergySpectrum& spectrum,
                                        const ModelConstants& constants = {});

enum class EquilibriumKind { stable, partial, none };

/// Classifies a state: stable if it matches the full-spectrum canonical state
/// at its own energy within tol (L-infinity), partial if it is canonical over
/// its own proper support, none otherwise.
EquilibriumKind is_equilibrium(const StateDistribution& state, const EnergySpectrum& spectrum,
                               double tol = 1e-9);

const char* to_string(EquilibriumKind kind);
const char* to_string(BetaLimit limit);

}  // namespace sea
