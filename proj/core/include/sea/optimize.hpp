#pragma once

// Maximization of an entropy-like functional over the fixed-energy slice of
// the probability simplex, {p >= 0, sum p = 1, sum e p = E}.

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "sea/core.hpp"

namespace sea {

using Functional = std::function<double(std::span<const double>)>;
using GradientFn = std::function<void(std::span<const double>, std::span<double>)>;

/// Euclidean projection of y onto the fixed-energy slice. The result has the
/// form max(0, y - lambda - mu e). Requires min e <= E <= max e.
std::vector<double> project_onto_energy_slice(std::span<const double> y,
                                              const EnergySpectrum& spectrum, double target_energy);

struct AscentOptions {
  std::size_t max_iterations = 20000;
  /// Stop once an accepted step moves p by less than this (L-infinity).
  double step_tolerance = 1e-13;
  /// Finite-difference step when no analytic gradient is supplied.
  double fd_step = 1e-7;
};

struct AscentResult {
  std::vector<double> p;
  double value = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
};

/// Projected gradient ascent with Armijo backtracking, started from the
/// projection of `start`. The gradient is taken by finite differences
/// unless `gradient` is provided.
AscentResult maximize_at_energy(const Functional& functional, const EnergySpectrum& spectrum,
                                double target_energy, std::span<const double> start,
                                const AscentOptions& options = {},
                                const GradientFn& gradient = {});

/// d/dp_i of -sum p ln p, with p_i = 0 read as 1e-300.
void shannon_gradient(std::span<const double> p, std::span<double> out);

/// Finite-difference gradient (central where p_i >= h, forward otherwise).
void numeric_gradient(const Functional& functional, std::span<const double> p, double h,
                      std::span<double> out);

}  // namespace sea
