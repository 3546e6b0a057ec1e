#pragma once

// Harness that checks candidate entropy functionals against operational
// forms of the eight entropy criteria, with replayable counterexamples for
// every failure.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sea/core.hpp"
#include "sea/optimize.hpp"

namespace sea {

struct EntropyCandidate {
  std::string name;
  /// Evaluated on raw probability vectors; must be total (never NaN) on the
  /// simplex and tolerate small finite-difference excursions around it.
  Functional functional;
  /// Optional analytic gradient used by the constrained maximizer.
  GradientFn gradient;
  std::map<std::string, double> parameters;
  /// True when the SEA rate law is this functional's steepest ascent, which
  /// enables the along-trajectory monotonicity check.
  bool ascended_by_sea = false;
};

EntropyCandidate shannon_candidate();
EntropyCandidate tsallis_candidate(double q = 2.0);
EntropyCandidate renyi_candidate(double alpha = 2.0);
EntropyCandidate hartley_candidate();
EntropyCandidate quadratic_candidate();

/// shannon, tsallis(q=2), renyi(alpha=2), hartley, quadratic.
std::vector<EntropyCandidate> builtin_candidates();

/// Throws std::invalid_argument for unknown names.
EntropyCandidate candidate_by_name(std::string_view name, double q = 2.0, double alpha = 2.0);

enum class Verdict { pass, fail, not_applicable };

const char* to_string(Verdict verdict);

/// Concrete failing input. `check` selects how replay_counterexample
/// re-evaluates it; the remaining fields are the check's inputs and the
/// values observed when the failure was found.
struct Counterexample {
  std::string check;
  std::vector<std::vector<double>> distributions;
  std::vector<std::vector<double>> spectra;
  std::vector<double> inputs;
  std::vector<double> observed;
};

struct CriterionResult {
  int id = 0;
  std::string name;
  Verdict verdict = Verdict::not_applicable;
  std::string detail;
  std::optional<Counterexample> counterexample;
};

struct CriteriaReport {
  std::string candidate;
  std::map<std::string, double> parameters;
  std::uint64_t seed = 0;
  std::size_t trials = 0;
  std::vector<double> levels;
  std::vector<CriterionResult> results;

  /// True if no criterion failed (not-applicable entries are allowed).
  bool passes_all() const;
  const CriterionResult& criterion(int id) const;
};

/// Runs the eight checks. trials >= 100 controls the number of random cases
/// for the sampled criteria (1)-(4); the optimization-based criteria (5)-(8)
/// use fixed grids. Deterministic for a given seed.
CriteriaReport run_criteria(const EntropyCandidate& candidate, const EnergySpectrum& spectrum,
                            std::size_t trials, std::uint64_t seed);

/// Re-evaluates a recorded counterexample; true if the failure reproduces.
bool replay_counterexample(const Counterexample& counterexample, const EntropyCandidate& candidate);

struct CompositeTemperatureResult {
  double energy_a = 0.0;
  double energy_b = 0.0;
  double beta_a = 0.0;
  double beta_b = 0.0;
  double total_entropy = 0.0;
  /// |1/T_A - 1/T_B| = k |beta_A - beta_B|.
  double inverse_temperature_gap = 0.0;
  bool matched = false;
};

inline constexpr double kCompositeTemperatureTolerance = 1e-6;

/// Maximizes S_A(E_A) + S_B(E_total - E_A) over the stable-equilibrium
/// curves of the two subsystems and compares their inverse temperatures.
CompositeTemperatureResult composite_temperature_check(const EnergySpectrum& a,
                                                       const EnergySpectrum& b, double total_energy,
                                                       const ModelConstants& constants = {});

}  // namespace sea
