#pragma once

// Domain types shared by every module: spectra, diagonal states, model
// constants, and the per-particle energy and entropy functionals.

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace sea {

/// Probabilities below this value are snapped to exactly zero when a raw
/// vector is validated; zero entries stay zero under the dynamics.
inline constexpr double kSupportThreshold = 1e-14;

/// Allowed deviation of sum(p) from one in strict validation.
inline constexpr double kNormalizationTolerance = 1e-12;

/// SI value of the Boltzmann constant (J/K), for callers that want physical
/// entropy units instead of nats.
inline constexpr double kBoltzmannSI = 1.380649e-23;

using Support = std::vector<std::size_t>;

/// Single-particle energy eigenvalues. Degenerate levels are repeated, order
/// is arbitrary.
class EnergySpectrum {
 public:
  explicit EnergySpectrum(std::vector<double> levels);

  std::span<const double> levels() const noexcept { return levels_; }
  std::size_t size() const noexcept { return levels_.size(); }
  double operator[](std::size_t i) const { return levels_[i]; }

  double min() const noexcept { return min_; }
  double max() const noexcept { return max_; }
  double mean() const noexcept { return mean_; }
  double range() const noexcept { return max_ - min_; }

  /// Number of distinct energy values (exact comparison).
  std::size_t distinct_count() const;

  /// Index set {0, ..., N-1}.
  Support full_support() const;

 private:
  std::vector<double> levels_;
  double min_ = 0.0;
  double max_ = 0.0;
  double mean_ = 0.0;
};

enum class Validation { strict, lenient };

class StateDistribution;

/// Builds a state from raw probabilities.
///
/// Entries below kSupportThreshold are set to exactly zero and the rest are
/// renormalized. In strict mode a vector whose sum differs from one by more
/// than kNormalizationTolerance is rejected; lenient mode rescales it.
/// Negative entries below -1e-12, non-finite entries and all-zero vectors
/// are always rejected.
StateDistribution validate_state(std::span<const double> probs,
                                 Validation mode = Validation::strict);

/// Probability vector over energy eigenstates, together with its support.
class StateDistribution {
 public:
  /// Wraps a vector that the caller has already normalized (canonical
  /// distributions, integrator output). No snapping is applied, so tiny
  /// positive entries remain in the support. Throws on negative or
  /// non-finite entries, or if the sum is off by more than 1e-9.
  static StateDistribution from_normalized(std::vector<double> probs);

  std::span<const double> probs() const noexcept { return probs_; }
  std::size_t size() const noexcept { return probs_.size(); }
  double operator[](std::size_t i) const { return probs_[i]; }

  const Support& support() const noexcept { return support_; }
  bool in_support(std::size_t i) const { return probs_[i] > 0.0; }
  bool is_pure() const noexcept { return support_.size() == 1; }

  friend bool operator==(const StateDistribution&, const StateDistribution&) = default;

 private:
  explicit StateDistribution(std::vector<double> probs);
  friend StateDistribution validate_state(std::span<const double>, Validation);

  std::vector<double> probs_;
  Support support_;
};

/// Entropy scale k and relaxation time tau. Both strictly positive.
class ModelConstants {
 public:
  ModelConstants() = default;
  ModelConstants(double k, double tau);

  double k() const noexcept { return k_; }
  double tau() const noexcept { return tau_; }

 private:
  double k_ = 1.0;
  double tau_ = 1.0;
};

struct TrajectoryPoint {
  double t = 0.0;
  StateDistribution state;
  double energy = 0.0;
  double entropy = 0.0;
  double entropy_rate = 0.0;
};

struct Trajectory {
  std::vector<TrajectoryPoint> points;
  EnergySpectrum spectrum;
  ModelConstants constants;
};

/// p ln p with the continuous extension 0 ln 0 = 0.
double xlogx(double p);

double entropy(const StateDistribution& state, const ModelConstants& constants = {});

double energy(const StateDistribution& state, const EnergySpectrum& spectrum);

/// L-infinity distance between two probability vectors of equal length.
double linf_distance(std::span<const double> a, std::span<const double> b);

namespace detail {

/// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double x) noexcept;
  double value() const noexcept { return sum_ + compensation_; }

 private:
  double sum_ = 0.0;
  double compensation_ = 0.0;
};

void require_same_size(std::size_t a, std::size_t b, const char* what);

}  // namespace detail

}  // namespace sea
