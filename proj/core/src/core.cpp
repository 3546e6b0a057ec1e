#include "sea/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace sea {

namespace detail {

void CompensatedSum::add(double x) noexcept {
  const double t = sum_ + x;
  if (std::abs(sum_) >= std::abs(x)) {
    compensation_ += (sum_ - t) + x;
  } else {
    compensation_ += (x - t) + sum_;
  }
  sum_ = t;
}

void require_same_size(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw std::invalid_argument(std::string(what) + ": length mismatch (" + std::to_string(a) +
                                " vs " + std::to_string(b) + ")");
  }
}

}  // namespace detail

EnergySpectrum::EnergySpectrum(std::vector<double> levels) : levels_(std::move(levels)) {
  if (levels_.empty()) {
    throw std::invalid_argument("EnergySpectrum: at least one level is required");
  }
  if (!std::all_of(levels_.begin(), levels_.end(), [](double e) { return std::isfinite(e); })) {
    throw std::invalid_argument("EnergySpectrum: levels must be finite");
  }
  const auto [lo, hi] = std::minmax_element(levels_.begin(), levels_.end());
  min_ = *lo;
  max_ = *hi;
  detail::CompensatedSum sum;
  for (double e : levels_) sum.add(e);
  mean_ = sum.value() / static_cast<double>(levels_.size());
}

std::size_t EnergySpectrum::distinct_count() const {
  std::vector<double> sorted(levels_);
  std::sort(sorted.begin(), sorted.end());
  return static_cast<std::size_t>(std::unique(sorted.begin(), sorted.end()) - sorted.begin());
}

Support EnergySpectrum::full_support() const {
  Support s(levels_.size());
  std::iota(s.begin(), s.end(), std::size_t{0});
  return s;
}

StateDistribution::StateDistribution(std::vector<double> probs) : probs_(std::move(probs)) {
  for (std::size_t i = 0; i < probs_.size(); ++i) {
    if (probs_[i] > 0.0) support_.push_back(i);
  }
}

StateDistribution StateDistribution::from_normalized(std::vector<double> probs) {
  if (probs.empty()) throw std::invalid_argument("StateDistribution: empty probability vector");
  detail::CompensatedSum sum;
  for (double p : probs) {
    if (!std::isfinite(p) || p < 0.0) {
      throw std::invalid_argument("StateDistribution: entries must be finite and non-negative");
    }
    sum.add(p);
  }
  if (std::abs(sum.value() - 1.0) > 1e-9) {
    throw std::invalid_argument("StateDistribution: probabilities do not sum to one");
  }
  return StateDistribution(std::move(probs));
}

StateDistribution validate_state(std::span<const double> probs, Validation mode) {
  if (probs.empty()) throw std::invalid_argument("validate_state: empty probability vector");
  std::vector<double> p(probs.begin(), probs.end());
  detail::CompensatedSum raw_sum;
  for (double& x : p) {
    if (!std::isfinite(x)) throw std::invalid_argument("validate_state: non-finite entry");
    if (x < -kNormalizationTolerance) throw std::invalid_argument("validate_state: negative entry");
    raw_sum.add(x);
  }
  if (raw_sum.value() <= 0.0) throw std::invalid_argument("validate_state: all-zero vector");
  if (mode == Validation::strict && std::abs(raw_sum.value() - 1.0) > kNormalizationTolerance) {
    throw std::invalid_argument("validate_state: probabilities sum to " +
                                std::to_string(raw_sum.value()) + ", expected 1");
  }

  // Snap relative to the normalized scale so lenient inputs like (2, 2, 1e-14)
  // behave the same as their normalized form.
  const double scale = raw_sum.value();
  detail::CompensatedSum kept;
  for (double& x : p) {
    if (x / scale < kSupportThreshold) x = 0.0;
    kept.add(x);
  }
  if (kept.value() <= 0.0) throw std::invalid_argument("validate_state: all entries below threshold");
  const double norm = kept.value();
  for (double& x : p) x /= norm;
  return StateDistribution(std::move(p));
}

ModelConstants::ModelConstants(double k, double tau) : k_(k), tau_(tau) {
  if (!(k > 0.0) || !std::isfinite(k)) throw std::invalid_argument("ModelConstants: k must be > 0");
  if (!(tau > 0.0) || !std::isfinite(tau)) {
    throw std::invalid_argument("ModelConstants: tau must be > 0");
  }
}

double xlogx(double p) {
  if (!(p >= -kNormalizationTolerance && p <= 1.0 + kNormalizationTolerance)) {
    throw std::domain_error("xlogx: argument outside [0, 1]");
  }
  if (p <= 0.0) return 0.0;
  return p * std::log(p);
}

double entropy(const StateDistribution& state, const ModelConstants& constants) {
  detail::CompensatedSum sum;
  for (std::size_t i : state.support()) sum.add(xlogx(state[i]));
  // -0.0 for pure states is folded to +0.0.
  return 0.0 - constants.k() * sum.value();
}

double energy(const StateDistribution& state, const EnergySpectrum& spectrum) {
  detail::require_same_size(state.size(), spectrum.size(), "energy");
  detail::CompensatedSum sum;
  for (std::size_t i : state.support()) sum.add(spectrum[i] * state[i]);
  return sum.value();
}

double linf_distance(std::span<const double> a, std::span<const double> b) {
  detail::require_same_size(a.size(), b.size(), "linf_distance");
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

}  // namespace sea
