#pragma once

// Deterministic random generation for property checks. Everything is built
// on std::mt19937_64 with hand-rolled conversions so that a given seed
// produces the same sequence with every standard library.

#include <cstdint>
#include <random>
#include <vector>

#include "sea/core.hpp"

namespace sea {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Uniform integer in [0, n).
  std::size_t index(std::size_t n);
  /// Standard exponential variate.
  double exponential();

  /// Fisher-Yates permutation of {0, ..., n-1}.
  std::vector<std::size_t> permutation(std::size_t n);

  /// Uniform point on the probability simplex (flat Dirichlet), full support.
  std::vector<double> simplex_point(std::size_t n);

  /// Simplex point with a random subset of entries forced to zero (at least
  /// one entry stays positive).
  std::vector<double> sparse_simplex_point(std::size_t n, double zero_fraction);

  /// n levels uniform in [lo, hi).
  std::vector<double> levels(std::size_t n, double lo, double hi);

  /// Doubly stochastic matrix (row-major, n x n) as the average of `terms`
  /// random permutation matrices; rows and columns sum to one exactly up to
  /// the final division.
  std::vector<double> doubly_stochastic(std::size_t n, std::size_t terms);

 private:
  std::mt19937_64 engine_;
};

StateDistribution random_state(Rng& rng, std::size_t n);

/// Applies a row-major n x n matrix to p.
std::vector<double> apply_matrix(const std::vector<double>& matrix, std::span<const double> p);

/// Outer product p (x) q flattened row-major (index i * q.size() + j).
std::vector<double> product_distribution(std::span<const double> p, std::span<const double> q);

}  // namespace sea
