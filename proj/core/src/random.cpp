#include "sea/random.hpp"

#include <cmath>
#include <limits>
#include <numeric>

namespace sea {

double Rng::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

std::size_t Rng::index(std::size_t n) {
  if (n == 0) throw std::invalid_argument("Rng::index: empty range");
  // Rejection sampling to avoid modulo bias.
  const std::uint64_t bound = static_cast<std::uint64_t>(n);
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t x = engine_();
  while (x >= limit) x = engine_();
  return static_cast<std::size_t>(x % bound);
}

double Rng::exponential() {
  // 1 - u lies in (0, 1], so the log is finite.
  return -std::log(1.0 - uniform());
}

std::vector<std::size_t> Rng::permutation(std::size_t n) {
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  for (std::size_t i = n; i > 1; --i) std::swap(perm[i - 1], perm[index(i)]);
  return perm;
}

std::vector<double> Rng::simplex_point(std::size_t n) {
  std::vector<double> p(n);
  double total = 0.0;
  for (double& x : p) {
    x = exponential();
    total += x;
  }
  for (double& x : p) x /= total;
  return p;
}

std::vector<double> Rng::sparse_simplex_point(std::size_t n, double zero_fraction) {
  std::vector<double> p(n);
  const std::size_t keep = index(n);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    p[i] = (i != keep && uniform() < zero_fraction) ? 0.0 : exponential();
    total += p[i];
  }
  for (double& x : p) x /= total;
  return p;
}

std::vector<double> Rng::levels(std::size_t n, double lo, double hi) {
  std::vector<double> e(n);
  for (double& x : e) x = uniform(lo, hi);
  return e;
}

std::vector<double> Rng::doubly_stochastic(std::size_t n, std::size_t terms) {
  std::vector<double> m(n * n, 0.0);
  for (std::size_t t = 0; t < terms; ++t) {
    const auto perm = permutation(n);
    for (std::size_t i = 0; i < n; ++i) m[i * n + perm[i]] += 1.0;
  }
  for (double& x : m) x /= static_cast<double>(terms);
  return m;
}

StateDistribution random_state(Rng& rng, std::size_t n) {
  return StateDistribution::from_normalized(rng.simplex_point(n));
}

std::vector<double> apply_matrix(const std::vector<double>& matrix, std::span<const double> p) {
  const std::size_t n = p.size();
  detail::require_same_size(matrix.size(), n * n, "apply_matrix");
  std::vector<double> out(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    detail::CompensatedSum s;
    for (std::size_t j = 0; j < n; ++j) s.add(matrix[i * n + j] * p[j]);
    out[i] = s.value();
  }
  return out;
}

std::vector<double> product_distribution(std::span<const double> p, std::span<const double> q) {
  std::vector<double> out;
  out.reserve(p.size() * q.size());
  for (double a : p) {
    for (double b : q) out.push_back(a * b);
  }
  return out;
}

}  // namespace sea
