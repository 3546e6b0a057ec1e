#include "sea/criteria.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "sea/dynamics.hpp"
#include "sea/equilibrium.hpp"
#include "sea/random.hpp"
#include "sea/statespace.hpp"

namespace sea {

namespace {

double plogp(double p) { return p > 0.0 ? p * std::log(p) : 0.0; }

double power_sum(std::span<const double> p, double q) {
  detail::CompensatedSum s;
  for (double x : p) {
    if (x > 0.0) s.add(std::pow(x, q));
  }
  return s.value();
}

// Tolerances for the operational checks.
constexpr double kExactTol = 1e-12;
constexpr double kAdditivityTol = 1e-10;
constexpr double kSeaMonotoneTol = 1e-10;
constexpr double kUniqueTol = 1e-6;
constexpr double kValueTieTol = 1e-9;
constexpr double kConcavityTol = 1e-8;
constexpr double kGenericTemperatureTol = 1e-5;
constexpr double kIdentityTol = 1e-10;

double scaled(double tol, double value) { return tol * std::max(1.0, std::abs(value)); }

std::string format(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

AscentResult candidate_max(const EntropyCandidate& c, const EnergySpectrum& spectrum, double e,
                           std::span<const double> start) {
  return maximize_at_energy(c.functional, spectrum, e, start, {}, c.gradient);
}

std::vector<double> uniform_vector(std::size_t n) {
  return std::vector<double>(n, 1.0 / static_cast<double>(n));
}

double candidate_max_value(const EntropyCandidate& c, const EnergySpectrum& spectrum, double e) {
  const auto start = uniform_vector(spectrum.size());
  return candidate_max(c, spectrum, e, start).value;
}

// Composite C = A x B at fixed total energy: golden-section search over E_A of
// f(p*_A(E_A) (x) p*_B(E - E_A)), then each subsystem's inverse temperature by
// central differences of its own maximized value.
struct GenericComposite {
  double energy_a;
  double inverse_t_a;
  double inverse_t_b;
};

GenericComposite generic_composite(const EntropyCandidate& c, const EnergySpectrum& a,
                                   const EnergySpectrum& b, double total) {
  const double lo = std::max(a.min(), total - b.max());
  const double hi = std::min(a.max(), total - b.min());
  const double margin = 1e-3 * (hi - lo);
  const auto start_a = uniform_vector(a.size());
  const auto start_b = uniform_vector(b.size());
  auto joint = [&](double ea) {
    const auto pa = candidate_max(c, a, ea, start_a).p;
    const auto pb = candidate_max(c, b, total - ea, start_b).p;
    return c.functional(product_distribution(pa, pb));
  };

  const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
  double x0 = lo + margin;
  double x3 = hi - margin;
  double x1 = x3 - ratio * (x3 - x0);
  double x2 = x0 + ratio * (x3 - x0);
  double f1 = joint(x1);
  double f2 = joint(x2);
  while (x3 - x0 > 1e-9 * std::max(1.0, std::abs(hi - lo))) {
    if (f1 < f2) {
      x0 = x1;
      x1 = x2;
      f1 = f2;
      x2 = x0 + ratio * (x3 - x0);
      f2 = joint(x2);
    } else {
      x3 = x2;
      x2 = x1;
      f2 = f1;
      x1 = x3 - ratio * (x3 - x0);
      f1 = joint(x1);
    }
  }
  const double ea = 0.5 * (x0 + x3);
  const double eb = total - ea;
  auto slope = [&](const EnergySpectrum& s, double e) {
    const double d = 1e-4 * s.range();
    return (candidate_max_value(c, s, e + d) - candidate_max_value(c, s, e - d)) / (2.0 * d);
  };
  return {ea, slope(a, ea), slope(b, eb)};
}

bool is_permutation_of_indices(std::span<const double> v, std::size_t n) {
  if (v.size() != n) return false;
  std::vector<bool> seen(n, false);
  for (double x : v) {
    if (x < 0 || x >= static_cast<double>(n) || x != std::floor(x)) return false;
    const auto i = static_cast<std::size_t>(x);
    if (seen[i]) return false;
    seen[i] = true;
  }
  return true;
}

class CriteriaRunner {
 public:
  CriteriaRunner(const EntropyCandidate& c, const EnergySpectrum& spectrum, std::size_t trials,
                 std::uint64_t seed)
      : c_(c), spectrum_(spectrum), trials_(trials), rng_(seed) {}

  CriterionResult totality();
  CriterionResult adiabatic_monotonicity();
  CriterionResult additivity();
  CriterionResult non_negativity();
  CriterionResult unique_maximizer();
  CriterionResult concavity();
  CriterionResult composite_potentials();
  CriterionResult canonical_identity();

 private:
  double f(std::span<const double> p) const { return c_.functional(p); }

  std::vector<double> interior_energies() const {
    return {spectrum_.min() + 0.3 * spectrum_.range(), spectrum_.min() + 0.6 * spectrum_.range()};
  }

  const EntropyCandidate& c_;
  const EnergySpectrum& spectrum_;
  std::size_t trials_;
  Rng rng_;
  // Maximizers found in criterion (5), reused by (8).
  std::vector<std::pair<double, std::vector<double>>> maximizers_;
  bool unique_ = false;
};

CriterionResult CriteriaRunner::totality() {
  CriterionResult r{1, "well defined for every system and state", Verdict::pass, "", std::nullopt};
  const std::size_t sizes[] = {1, 2, 3, 8, 64};
  std::size_t evaluated = 0;
  for (std::size_t n : sizes) {
    std::vector<std::vector<double>> cases;
    cases.push_back(uniform_vector(n));
    for (std::size_t j = 0; j < n; ++j) {
      std::vector<double> pure(n, 0.0);
      pure[j] = 1.0;
      cases.push_back(std::move(pure));
    }
    for (std::size_t t = 0; t < trials_ / 5 + 1; ++t) {
      cases.push_back(t % 2 == 0 ? rng_.simplex_point(n) : rng_.sparse_simplex_point(n, 0.5));
    }
    for (const auto& p : cases) {
      const double v = f(p);
      ++evaluated;
      if (!std::isfinite(v)) {
        r.verdict = Verdict::fail;
        r.detail = "non-finite value on a state with N = " + std::to_string(n);
        r.counterexample = Counterexample{"finiteness", {p}, {}, {}, {v}};
        return r;
      }
    }
  }
  r.detail = std::to_string(evaluated) + " states with N in {1,2,3,8,64}, including zero entries";
  return r;
}

CriterionResult CriteriaRunner::adiabatic_monotonicity() {
  CriterionResult r{2, "invariant under reversible, non-decreasing under irreversible adiabatic processes",
                    Verdict::pass, "", std::nullopt};
  for (std::size_t t = 0; t < trials_; ++t) {
    const std::size_t n = 2 + rng_.index(7);
    const auto p = rng_.simplex_point(n);
    const auto perm = rng_.permutation(n);
    std::vector<double> permuted(n);
    for (std::size_t i = 0; i < n; ++i) permuted[i] = p[perm[i]];
    const double a = f(p);
    const double b = f(permuted);
    if (!(std::abs(a - b) <= scaled(kExactTol, a))) {
      r.verdict = Verdict::fail;
      r.detail = "value changes under a permutation of probabilities";
      std::vector<double> idx(perm.begin(), perm.end());
      r.counterexample = Counterexample{"permutation", {p}, {}, idx, {a, b}};
      return r;
    }
  }
  for (std::size_t t = 0; t < trials_; ++t) {
    const std::size_t n = 2 + rng_.index(7);
    const auto p = rng_.simplex_point(n);
    const auto m = rng_.doubly_stochastic(n, 2 + rng_.index(4));
    const auto mixed = apply_matrix(m, p);
    const double before = f(p);
    const double after = f(mixed);
    if (after < before - scaled(kExactTol, before)) {
      r.verdict = Verdict::fail;
      r.detail = "value decreases under doubly-stochastic mixing";
      r.counterexample = Counterexample{"mixing", {p}, {}, m, {before, after}};
      return r;
    }
  }
  std::string detail = std::to_string(trials_) + " permutations, " + std::to_string(trials_) +
                       " doubly-stochastic mixings";
  if (c_.ascended_by_sea && spectrum_.distinct_count() > 1) {
    const auto p0 = rng_.simplex_point(spectrum_.size());
    const double t_end = 5.0;
    IntegratorConfig cfg;
    cfg.t_end = t_end;
    cfg.sample_stride = 5;
    const auto traj = integrate(StateDistribution::from_normalized(p0), spectrum_, {}, cfg);
    for (std::size_t i = 1; i < traj.points.size(); ++i) {
      const double prev = f(traj.points[i - 1].state.probs());
      const double next = f(traj.points[i].state.probs());
      if (next < prev - kSeaMonotoneTol) {
        r.verdict = Verdict::fail;
        r.detail = "value decreases along an SEA trajectory";
        std::vector<double> levels(spectrum_.levels().begin(), spectrum_.levels().end());
        r.counterexample = Counterexample{"sea_trajectory", {p0}, {levels}, {t_end}, {prev, next}};
        return r;
      }
    }
    detail += ", SEA trajectory over " + std::to_string(traj.points.size()) + " samples";
  }
  r.detail = detail;
  return r;
}

CriterionResult CriteriaRunner::additivity() {
  CriterionResult r{3, "additive over independent subsystems", Verdict::pass, "", std::nullopt};
  std::vector<std::pair<std::vector<double>, std::vector<double>>> cases;
  cases.push_back({{0.5, 0.5}, {0.5, 0.5}});
  for (std::size_t t = 0; t < trials_; ++t) {
    cases.push_back({rng_.simplex_point(2 + rng_.index(3)), rng_.simplex_point(2 + rng_.index(3))});
  }
  for (const auto& [p, q] : cases) {
    const double joint = f(product_distribution(p, q));
    const double sum = f(p) + f(q);
    if (!(std::abs(joint - sum) <= scaled(kAdditivityTol, sum))) {
      r.verdict = Verdict::fail;
      r.detail = "S(p x q) = " + format(joint) + " but S(p) + S(q) = " + format(sum);
      r.counterexample = Counterexample{"additivity", {p, q}, {}, {}, {joint, sum}};
      return r;
    }
  }
  r.detail = std::to_string(cases.size()) + " product distributions";
  return r;
}

CriterionResult CriteriaRunner::non_negativity() {
  CriterionResult r{4, "non-negative, zero on pure states", Verdict::pass, "", std::nullopt};
  for (std::size_t n = 1; n <= 8; ++n) {
    for (std::size_t j = 0; j < n; ++j) {
      std::vector<double> pure(n, 0.0);
      pure[j] = 1.0;
      const double v = f(pure);
      if (!(std::abs(v) <= kExactTol)) {
        r.verdict = Verdict::fail;
        r.detail = "non-zero value " + format(v) + " on a pure state";
        r.counterexample = Counterexample{"pure_state_zero", {pure}, {}, {}, {v}};
        return r;
      }
    }
  }
  for (std::size_t t = 0; t < trials_; ++t) {
    const auto p = rng_.sparse_simplex_point(1 + rng_.index(8), 0.3);
    const double v = f(p);
    if (v < -kExactTol) {
      r.verdict = Verdict::fail;
      r.detail = "negative value " + format(v);
      r.counterexample = Counterexample{"non_negativity", {p}, {}, {}, {v}};
      return r;
    }
  }
  r.detail = "pure states N <= 8 and " + std::to_string(trials_) + " random states";
  return r;
}

CriterionResult CriteriaRunner::unique_maximizer() {
  CriterionResult r{5, "unique maximizer at fixed energy", Verdict::pass, "", std::nullopt};
  if (spectrum_.distinct_count() < 2) {
    r.verdict = Verdict::not_applicable;
    r.detail = "spectrum has a single distinct level";
    return r;
  }
  constexpr std::size_t kStarts = 20;
  std::vector<double> levels(spectrum_.levels().begin(), spectrum_.levels().end());
  for (double e : interior_energies()) {
    std::vector<AscentResult> runs;
    for (std::size_t s = 0; s < kStarts; ++s) {
      runs.push_back(candidate_max(c_, spectrum_, e, rng_.simplex_point(spectrum_.size())));
    }
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& run : runs) best = std::max(best, run.value);
    std::vector<const AscentResult*> top;
    for (const auto& run : runs) {
      if (run.value >= best - scaled(kValueTieTol, best)) top.push_back(&run);
    }
    for (std::size_t i = 1; i < top.size(); ++i) {
      if (linf_distance(top[0]->p, top[i]->p) > kUniqueTol) {
        r.verdict = Verdict::fail;
        r.detail = "distinct states at E = " + format(e) + " share the largest value " + format(best);
        r.counterexample = Counterexample{"unique_maximizer", {top[0]->p, top[i]->p}, {levels}, {e},
                                          {top[0]->value, top[i]->value}};
        return r;
      }
    }
    maximizers_.emplace_back(e, top[0]->p);
  }
  unique_ = true;
  r.detail = std::to_string(kStarts) + " random starts at each of 2 energies agree within 1e-6";
  return r;
}

CriterionResult CriteriaRunner::concavity() {
  CriterionResult r{6, "maximized value concave in energy", Verdict::pass, "", std::nullopt};
  if (spectrum_.distinct_count() < 2) {
    r.verdict = Verdict::not_applicable;
    r.detail = "spectrum has a single distinct level";
    return r;
  }
  constexpr int kPoints = 9;
  std::vector<double> es, vs;
  for (int i = 0; i < kPoints; ++i) {
    const double e = spectrum_.min() + spectrum_.range() * (0.1 + 0.8 * i / (kPoints - 1));
    es.push_back(e);
    vs.push_back(candidate_max_value(c_, spectrum_, e));
  }
  std::vector<double> levels(spectrum_.levels().begin(), spectrum_.levels().end());
  for (int i = 1; i + 1 < kPoints; ++i) {
    const double w = (es[i] - es[i - 1]) / (es[i + 1] - es[i - 1]);
    const double chord = vs[i - 1] + w * (vs[i + 1] - vs[i - 1]);
    if (chord - vs[i] > scaled(kConcavityTol, vs[i])) {
      r.verdict = Verdict::fail;
      r.detail = "maximized value lies below its chord at E = " + format(es[i]);
      r.counterexample = Counterexample{"concavity", {}, {levels}, {es[i - 1], es[i], es[i + 1]},
                                        {vs[i - 1], vs[i], vs[i + 1]}};
      return r;
    }
  }
  r.detail = std::to_string(kPoints) + " energies across 10%-90% of the range";
  return r;
}

CriterionResult CriteriaRunner::composite_potentials() {
  CriterionResult r{7, "equal temperatures across a composite at its maximum", Verdict::pass, "",
                    std::nullopt};
  if (spectrum_.distinct_count() < 2) {
    r.verdict = Verdict::not_applicable;
    r.detail = "spectrum has a single distinct level";
    return r;
  }
  const EnergySpectrum a({0.0, 1.0});
  const EnergySpectrum& b = spectrum_;
  const double total = a.min() + b.min() + 0.4 * ((a.mean() - a.min()) + (b.mean() - b.min()));
  const auto g = generic_composite(c_, a, b, total);
  const double gap = std::abs(g.inverse_t_a - g.inverse_t_b);
  if (!(gap <= kGenericTemperatureTol)) {
    r.verdict = Verdict::fail;
    r.detail = "1/T_A = " + format(g.inverse_t_a) + ", 1/T_B = " + format(g.inverse_t_b);
    std::vector<double> la(a.levels().begin(), a.levels().end());
    std::vector<double> lb(b.levels().begin(), b.levels().end());
    r.counterexample = Counterexample{"composite_temperature", {}, {la, lb}, {total},
                                      {g.energy_a, g.inverse_t_a, g.inverse_t_b}};
    return r;
  }
  r.detail = "A = (0, 1), B = spectrum, E_total = " + format(total) + ", |1/T_A - 1/T_B| = " + format(gap);
  return r;
}

CriterionResult CriteriaRunner::canonical_identity() {
  CriterionResult r{8, "canonical identity S = ln Z + beta E (surrogate for ideal-gas relations)",
                    Verdict::pass, "", std::nullopt};
  if (!unique_ || maximizers_.empty()) {
    r.verdict = Verdict::not_applicable;
    r.detail = "no unique maximizer to compare with the canonical form";
    return r;
  }
  for (const auto& [e, p] : maximizers_) {
    const auto sol = beta_from_energy(e, spectrum_);
    if (linf_distance(p, sol.distribution.probs()) > kUniqueTol) {
      r.verdict = Verdict::not_applicable;
      r.detail = "maximizer at fixed energy is not canonical";
      return r;
    }
  }
  const Support full = spectrum_.full_support();
  std::vector<double> levels(spectrum_.levels().begin(), spectrum_.levels().end());
  for (double x : {-2.0, -0.5, 0.0, 0.5, 2.0}) {
    const double beta = x / spectrum_.range();
    const auto p = canonical_distribution(beta, spectrum_, full);
    const double s = f(p.probs());
    const double identity = partition_function(beta, spectrum_, full).log_unshifted() +
                            beta * energy(p, spectrum_);
    if (!(std::abs(s - identity) <= scaled(kIdentityTol, identity))) {
      r.verdict = Verdict::fail;
      r.detail = "value " + format(s) + " differs from ln Z + beta E = " + format(identity);
      r.counterexample = Counterexample{"canonical_identity", {}, {levels}, {beta}, {s, identity}};
      return r;
    }
  }
  r.detail = "maximizers are canonical; identity holds on 5 inverse temperatures";
  return r;
}

}  // namespace

EntropyCandidate shannon_candidate() {
  EntropyCandidate c;
  c.name = "shannon";
  c.functional = [](std::span<const double> p) {
    detail::CompensatedSum s;
    for (double x : p) s.add(plogp(x));
    return 0.0 - s.value();
  };
  c.gradient = shannon_gradient;
  c.ascended_by_sea = true;
  return c;
}

EntropyCandidate tsallis_candidate(double q) {
  if (!(q > 0.0) || q == 1.0) throw std::invalid_argument("tsallis: q must be positive and != 1");
  EntropyCandidate c;
  c.name = "tsallis";
  c.parameters["q"] = q;
  c.functional = [q](std::span<const double> p) { return (1.0 - power_sum(p, q)) / (q - 1.0); };
  c.gradient = [q](std::span<const double> p, std::span<double> out) {
    for (std::size_t i = 0; i < p.size(); ++i) {
      out[i] = p[i] > 0.0 ? -q * std::pow(p[i], q - 1.0) / (q - 1.0) : (q > 1.0 ? 0.0 : 1e300);
    }
  };
  return c;
}

EntropyCandidate renyi_candidate(double alpha) {
  if (!(alpha > 0.0) || alpha == 1.0) throw std::invalid_argument("renyi: alpha must be positive and != 1");
  EntropyCandidate c;
  c.name = "renyi";
  c.parameters["alpha"] = alpha;
  c.functional = [alpha](std::span<const double> p) {
    return std::log(power_sum(p, alpha)) / (1.0 - alpha);
  };
  c.gradient = [alpha](std::span<const double> p, std::span<double> out) {
    const double z = power_sum(p, alpha);
    for (std::size_t i = 0; i < p.size(); ++i) {
      out[i] = p[i] > 0.0 ? alpha * std::pow(p[i], alpha - 1.0) / ((1.0 - alpha) * z)
                          : (alpha > 1.0 ? 0.0 : 1e300);
    }
  };
  return c;
}

EntropyCandidate hartley_candidate() {
  EntropyCandidate c;
  c.name = "hartley";
  c.functional = [](std::span<const double> p) {
    const auto count = std::count_if(p.begin(), p.end(), [](double x) { return x > 0.0; });
    return std::log(static_cast<double>(std::max<std::ptrdiff_t>(count, 1)));
  };
  return c;
}

EntropyCandidate quadratic_candidate() {
  EntropyCandidate c;
  c.name = "quadratic";
  c.functional = [](std::span<const double> p) { return 1.0 - power_sum(p, 2.0); };
  c.gradient = [](std::span<const double> p, std::span<double> out) {
    for (std::size_t i = 0; i < p.size(); ++i) out[i] = -2.0 * p[i];
  };
  return c;
}

std::vector<EntropyCandidate> builtin_candidates() {
  return {shannon_candidate(), tsallis_candidate(2.0), renyi_candidate(2.0), hartley_candidate(),
          quadratic_candidate()};
}

EntropyCandidate candidate_by_name(std::string_view name, double q, double alpha) {
  if (name == "shannon") return shannon_candidate();
  if (name == "tsallis") return tsallis_candidate(q);
  if (name == "renyi") return renyi_candidate(alpha);
  if (name == "hartley") return hartley_candidate();
  if (name == "quadratic") return quadratic_candidate();
  throw std::invalid_argument("unknown entropy candidate '" + std::string(name) + "'");
}

const char* to_string(Verdict verdict) {
  switch (verdict) {
    case Verdict::pass: return "pass";
    case Verdict::fail: return "fail";
    case Verdict::not_applicable: return "not-applicable";
  }
  return "not-applicable";
}

bool CriteriaReport::passes_all() const {
  return std::none_of(results.begin(), results.end(),
                      [](const CriterionResult& r) { return r.verdict == Verdict::fail; });
}

const CriterionResult& CriteriaReport::criterion(int id) const {
  for (const auto& r : results) {
    if (r.id == id) return r;
  }
  throw std::out_of_range("CriteriaReport: no criterion " + std::to_string(id));
}

CriteriaReport run_criteria(const EntropyCandidate& candidate, const EnergySpectrum& spectrum,
                            std::size_t trials, std::uint64_t seed) {
  if (trials < 100) throw std::invalid_argument("run_criteria: trials must be >= 100");
  CriteriaReport report;
  report.candidate = candidate.name;
  report.parameters = candidate.parameters;
  report.seed = seed;
  report.trials = trials;
  report.levels.assign(spectrum.levels().begin(), spectrum.levels().end());

  CriteriaRunner runner(candidate, spectrum, trials, seed);
  report.results.push_back(runner.totality());
  report.results.push_back(runner.adiabatic_monotonicity());
  report.results.push_back(runner.additivity());
  report.results.push_back(runner.non_negativity());
  report.results.push_back(runner.unique_maximizer());
  report.results.push_back(runner.concavity());
  report.results.push_back(runner.composite_potentials());
  report.results.push_back(runner.canonical_identity());
  return report;
}

bool replay_counterexample(const Counterexample& cx, const EntropyCandidate& c) {
  const auto& f = c.functional;
  const auto& d = cx.distributions;
  if (cx.check == "finiteness") {
    return d.size() == 1 && !std::isfinite(f(d[0]));
  }
  if (cx.check == "permutation") {
    if (d.size() != 1 || !is_permutation_of_indices(cx.inputs, d[0].size())) return false;
    std::vector<double> permuted(d[0].size());
    for (std::size_t i = 0; i < permuted.size(); ++i) {
      permuted[i] = d[0][static_cast<std::size_t>(cx.inputs[i])];
    }
    const double a = f(d[0]);
    return !(std::abs(a - f(permuted)) <= scaled(kExactTol, a));
  }
  if (cx.check == "mixing") {
    if (d.size() != 1 || cx.inputs.size() != d[0].size() * d[0].size()) return false;
    const double before = f(d[0]);
    return f(apply_matrix(cx.inputs, d[0])) < before - scaled(kExactTol, before);
  }
  if (cx.check == "sea_trajectory") {
    if (d.size() != 1 || cx.spectra.size() != 1 || cx.inputs.size() != 1) return false;
    const EnergySpectrum spectrum(cx.spectra[0]);
    IntegratorConfig cfg;
    cfg.t_end = cx.inputs[0];
    cfg.sample_stride = 5;
    const auto traj = integrate(StateDistribution::from_normalized(d[0]), spectrum, {}, cfg);
    for (std::size_t i = 1; i < traj.points.size(); ++i) {
      if (f(traj.points[i].state.probs()) < f(traj.points[i - 1].state.probs()) - kSeaMonotoneTol) {
        return true;
      }
    }
    return false;
  }
  if (cx.check == "additivity") {
    if (d.size() != 2) return false;
    const double sum = f(d[0]) + f(d[1]);
    return !(std::abs(f(product_distribution(d[0], d[1])) - sum) <= scaled(kAdditivityTol, sum));
  }
  if (cx.check == "pure_state_zero") {
    return d.size() == 1 && !(std::abs(f(d[0])) <= kExactTol);
  }
  if (cx.check == "non_negativity") {
    return d.size() == 1 && f(d[0]) < -kExactTol;
  }
  if (cx.check == "unique_maximizer") {
    if (d.size() != 2 || cx.spectra.size() != 1 || cx.inputs.size() != 1) return false;
    const EnergySpectrum spectrum(cx.spectra[0]);
    const double e = cx.inputs[0];
    const auto ra = candidate_max(c, spectrum, e, d[0]);
    const auto rb = candidate_max(c, spectrum, e, d[1]);
    const bool same_energy = std::abs(energy(StateDistribution::from_normalized(ra.p), spectrum) - e) <= 1e-9 &&
                             std::abs(energy(StateDistribution::from_normalized(rb.p), spectrum) - e) <= 1e-9;
    return same_energy && linf_distance(ra.p, rb.p) > kUniqueTol &&
           std::abs(ra.value - rb.value) <= scaled(kValueTieTol, ra.value);
  }
  if (cx.check == "concavity") {
    if (cx.spectra.size() != 1 || cx.inputs.size() != 3) return false;
    const EnergySpectrum spectrum(cx.spectra[0]);
    double v[3];
    for (int i = 0; i < 3; ++i) v[i] = candidate_max_value(c, spectrum, cx.inputs[i]);
    const double w = (cx.inputs[1] - cx.inputs[0]) / (cx.inputs[2] - cx.inputs[0]);
    return v[0] + w * (v[2] - v[0]) - v[1] > scaled(kConcavityTol, v[1]);
  }
  if (cx.check == "composite_temperature") {
    if (cx.spectra.size() != 2 || cx.inputs.size() != 1) return false;
    const auto g = generic_composite(c, EnergySpectrum(cx.spectra[0]), EnergySpectrum(cx.spectra[1]),
                                     cx.inputs[0]);
    return !(std::abs(g.inverse_t_a - g.inverse_t_b) <= kGenericTemperatureTol);
  }
  if (cx.check == "canonical_identity") {
    if (cx.spectra.size() != 1 || cx.inputs.size() != 1) return false;
    const EnergySpectrum spectrum(cx.spectra[0]);
    const Support full = spectrum.full_support();
    const double beta = cx.inputs[0];
    const auto p = canonical_distribution(beta, spectrum, full);
    const double identity =
        partition_function(beta, spectrum, full).log_unshifted() + beta * energy(p, spectrum);
    return !(std::abs(f(p.probs()) - identity) <= scaled(kIdentityTol, identity));
  }
  return false;
}

CompositeTemperatureResult composite_temperature_check(const EnergySpectrum& a,
                                                       const EnergySpectrum& b, double total,
                                                       const ModelConstants& constants) {
  const double lo = std::max(a.min(), total - b.max());
  const double hi = std::min(a.max(), total - b.min());
  if (!(total > a.min() + b.min() && total < a.max() + b.max()) || !(lo < hi)) {
    throw std::domain_error("composite_temperature_check: total energy outside the combined range");
  }
  auto beta_at = [&](const EnergySpectrum& s, double e) {
    return beta_from_energy(e, s, constants);
  };
  auto total_entropy = [&](double ea) {
    return entropy(beta_at(a, ea).distribution, constants) +
           entropy(beta_at(b, total - ea).distribution, constants);
  };

  // Golden-section search on the concave total entropy.
  const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
  double x0 = lo;
  double x3 = hi;
  double x1 = x3 - ratio * (x3 - x0);
  double x2 = x0 + ratio * (x3 - x0);
  double f1 = total_entropy(x1);
  double f2 = total_entropy(x2);
  while (x3 - x0 > 1e-10 * std::max(1.0, hi - lo)) {
    if (f1 < f2) {
      x0 = x1;
      x1 = x2;
      f1 = f2;
      x2 = x0 + ratio * (x3 - x0);
      f2 = total_entropy(x2);
    } else {
      x3 = x2;
      x2 = x1;
      f2 = f1;
      x1 = x3 - ratio * (x3 - x0);
      f1 = total_entropy(x1);
    }
  }

  // The optimum is where beta_A(E_A) = beta_B(E - E_A); the difference is
  // decreasing in E_A, so polish by bisection inside the golden bracket
  // widened to absorb the flat-top resolution limit.
  auto gap = [&](double ea) {
    const auto sa = beta_at(a, ea);
    const auto sb = beta_at(b, total - ea);
    return sa.beta - sb.beta;
  };
  const double w = 1e-3 * (hi - lo);
  double blo = std::max(lo, x0 - w);
  double bhi = std::min(hi, x3 + w);
  double ea = 0.5 * (x0 + x3);
  if (gap(blo) > 0.0 && gap(bhi) < 0.0) {
    for (int i = 0; i < 200; ++i) {
      const double mid = 0.5 * (blo + bhi);
      if (mid <= blo || mid >= bhi) break;
      if (gap(mid) > 0.0) {
        blo = mid;
      } else {
        bhi = mid;
      }
    }
    ea = 0.5 * (blo + bhi);
  }

  CompositeTemperatureResult r;
  r.energy_a = ea;
  r.energy_b = total - ea;
  const auto sa = beta_at(a, r.energy_a);
  const auto sb = beta_at(b, r.energy_b);
  r.beta_a = sa.beta;
  r.beta_b = sb.beta;
  r.total_entropy = entropy(sa.distribution, constants) + entropy(sb.distribution, constants);
  r.inverse_temperature_gap = constants.k() * std::abs(r.beta_a - r.beta_b);
  r.matched = r.inverse_temperature_gap <= kCompositeTemperatureTolerance;
  return r;
}

}  // namespace sea
