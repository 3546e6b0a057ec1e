#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "cli.hpp"
#include "sea/equilibrium.hpp"

namespace sea::cli {

using nlohmann::json;

namespace {

constexpr double kConcavityTolerance = 1e-8;

// Flags that override the simulation config.
struct SimulateOverrides {
  std::optional<double> tau;
  std::optional<double> k;
  std::optional<double> t_end;
  std::optional<double> step;
  std::optional<std::string> method;
  std::optional<std::size_t> stride;
  bool allow_backward = false;
};

void apply_overrides(RunConfig& cfg, const SimulateOverrides& o) {
  if (o.tau) cfg.tau = *o.tau;
  if (o.k) cfg.k = *o.k;
  if (o.t_end) cfg.integrator.t_end = *o.t_end;
  if (o.step) cfg.integrator.step = *o.step;
  if (o.method) {
    if (*o.method == "rk4") {
      cfg.integrator.method = IntegrationMethod::rk4;
    } else if (*o.method == "rk45") {
      cfg.integrator.method = IntegrationMethod::rk45;
    } else {
      throw ConfigError("--method must be rk4 or rk45");
    }
  }
  if (o.stride) cfg.integrator.sample_stride = *o.stride;
  if (o.allow_backward) cfg.integrator.allow_backward = true;
}

EnergySpectrum make_spectrum(const std::vector<double>& levels) {
  try {
    return EnergySpectrum(levels);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot write '" + path + "'");
  f << text;
  if (!f) throw ConfigError("error writing '" + path + "'");
}

// Emits to `path` if set, else to `out`.
void emit(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty()) {
    out << text;
  } else {
    write_file(path, text);
  }
}

struct SimulationOutput {
  std::string csv;
  std::string summary;
};

SimulationOutput simulate(const RunConfig& cfg, std::ostream& err) {
  const auto spectrum = make_spectrum(cfg.spectrum);
  ModelConstants constants;
  try {
    constants = ModelConstants(cfg.k, cfg.tau);
    cfg.integrator.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (cfg.integrator.t_end < 0.0) {
    err << "warning: integrating backward in time; entropy decreases along this run\n";
  }
  const auto initial = build_initial(cfg, spectrum, err);
  const auto trajectory = integrate(initial, spectrum, constants, cfg.integrator);
  std::ostringstream csv;
  write_trajectory_csv(csv, trajectory);
  return {csv.str(), dump(to_json(summarize(trajectory)))};
}

int cmd_simulate(const std::string& config_path, const SimulateOverrides& overrides,
                 const std::string& out_path, const std::string& summary_path, std::ostream& out,
                 std::ostream& err) {
  RunConfig cfg = load_run_config(config_path);
  apply_overrides(cfg, overrides);
  const std::string csv_path = out_path.empty() ? cfg.outputs.trajectory : out_path;
  const std::string json_path = summary_path.empty() ? cfg.outputs.summary : summary_path;
  const auto result = simulate(cfg, err);
  emit(csv_path, result.csv, out);
  // With the trajectory on stdout the summary is only written when a path is given.
  if (!json_path.empty()) {
    write_file(json_path, result.summary);
  } else if (!csv_path.empty()) {
    out << result.summary;
  }
  return kExitOk;
}

int cmd_equilibrium(const std::vector<double>& levels, double e, const Support& support_flag,
                    double k, const std::string& out_path, std::ostream& out) {
  const auto spectrum = make_spectrum(levels);
  Support support = support_flag.empty() ? spectrum.full_support() : support_flag;
  std::sort(support.begin(), support.end());
  for (std::size_t i : support) {
    if (i >= spectrum.size()) throw ConfigError("--support index out of range");
  }
  ModelConstants constants;
  try {
    constants = ModelConstants(k, 1.0);
  } catch (const std::invalid_argument& ex) {
    throw ConfigError(ex.what());
  }
  const auto sol = beta_from_energy(e, spectrum, support, constants);
  json j;
  j["beta_limit"] = to_string(sol.limit);
  j["beta"] = sol.limit == BetaLimit::finite ? json(sol.beta) : json(nullptr);
  j["temperature_infinite"] = sol.infinite_temperature;
  j["temperature"] = sol.infinite_temperature ? json(nullptr) : json(sol.temperature);
  j["Z"] = sol.partition.shifted;
  j["Z_shift"] = sol.partition.shift;
  j["log_Z"] = sol.limit == BetaLimit::finite ? json(sol.partition.log_unshifted()) : json(nullptr);
  j["distribution"] = sol.distribution.probs();
  j["entropy"] = entropy(sol.distribution, constants);
  j["energy"] = energy(sol.distribution, spectrum);
  j["support"] = support;
  emit(out_path, dump(j), out);
  return kExitOk;
}

int cmd_diagram(const std::vector<double>& levels, std::size_t samples, const std::string& out_path,
                const std::string& svg_path, std::ostream& out, std::ostream& err) {
  const auto spectrum = make_spectrum(levels);
  if (spectrum.distinct_count() < 2) throw ConfigError("diagram needs at least two distinct levels");
  if (samples < 3) throw ConfigError("--samples must be at least 3");
  const auto curve = smax_curve(spectrum, samples);
  const double violation = curve.concavity_violation();
  if (violation > kConcavityTolerance) {
    err << "error: sampled curve fails the concavity check (violation " << format_number(violation)
        << ")\n";
    return kExitNumeric;
  }
  std::ostringstream csv;
  write_curve_csv(csv, curve);
  emit(out_path, csv.str(), out);
  if (!svg_path.empty()) write_file(svg_path, curve_svg(curve));
  return kExitOk;
}

int cmd_demon(const std::vector<double>& levels, const std::vector<double>& state,
              std::optional<double> e_flag, std::optional<double> s_flag,
              const std::string& out_path, std::ostream& out, std::ostream& err) {
  const auto spectrum = make_spectrum(levels);
  double e = 0.0;
  double s = 0.0;
  if (!state.empty()) {
    if (e_flag || s_flag) throw ConfigError("use either --state or --energy/--entropy, not both");
    if (state.size() != spectrum.size()) throw ConfigError("--state length must match --levels");
    double sum = 0.0;
    for (double p : state) sum += p;
    if (std::abs(sum - 1.0) > kNormalizationTolerance) {
      err << "warning: state probabilities sum to " << format_number(sum) << "; normalizing\n";
    }
    StateDistribution p = [&] {
      try {
        return validate_state(state, Validation::lenient);
      } catch (const std::invalid_argument& ex) {
        throw ConfigError(ex.what());
      }
    }();
    e = energy(p, spectrum);
    s = entropy(p);
  } else {
    if (!e_flag || !s_flag) throw ConfigError("demon needs --state or both --energy and --entropy");
    e = *e_flag;
    s = *s_flag;
  }
  const auto curve = smax_curve(spectrum);
  if (!is_feasible_point(e, s, curve)) throw ConfigError("input (E, S) is not a feasible point");
  const auto verdict = demon_check(e, s, curve);
  json j;
  j["energy"] = e;
  j["entropy"] = s;
  j["feasible"] = verdict.feasible;
  j["branch"] = to_string(verdict.branch);
  if (verdict.feasible) {
    j["witness_energy"] = verdict.witness_energy;
    j["witness_entropy"] = verdict.witness_entropy;
    j["witness_distribution"] = verdict.witness->probs();
  } else {
    j["witness_energy"] = nullptr;
    j["witness_entropy"] = nullptr;
    j["witness_distribution"] = nullptr;
  }
  emit(out_path, dump(j), out);
  return kExitOk;
}

int cmd_criteria(const std::string& name, double q, double alpha, std::uint64_t seed,
                 std::size_t trials, const std::vector<double>& levels, const std::string& out_path,
                 const std::string& table_path, std::ostream& out) {
  EntropyCandidate candidate;
  try {
    candidate = candidate_by_name(name, q, alpha);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (trials < 100) throw ConfigError("--trials must be at least 100");
  const auto spectrum = make_spectrum(levels);
  if (spectrum.distinct_count() < 2) throw ConfigError("criteria need at least two distinct levels");
  const auto report = run_criteria(candidate, spectrum, trials, seed);
  const std::string text = dump(to_json(report));
  emit(out_path, text, out);
  const std::string table = criteria_table(report);
  if (!table_path.empty()) {
    write_file(table_path, table);
  } else if (!out_path.empty()) {
    out << table;
  }
  return kExitOk;
}

int cmd_sweep(const std::string& config_path, const std::string& param,
              const std::vector<double>& values, const std::string& out_dir, unsigned jobs,
              std::ostream& out, std::ostream& err) {
  const RunConfig base = load_run_config(config_path);
  if (values.empty()) throw ConfigError("--values must list at least one value");
  if (param != "tau" && param != "k" && param != "t_end" && param != "step") {
    throw ConfigError("--param must be one of tau, k, t_end, step");
  }
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw ConfigError("cannot create '" + out_dir + "': " + ec.message());

  struct PointResult {
    int code = kExitOk;
    std::string message;
    std::string trajectory;
    std::string summary;
  };
  std::vector<PointResult> results(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    const std::string stem = (std::filesystem::path(out_dir) / (param + "_" + std::to_string(i))).string();
    results[i].trajectory = stem + ".csv";
    results[i].summary = stem + "_summary.json";
  }

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < values.size(); i = next++) {
      RunConfig cfg = base;
      SimulateOverrides o;
      if (param == "tau") o.tau = values[i];
      if (param == "k") o.k = values[i];
      if (param == "t_end") o.t_end = values[i];
      if (param == "step") o.step = values[i];
      std::ostringstream warnings;
      auto& r = results[i];
      try {
        apply_overrides(cfg, o);
        const auto sim = simulate(cfg, warnings);
        write_file(r.trajectory, sim.csv);
        write_file(r.summary, sim.summary);
      } catch (const IntegrationError& e) {
        r.code = kExitNumeric;
        r.message = e.what();
      } catch (const std::exception& e) {
        r.code = kExitUsage;
        r.message = e.what();
      }
      r.message = warnings.str() + r.message;
    }
  };
  const unsigned n_threads =
      std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(values.size())));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < n_threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  json manifest = json::array();
  int code = kExitOk;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const auto& r = results[i];
    if (!r.message.empty()) err << "point " << i << " (" << param << "=" << format_number(values[i]) << "): " << r.message << '\n';
    code = std::max(code, r.code);
    manifest.push_back({{"index", i},
                        {"value", values[i]},
                        {"exit_code", r.code},
                        {"trajectory", r.code == kExitOk ? json(r.trajectory) : json(nullptr)},
                        {"summary", r.code == kExitOk ? json(r.summary) : json(nullptr)}});
  }
  json j = {{"param", param}, {"points", manifest}};
  write_file((std::filesystem::path(out_dir) / "sweep.json").string(), dump(j));
  out << dump(j);
  return code;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Steepest-entropy-ascent thermodynamics toolkit", "seathermo"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "seathermo 0.1.0");

  std::string config_path;
  std::string out_path;
  std::uint64_t seed = 0;

  // simulate
  SimulateOverrides ov;
  std::string summary_path;
  auto* sim = app.add_subcommand("simulate", "Integrate the rate law from a JSON config");
  sim->add_option("--config", config_path, "Run configuration (JSON)")->required()->check(CLI::ExistingFile);
  sim->add_option("--out", out_path, "Trajectory CSV (default: config outputs.trajectory, else stdout)");
  sim->add_option("--summary", summary_path, "Summary JSON path");
  sim->add_option("--tau", ov.tau, "Relaxation time");
  sim->add_option("--k", ov.k, "Boltzmann constant");
  sim->add_option("--t-end", ov.t_end, "Final time (negative integrates backward)");
  sim->add_option("--step", ov.step, "Step size (rk4) or initial step (rk45)");
  sim->add_option("--method", ov.method, "rk4 or rk45");
  sim->add_option("--stride", ov.stride, "Keep every n-th step");
  sim->add_flag("--allow-backward", ov.allow_backward, "Permit t_end < 0");
  sim->add_option("--seed", seed, "Accepted for uniformity; simulation is deterministic");

  // equilibrium
  std::vector<double> levels;
  double e_value = 0.0;
  Support support;
  double k_value = 1.0;
  auto* eq = app.add_subcommand("equilibrium", "Canonical state at a given energy");
  eq->add_option("--levels", levels, "Energy levels, comma separated")->required()->delimiter(',');
  eq->add_option("--energy", e_value, "Mean energy")->required();
  eq->add_option("--support", support, "Restrict to these level indices")->delimiter(',');
  eq->add_option("--k", k_value, "Boltzmann constant");
  eq->add_option("--out", out_path, "Output JSON (default stdout)");

  // diagram
  std::size_t samples = 512;
  std::string svg_path;
  auto* dia = app.add_subcommand("diagram", "Sample the stable-equilibrium boundary S_max(E)");
  dia->add_option("--levels", levels, "Energy levels, comma separated")->required()->delimiter(',');
  dia->add_option("--samples", samples, "Number of samples");
  dia->add_option("--out", out_path, "Output CSV (default stdout)");
  dia->add_option("--svg", svg_path, "Also write an SVG rendering");

  // demon
  std::vector<double> state;
  std::optional<double> demon_e;
  std::optional<double> demon_s;
  auto* dem = app.add_subcommand("demon", "Is there a state with lower energy and no lower entropy?");
  dem->add_option("--levels", levels, "Energy levels, comma separated")->required()->delimiter(',');
  dem->add_option("--state", state, "Probabilities, comma separated")->delimiter(',');
  dem->add_option("--energy", demon_e, "Energy of the query point");
  dem->add_option("--entropy", demon_s, "Entropy of the query point");
  dem->add_option("--out", out_path, "Output JSON (default stdout)");

  // criteria
  std::string candidate;
  double q = 2.0;
  double alpha = 2.0;
  std::size_t trials = 200;
  std::vector<double> criteria_levels{0.0, 1.0, 2.0};
  std::string table_path;
  std::uint64_t criteria_seed = 20240917;
  auto* cri = app.add_subcommand("criteria", "Test an entropy functional against the criteria");
  cri->add_option("--candidate", candidate, "shannon, tsallis, renyi, hartley or quadratic")->required();
  cri->add_option("--q", q, "Tsallis index");
  cri->add_option("--alpha", alpha, "Renyi order");
  cri->add_option("--seed", criteria_seed, "Random seed");
  cri->add_option("--trials", trials, "Random trials per sampled criterion (>= 100)");
  cri->add_option("--levels", criteria_levels, "Energy levels, comma separated")->delimiter(',');
  cri->add_option("--out", out_path, "Report JSON (default stdout)");
  cri->add_option("--table", table_path, "Human-readable table");

  // sweep
  std::string param;
  std::vector<double> values;
  std::string out_dir;
  unsigned jobs = std::max(1u, std::thread::hardware_concurrency());
  auto* swp = app.add_subcommand("sweep", "Run one simulation per parameter value");
  swp->add_option("--config", config_path, "Base run configuration (JSON)")->required()->check(CLI::ExistingFile);
  swp->add_option("--param", param, "tau, k, t_end or step")->required();
  swp->add_option("--values", values, "Values, comma separated")->required()->delimiter(',');
  swp->add_option("--out-dir", out_dir, "Directory for per-point files")->required();
  swp->add_option("--jobs", jobs, "Concurrent points");
  swp->add_option("--seed", seed, "Accepted for uniformity; simulation is deterministic");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << "seathermo 0.1.0\n";
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    // Help requested on a subcommand surfaces here too.
    if (e.get_exit_code() == 0) {
      for (auto* sub : app.get_subcommands()) out << sub->help();
      if (app.get_subcommands().empty()) out << app.help();
      return kExitOk;
    }
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (*sim) return cmd_simulate(config_path, ov, out_path, summary_path, out, err);
    if (*eq) return cmd_equilibrium(levels, e_value, support, k_value, out_path, out);
    if (*dia) return cmd_diagram(levels, samples, out_path, svg_path, out, err);
    if (*dem) return cmd_demon(levels, state, demon_e, demon_s, out_path, out, err);
    if (*cri) {
      return cmd_criteria(candidate, q, alpha, criteria_seed, trials, criteria_levels, out_path,
                          table_path, out);
    }
    if (*swp) return cmd_sweep(config_path, param, values, out_dir, jobs, out, err);
  } catch (const IntegrationError& e) {
    err << "error: integration aborted: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::domain_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitNumeric;
  }
  return kExitUsage;
}

}  // namespace sea::cli
