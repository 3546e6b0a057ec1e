#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include "cli.hpp"
#include "sea/equilibrium.hpp"

namespace sea::cli {

using nlohmann::json;

namespace {

double number_field(const json& obj, const char* key, double fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj.at(key).is_number()) throw ConfigError(std::string("config: '") + key + "' must be a number");
  return obj.at(key).get<double>();
}

json number_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

}  // namespace

RunConfig parse_run_config(const json& j) {
  if (!j.is_object()) throw ConfigError("config: top level must be an object");
  RunConfig cfg;
  try {
    if (!j.contains("spectrum")) throw ConfigError("config: 'spectrum' is required");
    cfg.spectrum = j.at("spectrum").get<std::vector<double>>();

    if (!j.contains("initial")) throw ConfigError("config: 'initial' is required");
    const json& init = j.at("initial");
    if (init.is_array()) {
      cfg.initial = init.get<std::vector<double>>();
    } else if (init.is_object() && init.size() == 1 && init.contains("canonical")) {
      cfg.initial = CanonicalInit{init.at("canonical").get<double>()};
    } else if (init.is_object() && init.size() == 1 && init.contains("uniform")) {
      cfg.initial = UniformInit{init.at("uniform").get<Support>()};
    } else {
      throw ConfigError(
          "config: 'initial' must be a probability list, {\"canonical\": beta} or {\"uniform\": [indices]}");
    }

    if (j.contains("constants")) {
      const json& c = j.at("constants");
      cfg.k = number_field(c, "k", cfg.k);
      cfg.tau = number_field(c, "tau", cfg.tau);
    }

    if (j.contains("integrator")) {
      const json& in = j.at("integrator");
      if (in.contains("method")) {
        const auto m = in.at("method").get<std::string>();
        if (m == "rk4") {
          cfg.integrator.method = IntegrationMethod::rk4;
        } else if (m == "rk45") {
          cfg.integrator.method = IntegrationMethod::rk45;
        } else {
          throw ConfigError("config: integrator.method must be 'rk4' or 'rk45'");
        }
      }
      if (in.contains("step")) cfg.integrator.step = number_field(in, "step", 0.0);
      cfg.integrator.tolerance = number_field(in, "tolerance", cfg.integrator.tolerance);
      cfg.integrator.t_end = number_field(in, "t_end", cfg.integrator.t_end);
      if (in.contains("sample_stride")) {
        cfg.integrator.sample_stride = in.at("sample_stride").get<std::size_t>();
      }
      if (in.contains("allow_backward")) cfg.integrator.allow_backward = in.at("allow_backward").get<bool>();
    }

    if (j.contains("outputs")) {
      const json& o = j.at("outputs");
      if (o.contains("trajectory")) cfg.outputs.trajectory = o.at("trajectory").get<std::string>();
      if (o.contains("summary")) cfg.outputs.summary = o.at("summary").get<std::string>();
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return cfg;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config '" + path + "': " + e.what());
  }
  return parse_run_config(j);
}

StateDistribution build_initial(const RunConfig& config, const EnergySpectrum& spectrum,
                                std::ostream& warn) {
  try {
    if (const auto* probs = std::get_if<std::vector<double>>(&config.initial)) {
      if (probs->size() != spectrum.size()) {
        throw ConfigError("config: initial state has " + std::to_string(probs->size()) +
                          " entries but the spectrum has " + std::to_string(spectrum.size()));
      }
      double sum = 0.0;
      for (double p : *probs) sum += p;
      if (std::abs(sum - 1.0) > kNormalizationTolerance) {
        warn << "warning: initial probabilities sum to " << format_number(sum) << "; normalizing\n";
      }
      return validate_state(*probs, Validation::lenient);
    }
    if (const auto* c = std::get_if<CanonicalInit>(&config.initial)) {
      return canonical_distribution(c->beta, spectrum, spectrum.full_support());
    }
    const auto& u = std::get<UniformInit>(config.initial);
    if (u.support.empty()) throw ConfigError("config: uniform support must be non-empty");
    std::vector<double> p(spectrum.size(), 0.0);
    for (std::size_t i : u.support) {
      if (i >= spectrum.size()) throw ConfigError("config: uniform support index out of range");
      p[i] = 1.0;
    }
    return validate_state(p, Validation::lenient);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

std::string format_number(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& trajectory) {
  const std::size_t n = trajectory.spectrum.size();
  os << "t";
  for (std::size_t i = 1; i <= n; ++i) os << ",p_" << i;
  os << ",E,S,dSdt\n";
  for (const auto& pt : trajectory.points) {
    os << format_number(pt.t);
    for (double p : pt.state.probs()) os << ',' << format_number(p);
    os << ',' << format_number(pt.energy) << ',' << format_number(pt.entropy) << ','
       << format_number(pt.entropy_rate) << '\n';
  }
}

SimulationSummary summarize(const Trajectory& trajectory) {
  if (trajectory.points.empty()) throw std::invalid_argument("summarize: empty trajectory");
  const auto& spectrum = trajectory.spectrum;
  // Backward runs store the initial state last.
  const auto& first = trajectory.points.front().t == 0.0 ? trajectory.points.front()
                                                         : trajectory.points.back();
  const auto& last = trajectory.points.front().t == 0.0 ? trajectory.points.back()
                                                        : trajectory.points.front();
  const auto reference = beta_from_energy(first.energy, spectrum, first.state.support(),
                                          trajectory.constants);
  SimulationSummary s;
  s.final_state.assign(last.state.probs().begin(), last.state.probs().end());
  s.beta_of_e = reference.beta;
  s.beta_limit = reference.limit;
  s.linf_to_canonical = linf_distance(last.state.probs(), reference.distribution.probs());
  s.linf_to_canonical_initial = linf_distance(first.state.probs(), reference.distribution.probs());
  s.min_dsdt = first.entropy_rate;
  for (const auto& pt : trajectory.points) {
    s.max_energy_drift = std::max(s.max_energy_drift, std::abs(pt.energy - first.energy));
    double trace = 0.0;
    for (double p : pt.state.probs()) trace += p;
    s.max_trace_drift = std::max(s.max_trace_drift, std::abs(trace - 1.0));
    s.min_dsdt = std::min(s.min_dsdt, pt.entropy_rate);
  }
  return s;
}

json to_json(const SimulationSummary& s) {
  json j;
  j["final_state"] = s.final_state;
  j["beta_of_E"] = number_or_null(s.beta_of_e);
  j["beta_limit"] = to_string(s.beta_limit);
  j["L_inf_to_canonical"] = s.linf_to_canonical;
  j["L_inf_to_canonical_initial"] = s.linf_to_canonical_initial;
  j["max_energy_drift"] = s.max_energy_drift;
  j["max_trace_drift"] = s.max_trace_drift;
  j["min_dSdt"] = s.min_dsdt;
  return j;
}

json to_json(const CriteriaReport& report) {
  json j;
  j["candidate"] = report.candidate;
  j["parameters"] = json::object();
  for (const auto& [k, v] : report.parameters) j["parameters"][k] = v;
  j["seed"] = report.seed;
  j["trials"] = report.trials;
  j["levels"] = report.levels;
  j["passes_all"] = report.passes_all();
  j["criteria"] = json::array();
  for (const auto& r : report.results) {
    json c;
    c["id"] = r.id;
    c["name"] = r.name;
    c["verdict"] = to_string(r.verdict);
    c["detail"] = r.detail;
    if (r.counterexample) {
      const auto& cx = *r.counterexample;
      c["counterexample"] = {{"check", cx.check},
                             {"distributions", cx.distributions},
                             {"spectra", cx.spectra},
                             {"inputs", cx.inputs},
                             {"observed", cx.observed}};
    } else {
      c["counterexample"] = nullptr;
    }
    j["criteria"].push_back(std::move(c));
  }
  return j;
}

std::string criteria_table(const CriteriaReport& report) {
  std::ostringstream os;
  os << "candidate: " << report.candidate;
  for (const auto& [k, v] : report.parameters) os << ' ' << k << '=' << format_number(v);
  os << "  (seed " << report.seed << ", " << report.trials << " trials)\n";
  for (const auto& r : report.results) {
    char head[64];
    std::snprintf(head, sizeof head, "  (%d) %-15s ", r.id, to_string(r.verdict));
    os << head << r.name << "\n        " << r.detail << '\n';
  }
  os << (report.passes_all() ? "result: no criterion failed\n" : "result: FAILED\n");
  return os.str();
}

void write_curve_csv(std::ostream& os, const DiagramCurve& curve) {
  os << "E,S,beta\n";
  for (const auto& s : curve.samples()) {
    os << format_number(s.energy) << ',' << format_number(s.entropy) << ',' << format_number(s.beta)
       << '\n';
  }
}

std::string curve_svg(const DiagramCurve& curve) {
  constexpr double width = 640.0;
  constexpr double height = 400.0;
  constexpr double margin = 48.0;
  const auto& spectrum = curve.spectrum();
  const double e_lo = spectrum.min();
  const double e_hi = spectrum.range() > 0.0 ? spectrum.max() : spectrum.min() + 1.0;
  const double s_hi = std::max(curve.peak().entropy, 1e-12) * 1.05;
  auto x = [&](double e) { return margin + (e - e_lo) / (e_hi - e_lo) * (width - 2 * margin); };
  auto y = [&](double s) { return height - margin - s / s_hi * (height - 2 * margin); };
  auto fmt = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    return std::string(buf);
  };

  std::ostringstream os;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
     << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
     << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n"
     << "  <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
     << "  <line x1=\"" << margin << "\" y1=\"" << height - margin << "\" x2=\"" << width - margin
     << "\" y2=\"" << height - margin << "\" stroke=\"black\"/>\n"
     << "  <line x1=\"" << margin << "\" y1=\"" << height - margin << "\" x2=\"" << margin
     << "\" y2=\"" << margin << "\" stroke=\"black\"/>\n"
     << "  <text x=\"" << width / 2 << "\" y=\"" << height - 12 << "\" text-anchor=\"middle\">E</text>\n"
     << "  <text x=\"16\" y=\"" << height / 2 << "\" text-anchor=\"middle\">S</text>\n"
     << "  <line class=\"zero-entropy\" x1=\"" << fmt(x(e_lo)) << "\" y1=\"" << fmt(y(0.0))
     << "\" x2=\"" << fmt(x(e_hi)) << "\" y2=\"" << fmt(y(0.0))
     << "\" stroke=\"steelblue\" stroke-width=\"3\"/>\n"
     << "  <polyline class=\"smax\" fill=\"none\" stroke=\"firebrick\" stroke-width=\"2\" points=\"";
  bool first = true;
  for (const auto& s : curve.samples()) {
    if (!first) os << ' ';
    os << fmt(x(s.energy)) << ',' << fmt(y(s.entropy));
    first = false;
  }
  os << "\"/>\n</svg>\n";
  return os.str();
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

}  // namespace sea::cli
