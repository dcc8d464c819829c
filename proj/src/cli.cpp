#include "eitcool/cli.hpp"

#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "eitcool/analytic_rates.hpp"
#include "eitcool/atom_model.hpp"
#include "eitcool/errors.hpp"
#include "eitcool/fluctuation_spectrum.hpp"
#include "eitcool/full_lindblad.hpp"
#include "eitcool/internal_dynamics.hpp"
#include "eitcool/output.hpp"

namespace eitcool {

using nlohmann::json;

namespace {

struct Options {
  std::string scenario;
  std::string out_path;
  std::string format;
  std::string report_path;

  // spectrum
  std::optional<double> dmin, dmax;
  int points = 401;

  // conditions
  std::optional<double> delta1, omega1, omega2, omega3;

  // rates
  bool numeric = false;

  // cool
  std::string method = "full";
  std::optional<double> t_max, substep;
  int samples = 120;
  bool linear = false;
  int quadrature = 8;

  // preset
  bool list = false;
  std::string name;
};

json number_or_null(std::optional<double> x) {
  if (x && std::isfinite(*x)) return *x;
  return nullptr;
}

class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw ConfigError("cannot open output file '" + path + "'");
    }
    stream_ = path.empty() ? &fallback : &file_;
  }
  std::ostream& stream() { return *stream_; }

 private:
  std::ofstream file_;
  std::ostream* stream_;
};

void write_json_file(const std::string& path, const json& j) {
  std::ofstream f(path);
  if (!f) throw ConfigError("cannot open report file '" + path + "'");
  f << j.dump(2) << '\n';
}

Scenario require_scenario(const Options& o) {
  if (o.scenario.empty()) throw ConfigError("--scenario is required (preset name or scenario file)");
  return resolve_scenario(o.scenario);
}

double first_coupling_detuning(const Scenario& s) { return s.lowers.at(s.coupling_indices().front()).drive.detuning; }

std::optional<RateCoefficients> try_analytic(const Scenario& s) {
  try {
    return rate_coefficients(s);
  } catch (const PreconditionError&) {
    return std::nullopt;
  }
}

json rates_json(const RateCoefficients& r) {
  json j{{"a_plus", r.a_plus}, {"a_minus", r.a_minus}};
  if (r.a_minus > r.a_plus) {
    const auto f = cooling_rate_and_limit(r);
    j["w"] = f.w;
    j["n_ss"] = f.n_ss;
  } else {
    j["w"] = r.a_minus - r.a_plus;
    j["n_ss"] = nullptr;
  }
  return j;
}

// ---------------------------------------------------------------------------

void cmd_spectrum(const Options& o, std::ostream& out) {
  const Scenario s = require_scenario(o);
  const double d1 = first_coupling_detuning(s);
  const double nu = s.trap.frequency;
  const double lo = d1 + o.dmin.value_or(-2.0 * nu);
  const double hi = d1 + o.dmax.value_or(2.0 * nu);
  const SpectrumTrace trace = absorption_sweep(s, lo, hi, o.points);

  json report{{"delta1", d1}, {"nu", nu}};
  if (o.points >= 3) {
    const auto features = find_spectrum_features(s, trace);
    report["features"] = to_json(features);
    json rel = json::array();
    for (double z : features.zeros) rel.push_back(z - d1);
    report["zeros_relative"] = rel;
    json relmax = json::array();
    for (double m : features.maxima) relmax.push_back(m - d1);
    report["maxima_relative"] = relmax;
  }
  if (!o.report_path.empty()) write_json_file(o.report_path, report);

  Sink sink(o.out_path, out);
  if (o.format == "json") {
    json pts = json::array();
    for (const auto& p : trace.points) pts.push_back({p.delta3, p.absorption});
    report["points"] = pts;
    sink.stream() << report.dump(2) << '\n';
  } else {
    write_spectrum_csv(sink.stream(), trace);
  }
}

void cmd_conditions(const Options& o, std::ostream& out) {
  json j;
  if (!o.scenario.empty()) {
    const Scenario s = resolve_scenario(o.scenario);
    if (s.num_lowers() > 3) throw PreconditionError("optimal conditions are defined for two or three lower levels");
    const auto c = s.coupling_indices();
    const auto& first = s.lowers[c[0]].drive;
    const double omega2 = c.size() > 1 ? s.lowers[c[1]].drive.rabi : 0.0;
    const auto cond = optimal_conditions(first.detuning, first.rabi, omega2, s.cooling().drive.rabi);
    j = {{"delta1", first.detuning}, {"delta2", cond.delta2}, {"delta3", cond.delta3}, {"nu", cond.nu},
         {"trap_residual", trap_matched_residual(s)}};
  } else {
    if (!o.delta1 || !o.omega1 || !o.omega3)
      throw ConfigError("conditions needs --scenario or --delta1, --omega1, --omega3 (and optionally --omega2)");
    const auto cond = optimal_conditions(*o.delta1, *o.omega1, o.omega2.value_or(0.0), *o.omega3);
    j = {{"delta1", *o.delta1}, {"delta2", cond.delta2}, {"delta3", cond.delta3}, {"nu", cond.nu}};
  }
  Sink sink(o.out_path, out);
  sink.stream() << j.dump(2) << '\n';
}

void cmd_rates(const Options& o, std::ostream& out) {
  const Scenario s = require_scenario(o);
  const auto analytic = try_analytic(s);
  std::optional<double> nu_opt, residual;
  if (s.num_lowers() <= 3) {
    try {
      residual = trap_matched_residual(s);
      nu_opt = s.trap.frequency * (1.0 - *residual);
    } catch (const DomainError&) {
      // Negative coupling detuning: no matched trap frequency.
    }
  }

  json j;
  if (o.numeric) {
    const RateCoefficients num = numeric_rates(s);
    j = rates_json(num);
    j["method"] = "regression";
    std::optional<double> diff;
    if (analytic) {
      const double scale = std::max(analytic->a_minus, std::abs(analytic->a_plus));
      if (scale > 0.0)
        diff = std::max(std::abs(num.a_plus - analytic->a_plus), std::abs(num.a_minus - analytic->a_minus)) / scale;
    }
    j["residual_regression_vs_analytic"] = number_or_null(diff);
  } else {
    if (!analytic)
      throw PreconditionError("closed-form rates need M <= 3 and Delta_3 = Delta_1; rerun with --numeric");
    j = rates_json(*analytic);
    j["method"] = "analytic";
  }
  j["nu_optimal"] = number_or_null(nu_opt);
  j["trap_residual"] = number_or_null(residual);
  Sink sink(o.out_path, out);
  sink.stream() << j.dump(2) << '\n';
}

CoolingTrace rate_equation_trace(const RateCoefficients& r, const Scenario& s, double t_max, int samples,
                                 bool linear, std::ostream& err) {
  const auto p0 = MotionalDistribution::thermal(s.initial_mean_n, static_cast<std::size_t>(s.trap.fock_cutoff));
  CoolingTrace trace;
  std::vector<std::string> warnings;
  for (int i = 0; i < samples; ++i) {
    double t = 0.0;
    if (i > 0) {
      t = linear ? t_max * i / (samples - 1)
                 : t_max * std::pow(10.0, -4.0 * static_cast<double>(samples - 1 - i) / (samples - 2));
    }
    const auto p = rate_equation_evolve(r, p0, t, i == samples - 1 ? &warnings : nullptr);
    trace.samples.push_back({t, p.mean(), std::nan(""), std::abs(p.total() - 1.0), 0.0, 0.0});
  }
  for (const auto& w : warnings) err << "warning: " << w << '\n';
  return trace;
}

void cmd_cool(const Options& o, std::ostream& out, std::ostream& err) {
  const Scenario s = require_scenario(o);
  if (o.method != "full" && o.method != "rate") throw ConfigError("--method must be full or rate");
  const auto analytic = try_analytic(s);
  std::optional<CoolingFigures> figures;
  if (analytic && analytic->a_minus > analytic->a_plus) figures = cooling_rate_and_limit(*analytic);

  double t_max = 0.0;
  if (o.t_max) {
    t_max = *o.t_max;
  } else if (figures) {
    t_max = 30.0 / figures->w;
  } else {
    throw ConfigError("--t-max is required when no analytic cooling rate is available for this scenario");
  }

  CoolingTrace trace;
  double n_ss = 0.0;
  if (o.method == "full") {
    FullModelOptions mopts;
    mopts.quadrature_nodes = o.quadrature;
    const FullModel model = build_full_model(s, mopts);
    std::vector<std::string> warnings;
    const DensityOperator rho0 =
        thermal_state(model.space, s.initial_mean_n, static_cast<int>(s.initial_internal_state), &warnings);
    for (const auto& w : warnings) err << "warning: " << w << '\n';
    n_ss = steady_state_full(model).n_ss;
    EvolveOptions eopts;
    eopts.t_max = t_max;
    eopts.n_samples = o.samples;
    eopts.substep = o.substep;
    eopts.log_spacing = !o.linear;
    trace = evolve(model.generator, model.space, rho0, eopts);
  } else {
    if (!analytic) throw PreconditionError("--method rate needs closed-form rates (M <= 3, Delta_3 = Delta_1)");
    if (!figures) throw HeatingRegimeError("--method rate: A- <= A+, the rate equation has no cooling limit");
    n_ss = figures->n_ss;
    trace = rate_equation_trace(*analytic, s, t_max, std::max(o.samples, 3), o.linear, err);
  }

  std::optional<double> fitted;
  try {
    fitted = fit_cooling_rate(trace, n_ss);
  } catch (const NumericalError& e) {
    err << "warning: " << e.what() << '\n';
  }
  json summary{{"method", o.method},
               {"t_max", t_max},
               {"n_ss", n_ss},
               {"fitted_rate", number_or_null(fitted)},
               {"analytic_w", number_or_null(figures ? std::optional<double>(figures->w) : std::nullopt)},
               {"analytic_n_ss", number_or_null(figures ? std::optional<double>(figures->n_ss) : std::nullopt)}};
  if (!o.report_path.empty()) write_json_file(o.report_path, summary);

  Sink sink(o.out_path, out);
  if (o.format == "json") {
    sink.stream() << summary.dump(2) << '\n';
  } else {
    write_cooling_csv(sink.stream(), trace);
  }
}

void cmd_preset(const Options& o, std::ostream& out) {
  Sink sink(o.out_path, out);
  if (o.list || o.name.empty()) {
    for (const auto& n : preset_names()) sink.stream() << n << '\n';
    return;
  }
  sink.stream() << serialize(preset(o.name)) << '\n';
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Double-EIT ground-state cooling simulator"};
  app.require_subcommand(1);
  Options o;

  auto add_common = [&](CLI::App* sub, bool with_format) {
    sub->add_option("--scenario", o.scenario, "Preset name or scenario JSON file");
    sub->add_option("--out", o.out_path, "Write data to this file instead of stdout");
    if (with_format)
      sub->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
  };

  auto* spectrum = app.add_subcommand("spectrum", "Cooling-laser absorption spectrum");
  add_common(spectrum, true);
  spectrum->add_option("--dmin", o.dmin, "Lower sweep bound, offset from Delta_1");
  spectrum->add_option("--dmax", o.dmax, "Upper sweep bound, offset from Delta_1");
  spectrum->add_option("--points", o.points, "Number of grid points")->check(CLI::Range(2, 1000000));
  spectrum->add_option("--report", o.report_path, "Write the feature report JSON here");

  auto* conditions = app.add_subcommand("conditions", "Optimal detunings and trap frequency");
  add_common(conditions, false);
  conditions->add_option("--delta1", o.delta1);
  conditions->add_option("--omega1", o.omega1);
  conditions->add_option("--omega2", o.omega2);
  conditions->add_option("--omega3", o.omega3);

  auto* rates = app.add_subcommand("rates", "Heating/cooling coefficients");
  add_common(rates, false);
  rates->add_flag("--numeric", o.numeric, "Evaluate the fluctuation spectrum instead of the closed form");

  auto* cool = app.add_subcommand("cool", "Cooling dynamics");
  add_common(cool, true);
  cool->add_option("--method", o.method, "full (master equation) or rate (rate equation)")
      ->check(CLI::IsMember({"full", "rate"}));
  cool->add_option("--t-max", o.t_max, "Final time (default 30 / W_analytic)");
  cool->add_option("--samples", o.samples, "Approximate number of samples")->check(CLI::Range(2, 100000));
  cool->add_option("--substep", o.substep, "Upper bound on the propagator step");
  cool->add_flag("--linear", o.linear, "Linear instead of logarithmic time sampling");
  cool->add_option("--quadrature", o.quadrature, "Angular quadrature nodes")->check(CLI::Range(1, 64));
  cool->add_option("--report", o.report_path, "Write the summary JSON here");

  auto* presets = app.add_subcommand("preset", "List or print built-in scenarios");
  presets->add_flag("--list", o.list, "List preset names");
  presets->add_option("--name", o.name, "Print this preset as a scenario document");
  presets->add_option("--out", o.out_path, "Write to this file instead of stdout");

  std::vector<std::string> argv_storage{"eitcool"};
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_storage) argv.push_back(a.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }

  try {
    if (*spectrum) {
      if (o.format.empty()) o.format = "csv";
      cmd_spectrum(o, out);
    } else if (*conditions) {
      cmd_conditions(o, out);
    } else if (*rates) {
      cmd_rates(o, out);
    } else if (*cool) {
      if (o.format.empty()) o.format = "csv";
      cmd_cool(o, out, err);
    } else if (*presets) {
      cmd_preset(o, out);
    }
  } catch (const NumericalError& e) {
    err << "numerical error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const HeatingRegimeError& e) {
    err << "error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  return kExitOk;
}

}  // namespace eitcool
