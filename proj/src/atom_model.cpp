#include "eitcool/atom_model.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "eitcool/errors.hpp"

namespace eitcool {

using nlohmann::json;

double DecayChannel::angular_second_moment() const {
  switch (profile) {
    case AngularProfile::isotropic:
      return 1.0 / 3.0;
    case AngularProfile::dipole:
      return 2.0 / 5.0;
    case AngularProfile::custom:
      return custom_second_moment;
  }
  return custom_second_moment;
}

std::vector<std::size_t> Scenario::coupling_indices() const {
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < lowers.size(); ++j)
    if (j != cooling_index) out.push_back(j);
  return out;
}

double Scenario::relevant_lamb_dicke() const {
  const auto couplings = coupling_indices();
  return lowers.at(couplings.front()).drive.lamb_dicke_projection - cooling().drive.lamb_dicke_projection;
}

Scenario Scenario::with_cooling_detuning(double delta) const {
  Scenario out = *this;
  out.lowers.at(cooling_index).drive.detuning = delta;
  return out;
}

Scenario Scenario::scaled(double s) const {
  Scenario out = *this;
  for (auto& l : out.lowers) {
    l.drive.rabi *= s;
    l.drive.detuning *= s;
    l.decay.rate *= s;
  }
  out.trap.frequency *= s;
  return out;
}

namespace {

[[noreturn]] void invalid(const std::string& path, const std::string& invariant, double got) {
  std::ostringstream msg;
  msg << path << ": invariant " << invariant << " violated (got " << got << ")";
  throw ValidationError(msg.str());
}

std::string lower_path(std::size_t j, const char* field) {
  return "lowers[" + std::to_string(j) + "]." + field;
}

}  // namespace

void validate(const Scenario& s) {
  const std::size_t m = s.lowers.size();
  if (m < 2 || m > 4) invalid("lowers", "2 <= M <= 4", static_cast<double>(m));
  bool any_decay = false;
  for (std::size_t j = 0; j < m; ++j) {
    const auto& l = s.lowers[j];
    if (!std::isfinite(l.drive.rabi) || l.drive.rabi < 0.0) invalid(lower_path(j, "rabi"), "rabi >= 0", l.drive.rabi);
    if (!std::isfinite(l.drive.detuning)) invalid(lower_path(j, "detuning"), "finite detuning", l.drive.detuning);
    if (!(std::abs(l.drive.lamb_dicke_projection) < 1.0))
      invalid(lower_path(j, "lamb_dicke_projection"), "|lamb_dicke_projection| < 1", l.drive.lamb_dicke_projection);
    if (!std::isfinite(l.decay.rate) || l.decay.rate < 0.0)
      invalid(lower_path(j, "decay.rate"), "rate >= 0", l.decay.rate);
    const double alpha = l.decay.angular_second_moment();
    if (!(alpha >= 0.0 && alpha <= 1.0))
      invalid(lower_path(j, "decay.angular_second_moment"), "0 <= alpha <= 1", alpha);
    any_decay = any_decay || l.decay.rate > 0.0;
  }
  if (!any_decay) invalid("lowers[*].decay.rate", "at least one decay rate > 0", 0.0);
  if (s.cooling_index >= m) invalid("cooling_index", "cooling_index names a lower level", static_cast<double>(s.cooling_index + 1));
  if (!(s.trap.frequency > 0.0) || !std::isfinite(s.trap.frequency))
    invalid("trap.frequency", "frequency > 0", s.trap.frequency);
  if (s.trap.fock_cutoff < 2) invalid("trap.fock_cutoff", "fock_cutoff >= 2", s.trap.fock_cutoff);
  if (!(s.initial_mean_n >= 0.0) || !std::isfinite(s.initial_mean_n))
    invalid("initial.mean_n", "mean_n >= 0", s.initial_mean_n);
  if (s.initial_internal_state >= m)
    invalid("initial.internal_state", "internal_state names a lower level", static_cast<double>(s.initial_internal_state + 1));
}

// ---------------------------------------------------------------------------
// JSON document
// ---------------------------------------------------------------------------

namespace {

void require_object(const json& j, const std::string& path) {
  if (!j.is_object()) throw ConfigError(path + ": expected an object");
}

void reject_unknown(const json& j, const std::string& path, std::initializer_list<const char*> known) {
  for (const auto& [key, value] : j.items()) {
    if (std::none_of(known.begin(), known.end(), [&](const char* k) { return key == k; }))
      throw ConfigError(path + (path.empty() ? "" : ".") + key + ": unknown field");
  }
}

std::string join(const std::string& path, const char* key) { return path.empty() ? key : path + "." + key; }

double number(const json& obj, const char* key, const std::string& path) {
  if (!obj.contains(key)) throw ConfigError(join(path, key) + ": required field missing");
  const json& v = obj.at(key);
  if (!v.is_number()) throw ConfigError(join(path, key) + ": expected a number");
  return v.get<double>();
}

double number_or(const json& obj, const char* key, const std::string& path, double fallback) {
  return obj.contains(key) ? number(obj, key, path) : fallback;
}

long long integer_or(const json& obj, const char* key, const std::string& path, long long fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number_integer()) throw ConfigError(join(path, key) + ": expected an integer");
  return v.get<long long>();
}

std::size_t level_label(long long label, const std::string& path) {
  if (label < 1) throw ValidationError(path + ": invariant level label >= 1 violated (got " + std::to_string(label) + ")");
  return static_cast<std::size_t>(label - 1);
}

DecayChannel parse_decay(const json& j, const std::string& path) {
  require_object(j, path);
  reject_unknown(j, path, {"rate", "angular_profile", "angular_second_moment"});
  DecayChannel d;
  d.rate = number(j, "rate", path);
  if (j.contains("angular_profile")) {
    const json& p = j.at("angular_profile");
    if (!p.is_string()) throw ConfigError(join(path, "angular_profile") + ": expected a string");
    const auto name = p.get<std::string>();
    if (name == "isotropic")
      d.profile = AngularProfile::isotropic;
    else if (name == "dipole")
      d.profile = AngularProfile::dipole;
    else if (name == "custom")
      d.profile = AngularProfile::custom;
    else
      throw ConfigError(join(path, "angular_profile") + ": expected isotropic, dipole or custom");
  }
  if (d.profile == AngularProfile::custom) {
    d.custom_second_moment = number(j, "angular_second_moment", path);
  } else if (j.contains("angular_second_moment")) {
    const double alpha = number(j, "angular_second_moment", path);
    if (std::abs(alpha - d.angular_second_moment()) > 1e-12)
      throw ValidationError(join(path, "angular_second_moment") +
                            ": invariant alpha matches the named angular profile violated (got " +
                            std::to_string(alpha) + ")");
  }
  return d;
}

LowerLevel parse_lower(const json& j, const std::string& path) {
  require_object(j, path);
  reject_unknown(j, path, {"rabi", "detuning", "lamb_dicke_projection", "decay"});
  LowerLevel l;
  l.drive.rabi = number(j, "rabi", path);
  l.drive.detuning = number(j, "detuning", path);
  l.drive.lamb_dicke_projection = number_or(j, "lamb_dicke_projection", path, 0.0);
  if (j.contains("decay")) l.decay = parse_decay(j.at("decay"), join(path, "decay"));
  else l.decay.rate = 0.0;
  return l;
}

const char* profile_name(AngularProfile p) {
  switch (p) {
    case AngularProfile::isotropic:
      return "isotropic";
    case AngularProfile::dipole:
      return "dipole";
    case AngularProfile::custom:
      return "custom";
  }
  return "dipole";
}

}  // namespace

Scenario load_scenario(std::string_view document) {
  json root;
  try {
    root = json::parse(document);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("scenario document is not valid JSON: ") + e.what());
  }
  require_object(root, "<root>");
  reject_unknown(root, "", {"unit_label", "trap", "lowers", "cooling_index", "initial"});

  Scenario s;
  if (root.contains("unit_label")) {
    if (!root.at("unit_label").is_string()) throw ConfigError("unit_label: expected a string");
    s.unit_label = root.at("unit_label").get<std::string>();
  }

  if (!root.contains("trap")) throw ConfigError("trap: required field missing");
  const json& trap = root.at("trap");
  require_object(trap, "trap");
  reject_unknown(trap, "trap", {"frequency", "fock_cutoff"});
  s.trap.frequency = number(trap, "frequency", "trap");
  s.trap.fock_cutoff = static_cast<int>(integer_or(trap, "fock_cutoff", "trap", 10));

  if (!root.contains("lowers")) throw ConfigError("lowers: required field missing");
  const json& lowers = root.at("lowers");
  if (!lowers.is_array()) throw ConfigError("lowers: expected an array");
  for (std::size_t j = 0; j < lowers.size(); ++j)
    s.lowers.push_back(parse_lower(lowers.at(j), "lowers[" + std::to_string(j) + "]"));

  const long long m = static_cast<long long>(s.lowers.size());
  s.cooling_index = level_label(integer_or(root, "cooling_index", "", m), "cooling_index");

  s.initial_internal_state = s.cooling_index;
  if (root.contains("initial")) {
    const json& init = root.at("initial");
    require_object(init, "initial");
    reject_unknown(init, "initial", {"mean_n", "internal_state"});
    s.initial_mean_n = number_or(init, "mean_n", "initial", 1.0);
    s.initial_internal_state = level_label(
        integer_or(init, "internal_state", "initial", static_cast<long long>(s.cooling_index) + 1),
        "initial.internal_state");
  }

  validate(s);
  return s;
}

Scenario load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open scenario file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_scenario(buf.str());
}

json to_json(const Scenario& s) {
  json lowers = json::array();
  for (const auto& l : s.lowers) {
    json decay{{"rate", l.decay.rate}, {"angular_profile", profile_name(l.decay.profile)}};
    if (l.decay.profile == AngularProfile::custom) decay["angular_second_moment"] = l.decay.custom_second_moment;
    lowers.push_back({{"rabi", l.drive.rabi},
                      {"detuning", l.drive.detuning},
                      {"lamb_dicke_projection", l.drive.lamb_dicke_projection},
                      {"decay", decay}});
  }
  return json{{"unit_label", s.unit_label},
              {"trap", {{"frequency", s.trap.frequency}, {"fock_cutoff", s.trap.fock_cutoff}}},
              {"lowers", lowers},
              {"cooling_index", s.cooling_index + 1},
              {"initial", {{"mean_n", s.initial_mean_n}, {"internal_state", s.initial_internal_state + 1}}}};
}

std::string serialize(const Scenario& s) { return to_json(s).dump(2); }

// ---------------------------------------------------------------------------
// Presets
// ---------------------------------------------------------------------------

namespace {

LowerLevel level(double rabi, double detuning, double eta_proj, double gamma) {
  LowerLevel l;
  l.drive = {rabi, detuning, eta_proj};
  l.decay.rate = gamma;
  return l;
}

Scenario tripod(std::string unit, std::vector<LowerLevel> lowers, std::size_t cooling, double nu) {
  Scenario s;
  s.unit_label = std::move(unit);
  s.lowers = std::move(lowers);
  s.cooling_index = cooling;
  s.initial_internal_state = cooling;
  s.trap.frequency = nu;
  return s;
}

// Dressed-state trap frequency that puts the narrow absorption maximum on the
// red sideband (same expression as analytic_rates::optimal_conditions).
double matched_trap_frequency(double delta1, double o1, double o2, double o3) {
  return 0.5 * (std::sqrt(delta1 * delta1 + o1 * o1 + 0.5 * o2 * o2 + o3 * o3) - delta1);
}

Scenario fig2a() {
  const double d1 = 1.0, o1 = 1.0, o2 = 1.0, o3 = 0.05;
  const double nu = matched_trap_frequency(d1, o1, o2, o3);
  const double eta = 0.05;  // free choice; only the time-domain modules read it
  return tripod("gamma3", {level(o1, d1, eta, 0.0), level(o2, d1 - nu, eta, 0.0), level(o3, d1, -eta, 1.0)}, 2, nu);
}

// Triple EIT for two trap frequencies nu1 and nu2 = 1.5 nu1: couplings at the
// carrier and at both blue sidebands. Omega_2 = Omega_4 is chosen so that the
// red-side dressed state sits at Delta_1 + 1.25 nu1, between the two red
// sidebands.
Scenario fig2b() {
  const double d1 = 1.0, o1 = 1.0, o3 = 0.05;
  const double nu1 = 0.2, nu2 = 1.5 * nu1;
  const double d2 = d1 - nu1, d4 = d1 - nu2;
  const double x = d1 + 1.25 * nu1;
  const double oc = std::sqrt((x - o1 * o1 / (4.0 * (x - d1))) / (1.0 / (4.0 * (x - d2)) + 1.0 / (4.0 * (x - d4))));
  const double eta = 0.05;
  return tripod("gamma3",
                {level(o1, d1, eta, 0.0), level(oc, d2, eta, 0.0), level(o3, d1, -eta, 1.0), level(oc, d4, eta, 0.0)},
                2, nu1);
}

// Ca+ (units of gamma_3). Only the combined eta = 0.145 is fixed; split symmetrically.
constexpr double kCaEta = 0.145;

Scenario ca(double o1, double o2, double o3) {
  const double h = kCaEta / 2.0;
  return tripod("gamma3", {level(o1, 2.5, h, 0.0), level(o2, 2.4, h, 0.0), level(o3, 2.5, -h, 1.0)}, 2, 0.1);
}

Scenario ca_single() {
  const double h = kCaEta / 2.0;
  return tripod("gamma3", {level(1.0, 2.5, h, 0.0), level(0.1, 2.5, -h, 1.0)}, 1, 0.1);
}

// Hg+ (MHz): gamma = 69 MHz shared equally by the three lower levels.
Scenario hg(double o1, double o2, double d2) {
  const double g = 69.0 / 3.0;
  return tripod("MHz", {level(o1, 80.0, 0.13, g), level(o2, d2, 0.13, g), level(4.0, 80.0, -0.13, g)}, 2, 1.5);
}

}  // namespace

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names{"fig2a", "fig2b", "ca-i", "ca-ii", "ca-iii", "hg-i", "hg-ii", "hg-iii"};
  return names;
}

Scenario preset(std::string_view name) {
  Scenario s;
  if (name == "fig2a") s = fig2a();
  else if (name == "fig2b") s = fig2b();
  else if (name == "ca-i") s = ca_single();
  else if (name == "ca-ii") s = ca(0.8, 0.8944, 0.1);
  else if (name == "ca-iii") s = ca(0.645, 0.645, 0.645);
  else if (name == "hg-i") s = hg(21.0, 8.0, 0.0);
  else if (name == "hg-ii") s = hg(21.0, 8.0, 80.0 - 1.5);
  // Omega_2 = sqrt(914) MHz makes the trap exactly matched.
  else if (name == "hg-iii") s = hg(4.0, std::sqrt(914.0), 80.0 - 1.5);
  else {
    std::string valid;
    for (const auto& n : preset_names()) valid += (valid.empty() ? "" : ", ") + n;
    throw LookupError("unknown preset '" + std::string(name) + "'; valid names: " + valid);
  }
  validate(s);
  return s;
}

Scenario resolve_scenario(const std::string& source) {
  const auto& names = preset_names();
  if (std::find(names.begin(), names.end(), source) != names.end()) return preset(source);
  if (std::filesystem::exists(source)) return load_scenario_file(source);
  std::string valid;
  for (const auto& n : names) valid += (valid.empty() ? "" : ", ") + n;
  throw LookupError("'" + source + "' is neither a preset (" + valid + ") nor a readable file");
}

}  // namespace eitcool
