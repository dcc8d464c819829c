#pragma once

// Physical parameters of a harmonically trapped atom with one excited level
// |e> dipole-coupled to M = 2..4 lower levels, each driven by its own laser.
//
// All frequencies (Rabi frequencies, detunings, decay rates, trap frequency)
// share one arbitrary unit; the library never converts units. Recoil enters
// only through the dimensionless products eta_j cos(phi_j).
//
// Indices are zero-based in C++. The scenario document uses one-based level
// labels (|1>, |2>, ...), so "cooling_index": 3 there is index 2 here.

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace eitcool {

struct LaserDrive {
  double rabi = 0.0;      ///< Omega_j >= 0
  double detuning = 0.0;  ///< Delta_j = omega^L_j - (omega_e - omega_j)
  double lamb_dicke_projection = 0.0;  ///< eta_j cos(phi_j)

  bool operator==(const LaserDrive&) const = default;
};

enum class AngularProfile { isotropic, dipole, custom };

/// Spontaneous decay |e> -> |j> and the angular distribution N_j(cos theta)
/// of the emitted photon relative to the trap axis.
struct DecayChannel {
  double rate = 0.0;
  AngularProfile profile = AngularProfile::dipole;
  double custom_second_moment = 1.0 / 3.0;  ///< only read for custom profiles

  /// alpha = integral of cos^2(theta) N(theta) over d cos(theta).
  double angular_second_moment() const;

  bool operator==(const DecayChannel&) const = default;
};

struct LowerLevel {
  LaserDrive drive;
  DecayChannel decay;

  bool operator==(const LowerLevel&) const = default;
};

struct Trap {
  double frequency = 0.0;  ///< nu
  int fock_cutoff = 10;    ///< retained harmonic-oscillator levels

  bool operator==(const Trap&) const = default;
};

struct Scenario {
  std::string unit_label;
  std::vector<LowerLevel> lowers;
  std::size_t cooling_index = 0;  ///< which lower level carries the cooling laser
  Trap trap;
  double initial_mean_n = 1.0;
  std::size_t initial_internal_state = 0;

  std::size_t num_lowers() const { return lowers.size(); }
  /// Basis index of |e> in the internal space (after all lower levels).
  std::size_t excited_index() const { return lowers.size(); }
  std::size_t internal_dim() const { return lowers.size() + 1; }

  const LowerLevel& cooling() const { return lowers.at(cooling_index); }
  /// Lower levels other than the cooling one, in document order. For the
  /// tripod these are the coupling level (first) and the second coupling.
  std::vector<std::size_t> coupling_indices() const;

  /// eta = eta_1 cos(phi_1) - eta_3 cos(phi_3): first coupling minus cooling.
  double relevant_lamb_dicke() const;

  /// Copy with the cooling laser detuning replaced.
  Scenario with_cooling_detuning(double delta) const;
  /// Copy with every frequency multiplied by s.
  Scenario scaled(double s) const;

  bool operator==(const Scenario&) const = default;
};

/// Throws ValidationError naming the first violated invariant.
void validate(const Scenario& s);

/// Parses and validates a JSON scenario document.
Scenario load_scenario(std::string_view document);
Scenario load_scenario_file(const std::string& path);

nlohmann::json to_json(const Scenario& s);
std::string serialize(const Scenario& s);

/// Built-in parameter sets: absorption spectra (fig2a, fig2b) and cooling runs
/// for Ca+ (ca-i..iii, units of gamma_3) and Hg+ (hg-i..iii, MHz).
Scenario preset(std::string_view name);
const std::vector<std::string>& preset_names();

/// Preset name or path to a scenario document.
Scenario resolve_scenario(const std::string& source);

}  // namespace eitcool
