#pragma once

// Master equation on internal (x) truncated Fock space.
//
//   H = nu a^dag a + sum_j Delta_j |j><j|
//       + sum_j Omega_j/2 (exp(-i k_j cos(phi_j) x) |e><j| + h.c.),
//   k_j cos(phi_j) x = (eta_j cos phi_j)(a + a^dag),
//
// and spontaneous emission on |e> -> |j> with photon recoil
// exp(i eta_j u (a + a^dag)), u = cos(theta) averaged over N_j(u) by
// Gauss-Legendre quadrature. The recoil Lamb-Dicke factor of channel j is
// |eta_j cos phi_j| (photon wave number along the trap axis).
//
// Phase operators are exponentials of the truncated (a + a^dag), hence
// exactly unitary on the retained levels. Basis index: internal * n_fock + n.

#include <optional>
#include <string>
#include <vector>

#include "eitcool/atom_model.hpp"
#include "eitcool/linalg.hpp"

namespace eitcool {

struct JointSpace {
  int n_internal = 0;
  int n_fock = 0;

  int dim() const { return n_internal * n_fock; }
  static JointSpace of(const Scenario& s) {
    return {static_cast<int>(s.internal_dim()), s.trap.fock_cutoff};
  }
};

struct FullModelOptions {
  int quadrature_nodes = 8;
  int max_dim = 80;
};

/// Emission direction u = cos(theta) with probability weight; weights sum to 1.
struct AngularNode {
  double u = 0.0;
  double weight = 0.0;
};

/// Quadrature for the channel's angular distribution. Dipole (3/8)(1+u^2) and
/// isotropic 1/2 use Gauss-Legendre nodes; a custom second moment alpha is
/// realized as an isotropic part mixed with point masses at u = +-1
/// (alpha > 1/3) or u = 0 (alpha < 1/3), which keeps N(u) >= 0 for every
/// alpha in [0, 1].
std::vector<AngularNode> angular_quadrature(const DecayChannel& channel, int nodes);

/// Truncated a + a^dag.
CMatrix position_operator(int n_fock);
/// exp(i k (a + a^dag)) on the truncated space.
CMatrix phase_operator(double k, int n_fock);

struct FullModel {
  JointSpace space;
  Liouvillian generator;
  double unitarity_error = 0.0;  ///< max |U^dag U - 1| over phase operators
};

/// Throws ResourceError when the joint dimension exceeds options.max_dim.
FullModel build_full_model(const Scenario& s, const FullModelOptions& options = {});
Liouvillian build_full_liouvillian(const Scenario& s, const FullModelOptions& options = {});

/// |internal><internal| (x) thermal state with the given mean phonon number,
/// renormalized over the retained levels. A warning is appended when the
/// discarded tail exceeds 1e-6.
DensityOperator thermal_state(const JointSpace& space, double mean_n, int internal,
                              std::vector<std::string>* warnings = nullptr);

double mean_phonon_number(const JointSpace& space, const CMatrix& rho);
double internal_population(const JointSpace& space, const CMatrix& rho, int internal);

struct EvolveOptions {
  double t_max = 0.0;
  int n_samples = 120;
  /// Upper bound on the propagator step; defaults to t_max / 2^14. The step
  /// actually used divides t_max into a power of two (log sampling) or an
  /// integer number of steps per sample interval (linear sampling).
  std::optional<double> substep;
  bool log_spacing = true;
};

struct CoolingSample {
  double t = 0.0;
  double mean_n = 0.0;
  double pop_e = 0.0;
  double trace_error = 0.0;
  double hermiticity_error = 0.0;
  double min_eigenvalue = 0.0;
};

struct CoolingTrace {
  std::vector<CoolingSample> samples;
  double substep = 0.0;
};

/// Propagates rho0 with P = exp(L dt) built once; longer strides reuse P by
/// repeated squaring. Log sampling places samples per octave of t at integer
/// multiples of dt. Throws NumericalError if |Tr rho - 1| exceeds 1e-6.
CoolingTrace evolve(const Liouvillian& l, const JointSpace& space, const DensityOperator& rho0,
                    const EvolveOptions& options);

struct FullSteadyState {
  DensityOperator rho;
  double n_ss = 0.0;
  double residual = 0.0;
};

FullSteadyState steady_state_full(const FullModel& model);

/// Least-squares slope of ln|<n>(t) - n_ss| over samples whose relative
/// excess (<n> - n_ss)/(<n>(0) - n_ss) lies in [lo, hi]. Throws
/// NumericalError with fewer than three usable samples.
double fit_cooling_rate(const CoolingTrace& trace, double n_ss, double lo = 0.02, double hi = 0.5);

}  // namespace eitcool
