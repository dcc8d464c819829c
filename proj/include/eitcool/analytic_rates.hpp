#pragma once

// Closed-form results of the Lamb-Dicke expansion for the tripod atom:
// optimal laser conditions, heating/cooling coefficients A+ and A-, the
// derived cooling rate W and limit <n>_ss, and the motional rate equation
//   dP(n)/dt = A- [(n+1) P(n+1) - n P(n)] + A+ [n P(n-1) - (n+1) P(n)].
//
// Level roles: "1" is the first coupling level, "2" the second coupling level
// (absent for M = 2, i.e. Omega_2 = 0), "3" the cooling level.

#include <string>
#include <vector>

#include "eitcool/atom_model.hpp"

namespace eitcool {

struct OptimalConditions {
  double delta2 = 0.0;
  double delta3 = 0.0;
  double nu = 0.0;
};

/// Delta_3 = Delta_1, Delta_2 = Delta_1 - nu,
/// nu = (sqrt(Delta_1^2 + Omega_1^2 + Omega_2^2/2 + Omega_3^2) - Delta_1) / 2.
/// Throws DomainError unless delta1 > 0 and all Rabi frequencies are >= 0.
OptimalConditions optimal_conditions(double delta1, double omega1, double omega2, double omega3);

/// (nu - nu_opt) / nu for the scenario's trap frequency.
double trap_matched_residual(const Scenario& s);

/// Scalar parameters the closed forms depend on.
struct TripodParameters {
  double delta = 0.0;   ///< Delta = Delta_1 = Delta_3
  double delta2 = 0.0;
  double omega1 = 0.0;
  double omega2 = 0.0;
  double omega3 = 0.0;
  double gamma3 = 0.0;  ///< decay on the cooling transition
  double nu = 0.0;
  double eta = 0.0;     ///< eta_1 cos(phi_1) - eta_3 cos(phi_3)
};

/// Throws PreconditionError if the scenario has four lower levels or the
/// carrier is not cancelled (Delta_3 != Delta_1).
TripodParameters tripod_parameters(const Scenario& s);

struct RateCoefficients {
  double a_plus = 0.0;   ///< heating, n -> n+1
  double a_minus = 0.0;  ///< cooling, n -> n-1
};

/// Denominator term [(Omega_1^2+Omega_3^2)/4 - nu(nu -+ Delta)] + E_+-,
/// sign = +1 for A+ and -1 for A-. Infinite at the E pole.
double rate_bracket(const TripodParameters& p, int sign);

/// A+- / eta^2 * (...) closed form; A is 0 at the E pole (|Delta - Delta_2 -+ nu|
/// below 1e-12 nu), which is how A+ = 0 arises at the optimum.
RateCoefficients rate_coefficients(const TripodParameters& p);
RateCoefficients rate_coefficients(const Scenario& s);

struct CoolingFigures {
  double w = 0.0;     ///< A- - A+
  double n_ss = 0.0;  ///< A+ / W
};

/// Throws HeatingRegimeError when A- <= A+.
CoolingFigures cooling_rate_and_limit(const RateCoefficients& r);

/// n_ss + (n0 - n_ss) exp(-W t). Requires W > 0.
double mean_n_closed_form(const RateCoefficients& r, double n0, double t);

struct MotionalDistribution {
  std::vector<double> populations;  ///< P(0..N)

  double mean() const;
  double total() const;
  static MotionalDistribution thermal(double mean_n, std::size_t levels);
};

/// Exact solution of the truncated rate equation on {0..N} (N+1 = number of
/// populations); the A+ transition out of N is dropped. A warning is appended
/// when P(N) exceeds 1e-6 at the final time.
MotionalDistribution rate_equation_evolve(const RateCoefficients& r, const MotionalDistribution& p0, double t,
                                          std::vector<std::string>* warnings = nullptr);

}  // namespace eitcool
