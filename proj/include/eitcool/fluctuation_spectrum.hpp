#pragma once

// Fluctuation spectrum of the first-order Lamb-Dicke coupling
//   V1 = (i/2) sum_j (eta_j cos phi_j) Omega_j (|j><e| - |e><j|),
//   S(omega) = int_0^inf e^{i omega tau} <dV1(tau) dV1(0)>_ss d tau,
// evaluated with the quantum regression theorem, and the rates
// A+- = 2 Re S(-+nu). The Lamb-Dicke factors already carry the
// sqrt(hbar / 2 M nu) scale, so S comes out directly in rate units.
//
// dV1 = V1 - <V1>_ss: the constant part only adds an imaginary i<V1>^2/omega
// term and a delta peak at omega = 0, neither of which affects A+-.

#include "eitcool/analytic_rates.hpp"
#include "eitcool/atom_model.hpp"
#include "eitcool/linalg.hpp"

namespace eitcool {

/// Hermitian first-order coupling on the internal space.
CMatrix build_v1(const Scenario& s);

/// Solves (L + i omega) X = -(V1 rho - <V1> rho) with Tr X = 0 via a bordered
/// system and returns Tr(V1 X). Throws NearSingularError when the system's
/// reciprocal condition number (smallest over largest singular value) drops
/// below 1e-13.
Complex correlation_spectrum(const Liouvillian& l, const DensityOperator& rho_ss, const CMatrix& v1, double omega);

Complex correlation_spectrum(const Scenario& s, double omega);

/// A+- = 2 Re S(-+nu). Roundoff-level negative values are clamped to 0;
/// anything below -1e-12 * max(A-, |V1|^2 / L-scale) is a NumericalError.
RateCoefficients numeric_rates(const Scenario& s);

}  // namespace eitcool
