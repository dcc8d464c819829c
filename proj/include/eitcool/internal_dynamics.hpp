#pragma once

// Motion-frozen optical Bloch equations of the M-lower-level atom and the
// absorption spectrum of the cooling laser.
//
// Basis: |0>..|M-1> are the lower levels, |M> is the excited level |e>.
// In the frame rotating with every laser,
//   H = sum_j Delta_j |j><j| + sum_j Omega_j/2 (|e><j| + |j><e|),
// with jump operators sqrt(gamma_j) |j><e|.

#include <optional>
#include <vector>

#include "eitcool/atom_model.hpp"
#include "eitcool/linalg.hpp"

namespace eitcool {

CMatrix internal_hamiltonian(const Scenario& s);
std::vector<SparseCMatrix> internal_jump_operators(const Scenario& s);

Liouvillian build_internal_liouvillian(const Scenario& s, std::optional<double> delta3_override = std::nullopt);

/// Splits L(delta3) = L(0) + delta3 * dL so a detuning sweep only rescales
/// one precomputed term.
class InternalGenerator {
 public:
  explicit InternalGenerator(const Scenario& s);
  Liouvillian at(double delta3) const;

 private:
  Liouvillian base_;
  Liouvillian slope_;
};

DensityOperator internal_steady_state(const Scenario& s);

/// gamma_cool * <e|rho_ss|e> with the cooling detuning set to delta3.
double absorption(const Scenario& s, double delta3);

struct SpectrumPoint {
  double delta3 = 0.0;
  double absorption = 0.0;
};

struct SpectrumTrace {
  std::vector<SpectrumPoint> points;
};

/// n uniformly spaced samples on [dmin, dmax] (absolute cooling detunings).
SpectrumTrace absorption_sweep(const Scenario& s, double dmin, double dmax, int n);

struct SpectrumFeatures {
  std::vector<double> zeros;           ///< minima below threshold * global max
  std::vector<double> nonzero_minima;  ///< remaining interior minima
  std::vector<double> maxima;
  double global_max = 0.0;
};

/// Interior extrema located on the grid and refined by a three-point parabola.
/// A minimum counts as a zero when it lies below zero_threshold * global max.
SpectrumFeatures find_spectrum_features(const SpectrumTrace& trace, double zero_threshold = 1e-6);

/// Same search, but every grid extremum is polished with Brent's method on the
/// absorption of `s` inside its bracketing cells. Dark resonances narrower
/// than the grid step are then still classified as zeros.
SpectrumFeatures find_spectrum_features(const Scenario& s, const SpectrumTrace& trace,
                                        double zero_threshold = 1e-6);

}  // namespace eitcool
