#pragma once

// Scenario builders and reference computations shared by the unit and
// acceptance tests.

#include <cmath>
#include <random>
#include <vector>

#include <unsupported/Eigen/MatrixFunctions>

#include "eitcool/analytic_rates.hpp"
#include "eitcool/atom_model.hpp"
#include "eitcool/linalg.hpp"

namespace testsupport {

using namespace eitcool;

inline LowerLevel level(double rabi, double detuning, double eta_proj, double gamma) {
  LowerLevel l;
  l.drive = {rabi, detuning, eta_proj};
  l.decay.rate = gamma;
  return l;
}

/// Tripod with decay only on the cooling transition (levels 1, 2, 3 at indices 0, 1, 2).
inline Scenario tripod(double d1, double d2, double d3, double o1, double o2, double o3, double nu,
                       double eta1 = 0.05, double eta2 = 0.05, double eta3 = -0.05, double gamma3 = 1.0) {
  Scenario s;
  s.unit_label = "gamma3";
  s.lowers = {level(o1, d1, eta1, 0.0), level(o2, d2, eta2, 0.0), level(o3, d3, eta3, gamma3)};
  s.cooling_index = 2;
  s.initial_internal_state = 2;
  s.trap.frequency = nu;
  return s;
}

/// Tripod completed with the optimal detunings and trap frequency.
inline Scenario optimal_tripod(double d1, double o1, double o2, double o3, double eta1 = 0.05, double eta3 = -0.05) {
  const auto c = optimal_conditions(d1, o1, o2, o3);
  return tripod(d1, c.delta2, c.delta3, o1, o2, o3, c.nu, eta1, 0.05, eta3);
}

/// Deterministic uniform draws.
class Draw {
 public:
  explicit Draw(unsigned long long seed) : rng_(seed) {}
  double operator()(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  /// Open interval (0, hi].
  double positive(double hi) {
    double x = 0.0;
    while (x <= 1e-3 * hi) x = (*this)(0.0, hi);
    return x;
  }

 private:
  std::mt19937_64 rng_;
};

/// Random optimal tripods: Delta_1 in (0, 5], Omega's in (0, 2], gamma_3 = 1.
inline std::vector<Scenario> random_optimal_tripods(int count, unsigned long long seed) {
  Draw draw(seed);
  std::vector<Scenario> out;
  while (static_cast<int>(out.size()) < count) {
    const double d1 = draw.positive(5.0);
    const double o1 = draw.positive(2.0), o2 = draw.positive(2.0), o3 = draw.positive(2.0);
    const double eta = draw(0.02, 0.2);
    out.push_back(optimal_tripod(d1, o1, o2, o3, eta / 2.0, -eta / 2.0));
  }
  return out;
}

inline double relative(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

/// Single-EIT (E = 0) closed form, written out independently of the library.
inline RateCoefficients three_level_rates(double delta, double o1, double o3, double gamma, double nu, double eta) {
  const double n2 = o1 * o1 + o3 * o3;
  auto a = [&](double sign) {
    const double bracket = n2 / 4.0 - nu * (nu - sign * delta);
    return eta * eta * (o1 * o1 / n2) * gamma * nu * nu * o3 * o3 / (4.0 * bracket * bracket + gamma * gamma * nu * nu);
  };
  return {a(+1.0), a(-1.0)};
}

/// Truncated-thermal mean by direct summation.
inline double truncated_thermal_mean(double mean, int levels) {
  double z = 0.0, m = 0.0;
  const double q = mean / (mean + 1.0);
  for (int n = 0; n < levels; ++n) {
    z += std::pow(q, n);
    m += n * std::pow(q, n);
  }
  return m / z;
}

}  // namespace testsupport
