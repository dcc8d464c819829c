#include "eitcool/analytic_rates.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <sstream>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "eitcool/errors.hpp"

namespace eitcool {

OptimalConditions optimal_conditions(double delta1, double omega1, double omega2, double omega3) {
  if (!(delta1 > 0.0)) throw DomainError("optimal conditions require Delta_1 > 0");
  if (!(omega1 >= 0.0 && omega2 >= 0.0 && omega3 >= 0.0))
    throw DomainError("optimal conditions require nonnegative Rabi frequencies");
  OptimalConditions c;
  c.nu = 0.5 * (std::sqrt(delta1 * delta1 + omega1 * omega1 + 0.5 * omega2 * omega2 + omega3 * omega3) - delta1);
  c.delta3 = delta1;
  c.delta2 = delta1 - c.nu;
  return c;
}

namespace {

struct Roles {
  std::size_t first;
  std::optional<std::size_t> second;
};

Roles roles(const Scenario& s) {
  if (s.num_lowers() > 3)
    throw PreconditionError("closed-form rates cover two or three lower levels; use the numeric rates for M = 4");
  const auto c = s.coupling_indices();
  Roles r{c.at(0), std::nullopt};
  if (c.size() > 1) r.second = c[1];
  return r;
}

}  // namespace

double trap_matched_residual(const Scenario& s) {
  const Roles r = roles(s);
  const double omega2 = r.second ? s.lowers[*r.second].drive.rabi : 0.0;
  const auto c = optimal_conditions(s.lowers[r.first].drive.detuning, s.lowers[r.first].drive.rabi, omega2,
                                    s.cooling().drive.rabi);
  return (s.trap.frequency - c.nu) / s.trap.frequency;
}

TripodParameters tripod_parameters(const Scenario& s) {
  const Roles r = roles(s);
  TripodParameters p;
  const auto& first = s.lowers[r.first].drive;
  const auto& cooling = s.cooling().drive;
  const double tol = 1e-12 * (std::abs(first.detuning) + s.trap.frequency);
  if (std::abs(cooling.detuning - first.detuning) > tol) {
    std::ostringstream msg;
    msg << "closed-form rates assume the carrier is cancelled (Delta_3 = Delta_1), got Delta_3 - Delta_1 = "
        << cooling.detuning - first.detuning << "; use the numeric rates instead";
    throw PreconditionError(msg.str());
  }
  p.delta = first.detuning;
  p.omega1 = first.rabi;
  p.omega3 = cooling.rabi;
  if (r.second) {
    p.omega2 = s.lowers[*r.second].drive.rabi;
    p.delta2 = s.lowers[*r.second].drive.detuning;
  } else {
    p.omega2 = 0.0;
    p.delta2 = p.delta;
  }
  p.gamma3 = s.cooling().decay.rate;
  p.nu = s.trap.frequency;
  p.eta = s.relevant_lamb_dicke();
  return p;
}

namespace {

// E_+- = -+ nu Omega_2^2 / (4 (Delta - Delta_2 -+ nu)); nullopt at the pole.
std::optional<double> second_coupling_shift(const TripodParameters& p, int sign) {
  if (p.omega2 == 0.0) return 0.0;
  const double den = p.delta - p.delta2 - sign * p.nu;
  if (std::abs(den) < 1e-12 * p.nu) return std::nullopt;
  return -sign * p.nu * p.omega2 * p.omega2 / (4.0 * den);
}

double rate(const TripodParameters& p, int sign) {
  const auto shift = second_coupling_shift(p, sign);
  if (!shift) return 0.0;
  const double n2 = p.omega1 * p.omega1 + p.omega3 * p.omega3;
  if (n2 == 0.0) return 0.0;
  const double bracket = n2 / 4.0 - p.nu * (p.nu - sign * p.delta) + *shift;
  const double numerator = p.gamma3 * p.nu * p.nu * p.omega3 * p.omega3;
  const double denominator = 4.0 * bracket * bracket + p.gamma3 * p.gamma3 * p.nu * p.nu;
  return p.eta * p.eta * (p.omega1 * p.omega1 / n2) * numerator / denominator;
}

}  // namespace

double rate_bracket(const TripodParameters& p, int sign) {
  const auto shift = second_coupling_shift(p, sign);
  if (!shift) return std::numeric_limits<double>::infinity();
  return (p.omega1 * p.omega1 + p.omega3 * p.omega3) / 4.0 - p.nu * (p.nu - sign * p.delta) + *shift;
}

RateCoefficients rate_coefficients(const TripodParameters& p) { return {rate(p, +1), rate(p, -1)}; }

RateCoefficients rate_coefficients(const Scenario& s) { return rate_coefficients(tripod_parameters(s)); }

CoolingFigures cooling_rate_and_limit(const RateCoefficients& r) {
  if (!(r.a_minus > r.a_plus)) {
    std::ostringstream msg;
    msg << "heating regime: A- = " << r.a_minus << " does not exceed A+ = " << r.a_plus;
    throw HeatingRegimeError(msg.str());
  }
  const double w = r.a_minus - r.a_plus;
  return {w, r.a_plus / w};
}

double mean_n_closed_form(const RateCoefficients& r, double n0, double t) {
  const double w = r.a_minus - r.a_plus;
  if (!(w > 0.0)) throw PreconditionError("closed-form <n>(t) requires W = A- - A+ > 0");
  const double n_ss = r.a_plus / w;
  return n_ss + (n0 - n_ss) * std::exp(-w * t);
}

double MotionalDistribution::mean() const {
  double m = 0.0;
  for (std::size_t n = 0; n < populations.size(); ++n) m += static_cast<double>(n) * populations[n];
  return m;
}

double MotionalDistribution::total() const { return std::accumulate(populations.begin(), populations.end(), 0.0); }

MotionalDistribution MotionalDistribution::thermal(double mean_n, std::size_t levels) {
  MotionalDistribution d;
  d.populations.resize(levels);
  const double ratio = mean_n / (mean_n + 1.0);
  double p = 1.0 / (mean_n + 1.0);
  for (std::size_t n = 0; n < levels; ++n, p *= ratio) d.populations[n] = p;
  const double norm = d.total();
  for (auto& x : d.populations) x /= norm;
  return d;
}

MotionalDistribution rate_equation_evolve(const RateCoefficients& r, const MotionalDistribution& p0, double t,
                                          std::vector<std::string>* warnings) {
  const auto levels = static_cast<Eigen::Index>(p0.populations.size());
  if (levels == 0) return p0;
  const Eigen::Index top = levels - 1;
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(levels, levels);
  for (Eigen::Index n = 0; n < levels; ++n) {
    const double nd = static_cast<double>(n);
    if (n < top) {
      g(n, n + 1) += r.a_minus * (nd + 1.0);
      g(n + 1, n) += r.a_plus * (nd + 1.0);
      g(n, n) -= r.a_plus * (nd + 1.0);
    }
    g(n, n) -= r.a_minus * nd;
  }
  const Eigen::VectorXd p = Eigen::Map<const Eigen::VectorXd>(p0.populations.data(), levels);
  const Eigen::MatrixXd prop = (g * t).exp();
  const Eigen::VectorXd out = prop * p;

  MotionalDistribution d;
  d.populations.assign(out.data(), out.data() + levels);
  if (warnings && d.populations.back() > 1e-6) {
    std::ostringstream msg;
    msg << "rate equation: population " << d.populations.back() << " at the truncation level n = " << top
        << " (reflecting boundary is active)";
    warnings->push_back(msg.str());
  }
  return d;
}

}  // namespace eitcool
