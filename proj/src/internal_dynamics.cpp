#include "eitcool/internal_dynamics.hpp"

#include <algorithm>
#include <cmath>

#include <gsl/gsl_errno.h>
#include <gsl/gsl_min.h>

#include "eitcool/errors.hpp"

namespace eitcool {

CMatrix internal_hamiltonian(const Scenario& s) {
  const auto d = static_cast<Eigen::Index>(s.internal_dim());
  const auto e = static_cast<Eigen::Index>(s.excited_index());
  CMatrix h = CMatrix::Zero(d, d);
  for (Eigen::Index j = 0; j < e; ++j) {
    const auto& drive = s.lowers[static_cast<std::size_t>(j)].drive;
    h(j, j) = drive.detuning;
    h(e, j) += 0.5 * drive.rabi;
    h(j, e) += 0.5 * drive.rabi;
  }
  return h;
}

std::vector<SparseCMatrix> internal_jump_operators(const Scenario& s) {
  const auto d = static_cast<Eigen::Index>(s.internal_dim());
  const auto e = static_cast<Eigen::Index>(s.excited_index());
  std::vector<SparseCMatrix> jumps;
  for (Eigen::Index j = 0; j < e; ++j) {
    const double gamma = s.lowers[static_cast<std::size_t>(j)].decay.rate;
    if (gamma <= 0.0) continue;
    SparseCMatrix jump(d, d);
    jump.insert(j, e) = std::sqrt(gamma);
    jumps.push_back(std::move(jump));
  }
  return jumps;
}

Liouvillian build_internal_liouvillian(const Scenario& s, std::optional<double> delta3_override) {
  if (delta3_override) return build_internal_liouvillian(s.with_cooling_detuning(*delta3_override));
  return lindblad(to_sparse(internal_hamiltonian(s)), internal_jump_operators(s));
}

InternalGenerator::InternalGenerator(const Scenario& s) : base_(build_internal_liouvillian(s, 0.0)) {
  const auto d = static_cast<Eigen::Index>(s.internal_dim());
  SparseCMatrix projector(d, d);
  projector.insert(static_cast<Eigen::Index>(s.cooling_index), static_cast<Eigen::Index>(s.cooling_index)) = 1.0;
  slope_ = Liouvillian(d, commutator_superop(projector));
}

Liouvillian InternalGenerator::at(double delta3) const { return base_ + slope_ * delta3; }

DensityOperator internal_steady_state(const Scenario& s) { return steady_state(build_internal_liouvillian(s)); }

namespace {

double excited_rate(const Scenario& s, const DensityOperator& rho) {
  const auto e = static_cast<Eigen::Index>(s.excited_index());
  return s.cooling().decay.rate * std::max(0.0, rho(e, e).real());
}

}  // namespace

double absorption(const Scenario& s, double delta3) {
  return excited_rate(s, steady_state(build_internal_liouvillian(s, delta3)));
}

SpectrumTrace absorption_sweep(const Scenario& s, double dmin, double dmax, int n) {
  if (n < 2) throw PreconditionError("absorption sweep needs at least 2 points");
  if (!(dmin < dmax)) throw PreconditionError("absorption sweep needs dmin < dmax");
  const InternalGenerator gen(s);
  SpectrumTrace trace;
  trace.points.reserve(static_cast<std::size_t>(n));
  const double step = (dmax - dmin) / (n - 1);
  for (int i = 0; i < n; ++i) {
    const double delta3 = (i == n - 1) ? dmax : dmin + step * i;
    trace.points.push_back({delta3, excited_rate(s, steady_state(gen.at(delta3)))});
  }
  return trace;
}

namespace {

struct Vertex {
  double x;
  double y;
};

// Parabola through three (possibly non-uniform) samples.
Vertex parabola_vertex(const SpectrumPoint& a, const SpectrumPoint& b, const SpectrumPoint& c) {
  const double x0 = a.delta3, x1 = b.delta3, x2 = c.delta3;
  const double y0 = a.absorption, y1 = b.absorption, y2 = c.absorption;
  const double d01 = (y1 - y0) / (x1 - x0);
  const double d12 = (y2 - y1) / (x2 - x1);
  const double curvature = (d12 - d01) / (x2 - x0);
  if (curvature == 0.0) return {x1, y1};
  const double slope = d01 - curvature * (x0 + x1);
  const double xv = -slope / (2.0 * curvature);
  if (xv < x0 || xv > x2) return {x1, y1};
  const double yv = y0 + d01 * (xv - x0) + curvature * (xv - x0) * (xv - x1);
  return {xv, yv};
}

}  // namespace

namespace {

enum class Extremum { none, minimum, maximum };

Extremum classify(const std::vector<SpectrumPoint>& p, std::size_t i) {
  const double prev = p[i - 1].absorption, here = p[i].absorption, next = p[i + 1].absorption;
  if (here <= prev && here <= next && (here < prev || here < next)) return Extremum::minimum;
  if (here >= prev && here >= next && (here > prev || here > next)) return Extremum::maximum;
  return Extremum::none;
}

void check_trace(const SpectrumTrace& trace) {
  if (trace.points.size() < 3) throw PreconditionError("spectrum feature search needs at least 3 points");
}

struct BrentTarget {
  const InternalGenerator* generator;
  double gamma;
  double sign;
};

double brent_objective(double x, void* params) {
  const auto* t = static_cast<const BrentTarget*>(params);
  const DensityOperator rho = steady_state(t->generator->at(x));
  return t->sign * t->gamma * std::max(0.0, rho.matrix().diagonal().tail(1)(0).real());
}

// Brent's method inside the bracket (a, b) around the grid extremum x. Returns
// nullopt when the bracket is not strict (flat samples).
std::optional<SpectrumPoint> polish(const BrentTarget& target, double a, double x, double b) {
  gsl_function fn{&brent_objective, const_cast<BrentTarget*>(&target)};
  const double fx = brent_objective(x, fn.params);
  if (!(fx < brent_objective(a, fn.params) && fx < brent_objective(b, fn.params))) return std::nullopt;
  gsl_min_fminimizer* m = gsl_min_fminimizer_alloc(gsl_min_fminimizer_brent);
  gsl_set_error_handler_off();
  if (gsl_min_fminimizer_set_with_values(m, &fn, x, fx, a, brent_objective(a, fn.params), b,
                                         brent_objective(b, fn.params)) != GSL_SUCCESS) {
    gsl_min_fminimizer_free(m);
    return std::nullopt;
  }
  for (int iter = 0; iter < 200; ++iter) {
    if (gsl_min_fminimizer_iterate(m) != GSL_SUCCESS) break;
    const double lo = gsl_min_fminimizer_x_lower(m), hi = gsl_min_fminimizer_x_upper(m);
    if (gsl_min_test_interval(lo, hi, 1e-14 * (b - a), 1e-12) == GSL_SUCCESS) break;
  }
  const SpectrumPoint out{gsl_min_fminimizer_x_minimum(m), target.sign * gsl_min_fminimizer_f_minimum(m)};
  gsl_min_fminimizer_free(m);
  return out;
}

}  // namespace

SpectrumFeatures find_spectrum_features(const SpectrumTrace& trace, double zero_threshold) {
  check_trace(trace);
  const auto& p = trace.points;
  SpectrumFeatures f;
  for (const auto& pt : p) f.global_max = std::max(f.global_max, pt.absorption);
  const double threshold = zero_threshold * f.global_max;

  for (std::size_t i = 1; i + 1 < p.size(); ++i) {
    const Extremum kind = classify(p, i);
    if (kind == Extremum::none) continue;
    const Vertex v = parabola_vertex(p[i - 1], p[i], p[i + 1]);
    if (kind == Extremum::maximum) {
      f.maxima.push_back(v.x);
    } else if (std::min(p[i].absorption, std::max(v.y, 0.0)) <= threshold) {
      f.zeros.push_back(v.x);
    } else {
      f.nonzero_minima.push_back(v.x);
    }
  }
  return f;
}

SpectrumFeatures find_spectrum_features(const Scenario& s, const SpectrumTrace& trace, double zero_threshold) {
  check_trace(trace);
  const auto& p = trace.points;
  const InternalGenerator generator(s);
  const double gamma = s.cooling().decay.rate;

  struct Found {
    Extremum kind;
    SpectrumPoint at;
  };
  std::vector<Found> found;
  SpectrumFeatures f;
  for (const auto& pt : p) f.global_max = std::max(f.global_max, pt.absorption);
  for (std::size_t i = 1; i + 1 < p.size(); ++i) {
    const Extremum kind = classify(p, i);
    if (kind == Extremum::none) continue;
    const BrentTarget target{&generator, gamma, kind == Extremum::minimum ? 1.0 : -1.0};
    const auto polished = polish(target, p[i - 1].delta3, p[i].delta3, p[i + 1].delta3);
    SpectrumPoint at;
    if (polished) {
      at = *polished;
    } else {
      const Vertex v = parabola_vertex(p[i - 1], p[i], p[i + 1]);
      at = {v.x, std::max(0.0, v.y)};
    }
    if (kind == Extremum::maximum) f.global_max = std::max(f.global_max, at.absorption);
    found.push_back({kind, at});
  }
  const double threshold = zero_threshold * f.global_max;
  for (const auto& e : found) {
    if (e.kind == Extremum::maximum)
      f.maxima.push_back(e.at.delta3);
    else if (e.at.absorption <= threshold)
      f.zeros.push_back(e.at.delta3);
    else
      f.nonzero_minima.push_back(e.at.delta3);
  }
  return f;
}

}  // namespace eitcool
