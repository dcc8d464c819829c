#include "eitcool/full_lindblad.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <sstream>

#include <gsl/gsl_integration.h>
#include <unsupported/Eigen/MatrixFunctions>

#include "eitcool/errors.hpp"

namespace eitcool {

namespace {

struct GslTable {
  explicit GslTable(int n) : table(gsl_integration_glfixed_table_alloc(static_cast<size_t>(n))) {}
  ~GslTable() { gsl_integration_glfixed_table_free(table); }
  GslTable(const GslTable&) = delete;
  GslTable& operator=(const GslTable&) = delete;
  gsl_integration_glfixed_table* table;
};

std::vector<AngularNode> gauss_legendre(int n) {
  GslTable t(n);
  std::vector<AngularNode> nodes(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    double x = 0.0, w = 0.0;
    gsl_integration_glfixed_point(-1.0, 1.0, static_cast<size_t>(i), &x, &w, t.table);
    nodes[static_cast<std::size_t>(i)] = {x, w};
  }
  return nodes;
}

void normalize(std::vector<AngularNode>& nodes) {
  double total = 0.0;
  for (const auto& n : nodes) total += n.weight;
  for (auto& n : nodes) n.weight /= total;
}

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

CMatrix basis_op(Eigen::Index d, Eigen::Index row, Eigen::Index col) {
  CMatrix m = CMatrix::Zero(d, d);
  m(row, col) = 1.0;
  return m;
}

// exp(i k X) from one eigendecomposition of the truncated position operator.
class PhaseFactory {
 public:
  explicit PhaseFactory(int n_fock) : solver_(position_operator(n_fock)) {}

  CMatrix operator()(double k) const {
    const CVector phases = (kI * k * solver_.eigenvalues().cast<Complex>()).array().exp();
    return solver_.eigenvectors() * phases.asDiagonal() * solver_.eigenvectors().adjoint();
  }

 private:
  Eigen::SelfAdjointEigenSolver<CMatrix> solver_;
};

double unitarity_deviation(const CMatrix& u) {
  return (u.adjoint() * u - CMatrix::Identity(u.rows(), u.cols())).cwiseAbs().maxCoeff();
}

}  // namespace

std::vector<AngularNode> angular_quadrature(const DecayChannel& channel, int nodes) {
  if (nodes < 1) throw PreconditionError("angular quadrature needs at least one node");
  std::vector<AngularNode> rule = gauss_legendre(nodes);
  switch (channel.profile) {
    case AngularProfile::isotropic:
      break;
    case AngularProfile::dipole:
      for (auto& n : rule) n.weight *= 0.375 * (1.0 + n.u * n.u);
      break;
    case AngularProfile::custom: {
      const double alpha = channel.custom_second_moment;
      normalize(rule);
      if (alpha >= 1.0 / 3.0) {
        const double w = std::min(1.0, (alpha - 1.0 / 3.0) / (2.0 / 3.0));
        for (auto& n : rule) n.weight *= 1.0 - w;
        rule.push_back({-1.0, 0.5 * w});
        rule.push_back({1.0, 0.5 * w});
      } else {
        const double w = std::min(1.0, 1.0 - 3.0 * alpha);
        for (auto& n : rule) n.weight *= 1.0 - w;
        rule.push_back({0.0, w});
      }
      break;
    }
  }
  std::erase_if(rule, [](const AngularNode& n) { return n.weight == 0.0; });
  normalize(rule);
  return rule;
}

CMatrix position_operator(int n_fock) {
  CMatrix x = CMatrix::Zero(n_fock, n_fock);
  for (int n = 1; n < n_fock; ++n) {
    const double s = std::sqrt(static_cast<double>(n));
    x(n - 1, n) = s;
    x(n, n - 1) = s;
  }
  return x;
}

CMatrix phase_operator(double k, int n_fock) { return PhaseFactory(n_fock)(k); }

FullModel build_full_model(const Scenario& s, const FullModelOptions& options) {
  const JointSpace space = JointSpace::of(s);
  if (space.dim() > options.max_dim) {
    std::ostringstream msg;
    msg << "joint space dimension " << space.dim() << " exceeds the limit " << options.max_dim
        << "; reduce trap.fock_cutoff";
    throw ResourceError(msg.str());
  }
  const Eigen::Index di = space.n_internal;
  const Eigen::Index nf = space.n_fock;
  const Eigen::Index e = static_cast<Eigen::Index>(s.excited_index());
  const CMatrix id_fock = CMatrix::Identity(nf, nf);
  const PhaseFactory phase(space.n_fock);
  double unitarity = 0.0;

  CMatrix number = CMatrix::Zero(nf, nf);
  for (Eigen::Index n = 0; n < nf; ++n) number(n, n) = static_cast<double>(n);

  CMatrix h = s.trap.frequency * kron(CMatrix::Identity(di, di), number);
  for (Eigen::Index j = 0; j < e; ++j) {
    const auto& drive = s.lowers[static_cast<std::size_t>(j)].drive;
    h += drive.detuning * kron(basis_op(di, j, j), id_fock);
    const CMatrix recoil = phase(-drive.lamb_dicke_projection);
    unitarity = std::max(unitarity, unitarity_deviation(recoil));
    const CMatrix raise = 0.5 * drive.rabi * kron(basis_op(di, e, j), recoil);
    h += raise + raise.adjoint();
  }

  std::vector<SparseCMatrix> jumps;
  for (Eigen::Index j = 0; j < e; ++j) {
    const auto& level = s.lowers[static_cast<std::size_t>(j)];
    if (level.decay.rate <= 0.0) continue;
    const CMatrix lower = basis_op(di, j, e);
    const double eta = std::abs(level.drive.lamb_dicke_projection);
    if (eta == 0.0) {
      jumps.push_back(to_sparse(std::sqrt(level.decay.rate) * kron(lower, id_fock)));
      continue;
    }
    for (const auto& node : angular_quadrature(level.decay, options.quadrature_nodes)) {
      const CMatrix kick = phase(eta * node.u);
      unitarity = std::max(unitarity, unitarity_deviation(kick));
      jumps.push_back(to_sparse(std::sqrt(level.decay.rate * node.weight) * kron(lower, kick)));
    }
  }

  return {space, lindblad(to_sparse(h), jumps), unitarity};
}

Liouvillian build_full_liouvillian(const Scenario& s, const FullModelOptions& options) {
  return build_full_model(s, options).generator;
}

DensityOperator thermal_state(const JointSpace& space, double mean_n, int internal, std::vector<std::string>* warnings) {
  if (!(mean_n >= 0.0)) throw PreconditionError("thermal state needs mean_n >= 0");
  if (internal < 0 || internal >= space.n_internal) throw PreconditionError("thermal state: internal level out of range");
  const double ratio = mean_n / (mean_n + 1.0);
  std::vector<double> p(static_cast<std::size_t>(space.n_fock));
  double w = 1.0 / (mean_n + 1.0);
  double kept = 0.0;
  for (auto& x : p) {
    x = w;
    kept += w;
    w *= ratio;
  }
  const double tail = std::pow(ratio, space.n_fock);
  if (warnings && tail > 1e-6) {
    std::ostringstream msg;
    msg << "thermal state: truncation at " << space.n_fock << " Fock levels discards weight " << tail
        << " of the distribution with mean " << mean_n;
    warnings->push_back(msg.str());
  }
  CMatrix rho = CMatrix::Zero(space.dim(), space.dim());
  for (int n = 0; n < space.n_fock; ++n) {
    const int idx = internal * space.n_fock + n;
    rho(idx, idx) = p[static_cast<std::size_t>(n)] / kept;
  }
  return DensityOperator(std::move(rho));
}

double mean_phonon_number(const JointSpace& space, const CMatrix& rho) {
  double m = 0.0;
  for (int i = 0; i < space.n_internal; ++i)
    for (int n = 0; n < space.n_fock; ++n) {
      const int idx = i * space.n_fock + n;
      m += n * rho(idx, idx).real();
    }
  return m;
}

double internal_population(const JointSpace& space, const CMatrix& rho, int internal) {
  double p = 0.0;
  for (int n = 0; n < space.n_fock; ++n) {
    const int idx = internal * space.n_fock + n;
    p += rho(idx, idx).real();
  }
  return p;
}

namespace {

class Recorder {
 public:
  Recorder(const JointSpace& space, CoolingTrace& trace) : space_(space), trace_(trace) {}

  void operator()(double t, const CVector& v) {
    const CMatrix rho = unvectorize(v, space_.dim());
    const auto diag = DensityOperator(rho).diagnose();
    if (diag.trace_error > 1e-6) {
      std::ostringstream msg;
      msg << "evolve: trace drift " << diag.trace_error << " at t = " << t << " with propagator step "
          << trace_.substep;
      throw NumericalError(msg.str());
    }
    trace_.samples.push_back({t, mean_phonon_number(space_, rho), internal_population(space_, rho, space_.n_internal - 1),
                              diag.trace_error, diag.hermiticity_error, diag.min_eigenvalue});
  }

 private:
  const JointSpace& space_;
  CoolingTrace& trace_;
};

CMatrix matrix_power(CMatrix base, long long exponent) {
  CMatrix result = CMatrix::Identity(base.rows(), base.cols());
  bool first = true;
  while (exponent > 0) {
    if (exponent & 1) {
      if (first) result = base;
      else result = (result * base).eval();
      first = false;
    }
    exponent >>= 1;
    if (exponent > 0) base = (base * base).eval();
  }
  return result;
}

}  // namespace

CoolingTrace evolve(const Liouvillian& l, const JointSpace& space, const DensityOperator& rho0,
                    const EvolveOptions& options) {
  if (l.dim() != space.dim() || rho0.dim() != space.dim())
    throw PreconditionError("evolve: generator, space and initial state dimensions differ");
  if (!(options.t_max > 0.0)) throw PreconditionError("evolve: t_max must be positive");
  if (options.n_samples < 2) throw PreconditionError("evolve: need at least 2 samples");
  const double requested = options.substep.value_or(options.t_max / 16384.0);
  if (!(requested > 0.0)) throw PreconditionError("evolve: substep must be positive");

  CoolingTrace trace;
  Recorder record(space, trace);
  const CMatrix generator = l.dense();
  CVector v = vectorize(rho0.matrix());

  if (!options.log_spacing) {
    const int intervals = options.n_samples - 1;
    const double interval = options.t_max / intervals;
    const auto steps = static_cast<long long>(std::max(1.0, std::ceil(interval / requested * (1.0 - 1e-12))));
    trace.substep = interval / static_cast<double>(steps);
    const CMatrix step = (generator * Complex{trace.substep, 0.0}).exp();
    const CMatrix stride = matrix_power(step, steps);
    record(0.0, v);
    for (int i = 1; i <= intervals; ++i) {
      v = stride * v;
      record(i == intervals ? options.t_max : interval * i, v);
    }
    return trace;
  }

  const int octaves = std::max(1, static_cast<int>(std::ceil(std::log2(options.t_max / requested) - 1e-12)));
  trace.substep = std::ldexp(options.t_max, -octaves);
  const unsigned per_octave =
      std::bit_floor(static_cast<unsigned>(std::max(1, (options.n_samples - 2) / octaves)));
  const int per_octave_log2 = std::countr_zero(per_octave);

  CMatrix propagator = (generator * Complex{trace.substep, 0.0}).exp();
  int level = 0;  // propagator == exp(L dt 2^level)
  record(0.0, v);
  v = propagator * v;
  long long m = 1;
  record(trace.substep, v);
  for (int k = 0; k < octaves; ++k) {
    const int stride_level = std::max(0, k - per_octave_log2);
    while (level < stride_level) {
      propagator = (propagator * propagator).eval();
      ++level;
    }
    const long long strides = 1LL << (k - stride_level);
    for (long long i = 0; i < strides; ++i) {
      v = propagator * v;
      m += 1LL << stride_level;
      record(k == octaves - 1 && i == strides - 1 ? options.t_max : static_cast<double>(m) * trace.substep, v);
    }
  }
  return trace;
}

FullSteadyState steady_state_full(const FullModel& model) {
  FullSteadyState out{steady_state(model.generator), 0.0, 0.0};
  out.n_ss = mean_phonon_number(model.space, out.rho.matrix());
  out.residual = steady_state_residual(model.generator, out.rho);
  return out;
}

double fit_cooling_rate(const CoolingTrace& trace, double n_ss, double lo, double hi) {
  if (trace.samples.empty()) throw NumericalError("cooling-rate fit: empty trace");
  const double excess0 = trace.samples.front().mean_n - n_ss;
  if (excess0 == 0.0) throw NumericalError("cooling-rate fit: initial state already at the steady value");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int count = 0;
  for (const auto& smp : trace.samples) {
    if (smp.t <= 0.0) continue;
    const double rel = (smp.mean_n - n_ss) / excess0;
    if (rel < lo || rel > hi) continue;
    const double y = std::log(std::abs(smp.mean_n - n_ss));
    sx += smp.t;
    sy += y;
    sxx += smp.t * smp.t;
    sxy += smp.t * y;
    ++count;
  }
  if (count < 3) {
    std::ostringstream msg;
    msg << "cooling-rate fit: only " << count << " samples in the window [" << lo << ", " << hi
        << "] of relative excess; extend t_max or add samples";
    throw NumericalError(msg.str());
  }
  const double slope = (count * sxy - sx * sy) / (count * sxx - sx * sx);
  return -slope;
}

}  // namespace eitcool
