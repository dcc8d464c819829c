#include "eitcool/fluctuation_spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "eitcool/errors.hpp"
#include "eitcool/internal_dynamics.hpp"

namespace eitcool {

CMatrix build_v1(const Scenario& s) {
  const auto d = static_cast<Eigen::Index>(s.internal_dim());
  const auto e = static_cast<Eigen::Index>(s.excited_index());
  CMatrix v = CMatrix::Zero(d, d);
  for (Eigen::Index j = 0; j < e; ++j) {
    const auto& drive = s.lowers[static_cast<std::size_t>(j)].drive;
    const Complex c = 0.5 * kI * drive.lamb_dicke_projection * drive.rabi;
    v(j, e) += c;
    v(e, j) -= c;
  }
  return v;
}

Complex correlation_spectrum(const Liouvillian& l, const DensityOperator& rho_ss, const CMatrix& v1, double omega) {
  const Eigen::Index d = l.dim();
  const Eigen::Index n = d * d;
  const CMatrix& rho = rho_ss.matrix();
  const CMatrix x0 = v1 * rho - (v1 * rho).trace() * rho;

  CMatrix a = CMatrix::Zero(n + 1, n + 1);
  a.topLeftCorner(n, n) = l.dense();
  a.topLeftCorner(n, n).diagonal().array() += kI * omega;
  a.topRightCorner(n, 1) = vectorize(rho);
  for (Eigen::Index i = 0; i < d; ++i) a(n, i * d + i) = 1.0;
  CVector rhs = CVector::Zero(n + 1);
  rhs.head(n) = -vectorize(x0);

  // The systems are at most 26 x 26, so the exact condition number is cheap.
  const Eigen::JacobiSVD<CMatrix> svd(a);
  const auto& sv = svd.singularValues();
  const double rcond = sv(0) > 0.0 ? sv(sv.size() - 1) / sv(0) : 0.0;
  if (!(rcond > 1e-13)) {
    std::ostringstream msg;
    msg << "correlation spectrum: resolvent system is near singular at omega = " << omega
        << " (reciprocal condition estimate " << rcond << ")";
    throw NearSingularError(msg.str(), rcond);
  }
  const CVector x = a.partialPivLu().solve(rhs);
  return (v1 * unvectorize(x.head(n), d)).trace();
}

Complex correlation_spectrum(const Scenario& s, double omega) {
  const Liouvillian l = build_internal_liouvillian(s);
  return correlation_spectrum(l, steady_state(l), build_v1(s), omega);
}

RateCoefficients numeric_rates(const Scenario& s) {
  const Liouvillian l = build_internal_liouvillian(s);
  const DensityOperator rho = steady_state(l);
  const CMatrix v1 = build_v1(s);
  const double nu = s.trap.frequency;
  double a_plus = 2.0 * correlation_spectrum(l, rho, v1, -nu).real();
  double a_minus = 2.0 * correlation_spectrum(l, rho, v1, +nu).real();

  // Natural magnitude of S: |V1|^2 over the largest generator entry.
  double l_scale = 0.0;
  for (int k = 0; k < l.matrix().outerSize(); ++k)
    for (SparseCMatrix::InnerIterator it(l.matrix(), k); it; ++it) l_scale = std::max(l_scale, std::abs(it.value()));
  const double s_scale = l_scale > 0.0 ? v1.squaredNorm() / l_scale : 0.0;
  const double tol = 1e-12 * std::max({a_minus, a_plus, s_scale});

  for (double* a : {&a_plus, &a_minus}) {
    if (*a >= 0.0) continue;
    if (*a < -tol) {
      std::ostringstream msg;
      msg << "numeric rates: negative rate coefficient " << *a << " beyond roundoff tolerance " << tol;
      throw NumericalError(msg.str());
    }
    *a = 0.0;
  }
  return {a_plus, a_minus};
}

}  // namespace eitcool
