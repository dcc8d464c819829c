#include "eitcool/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/SparseLU>
#include <unsupported/Eigen/KroneckerProduct>

#include "eitcool/errors.hpp"

namespace eitcool {

namespace {

SparseCMatrix sparse_identity(Eigen::Index n) {
  SparseCMatrix id(n, n);
  id.setIdentity();
  return id;
}

SparseCMatrix left_multiply(const SparseCMatrix& a) {
  return Eigen::kroneckerProduct(sparse_identity(a.rows()), a);
}

SparseCMatrix right_multiply(const SparseCMatrix& b) {
  SparseCMatrix bt = b.transpose();
  return Eigen::kroneckerProduct(bt, sparse_identity(b.rows()));
}

double max_abs(const SparseCMatrix& m) {
  double out = 0.0;
  for (int k = 0; k < m.outerSize(); ++k)
    for (SparseCMatrix::InnerIterator it(m, k); it; ++it) out = std::max(out, std::abs(it.value()));
  return out;
}

// Dense matrices up to this many superoperator rows get an explicit rank check.
constexpr Eigen::Index kDenseKernelLimit = 1024;

SparseCMatrix bordered(const SparseCMatrix& l, const CVector& border, Eigen::Index dim) {
  const Eigen::Index n = l.rows();
  std::vector<Eigen::Triplet<Complex>> trips;
  trips.reserve(static_cast<std::size_t>(l.nonZeros() + 2 * dim + n));
  for (int k = 0; k < l.outerSize(); ++k)
    for (SparseCMatrix::InnerIterator it(l, k); it; ++it)
      trips.emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col()), it.value());
  for (Eigen::Index i = 0; i < n; ++i)
    if (border(i) != Complex{}) trips.emplace_back(static_cast<int>(i), static_cast<int>(n), border(i));
  for (Eigen::Index i = 0; i < dim; ++i)
    trips.emplace_back(static_cast<int>(n), static_cast<int>(i * dim + i), Complex{1.0, 0.0});
  SparseCMatrix out(n + 1, n + 1);
  out.setFromTriplets(trips.begin(), trips.end());
  out.makeCompressed();
  return out;
}

CMatrix normalize(CMatrix rho) {
  rho = 0.5 * (rho + rho.adjoint()).eval();
  return rho / rho.trace().real();
}

CMatrix solve_sparse_bordered(const SparseCMatrix& l, const CVector& border, Eigen::Index dim) {
  const SparseCMatrix a = bordered(l, border, dim);
  Eigen::SparseLU<SparseCMatrix, Eigen::COLAMDOrdering<int>> lu;
  lu.compute(a);
  if (lu.info() != Eigen::Success)
    throw NonUniqueSteadyStateError("steady state: bordered generator is singular (" + lu.lastErrorMessage() +
                                    "); the kernel is degenerate");
  CVector rhs = CVector::Zero(a.rows());
  rhs(a.rows() - 1) = 1.0;
  const CVector x = lu.solve(rhs);
  if (!x.allFinite()) throw NonUniqueSteadyStateError("steady state: non-finite solution of bordered system");
  return unvectorize(x.head(l.rows()), dim);
}

}  // namespace

CVector vectorize(const CMatrix& x) { return Eigen::Map<const CVector>(x.data(), x.size()); }

CMatrix unvectorize(const CVector& v, Eigen::Index dim) { return Eigen::Map<const CMatrix>(v.data(), dim, dim); }

SparseCMatrix to_sparse(const CMatrix& m, double drop_tol) {
  std::vector<Eigen::Triplet<Complex>> trips;
  for (Eigen::Index c = 0; c < m.cols(); ++c)
    for (Eigen::Index r = 0; r < m.rows(); ++r)
      if (std::abs(m(r, c)) > drop_tol) trips.emplace_back(static_cast<int>(r), static_cast<int>(c), m(r, c));
  SparseCMatrix out(m.rows(), m.cols());
  out.setFromTriplets(trips.begin(), trips.end());
  return out;
}

DensityOperator::Diagnostics DensityOperator::diagnose() const {
  Diagnostics d;
  const double scale = std::max(entries_.cwiseAbs().maxCoeff(), 1e-300);
  d.hermiticity_error = (entries_ - entries_.adjoint()).cwiseAbs().maxCoeff() / scale;
  d.trace_error = std::abs(entries_.trace() - Complex{1.0, 0.0});
  const CMatrix herm = 0.5 * (entries_ + entries_.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> es(herm, Eigen::EigenvaluesOnly);
  d.min_eigenvalue = es.eigenvalues().minCoeff();
  return d;
}

void DensityOperator::check(double hermiticity_tol, double trace_tol, double eigenvalue_tol) const {
  const auto d = diagnose();
  std::ostringstream msg;
  if (d.hermiticity_error > hermiticity_tol) msg << "hermiticity error " << d.hermiticity_error << "; ";
  if (d.trace_error > trace_tol) msg << "trace error " << d.trace_error << "; ";
  if (d.min_eigenvalue < -eigenvalue_tol) msg << "negative eigenvalue " << d.min_eigenvalue << "; ";
  if (!msg.str().empty()) throw NumericalError("density operator invariant violated: " + msg.str());
}

Liouvillian::Liouvillian(Eigen::Index dim, SparseCMatrix matrix) : dim_(dim), matrix_(std::move(matrix)) {
  matrix_.makeCompressed();
}

CMatrix Liouvillian::apply(const CMatrix& x) const {
  const CVector out = matrix_ * vectorize(x);
  return unvectorize(out, dim_);
}

Liouvillian Liouvillian::operator+(const Liouvillian& other) const {
  if (other.dim_ != dim_) throw PreconditionError("Liouvillian sum: dimensions differ");
  return Liouvillian(dim_, SparseCMatrix(matrix_ + other.matrix_));
}

Liouvillian Liouvillian::operator*(double s) const { return Liouvillian(dim_, SparseCMatrix(matrix_ * Complex{s, 0.0})); }

SparseCMatrix commutator_superop(const SparseCMatrix& h) {
  SparseCMatrix out = left_multiply(h) - right_multiply(h);
  return out * (-kI);
}

SparseCMatrix dissipator_superop(const std::vector<SparseCMatrix>& jumps) {
  if (jumps.empty()) return {};
  const Eigen::Index d = jumps.front().rows();
  SparseCMatrix out(d * d, d * d);
  SparseCMatrix k(d, d);
  for (const auto& j : jumps) {
    SparseCMatrix jc = j.conjugate();
    out += SparseCMatrix(Eigen::kroneckerProduct(jc, j));
    k += SparseCMatrix(j.adjoint() * j);
  }
  out -= 0.5 * (left_multiply(k) + right_multiply(k));
  out.prune(Complex{0.0, 0.0});
  return out;
}

Liouvillian lindblad(const SparseCMatrix& h, const std::vector<SparseCMatrix>& jumps) {
  SparseCMatrix l = commutator_superop(h);
  if (!jumps.empty()) l += dissipator_superop(jumps);
  return Liouvillian(h.rows(), std::move(l));
}

DensityOperator steady_state(const Liouvillian& l) {
  const Eigen::Index d = l.dim();
  const Eigen::Index n = d * d;
  const double scale = std::max(1.0, max_abs(l.matrix()));

  CVector identity_border = vectorize(CMatrix::Identity(d, d)) / static_cast<double>(d);

  if (n <= kDenseKernelLimit) {
    const CMatrix dense = l.dense();
    Eigen::FullPivLU<CMatrix> lu(dense);
    lu.setThreshold(1e-11);
    const Eigen::Index kernel_dim = n - lu.rank();
    if (kernel_dim != 1) {
      std::ostringstream msg;
      msg << "steady state is not unique: generator kernel has dimension " << kernel_dim
          << " (decoupled dark subspace?)";
      throw NonUniqueSteadyStateError(msg.str());
    }
    CMatrix a = CMatrix::Zero(n + 1, n + 1);
    a.topLeftCorner(n, n) = dense;
    a.topRightCorner(n, 1) = identity_border;
    for (Eigen::Index i = 0; i < d; ++i) a(n, i * d + i) = 1.0;
    CVector rhs = CVector::Zero(n + 1);
    rhs(n) = 1.0;
    const CVector x = a.partialPivLu().solve(rhs);
    DensityOperator rho(normalize(unvectorize(x.head(n), d)));
    if (steady_state_residual(l, rho) > 1e-9 * scale)
      throw NumericalError("steady state: residual too large after bordered solve");
    return rho;
  }

  // Sparse path: no cheap rank estimate, so solve with two unrelated borders.
  // A one-dimensional kernel makes the answer border independent.
  const CMatrix first = solve_sparse_bordered(l.matrix(), identity_border, d);
  CMatrix alt = CMatrix::Zero(d, d);
  for (Eigen::Index i = 0; i < d; ++i) alt(i, i) = 1.0 + 0.37 * static_cast<double>(i % 7);
  CVector alt_border = vectorize(alt);
  alt_border /= alt.trace();
  const CMatrix second = solve_sparse_bordered(l.matrix(), alt_border, d);

  const double spread = (first - second).cwiseAbs().maxCoeff();
  if (!(spread <= 1e-7))
    throw NonUniqueSteadyStateError("steady state is not unique: bordered solves disagree by " +
                                    std::to_string(spread));
  DensityOperator rho(normalize(first));
  if (steady_state_residual(l, rho) > 1e-9 * scale)
    throw NumericalError("steady state: residual too large after sparse bordered solve");
  return rho;
}

double steady_state_residual(const Liouvillian& l, const DensityOperator& rho) {
  return l.apply(rho.matrix()).cwiseAbs().maxCoeff();
}

}  // namespace eitcool
