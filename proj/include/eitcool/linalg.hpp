#pragma once

// Dense/sparse operator types and the Lindblad superoperator machinery shared
// by the internal-state and joint internal-motion models.
//
// Superoperators act on column-stacked density matrices:
//   vec(A X B) = (B^T kron A) vec(X).

#include <complex>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace eitcool {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using SparseCMatrix = Eigen::SparseMatrix<Complex>;

inline constexpr Complex kI{0.0, 1.0};

CVector vectorize(const CMatrix& x);
CMatrix unvectorize(const CVector& v, Eigen::Index dim);

SparseCMatrix to_sparse(const CMatrix& m, double drop_tol = 0.0);

/// Hermitian, unit-trace, positive-semidefinite matrix. The constructor does
/// not enforce the invariants; `check()` measures them.
class DensityOperator {
 public:
  struct Diagnostics {
    double hermiticity_error = 0.0;  ///< max|rho - rho^dag| / max|rho|
    double trace_error = 0.0;        ///< |Tr rho - 1|
    double min_eigenvalue = 0.0;
  };

  DensityOperator() = default;
  explicit DensityOperator(CMatrix entries) : entries_(std::move(entries)) {}

  Eigen::Index dim() const { return entries_.rows(); }
  const CMatrix& matrix() const { return entries_; }
  Complex operator()(Eigen::Index r, Eigen::Index c) const { return entries_(r, c); }

  Diagnostics diagnose() const;
  /// Throws NumericalError if any invariant is violated beyond tolerance.
  void check(double hermiticity_tol = 1e-10, double trace_tol = 1e-8,
             double eigenvalue_tol = 1e-8) const;

 private:
  CMatrix entries_;
};

/// Generator of a Markovian master equation, materialized as a d^2 x d^2
/// sparse matrix acting on vec(rho).
class Liouvillian {
 public:
  Liouvillian() = default;
  Liouvillian(Eigen::Index dim, SparseCMatrix matrix);

  Eigen::Index dim() const { return dim_; }
  const SparseCMatrix& matrix() const { return matrix_; }
  CMatrix dense() const { return CMatrix(matrix_); }

  CMatrix apply(const CMatrix& x) const;

  Liouvillian operator+(const Liouvillian& other) const;
  Liouvillian operator*(double s) const;

 private:
  Eigen::Index dim_ = 0;
  SparseCMatrix matrix_;
};

/// -i[H, .]
SparseCMatrix commutator_superop(const SparseCMatrix& h);

/// sum_k J_k . J_k^dag - 1/2 {J_k^dag J_k, .}
SparseCMatrix dissipator_superop(const std::vector<SparseCMatrix>& jumps);

Liouvillian lindblad(const SparseCMatrix& h, const std::vector<SparseCMatrix>& jumps);

/// Unique kernel of L normalized to unit trace. Solves the bordered system
///   [ L     v ] [rho]   [0]
///   [ tr^T  0 ] [ l ] = [1]
/// which is nonsingular exactly when the kernel is one-dimensional.
/// Throws NonUniqueSteadyStateError for a degenerate kernel.
DensityOperator steady_state(const Liouvillian& l);

/// max_ij |L(rho)_ij|
double steady_state_residual(const Liouvillian& l, const DensityOperator& rho);

}  // namespace eitcool
