#pragma once

#include "stdwr/temporal.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/UmfPackSupport>

#include <complex>
#include <memory>
#include <vector>

namespace stdwr {

/// Sparse LU (UMFPACK) with one step of iterative refinement.
class DirectSolver {
 public:
  explicit DirectSolver(Eigen::SparseMatrix<double> matrix);
  // the factorization points into a_
  DirectSolver(const DirectSolver&) = delete;
  DirectSolver& operator=(const DirectSolver&) = delete;
  Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const;
  const Eigen::SparseMatrix<double>& matrix() const { return a_; }

 private:
  Eigen::SparseMatrix<double> a_;
  Eigen::UmfPackLU<Eigen::SparseMatrix<double>> lu_;
};

/// Solver for the linear slab operator
///   sum_m [(D+E) (x) M + k_m Mt (x) S] - jump (x) M
/// (or its transpose) by diagonalizing the temporal coupling of each interval:
/// one complex spatial factorization per eigenvalue pair, reused for equal interval lengths.
class KroneckerSlabSolver {
 public:
  KroneckerSlabSolver(std::shared_ptr<const TemporalBasis> basis, const Eigen::SparseMatrix<double>& mass,
                      const Eigen::SparseMatrix<double>& stokes, bool transposed);

  bool transposed() const { return transposed_; }
  Eigen::Index spatial_size() const { return mass_.rows(); }

  /// Apply the slab operator (for residual checks).
  Eigen::VectorXd apply(const std::vector<Interval>& intervals, const Eigen::VectorXd& x) const;
  Eigen::VectorXd solve(const std::vector<Interval>& intervals, const Eigen::VectorXd& rhs) const;
  int n_factorizations() const { return int(factors_.size()); }

 private:
  using ComplexMatrix = Eigen::SparseMatrix<std::complex<double>>;
  struct Factor {
    double k;
    std::vector<ComplexMatrix> matrices;  // UmfPackLU references these, keep them alive
    std::vector<std::unique_ptr<Eigen::UmfPackLU<ComplexMatrix>>> lu;  // per eigenvalue (null for conjugates)
  };
  const Factor& factor(double k) const;
  Eigen::MatrixXd solve_interval(double k, const Eigen::MatrixXd& rhs) const;
  Eigen::MatrixXd apply_interval(double k, const Eigen::MatrixXd& x) const;

  std::shared_ptr<const TemporalBasis> basis_;
  Eigen::SparseMatrix<double> mass_, stokes_;  // already transposed if requested
  bool transposed_;
  Eigen::VectorXcd lambda_;
  Eigen::MatrixXcd v_, v_inv_;
  Eigen::MatrixXd rhs_transform_;  // Mt^{-1}
  std::vector<int> conjugate_of_;  // -1 or the index whose conjugate this eigenpair is
  mutable std::vector<std::unique_ptr<Factor>> factors_;
};

}  // namespace stdwr
