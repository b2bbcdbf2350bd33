#pragma once

#include "stdwr/taylor_hood.hpp"

#include <Eigen/Sparse>

#include <memory>
#include <string>
#include <vector>

namespace stdwr {

enum class Equation { stokes, navier_stokes };
Equation parse_equation(const std::string& name);
std::string to_string(Equation e);

/// Geometric data of a tensor Gauss rule on every active cell of a pair.
struct CellQuadrature {
  int points_per_direction = 0;
  int n_q = 0;
  Tabulation velocity, pressure;   // reference tables
  Eigen::VectorXd jxw;             // (cell * n_q + q)
  std::vector<Eigen::Vector2d> points;
  using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  RowMatrix grad_x, grad_y;        // physical velocity shape gradients per row (cell * n_q + q)

  CellQuadrature(const TaylorHoodSpace& space, int points_per_direction);
  Eigen::Index row(int cell, int q) const { return Eigen::Index(cell) * n_q + q; }
};

/// Spatial operators of one pair: velocity mass and the Stokes operator
/// nu (grad v, grad phi) - (p, div phi) + (div v, psi), unconstrained and condensed.
struct SpatialOperators {
  std::shared_ptr<const TaylorHoodSpace> space;
  std::shared_ptr<const CellQuadrature> quadrature;
  double nu = 0;
  Eigen::SparseMatrix<double> mass, stokes;
  Eigen::SparseMatrix<double> mass_r, stokes_r;

  SpatialOperators(std::shared_ptr<const TaylorHoodSpace> space, double nu, int points_per_direction);
  Eigen::SparseMatrix<double> condense(const Eigen::SparseMatrix<double>& full) const;
};

/// Convection vector ((w.grad)w, phi) and, optionally, its derivative
/// delta -> ((delta.grad)w + (w.grad)delta, phi), both unconstrained.
void assemble_convection(const TaylorHoodSpace& space, const CellQuadrature& quad, const Eigen::VectorXd& w,
                         Eigen::VectorXd* vector, Eigen::SparseMatrix<double>* matrix);

/// Space-time form of one slab for dG(r) x Taylor-Hood with jump coupling to the incoming trace.
class SlabForm {
 public:
  SlabForm(Equation eq, SlabSpace slab, std::shared_ptr<const SpatialOperators> ops, InflowData inflow,
           Eigen::VectorXd initial_trace);

  Equation equation() const { return eq_; }
  bool linear() const { return eq_ == Equation::stokes; }
  const SlabSpace& slab() const { return slab_; }
  const SpatialOperators& operators() const { return *ops_; }
  const std::shared_ptr<const SpatialOperators>& operators_ptr() const { return ops_; }
  const InflowData& inflow() const { return inflow_; }
  const Eigen::VectorXd& initial_trace() const { return initial_trace_; }
  Eigen::Index n_unknowns() const { return slab_.n_free(); }

  /// Dirichlet values at temporal node a of interval m.
  const Eigen::VectorXd& dirichlet(int m, int a) const { return dirichlet_[m * slab_.basis->size() + a]; }

  Eigen::VectorXd expand(const Eigen::VectorXd& x) const;
  Eigen::VectorXd restrict_to_free(const Eigen::VectorXd& full) const;
  /// Reduced vector whose expansion equals `spatial` at every temporal node (Dirichlet rows overwritten).
  Eigen::VectorXd constant_guess(const Eigen::VectorXd& spatial) const;

  /// Residual tested with every full-space basis function.
  Eigen::VectorXd residual_full(const Eigen::VectorXd& full) const;
  Eigen::VectorXd residual(const Eigen::VectorXd& x) const;
  /// Condensed space-time Jacobian at x.
  Eigen::SparseMatrix<double> jacobian(const Eigen::VectorXd& x) const;
  /// Condensed Jacobian linearized at a full space-time vector (boundary values taken as given).
  Eigen::SparseMatrix<double> jacobian_at(const Eigen::VectorXd& full) const;
  /// Condense a full space-time test vector: blocks of C^T r.
  Eigen::VectorXd condense(const Eigen::VectorXd& full_residual) const;

 private:
  std::vector<Eigen::VectorXd> spatial_at_quadrature(const Eigen::VectorXd& full, int m) const;

  Equation eq_;
  SlabSpace slab_;
  std::shared_ptr<const SpatialOperators> ops_;
  InflowData inflow_;
  Eigen::VectorXd initial_trace_;
  std::vector<Eigen::VectorXd> dirichlet_;
};

/// Assemble a block matrix sum_k coeff_k(I,J) (x) S_k from temporal coefficient matrices.
struct KroneckerTerm {
  const Eigen::SparseMatrix<double>* spatial;
  Eigen::MatrixXd temporal;  // n_blocks x n_blocks
};
Eigen::SparseMatrix<double> kronecker_sum(const std::vector<KroneckerTerm>& terms, Eigen::Index n_blocks);

}  // namespace stdwr
