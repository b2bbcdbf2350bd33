#pragma once

#include "stdwr/polynomials.hpp"

#include <Eigen/Dense>

#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

namespace stdwr {

class SpatialMesh;

enum class SupportFamily { gauss_legendre, gauss_lobatto };

SupportFamily parse_support_family(const std::string& name);
std::string to_string(SupportFamily f);

/// r+1 nodal points of the dG(r) basis on the reference interval [0,1].
Eigen::VectorXd reference_support_points(int r, SupportFamily family);

struct Interval {
  double t0 = 0;
  double t1 = 0;
  double length() const { return t1 - t0; }
  double to_reference(double t) const { return (t - t0) / (t1 - t0); }
  double from_reference(double tau) const { return t0 + tau * (t1 - t0); }
};

/// Nodal dG(r) basis with its (r+2)-point Gauss rule and reference matrices.
class TemporalBasis {
 public:
  TemporalBasis(int r, SupportFamily family);

  int degree() const { return r_; }
  int size() const { return r_ + 1; }
  SupportFamily family() const { return family_; }
  const Eigen::VectorXd& support_points() const { return lagrange_.nodes(); }
  const LagrangeBasis1D<double>& lagrange() const { return lagrange_; }

  struct Values {
    Eigen::VectorXd values;
    Eigen::VectorXd derivatives;  // d/dt on the physical interval
  };
  /// Basis values and time derivatives at t in the closure of the interval.
  Values eval(const Interval& interval, double t) const;

  /// Gauss rule on [0,1] with r+2 points.
  const QuadratureRule1D<double>& quadrature() const { return quadrature_; }
  /// phi_b(tau_q): rows are quadrature points.
  const Eigen::MatrixXd& quadrature_values() const { return qp_values_; }
  /// phi_b'(tau_q) on the reference interval.
  const Eigen::MatrixXd& quadrature_derivatives() const { return qp_derivatives_; }

  /// int_0^1 phi_a phi_b.
  const Eigen::MatrixXd& mass() const { return mass_; }
  /// int_0^1 phi_b' phi_a (row a, column b).
  const Eigen::MatrixXd& derivative() const { return derivative_; }
  /// phi_a(0) phi_b(0).
  const Eigen::MatrixXd& start_coupling() const { return start_; }
  const Eigen::VectorXd& values_at_start() const { return at_start_; }
  const Eigen::VectorXd& values_at_end() const { return at_end_; }

 private:
  int r_;
  SupportFamily family_;
  LagrangeBasis1D<double> lagrange_;
  QuadratureRule1D<double> quadrature_;
  Eigen::MatrixXd qp_values_, qp_derivatives_;
  Eigen::MatrixXd mass_, derivative_, start_;
  Eigen::VectorXd at_start_, at_end_;
};

/// One-sided limits and jump at an interval boundary. Columns of the coefficient
/// matrices are the temporal nodes; the left side may instead be an initial value.
struct Limits {
  Eigen::VectorXd minus, plus, jump;
};
Limits limits_and_jump(const TemporalBasis& basis, const Eigen::MatrixXd& left, const Eigen::MatrixXd& right);
Limits limits_and_jump_initial(const TemporalBasis& basis, const Eigen::VectorXd& initial,
                               const Eigen::MatrixXd& right);

/// Partition of [0,T] into intervals grouped into slabs, each slab with its own mesh.
class TemporalTriangulation {
 public:
  TemporalTriangulation() = default;
  static TemporalTriangulation uniform(double end_time, int n_intervals, std::shared_ptr<const SpatialMesh> mesh,
                                       int max_per_slab = 1);

  const std::vector<double>& times() const { return times_; }
  int n_intervals() const { return int(times_.size()) - 1; }
  int n_slabs() const { return int(slab_begin_.size()) - 1; }
  double end_time() const { return times_.back(); }
  Interval interval(int m) const { return {times_[m], times_[m + 1]}; }
  int slab_begin(int n) const { return slab_begin_[n]; }
  int slab_end(int n) const { return slab_begin_[n + 1]; }
  int slab_size(int n) const { return slab_end(n) - slab_begin(n); }
  int slab_of(int m) const;
  std::vector<Interval> slab_intervals(int n) const;
  int max_per_slab() const { return max_per_slab_; }

  const std::shared_ptr<const SpatialMesh>& mesh(int n) const { return meshes_[n]; }
  void set_mesh(int n, std::shared_ptr<const SpatialMesh> mesh) { meshes_[n] = std::move(mesh); }

  /// Bisect marked intervals and split slabs that exceed the interval limit.
  TemporalTriangulation refine_time(const std::vector<int>& marked) const;

  void write_csv(std::ostream& os) const;

 private:
  std::vector<double> times_;
  std::vector<int> slab_begin_;
  std::vector<std::shared_ptr<const SpatialMesh>> meshes_;
  int max_per_slab_ = 1;
};

}  // namespace stdwr
