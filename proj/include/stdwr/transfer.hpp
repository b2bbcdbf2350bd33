#pragma once

#include "stdwr/taylor_hood.hpp"

#include <Eigen/Dense>

#include <string>

namespace stdwr {

enum class ProjectionKind { none, l2_divfree, h1_divfree };
ProjectionKind parse_projection(const std::string& name);
std::string to_string(ProjectionKind k);

struct TransferResult {
  Eigen::VectorXd values;           // full vector on the target pair
  Eigen::VectorXd multiplier;       // pressure multiplier of the projection (free pressure DoFs), empty for none
  double divergence_residual = 0;   // max over free pressure tests of |(div v, psi)|
  double first_residual = 0;        // max residual of the velocity equation of the saddle point system
};

/// Move a velocity-pressure trace between meshes of one refinement hierarchy.
/// `none` interpolates nodally; the projections solve a discrete saddle point problem on the target
/// with Dirichlet data of time t. The pressure is always interpolated.
TransferResult transfer_trace(const TaylorHoodSpace& from, const Eigen::VectorXd& trace, const TaylorHoodSpace& to,
                              ProjectionKind kind, const InflowData& inflow, double t, int points_per_direction = 4);

/// max over free pressure tests of |(div v, psi)| for a full vector v of `space`.
double divergence_residual(const TaylorHoodSpace& space, const Eigen::VectorXd& full, int points_per_direction = 4);

}  // namespace stdwr
