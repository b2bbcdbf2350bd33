#pragma once

#include "stdwr/goal.hpp"
#include "stdwr/newton.hpp"

#include <functional>
#include <iosfwd>
#include <memory>

namespace stdwr {

struct AdjointSettings {
  int velocity_degree = 4;
  int pressure_degree = 2;
  int temporal_degree = 2;
  int quadrature = 6;
};

/// Everything known about one slab right after its adjoint solve, in the enriched space.
struct AdjointSlab {
  int slab = 0;
  SpaceTimeVector z;                                  // adjoint, full vectors
  SpaceTimeVector u;                                  // primal embedded in the enriched space
  Eigen::VectorXd incoming;                           // primal incoming trace embedded
  std::shared_ptr<const SpatialOperators> operators;  // enriched operators of the slab
};
using AdjointCallback = std::function<void(const AdjointSlab&)>;

/// Reverse march of the enriched adjoint linearized at the embedded primal solution.
/// The callback sees each slab once, last slab first; nothing is kept afterwards.
void solve_adjoint(const PrimalRun& primal, const PrimalSettings& settings, const Goal& goal,
                   const AdjointSettings& adjoint, OperatorCache& cache, const AdjointCallback& callback,
                   std::ostream* log = nullptr);

}  // namespace stdwr
