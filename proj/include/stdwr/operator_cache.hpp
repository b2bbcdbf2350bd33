#pragma once

#include "stdwr/forms.hpp"
#include "stdwr/linear_solver.hpp"

#include <deque>
#include <memory>

namespace stdwr {

/// Bounded cache of spaces, assembled spatial operators and Kronecker factorizations,
/// keyed by object identity so consecutive slabs on one mesh share the work.
class OperatorCache {
 public:
  explicit OperatorCache(std::size_t capacity = 8) : capacity_(capacity) {}

  std::shared_ptr<const TaylorHoodSpace> space(const std::shared_ptr<const SpatialMesh>& mesh, int velocity_degree,
                                               int pressure_degree = -1);
  std::shared_ptr<const SpatialOperators> operators(const std::shared_ptr<const TaylorHoodSpace>& space, double nu,
                                                    int points_per_direction);
  std::shared_ptr<const KroneckerSlabSolver> kronecker(const std::shared_ptr<const SpatialOperators>& ops,
                                                       const std::shared_ptr<const TemporalBasis>& basis,
                                                       bool transposed);
  void clear();

 private:
  struct SpaceEntry {
    const SpatialMesh* mesh;
    int degree;
    int pressure_degree;
    std::shared_ptr<const SpatialMesh> keep;
    std::shared_ptr<const TaylorHoodSpace> value;
  };
  struct OpsEntry {
    const TaylorHoodSpace* space;
    double nu;
    int n;
    std::shared_ptr<const SpatialOperators> value;
  };
  struct KronEntry {
    const SpatialOperators* ops;
    const TemporalBasis* basis;
    bool transposed;
    std::shared_ptr<const SpatialOperators> keep_ops;
    std::shared_ptr<const TemporalBasis> keep_basis;
    std::shared_ptr<const KroneckerSlabSolver> value;
  };
  std::size_t capacity_;
  std::deque<SpaceEntry> spaces_;
  std::deque<OpsEntry> ops_;
  std::deque<KronEntry> kron_;
};

}  // namespace stdwr
