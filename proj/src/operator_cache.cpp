#include "stdwr/operator_cache.hpp"

namespace stdwr {

std::shared_ptr<const TaylorHoodSpace> OperatorCache::space(const std::shared_ptr<const SpatialMesh>& mesh,
                                                            int velocity_degree, int pressure_degree) {
  for (const auto& e : spaces_)
    if (e.mesh == mesh.get() && e.degree == velocity_degree && e.pressure_degree == pressure_degree) return e.value;
  auto value = std::make_shared<const TaylorHoodSpace>(mesh, velocity_degree, pressure_degree);
  if (spaces_.size() >= capacity_) spaces_.pop_front();
  spaces_.push_back({mesh.get(), velocity_degree, pressure_degree, mesh, value});
  return value;
}

std::shared_ptr<const SpatialOperators> OperatorCache::operators(const std::shared_ptr<const TaylorHoodSpace>& space,
                                                                 double nu, int n) {
  for (const auto& e : ops_)
    if (e.space == space.get() && e.nu == nu && e.n == n) return e.value;
  auto value = std::make_shared<const SpatialOperators>(space, nu, n);
  if (ops_.size() >= capacity_) ops_.pop_front();
  ops_.push_back({space.get(), nu, n, value});
  return value;
}

std::shared_ptr<const KroneckerSlabSolver> OperatorCache::kronecker(const std::shared_ptr<const SpatialOperators>& ops,
                                                                    const std::shared_ptr<const TemporalBasis>& basis,
                                                                    bool transposed) {
  for (const auto& e : kron_)
    if (e.ops == ops.get() && e.basis == basis.get() && e.transposed == transposed) return e.value;
  auto value = std::make_shared<const KroneckerSlabSolver>(basis, ops->mass_r, ops->stokes_r, transposed);
  // factorizations are the large objects; keep only a couple alive
  if (kron_.size() >= 2) kron_.pop_front();
  kron_.push_back({ops.get(), basis.get(), transposed, ops, basis, value});
  return value;
}

void OperatorCache::clear() {
  spaces_.clear();
  ops_.clear();
  kron_.clear();
}

}  // namespace stdwr
