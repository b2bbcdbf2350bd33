#pragma once

#include "stdwr/adjoint.hpp"

#include <Eigen/Dense>

#include <iosfwd>
#include <memory>
#include <optional>
#include <vector>

namespace stdwr {

/// Adjoint weights in the enriched space: temporal Z - I_k Z, spatial I_k Z - I_h I_k Z.
struct Weights {
  SpaceTimeVector temporal, spatial;
};
Weights compute_weights(const SpaceTimeVector& z, const std::shared_ptr<const TaylorHoodSpace>& primal_space,
                        const std::shared_ptr<const TemporalBasis>& primal_basis);

/// Localized indicators of one slab; rows are partition-of-unity indices (free Q1 vertices),
/// columns the slab's intervals.
struct SlabIndicators {
  int slab = 0;
  int first_interval = 0;
  std::vector<int> pu_vertex;   // mesh vertex of each PU index
  Eigen::MatrixXd eta_k, eta_h;
  double oracle_k = 0, oracle_h = 0;  // unlocalized -R(U)(W)
};

struct ErrorIndicators {
  std::vector<SlabIndicators> slabs;  // slab order
  double eta_k() const;
  double eta_h() const;
  double eta() const { return eta_k() + eta_h(); }
  double oracle_k() const;
  double oracle_h() const;
  /// Sum over PU indices of eta_k per global interval.
  Eigen::VectorXd interval_eta_k() const;
};

/// Partition of unity on a mesh: Q1 hat functions, hanging vertices constrained, no boundary conditions.
struct PartitionOfUnity {
  explicit PartitionOfUnity(std::shared_ptr<const SpatialMesh> mesh);
  ScalarLagrangeSpace space;
  std::vector<int> free_index;   // Q1 DoF -> PU index or -1
  std::vector<int> vertex;       // PU index -> mesh vertex
  int size() const { return int(vertex.size()); }
};

/// Product-rule assembly of eta_k^{i,m} = -A(U)((Z - I_k Z) chi_i^m) and the spatial counterpart.
SlabIndicators compute_indicators(Equation eq, double nu, const SpaceTimeVector& u, const Eigen::VectorXd& incoming,
                                  const Weights& w, int points_per_direction, int first_interval);

/// Unlocalized -R(U)(W) evaluated from the assembled enriched residual.
void unlocalized_totals(const AdjointSlab& slab, const Weights& w, Equation eq, const InflowData& inflow,
                        SlabIndicators& out);

/// |eta / (J_ref - J)| and the signed ratio; nullopt on an exact hit.
struct Effectivity {
  double absolute, signed_value;
};
std::optional<Effectivity> effectivity(double eta, double j_reference, double j_computed);

void write_indicator_csv(std::ostream& os, const ErrorIndicators& ind);
void write_interval_csv(std::ostream& os, const ErrorIndicators& ind, const TemporalTriangulation& tri);

}  // namespace stdwr
