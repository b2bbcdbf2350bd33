#pragma once

#include "stdwr/estimator.hpp"

#include <string>
#include <vector>

namespace stdwr {

enum class SpaceMarking { averaging, fixed_rate };
enum class TimeScore { abs_sum, sum_abs };
SpaceMarking parse_space_marking(const std::string& name);
TimeScore parse_time_score(const std::string& name);
std::string to_string(SpaceMarking s);
std::string to_string(TimeScore s);

struct MarkingConfig {
  double equilibration = 1e7;
  SpaceMarking space = SpaceMarking::averaging;
  double alpha = 1.1;
  double space_rate = 30;  // percent, fixed-rate spatial strategy
  double time_rate = 75;   // percent
  TimeScore score = TimeScore::abs_sum;
};

struct RefinementDecision {
  bool refine_time = false;
  bool refine_space = false;
  std::vector<int> intervals;               // global interval indices
  std::vector<std::vector<int>> cells;      // per slab, mesh cell ids
};

/// Cell values from vertex indicators: sum over PU vertices of |eta_i| / (cells sharing vertex i).
std::vector<double> vertex_to_cell(const SpatialMesh& mesh, const std::vector<int>& pu_vertex,
                                   const Eigen::VectorXd& eta);

/// The ceil(rate/100 * n) largest scores, ties to the lower index.
std::vector<int> fixed_rate(const std::vector<double>& scores, double rate);

RefinementDecision mark(const ErrorIndicators& ind, const TemporalTriangulation& tri, const MarkingConfig& cfg);

/// Spatial refinement per slab (slabs sharing a mesh keep sharing when untouched), then temporal bisection.
TemporalTriangulation apply_refinement(const TemporalTriangulation& tri, const RefinementDecision& d);

/// Global refinement in time (all intervals) and/or space (every distinct mesh once).
TemporalTriangulation refine_uniformly(const TemporalTriangulation& tri, bool time, bool space);

}  // namespace stdwr
