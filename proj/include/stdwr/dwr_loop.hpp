#pragma once

#include "stdwr/config.hpp"
#include "stdwr/estimator.hpp"

#include <functional>
#include <iosfwd>
#include <optional>
#include <vector>

namespace stdwr {

/// One row of the loop summary.
struct LoopRow {
  int loop = 0;
  std::size_t primal_dofs = 0;   // space-time
  std::size_t adjoint_dofs = 0;
  std::size_t spatial_dofs = 0;  // largest slab pair
  int slabs = 0;
  int intervals = 0;
  double eta_k = 0, eta_h = 0, eta = 0;
  double oracle_k = 0, oracle_h = 0;
  double j = 0;
  std::optional<double> error;            // J_ref - J
  std::optional<Effectivity> effectivity;
  int max_newton = 0;
  double seconds = 0;
};

/// Outcome of one discretization: primal run, goal value and (optionally) indicators.
struct Evaluation {
  PrimalRun primal;
  ErrorIndicators indicators;
  LoopRow row;
};

TemporalTriangulation initial_triangulation(const Config& cfg);

/// Sign self-check of the force normal for drag benchmarks with a reference value; throws on mismatch.
void check_force_orientation(const Config& cfg);

/// Primal march, goal, and if requested adjoint plus indicators on a given discretization.
Evaluation evaluate_discretization(const Config& cfg, const TemporalTriangulation& tri, std::ostream* log = nullptr);

using LoopObserver = std::function<void(const Evaluation&)>;

struct RunReport {
  Config config;
  std::vector<LoopRow> rows;
  std::string failure;  // set when a loop aborted
};

/// DWR loops with marking and refinement between them. The observer sees each loop's full evaluation.
RunReport run_dwr_loop(const Config& cfg, std::ostream* log = nullptr, const LoopObserver& observer = {});

struct StudyEntry {
  int space_level = 0;
  int time_level = 0;
  LoopRow row;
};
/// Uniform grid search over spatial and temporal refinement levels.
std::vector<StudyEntry> run_uniform_study(const Config& cfg, std::ostream* log = nullptr);

}  // namespace stdwr
