#pragma once

#include "stdwr/forms.hpp"
#include "stdwr/operator_cache.hpp"
#include "stdwr/transfer.hpp"

#include <functional>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace stdwr {

struct NewtonConfig {
  double tolerance = 1e-10;
  int max_iterations = 10;
  int max_line_search = 10;
  double damping = 0.6;      // line search factor
  double theta_max = 0.1;    // reuse the Jacobian while the contraction stays below this
};

struct NewtonStep {
  int slab = 0;
  int iteration = 0;
  double residual = 0;       // after the step
  double theta = 0;
  int line_search = 0;
  bool reused = false;
};

class NonconvergenceError : public std::runtime_error {
 public:
  NonconvergenceError(const std::string& what, std::vector<NewtonStep> history)
      : std::runtime_error(what), history_(std::move(history)) {}
  const std::vector<NewtonStep>& history() const { return history_; }

 private:
  std::vector<NewtonStep> history_;
};

/// Returns a solver for J(x) delta = b given the linearization point x.
using LinearSolve = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;
using LinearizationFactory = std::function<LinearSolve(const Eigen::VectorXd& x)>;

struct NewtonResult {
  Eigen::VectorXd x;
  std::vector<NewtonStep> steps;
  int jacobians = 0;
  double initial_residual = 0;
  int iterations() const { return int(steps.size()); }
};

/// Damped Newton with Jacobian reuse; always takes at least one step.
NewtonResult newton_solve(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& residual,
                          const LinearizationFactory& linearize, Eigen::VectorXd x0, const NewtonConfig& config,
                          int slab = 0);

enum class InitialGuess { previous_trace, zero, extrapolation };
InitialGuess parse_initial_guess(const std::string& name);
std::string to_string(InitialGuess g);

/// Shared discretization data of primal runs.
struct PrimalSettings {
  Equation equation = Equation::stokes;
  double nu = 1e-3;
  InflowData inflow;
  int velocity_degree = 2;
  int pressure_degree = -1;  // velocity_degree - 1 unless set
  int temporal_degree = 1;
  SupportFamily family = SupportFamily::gauss_legendre;
  int quadrature = 3;
  NewtonConfig newton;
  InitialGuess guess = InitialGuess::previous_trace;
  ProjectionKind projection = ProjectionKind::none;
};

struct TransferRecord {
  int slab = 0;
  double time = 0;
  ProjectionKind kind = ProjectionKind::none;
  bool identical = true;
  double divergence_residual = -1;
  double first_residual = -1;
  double max_multiplier = 0;
};

/// Forward march through the slabs of a temporal triangulation.
struct PrimalRun {
  TemporalTriangulation triangulation;
  std::shared_ptr<const TemporalBasis> basis;
  std::vector<SpaceTimeVector> solutions;     // per slab, full vectors
  std::vector<Eigen::VectorXd> incoming;      // trace entering each slab, on that slab's pair
  std::vector<NewtonResult> newton;
  std::vector<TransferRecord> transfers;      // one per slab boundary with a mesh change or projection
  std::size_t total_dofs() const;
};

PrimalRun march_slabs(const TemporalTriangulation& tri, const PrimalSettings& settings, OperatorCache& cache,
                      std::ostream* log = nullptr);

/// Slab spaces of a triangulation for a given pair degree and temporal basis.
SlabSpace make_slab_space(const TemporalTriangulation& tri, int slab, OperatorCache& cache, int velocity_degree,
                          int pressure_degree,
                          std::shared_ptr<const TemporalBasis> basis);

void write_newton_csv(std::ostream& os, const PrimalRun& run);

}  // namespace stdwr
