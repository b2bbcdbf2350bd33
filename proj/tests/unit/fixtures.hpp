#pragma once

#include "stdwr/forms.hpp"
#include "stdwr/mesh.hpp"
#include "stdwr/newton.hpp"
#include "stdwr/operator_cache.hpp"

#include <memory>
#include <random>

namespace fixture {

inline std::shared_ptr<const stdwr::SpatialMesh> mesh(stdwr::Geometry g, int refinements = 0) {
  auto m = std::make_shared<stdwr::SpatialMesh>(stdwr::SpatialMesh::coarse(g));
  m->refine_globally(refinements);
  return m;
}

inline Eigen::VectorXd random_vector(Eigen::Index n, unsigned seed, double scale = 1.0) {
  std::mt19937 gen(seed);
  std::uniform_real_distribution<double> d(-scale, scale);
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = d(gen);
  return v;
}

/// Full vector with random free values and consistent constraints.
inline Eigen::VectorXd random_full(const stdwr::TaylorHoodSpace& s, unsigned seed, double scale = 1.0) {
  return s.expand(random_vector(s.n_free(), seed, scale), Eigen::VectorXd::Zero(s.n_dirichlet()));
}

/// One slab with `n` intervals on [t0, t0 + n k].
struct Slab {
  stdwr::OperatorCache cache;
  stdwr::SlabSpace slab;
  std::shared_ptr<const stdwr::SpatialOperators> ops;
  stdwr::InflowData inflow;

  Slab(stdwr::Geometry g, int refinements, int r, double t0, double k, int n, int degree = 2, int quad = 3,
       double nu = 1e-3) {
    inflow.geometry = g;
    auto space = cache.space(mesh(g, refinements), degree);
    slab.space = space;
    slab.basis = std::make_shared<const stdwr::TemporalBasis>(r, stdwr::SupportFamily::gauss_legendre);
    for (int m = 0; m < n; ++m) slab.intervals.push_back({t0 + m * k, t0 + (m + 1) * k});
    ops = cache.operators(space, nu, quad);
  }

  stdwr::SlabForm form(stdwr::Equation eq, const Eigen::VectorXd& incoming) const {
    return stdwr::SlabForm(eq, slab, ops, inflow, incoming);
  }
  stdwr::SlabForm form(stdwr::Equation eq) const {
    return form(eq, Eigen::VectorXd::Zero(slab.space->n_full()));
  }
};

}  // namespace fixture
