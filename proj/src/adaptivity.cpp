#include "stdwr/adaptivity.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

namespace stdwr {

SpaceMarking parse_space_marking(const std::string& name) {
  if (name == "averaging") return SpaceMarking::averaging;
  if (name == "fixed_rate") return SpaceMarking::fixed_rate;
  throw std::invalid_argument("unknown spatial marking: " + name);
}

TimeScore parse_time_score(const std::string& name) {
  if (name == "abs_sum") return TimeScore::abs_sum;
  if (name == "sum_abs") return TimeScore::sum_abs;
  throw std::invalid_argument("unknown temporal score: " + name);
}

std::string to_string(SpaceMarking s) { return s == SpaceMarking::averaging ? "averaging" : "fixed_rate"; }
std::string to_string(TimeScore s) { return s == TimeScore::abs_sum ? "abs_sum" : "sum_abs"; }

std::vector<double> vertex_to_cell(const SpatialMesh& mesh, const std::vector<int>& pu_vertex,
                                   const Eigen::VectorXd& eta) {
  std::vector<int> count(mesh.vertices().size(), 0);
  for (int id : mesh.active_cells())
    for (int v : mesh.cell(id).v) ++count[v];
  std::vector<double> at_vertex(mesh.vertices().size(), 0.0);
  std::vector<char> is_pu(mesh.vertices().size(), 0);
  for (std::size_t i = 0; i < pu_vertex.size(); ++i) {
    at_vertex[pu_vertex[i]] = std::abs(eta(Eigen::Index(i)));
    is_pu[pu_vertex[i]] = 1;
  }
  std::vector<double> out(std::size_t(mesh.n_active()), 0.0);
  for (int a = 0; a < mesh.n_active(); ++a)
    for (int v : mesh.cell(mesh.active_cells()[a]).v)
      if (is_pu[v]) out[a] += at_vertex[v] / count[v];
  return out;
}

std::vector<int> fixed_rate(const std::vector<double>& scores, double rate) {
  const int n = int(scores.size());
  const int k = std::min(n, int(std::ceil(rate * n / 100.0 - 1e-9)));
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return scores[a] > scores[b]; });
  idx.resize(std::max(0, k));
  std::sort(idx.begin(), idx.end());
  return idx;
}

RefinementDecision mark(const ErrorIndicators& ind, const TemporalTriangulation& tri, const MarkingConfig& cfg) {
  RefinementDecision d;
  const double ek = std::abs(ind.eta_k()), eh = std::abs(ind.eta_h());
  d.refine_time = cfg.equilibration * ek >= eh;
  d.refine_space = cfg.equilibration * eh >= ek;
  if (d.refine_time) {
    std::vector<double> score(std::size_t(tri.n_intervals()), 0.0);
    for (const auto& s : ind.slabs)
      for (Eigen::Index m = 0; m < s.eta_k.cols(); ++m)
        score[std::size_t(s.first_interval + m)] =
            cfg.score == TimeScore::abs_sum ? std::abs(s.eta_k.col(m).sum()) : s.eta_k.col(m).cwiseAbs().sum();
    d.intervals = fixed_rate(score, cfg.time_rate);
  }
  d.cells.assign(std::size_t(tri.n_slabs()), {});
  if (d.refine_space) {
    for (const auto& s : ind.slabs) {
      const SpatialMesh& mesh = *tri.mesh(s.slab);
      const Eigen::VectorXd eta = s.eta_h.rowwise().sum();
      const std::vector<double> cell = vertex_to_cell(mesh, s.pu_vertex, eta);
      std::vector<int> marked;
      if (cfg.space == SpaceMarking::averaging) {
        const double mean = std::accumulate(cell.begin(), cell.end(), 0.0) / double(cell.size());
        for (std::size_t a = 0; a < cell.size(); ++a)
          if (cell[a] > cfg.alpha * mean) marked.push_back(int(a));
      } else {
        marked = fixed_rate(cell, cfg.space_rate);
      }
      for (int a : marked) d.cells[std::size_t(s.slab)].push_back(mesh.active_cells()[a]);
    }
  }
  return d;
}

TemporalTriangulation apply_refinement(const TemporalTriangulation& tri, const RefinementDecision& d) {
  TemporalTriangulation out = tri;
  for (int n = 0; n < tri.n_slabs() && n < int(d.cells.size()); ++n) {
    if (d.cells[n].empty()) continue;
    auto mesh = std::make_shared<SpatialMesh>(*tri.mesh(n));
    mesh->refine(d.cells[n]);
    out.set_mesh(n, std::move(mesh));
  }
  if (d.refine_time && !d.intervals.empty()) out = out.refine_time(d.intervals);
  return out;
}

TemporalTriangulation refine_uniformly(const TemporalTriangulation& tri, bool time, bool space) {
  TemporalTriangulation out = tri;
  if (space) {
    std::map<const SpatialMesh*, std::shared_ptr<const SpatialMesh>> done;
    for (int n = 0; n < tri.n_slabs(); ++n) {
      auto& fine = done[tri.mesh(n).get()];
      if (!fine) {
        auto mesh = std::make_shared<SpatialMesh>(*tri.mesh(n));
        mesh->refine_globally(1);
        fine = std::move(mesh);
      }
      out.set_mesh(n, fine);
    }
  }
  if (time) {
    std::vector<int> all(std::size_t(tri.n_intervals()));
    std::iota(all.begin(), all.end(), 0);
    out = out.refine_time(all);
  }
  return out;
}

}  // namespace stdwr
