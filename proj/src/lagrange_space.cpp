#include "stdwr/lagrange_space.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

namespace stdwr {

Eigen::Vector2d CellGeometry::map(const Eigen::Vector2d& xi) const {
  const double a = xi.x(), b = xi.y();
  return (1 - a) * (1 - b) * p_[0] + a * (1 - b) * p_[1] + a * b * p_[2] + (1 - a) * b * p_[3];
}

Eigen::Matrix2d CellGeometry::jacobian(const Eigen::Vector2d& xi) const {
  const double a = xi.x(), b = xi.y();
  Eigen::Matrix2d j;
  j.col(0) = -(1 - b) * p_[0] + (1 - b) * p_[1] + b * p_[2] - b * p_[3];
  j.col(1) = -(1 - a) * p_[0] - a * p_[1] + a * p_[2] + (1 - a) * p_[3];
  return j;
}

Eigen::Vector2d CellGeometry::inverse_map(const Eigen::Vector2d& x) const {
  Eigen::Vector2d xi(0.5, 0.5);
  for (int it = 0; it < 50; ++it) {
    const Eigen::Vector2d r = map(xi) - x;
    const Eigen::Vector2d d = jacobian(xi).lu().solve(r);
    xi -= d;
    if (d.lpNorm<Eigen::Infinity>() < 1e-15) break;
  }
  return xi;
}

bool inside_reference(const Eigen::Vector2d& xi, double tol) {
  return xi.x() >= -tol && xi.x() <= 1 + tol && xi.y() >= -tol && xi.y() <= 1 + tol;
}

ReferenceQuad::ReferenceQuad(int degree) : s_(degree), basis1d_(gauss_lobatto<double>(degree + 1).points) {
  if (degree < 1) throw std::invalid_argument("Lagrange degree must be >= 1");
}

Eigen::Vector2d ReferenceQuad::node(int local) const {
  const int ix = local % (s_ + 1), iy = local / (s_ + 1);
  return {basis1d_.nodes()(ix), basis1d_.nodes()(iy)};
}

void ReferenceQuad::values(const Eigen::Vector2d& xi, Eigen::VectorXd& out) const {
  const Eigen::VectorXd lx = basis1d_.values(xi.x());
  const Eigen::VectorXd ly = basis1d_.values(xi.y());
  out.resize(n_dofs());
  for (int iy = 0; iy <= s_; ++iy)
    for (int ix = 0; ix <= s_; ++ix) out(iy * (s_ + 1) + ix) = lx(ix) * ly(iy);
}

void ReferenceQuad::gradients(const Eigen::Vector2d& xi, Eigen::MatrixX2d& out) const {
  const Eigen::VectorXd lx = basis1d_.values(xi.x());
  const Eigen::VectorXd ly = basis1d_.values(xi.y());
  const Eigen::VectorXd dx = basis1d_.derivatives(xi.x());
  const Eigen::VectorXd dy = basis1d_.derivatives(xi.y());
  out.resize(n_dofs(), 2);
  for (int iy = 0; iy <= s_; ++iy)
    for (int ix = 0; ix <= s_; ++ix) {
      out(iy * (s_ + 1) + ix, 0) = dx(ix) * ly(iy);
      out(iy * (s_ + 1) + ix, 1) = lx(ix) * dy(iy);
    }
}

Tabulation tabulate_at(const ReferenceQuad& element, const std::vector<Eigen::Vector2d>& points) {
  Tabulation t;
  t.points = points;
  t.weights = Eigen::VectorXd::Zero(Eigen::Index(points.size()));
  t.values.resize(Eigen::Index(points.size()), element.n_dofs());
  t.grads.resize(points.size());
  Eigen::VectorXd v;
  for (std::size_t q = 0; q < points.size(); ++q) {
    element.values(points[q], v);
    t.values.row(Eigen::Index(q)) = v.transpose();
    element.gradients(points[q], t.grads[q]);
  }
  return t;
}

Tabulation tabulate(const ReferenceQuad& element, int n) {
  const auto g = gauss_legendre<double>(n);
  std::vector<Eigen::Vector2d> pts;
  Eigen::VectorXd w(n * n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      pts.emplace_back(g.points(i), g.points(j));
      w(j * n + i) = g.weights(i) * g.weights(j);
    }
  Tabulation t = tabulate_at(element, pts);
  t.weights = w;
  return t;
}

std::vector<int> edge_local_nodes(int s, int le) {
  std::vector<int> out(s + 1);
  for (int j = 0; j <= s; ++j) {
    switch (le) {
      case 0: out[j] = j; break;
      case 1: out[j] = j * (s + 1) + s; break;
      case 2: out[j] = s * (s + 1) + j; break;
      default: out[j] = j * (s + 1); break;
    }
  }
  return out;
}

ScalarLagrangeSpace::ScalarLagrangeSpace(std::shared_ptr<const SpatialMesh> mesh, int degree,
                                         const std::function<bool(Boundary)>& dirichlet)
    : mesh_(std::move(mesh)), element_(degree) {
  const SpatialMesh& m = *mesh_;
  const int s = degree;
  const int nloc = element_.n_dofs();
  std::vector<int> vertex_dof(m.vertices().size(), -1);
  std::vector<int> edge_base(m.edges().size(), -1);
  cell_dofs_.assign(std::size_t(m.n_active()) * nloc, -1);

  auto new_dof = [&](const Eigen::Vector2d& x) {
    support_points_.push_back(x);
    return n_dofs_++;
  };

  for (int a = 0; a < m.n_active(); ++a) {
    const int id = m.active_cells()[a];
    const auto& cell = m.cell(id);
    const CellGeometry geo(m.corners(id));
    int* dofs = cell_dofs_.data() + std::size_t(a) * nloc;
    const int corner_local[4] = {0, s, s * (s + 1) + s, s * (s + 1)};
    for (int k = 0; k < 4; ++k) {
      int& d = vertex_dof[cell.v[k]];
      if (d < 0) d = new_dof(m.vertices()[cell.v[k]]);
      dofs[corner_local[k]] = d;
    }
    for (int le = 0; le < 4; ++le) {
      const int e = cell.e[le];
      const auto nodes = edge_local_nodes(s, le);
      if (edge_base[e] < 0 && s > 1) {
        edge_base[e] = n_dofs_;
        const bool rev = m.edge_reversed(id, le);
        for (int j = 0; j < s - 1; ++j) {
          const int local = nodes[1 + (rev ? s - 2 - j : j)];
          new_dof(geo.map(element_.node(local)));
        }
      }
      const bool rev = m.edge_reversed(id, le);
      for (int j = 0; j < s - 1; ++j) dofs[nodes[1 + j]] = edge_base[e] + (rev ? s - 2 - j : j);
    }
    for (int iy = 1; iy < s; ++iy)
      for (int ix = 1; ix < s; ++ix) {
        const int local = iy * (s + 1) + ix;
        dofs[local] = new_dof(geo.map(element_.node(local)));
      }
  }

  kind_.assign(n_dofs_, Kind::free);
  boundary_.assign(n_dofs_, Boundary::interior);
  constraints_.assign(n_dofs_, {});

  // Dirichlet and boundary markers
  for (int a = 0; a < m.n_active(); ++a) {
    const int id = m.active_cells()[a];
    const int* dofs = cell_dofs(a);
    for (int le = 0; le < 4; ++le) {
      const auto& e = m.edge(m.cell(id).e[le]);
      if (e.marker == Boundary::interior) continue;
      for (int local : edge_local_nodes(s, le)) {
        const int d = dofs[local];
        if (boundary_[d] == Boundary::interior || e.marker == Boundary::inflow) boundary_[d] = e.marker;
        if (dirichlet(e.marker)) kind_[d] = Kind::dirichlet;
      }
    }
  }

  // raw hanging constraints from every refined edge that is still used by an active cell
  std::vector<std::vector<std::pair<int, double>>> raw(n_dofs_);
  std::vector<char> done(m.edges().size(), 0);
  const Eigen::VectorXd& gll = element_.basis1d().nodes();
  for (int a = 0; a < m.n_active(); ++a) {
    const int id = m.active_cells()[a];
    for (int le = 0; le < 4; ++le) {
      const int e = m.cell(id).e[le];
      const auto& edge = m.edge(e);
      if (edge.children[0] < 0 || done[e]) continue;
      done[e] = 1;
      std::vector<int> masters;
      masters.push_back(vertex_dof[edge.v[0]]);
      for (int j = 0; j < s - 1; ++j) masters.push_back(edge_base[e] + j);
      masters.push_back(vertex_dof[edge.v[1]]);
      auto constrain = [&](int dof, double xi) {
        if (kind_[dof] == Kind::dirichlet) return;
        const Eigen::VectorXd w = element_.basis1d().values(xi);
        kind_[dof] = Kind::hanging;
        raw[dof].clear();
        for (int k = 0; k <= s; ++k)
          if (std::abs(w(k)) > 1e-15) raw[dof].emplace_back(masters[k], w(k));
      };
      constrain(vertex_dof[edge.midpoint], 0.5);
      for (int half = 0; half < 2; ++half) {
        const int child = edge.children[half];
        if (edge_base[child] < 0) continue;
        for (int j = 0; j < s - 1; ++j) constrain(edge_base[child] + j, 0.5 * half + 0.5 * gll(j + 1));
      }
    }
  }

  // resolve chains so every expansion refers to free or Dirichlet DoFs only
  std::vector<char> state(n_dofs_, 0);
  std::function<void(int)> resolve = [&](int d) {
    if (state[d] == 2) return;
    if (state[d] == 1) throw std::logic_error("cyclic hanging-node constraints");
    state[d] = 1;
    std::vector<std::pair<int, double>> out;
    for (const auto& [master, w] : raw[d]) {
      if (kind_[master] == Kind::hanging) {
        resolve(master);
        for (const auto& [mm, ww] : constraints_[master]) out.emplace_back(mm, w * ww);
      } else {
        out.emplace_back(master, w);
      }
    }
    // merge duplicates
    std::sort(out.begin(), out.end());
    std::vector<std::pair<int, double>> merged;
    for (const auto& p : out) {
      if (!merged.empty() && merged.back().first == p.first)
        merged.back().second += p.second;
      else
        merged.push_back(p);
    }
    constraints_[d] = std::move(merged);
    state[d] = 2;
  };
  for (int d = 0; d < n_dofs_; ++d)
    if (kind_[d] == Kind::hanging) resolve(d);
}

void ScalarLagrangeSpace::distribute(Eigen::Ref<Eigen::VectorXd> values) const {
  for (int d = 0; d < n_dofs_; ++d) {
    if (kind_[d] != Kind::hanging) continue;
    double v = 0;
    for (const auto& [master, w] : constraints_[d]) v += w * values(master);
    values(d) = v;
  }
}

}  // namespace stdwr
