#include "stdwr/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <set>
#include <stdexcept>

namespace stdwr {

Geometry parse_geometry(const std::string& name) {
  if (name == "cylinder2d3") return Geometry::cylinder2d3;
  if (name == "backward_step") return Geometry::backward_step;
  if (name == "unit_square") return Geometry::unit_square;
  throw std::invalid_argument("unknown geometry '" + name + "'");
}

std::string to_string(Geometry g) {
  switch (g) {
    case Geometry::cylinder2d3: return "cylinder2d3";
    case Geometry::backward_step: return "backward_step";
    case Geometry::unit_square: return "unit_square";
  }
  return "?";
}

std::string to_string(Boundary b) {
  switch (b) {
    case Boundary::interior: return "interior";
    case Boundary::inflow: return "inflow";
    case Boundary::outflow: return "outflow";
    case Boundary::wall: return "wall";
    case Boundary::circle: return "circle";
  }
  return "?";
}

bool CellKey::is_ancestor_of(const CellKey& other) const {
  if (coarse != other.coarse || level > other.level) return false;
  return (other.path >> (2 * (other.level - level))) == path;
}

namespace {

struct CoarseTemplate {
  std::vector<Eigen::Vector2d> vertices;
  std::vector<std::array<int, 4>> quads;
};

class VertexPool {
 public:
  int operator()(double x, double y) {
    for (std::size_t i = 0; i < pts.size(); ++i)
      if (std::abs(pts[i].x() - x) < 1e-14 && std::abs(pts[i].y() - y) < 1e-14) return int(i);
    pts.emplace_back(x, y);
    return int(pts.size()) - 1;
  }
  int add_exact(const Eigen::Vector2d& p) {
    pts.push_back(p);
    return int(pts.size()) - 1;
  }
  std::vector<Eigen::Vector2d> pts;
};

void add_grid(VertexPool& pool, std::vector<std::array<int, 4>>& quads, const std::vector<double>& xs,
              const std::vector<double>& ys) {
  for (std::size_t j = 0; j + 1 < ys.size(); ++j)
    for (std::size_t i = 0; i + 1 < xs.size(); ++i)
      quads.push_back({pool(xs[i], ys[j]), pool(xs[i + 1], ys[j]), pool(xs[i + 1], ys[j + 1]),
                       pool(xs[i], ys[j + 1])});
}

CoarseTemplate cylinder_template() {
  VertexPool pool;
  std::vector<std::array<int, 4>> quads;
  const Eigen::Vector2d c = SpatialMesh::circle_center();
  const double r = SpatialMesh::circle_radius;
  // ring: outer square [0.1,0.3]^2 sampled at 45 degree steps starting east
  const double outer[8][2] = {{0.3, 0.2}, {0.3, 0.3}, {0.2, 0.3}, {0.1, 0.3},
                              {0.1, 0.2}, {0.1, 0.1}, {0.2, 0.1}, {0.3, 0.1}};
  int out_id[8], in_id[8];
  for (int j = 0; j < 8; ++j) {
    out_id[j] = pool(outer[j][0], outer[j][1]);
    const double theta = j * M_PI / 4;
    in_id[j] = pool.add_exact(c + r * Eigen::Vector2d(std::cos(theta), std::sin(theta)));
  }
  for (int j = 0; j < 8; ++j) {
    const int n = (j + 1) % 8;
    quads.push_back({in_id[j], out_id[j], out_id[n], in_id[n]});
  }
  add_grid(pool, quads, {0.0, 0.1}, {0.0, 0.1, 0.2, 0.3, 0.41});
  add_grid(pool, quads, {0.1, 0.2, 0.3}, {0.0, 0.1});
  add_grid(pool, quads, {0.1, 0.2, 0.3}, {0.3, 0.41});
  add_grid(pool, quads, {0.3, 0.45, 0.65, 0.9, 1.2, 1.65, 2.2}, {0.0, 0.1, 0.2, 0.3, 0.41});
  return {pool.pts, quads};
}

CoarseTemplate step_template() {
  VertexPool pool;
  std::vector<std::array<int, 4>> quads;
  add_grid(pool, quads, {-0.5, 0.0}, {0.5, 1.0});
  add_grid(pool, quads, {0.0, 0.5, 1.0, 1.5, 2.0}, {0.0, 0.5, 1.0});
  return {pool.pts, quads};
}

CoarseTemplate square_template() {
  VertexPool pool;
  std::vector<std::array<int, 4>> quads;
  add_grid(pool, quads, {0.0, 1.0}, {0.0, 1.0});
  return {pool.pts, quads};
}

Boundary classify(Geometry g, const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
  auto on_x = [&](double x) { return std::abs(a.x() - x) < 1e-12 && std::abs(b.x() - x) < 1e-12; };
  switch (g) {
    case Geometry::cylinder2d3: {
      const Eigen::Vector2d c = SpatialMesh::circle_center();
      const double r = SpatialMesh::circle_radius;
      if (std::abs((a - c).norm() - r) < 1e-12 && std::abs((b - c).norm() - r) < 1e-12)
        return Boundary::circle;
      if (on_x(0.0)) return Boundary::inflow;
      if (on_x(2.2)) return Boundary::outflow;
      return Boundary::wall;
    }
    case Geometry::backward_step:
      if (on_x(-0.5)) return Boundary::inflow;
      if (on_x(2.0)) return Boundary::outflow;
      return Boundary::wall;
    case Geometry::unit_square:
      if (on_x(0.0)) return Boundary::inflow;
      if (on_x(1.0)) return Boundary::outflow;
      return Boundary::wall;
  }
  return Boundary::wall;
}

double quad_area(const std::array<Eigen::Vector2d, 4>& p) {
  double s = 0;
  for (int i = 0; i < 4; ++i) {
    const auto& a = p[i];
    const auto& b = p[(i + 1) % 4];
    s += a.x() * b.y() - b.x() * a.y();
  }
  return 0.5 * s;
}

}  // namespace

std::array<int, 2> SpatialMesh::local_edge_corners(int local_edge) {
  static constexpr std::array<std::array<int, 2>, 4> table{{{0, 1}, {1, 2}, {3, 2}, {0, 3}}};
  return table[local_edge];
}

int SpatialMesh::add_vertex(const Eigen::Vector2d& x) {
  vertices_.push_back(x);
  return int(vertices_.size()) - 1;
}

int SpatialMesh::add_edge(int a, int b, Boundary marker) {
  Edge e;
  e.v = {a, b};
  e.marker = marker;
  edges_.push_back(e);
  return int(edges_.size()) - 1;
}

SpatialMesh SpatialMesh::coarse(Geometry g) {
  CoarseTemplate t;
  switch (g) {
    case Geometry::cylinder2d3: t = cylinder_template(); break;
    case Geometry::backward_step: t = step_template(); break;
    case Geometry::unit_square: t = square_template(); break;
  }
  SpatialMesh mesh;
  mesh.geometry_ = g;
  mesh.vertices_ = t.vertices;
  std::map<std::pair<int, int>, int> edge_of;
  for (std::size_t q = 0; q < t.quads.size(); ++q) {
    const auto& quad = t.quads[q];
    if (quad_area({t.vertices[quad[0]], t.vertices[quad[1]], t.vertices[quad[2]], t.vertices[quad[3]]}) <= 0)
      throw std::logic_error("coarse template cell is not counterclockwise");
    Cell cell;
    cell.v = quad;
    cell.coarse = int(q);
    const int id = int(mesh.cells_.size());
    for (int le = 0; le < 4; ++le) {
      const auto [la, lb] = local_edge_corners(le);
      const int a = quad[la], b = quad[lb];
      const auto key = std::minmax(a, b);
      auto it = edge_of.find(key);
      int e;
      if (it == edge_of.end()) {
        e = mesh.add_edge(a, b, Boundary::interior);
        edge_of.emplace(key, e);
      } else {
        e = it->second;
      }
      cell.e[le] = e;
      auto& owners = mesh.edges_[e].cells;
      (owners[0] < 0 ? owners[0] : owners[1]) = id;
    }
    mesh.cells_.push_back(cell);
    mesh.coarse_cells_.push_back(id);
  }
  for (auto& e : mesh.edges_)
    if (e.cells[1] < 0) e.marker = classify(g, mesh.vertices_[e.v[0]], mesh.vertices_[e.v[1]]);
  mesh.rebuild_active();
  return mesh;
}

bool SpatialMesh::edge_reversed(int cell_id, int local_edge) const {
  const auto& c = cells_[cell_id];
  return edges_[c.e[local_edge]].v[0] != c.v[local_edge_corners(local_edge)[0]];
}

int SpatialMesh::split_edge(int e) {
  if (edges_[e].midpoint >= 0) return edges_[e].midpoint;
  const Edge ed = edges_[e];
  Eigen::Vector2d m = 0.5 * (vertices_[ed.v[0]] + vertices_[ed.v[1]]);
  if (ed.marker == Boundary::circle) {
    const Eigen::Vector2d c = circle_center();
    m = c + circle_radius * (m - c).normalized();
  }
  const int mid = add_vertex(m);
  const int c0 = add_edge(ed.v[0], mid, ed.marker);
  const int c1 = add_edge(mid, ed.v[1], ed.marker);
  edges_[c0].parent = e;
  edges_[c1].parent = e;
  edges_[e].midpoint = mid;
  edges_[e].children = {c0, c1};
  return mid;
}

void SpatialMesh::refine_cell(int id) {
  if (!cells_[id].active) return;
  std::array<int, 4> m{};
  // halves[le] = {edge from first local corner to midpoint, edge from midpoint to second}
  std::array<std::array<int, 2>, 4> halves{};
  for (int le = 0; le < 4; ++le) {
    const int e = cells_[id].e[le];
    m[le] = split_edge(e);
    const auto ch = edges_[e].children;
    if (edge_reversed(id, le))
      halves[le] = {ch[1], ch[0]};
    else
      halves[le] = {ch[0], ch[1]};
  }
  const Cell parent = cells_[id];
  Eigen::Vector2d center = Eigen::Vector2d::Zero();
  for (int k = 0; k < 4; ++k) center += 0.25 * vertices_[parent.v[k]];
  const int c = add_vertex(center);
  const int i0 = add_edge(m[0], c, Boundary::interior);
  const int i1 = add_edge(m[1], c, Boundary::interior);
  const int i2 = add_edge(m[2], c, Boundary::interior);
  const int i3 = add_edge(m[3], c, Boundary::interior);

  const std::array<std::array<int, 4>, 4> verts{{{parent.v[0], m[0], c, m[3]},
                                                 {m[0], parent.v[1], m[1], c},
                                                 {c, m[1], parent.v[2], m[2]},
                                                 {m[3], c, m[2], parent.v[3]}}};
  const std::array<std::array<int, 4>, 4> edges{{{halves[0][0], i0, i3, halves[3][0]},
                                                 {halves[0][1], halves[1][0], i1, i0},
                                                 {i1, halves[1][1], halves[2][1], i2},
                                                 {i3, i2, halves[2][0], halves[3][1]}}};
  for (int k = 0; k < 4; ++k) {
    Cell child;
    child.v = verts[k];
    child.e = edges[k];
    child.parent = id;
    child.level = parent.level + 1;
    child.coarse = parent.coarse;
    child.path = (parent.path << 2) | std::uint64_t(k);
    const int cid = int(cells_.size());
    cells_.push_back(child);
    cells_[id].children[k] = cid;
    for (int le = 0; le < 4; ++le) {
      auto& owners = edges_[child.e[le]].cells;
      (owners[0] < 0 ? owners[0] : owners[1]) = cid;
    }
  }
  cells_[id].active = false;
}

std::vector<int> SpatialMesh::closure(const std::vector<int>& marked_cells) const {
  std::set<int> marked(marked_cells.begin(), marked_cells.end());
  std::vector<int> work(marked.begin(), marked.end());
  std::vector<int> added;
  while (!work.empty()) {
    const int id = work.back();
    work.pop_back();
    for (int le = 0; le < 4; ++le) {
      const int p = edges_[cells_[id].e[le]].parent;
      if (p < 0) continue;
      for (int owner : edges_[p].cells) {
        if (owner < 0 || !cells_[owner].active) continue;
        if (marked.insert(owner).second) {
          work.push_back(owner);
          added.push_back(owner);
        }
      }
    }
  }
  return added;
}

void SpatialMesh::refine(const std::vector<int>& marked_cells) {
  if (marked_cells.empty()) return;
  for (int id : marked_cells)
    if (id < 0 || id >= int(cells_.size()) || !cells_[id].active)
      throw std::invalid_argument("refine: marked cell is not active");
  std::vector<int> all = marked_cells;
  const auto extra = closure(marked_cells);
  all.insert(all.end(), extra.begin(), extra.end());
  std::sort(all.begin(), all.end());
  all.erase(std::unique(all.begin(), all.end()), all.end());
  for (int id : all) refine_cell(id);
  rebuild_active();
}

void SpatialMesh::refine_globally(int times) {
  for (int t = 0; t < times; ++t) refine(active_);
}

void SpatialMesh::rebuild_active() {
  active_.clear();
  std::vector<int> stack;
  for (int c : coarse_cells_) {
    stack.push_back(c);
    while (!stack.empty()) {
      const int id = stack.back();
      stack.pop_back();
      if (cells_[id].active) {
        active_.push_back(id);
      } else {
        for (int k = 3; k >= 0; --k) stack.push_back(cells_[id].children[k]);
      }
    }
  }
  active_index_.assign(cells_.size(), -1);
  for (std::size_t i = 0; i < active_.size(); ++i) active_index_[active_[i]] = int(i);
  key_to_cell_.clear();
  for (std::size_t id = 0; id < cells_.size(); ++id) key_to_cell_.emplace(key(int(id)), int(id));
}

CellKey SpatialMesh::key(int cell_id) const {
  const auto& c = cells_[cell_id];
  return {c.coarse, c.level, c.path};
}

std::optional<int> SpatialMesh::find_cell(const CellKey& k) const {
  auto it = key_to_cell_.find(k);
  if (it == key_to_cell_.end()) return std::nullopt;
  return it->second;
}

int SpatialMesh::deepest_existing(const CellKey& k) const {
  CellKey cur = k;
  while (true) {
    if (auto id = find_cell(cur)) return *id;
    if (cur.level == 0) throw std::out_of_range("cell key outside the coarse mesh");
    cur = cur.parent();
  }
}

std::vector<int> SpatialMesh::active_descendants(int cell_id) const {
  std::vector<int> out;
  std::vector<int> stack{cell_id};
  while (!stack.empty()) {
    const int id = stack.back();
    stack.pop_back();
    if (cells_[id].active)
      out.push_back(id);
    else
      for (int k = 3; k >= 0; --k) stack.push_back(cells_[id].children[k]);
  }
  return out;
}

double SpatialMesh::cell_area(int cell_id) const { return quad_area(corners(cell_id)); }

double SpatialMesh::area() const {
  double a = 0;
  for (int id : active_) a += cell_area(id);
  return a;
}

double SpatialMesh::cell_diameter(int cell_id) const {
  const auto p = corners(cell_id);
  return std::max((p[2] - p[0]).norm(), (p[3] - p[1]).norm());
}

int SpatialMesh::max_level() const {
  int l = 0;
  for (int id : active_) l = std::max(l, cells_[id].level);
  return l;
}

int SpatialMesh::max_level_jump() const {
  int jump = 0;
  std::vector<char> seen(edges_.size(), 0);
  for (int id : active_) {
    for (int e0 : cells_[id].e) {
      if (seen[e0]) continue;
      seen[e0] = 1;
      int lo = 1 << 30, hi = -1;
      std::vector<int> stack{e0};
      while (!stack.empty()) {
        const int e = stack.back();
        stack.pop_back();
        for (int owner : edges_[e].cells) {
          if (owner < 0 || !cells_[owner].active) continue;
          lo = std::min(lo, cells_[owner].level);
          hi = std::max(hi, cells_[owner].level);
        }
        if (edges_[e].children[0] >= 0) {
          stack.push_back(edges_[e].children[0]);
          stack.push_back(edges_[e].children[1]);
        }
      }
      if (hi >= 0) jump = std::max(jump, hi - lo);
    }
  }
  return jump;
}

void SpatialMesh::write_vtk(std::ostream& os) const {
  os << "# vtk DataFile Version 3.0\nspatial mesh\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  os << "POINTS " << vertices_.size() << " double\n";
  os.precision(16);
  for (const auto& v : vertices_) os << v.x() << ' ' << v.y() << " 0\n";
  os << "CELLS " << active_.size() << ' ' << 5 * active_.size() << '\n';
  for (int id : active_) {
    const auto& c = cells_[id];
    os << "4 " << c.v[0] << ' ' << c.v[1] << ' ' << c.v[2] << ' ' << c.v[3] << '\n';
  }
  os << "CELL_TYPES " << active_.size() << '\n';
  for (std::size_t i = 0; i < active_.size(); ++i) os << "9\n";
  os << "CELL_DATA " << active_.size() << "\nSCALARS level int 1\nLOOKUP_TABLE default\n";
  for (int id : active_) os << cells_[id].level << '\n';
}

}  // namespace stdwr
