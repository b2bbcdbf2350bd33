#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace stdwr {

enum class Geometry { cylinder2d3, backward_step, unit_square };

enum class Boundary : std::uint8_t { interior, inflow, outflow, wall, circle };

Geometry parse_geometry(const std::string& name);
std::string to_string(Geometry g);
std::string to_string(Boundary b);

/// Position of a cell in the refinement forest: coarse ancestor, level and the
/// child indices along the path (two bits per level, most recent in the low bits).
struct CellKey {
  int coarse = 0;
  int level = 0;
  std::uint64_t path = 0;

  bool operator==(const CellKey&) const = default;
  CellKey parent() const { return {coarse, level - 1, path >> 2}; }
  CellKey child(int c) const { return {coarse, level + 1, (path << 2) | std::uint64_t(c)}; }
  int child_index() const { return int(path & 3u); }
  bool is_ancestor_of(const CellKey& other) const;
};

struct CellKeyHash {
  std::size_t operator()(const CellKey& k) const noexcept {
    std::size_t h = std::hash<std::uint64_t>{}(k.path);
    h ^= std::hash<int>{}(k.coarse) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    h ^= std::hash<int>{}(k.level) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    return h;
  }
};

/// Hierarchical quadrilateral mesh with 1-irregular hanging nodes.
///
/// Cells store vertices counterclockwise; local edges are
/// 0: v0->v1, 1: v1->v2, 2: v3->v2, 3: v0->v3.
class SpatialMesh {
 public:
  struct Edge {
    std::array<int, 2> v{-1, -1};
    std::array<int, 2> children{-1, -1};
    int parent = -1;
    int midpoint = -1;
    Boundary marker = Boundary::interior;
    std::array<int, 2> cells{-1, -1};  // cells (any level) that own this edge
  };

  struct Cell {
    std::array<int, 4> v{};
    std::array<int, 4> e{};
    std::array<int, 4> children{-1, -1, -1, -1};
    int parent = -1;
    int level = 0;
    int coarse = 0;
    std::uint64_t path = 0;
    bool active = true;
  };

  static SpatialMesh coarse(Geometry g);

  Geometry geometry() const { return geometry_; }
  bool has_circle() const { return geometry_ == Geometry::cylinder2d3; }
  static Eigen::Vector2d circle_center() { return {0.2, 0.2}; }
  static constexpr double circle_radius = 0.05;

  const std::vector<Eigen::Vector2d>& vertices() const { return vertices_; }
  const std::vector<Edge>& edges() const { return edges_; }
  const std::vector<Cell>& cells() const { return cells_; }
  const Cell& cell(int id) const { return cells_[id]; }
  const Edge& edge(int id) const { return edges_[id]; }

  /// Active cells in canonical depth-first order over the coarse cells.
  const std::vector<int>& active_cells() const { return active_; }
  int n_active() const { return int(active_.size()); }
  /// Position of a cell id in active_cells(), or -1.
  int active_index(int cell_id) const { return active_index_[cell_id]; }

  CellKey key(int cell_id) const;
  std::optional<int> find_cell(const CellKey& key) const;

  /// Refine the given active cells (plus closure for 1-irregularity).
  void refine(const std::vector<int>& marked_cells);
  void refine_globally(int times = 1);

  /// Cells that had to be added to `marked` so that refinement stays 1-irregular.
  std::vector<int> closure(const std::vector<int>& marked_cells) const;

  bool edge_reversed(int cell_id, int local_edge) const;
  /// Corner vertices of a local edge in the cell's own orientation.
  static std::array<int, 2> local_edge_corners(int local_edge);

  /// Sum of the bilinear cell areas of all active cells.
  double area() const;
  double cell_area(int cell_id) const;
  double cell_diameter(int cell_id) const;
  int max_level() const;
  /// Max difference of refinement levels across any active facet.
  int max_level_jump() const;

  /// Active descendants of a (possibly inactive) cell.
  std::vector<int> active_descendants(int cell_id) const;
  /// Closest active ancestor-or-self of the cell matching the key in this mesh,
  /// or the deepest existing ancestor.
  int deepest_existing(const CellKey& key) const;

  std::array<Eigen::Vector2d, 4> corners(int cell_id) const {
    const auto& c = cells_[cell_id];
    return {vertices_[c.v[0]], vertices_[c.v[1]], vertices_[c.v[2]], vertices_[c.v[3]]};
  }

  void write_vtk(std::ostream& os) const;

 private:
  int add_vertex(const Eigen::Vector2d& x);
  int add_edge(int a, int b, Boundary marker);
  int split_edge(int e);
  void refine_cell(int id);
  void rebuild_active();

  Geometry geometry_ = Geometry::unit_square;
  std::vector<Eigen::Vector2d> vertices_;
  std::vector<Edge> edges_;
  std::vector<Cell> cells_;
  std::vector<int> coarse_cells_;
  std::vector<int> active_;
  std::vector<int> active_index_;
  std::unordered_map<CellKey, int, CellKeyHash> key_to_cell_;
};

}  // namespace stdwr
