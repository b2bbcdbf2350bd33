#include <doctest.h>

#include "fixtures.hpp"
#include "stdwr/lagrange_space.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace stdwr;

namespace {

int count_hanging(const std::shared_ptr<const SpatialMesh>& m) {
  const ScalarLagrangeSpace q1(m, 1, [](Boundary) { return false; });
  int n = 0;
  for (int i = 0; i < q1.n_dofs(); ++i) n += q1.kind(i) == ScalarLagrangeSpace::Kind::hanging;
  return n;
}

int active_cell_at(const SpatialMesh& m, const Eigen::Vector2d& x) {
  for (int id : m.active_cells()) {
    const auto c = m.corners(id);
    const Eigen::Vector2d mid = 0.25 * (c[0] + c[1] + c[2] + c[3]);
    if ((mid - x).norm() < 1e-12) return id;
  }
  return -1;
}

void check_circle_vertices(const SpatialMesh& m) {
  for (const auto& e : m.edges()) {
    if (e.marker != Boundary::circle) continue;
    for (int v : e.v)
      CHECK(std::abs((m.vertices()[v] - SpatialMesh::circle_center()).norm() - SpatialMesh::circle_radius) < 1e-12);
  }
}

}  // namespace

TEST_SUITE("mesh") {
  TEST_CASE("cylinder: circle vertices lie on the circle, all vertices in the channel") {
    auto m = fixture::mesh(Geometry::cylinder2d3);
    check_circle_vertices(*m);
    int circle_edges = 0;
    for (const auto& e : m->edges()) circle_edges += e.marker == Boundary::circle;
    CHECK(circle_edges > 0);
    for (const auto& x : m->vertices()) {
      CHECK(x.x() >= -1e-14);
      CHECK(x.x() <= 2.2 + 1e-14);
      CHECK(x.y() >= -1e-14);
      CHECK(x.y() <= 0.41 + 1e-14);
      CHECK((x - SpatialMesh::circle_center()).norm() >= SpatialMesh::circle_radius - 1e-12);
    }
  }

  TEST_CASE("cylinder: area converges monotonically to the exact domain area") {
    const double exact = 2.2 * 0.41 - std::numbers::pi * 0.05 * 0.05;
    auto m = std::make_shared<SpatialMesh>(SpatialMesh::coarse(Geometry::cylinder2d3));
    double prev = std::abs(m->area() - exact);
    for (int l = 0; l < 3; ++l) {
      m->refine_globally();
      check_circle_vertices(*m);
      const double err = std::abs(m->area() - exact);
      CHECK(err < prev);
      CHECK(m->area() > exact);  // polygonal approximation of a hole overestimates the area
      prev = err;
    }
    CHECK(prev < 1e-4);
  }

  TEST_CASE("cylinder: area error decays with order two") {
    const double exact = 2.2 * 0.41 - std::numbers::pi * 0.05 * 0.05;
    SpatialMesh m = SpatialMesh::coarse(Geometry::cylinder2d3);
    std::vector<double> err;
    for (int l = 0; l < 4; ++l) {
      err.push_back(m.area() - exact);
      m.refine_globally();
    }
    for (std::size_t l = 1; l < err.size(); ++l) {
      const double order = std::log2(err[l - 1] / err[l]);
      CHECK(order > 1.9);
      CHECK(order < 2.1);
    }
  }

  TEST_CASE("backward step: area 9/4") {
    auto m = fixture::mesh(Geometry::backward_step);
    CHECK(std::abs(m->area() - 2.25) < 1e-14);
    auto f = fixture::mesh(Geometry::backward_step, 2);
    CHECK(std::abs(f->area() - 2.25) < 1e-13);
    CHECK(f->n_active() == 16 * m->n_active());
  }

  TEST_CASE("cell areas sum to the mesh area") {
    auto m = fixture::mesh(Geometry::cylinder2d3, 1);
    double s = 0;
    for (int id : m->active_cells()) {
      CHECK(m->cell_area(id) > 0);
      s += m->cell_area(id);
    }
    CHECK(s == doctest::Approx(m->area()).epsilon(1e-13));
  }

  TEST_CASE("refining nothing leaves the mesh unchanged") {
    SpatialMesh m = SpatialMesh::coarse(Geometry::cylinder2d3);
    m.refine_globally();
    const auto before_v = m.vertices().size();
    const auto before_a = m.active_cells();
    m.refine({});
    CHECK(m.vertices().size() == before_v);
    CHECK(m.active_cells() == before_a);
  }

  TEST_CASE("refining one interior cell adds four children and four hanging vertices") {
    auto m = std::make_shared<SpatialMesh>(SpatialMesh::coarse(Geometry::unit_square));
    m->refine_globally(2);
    CHECK(m->n_active() == 16);
    CHECK(count_hanging(m) == 0);
    const int id = active_cell_at(*m, {0.375, 0.375});
    REQUIRE(id >= 0);
    m->refine({id});
    CHECK(m->n_active() == 19);
    CHECK(m->max_level_jump() == 1);
    const int h = count_hanging(m);
    CHECK(h <= 4);
    CHECK(h == 4);
    CHECK(m->area() == doctest::Approx(1.0).epsilon(1e-15));
  }

  TEST_CASE("local refinement next to the cylinder puts new circle vertices on the circle") {
    auto m = std::make_shared<SpatialMesh>(SpatialMesh::coarse(Geometry::cylinder2d3));
    std::vector<int> marked;
    for (int id : m->active_cells())
      for (int e : m->cell(id).e)
        if (m->edge(e).marker == Boundary::circle) marked.push_back(id);
    REQUIRE(!marked.empty());
    const auto nv = m->vertices().size();
    m->refine(marked);
    CHECK(m->vertices().size() > nv);
    check_circle_vertices(*m);
  }

  TEST_CASE("property: random local refinement keeps the mesh 1-irregular and area-preserving") {
    std::mt19937 gen(11);
    for (Geometry g : {Geometry::unit_square, Geometry::backward_step}) {
      auto m = std::make_shared<SpatialMesh>(SpatialMesh::coarse(g));
      const double area = m->area();
      for (int round = 0; round < 5; ++round) {
        std::vector<int> marked;
        std::bernoulli_distribution pick(0.2);
        for (int id : m->active_cells())
          if (pick(gen)) marked.push_back(id);
        if (marked.empty()) marked.push_back(m->active_cells().front());
        const int before = m->n_active();
        m->refine(marked);
        CHECK(m->n_active() >= before + 3 * int(marked.size()));
        CHECK(m->max_level_jump() <= 1);
        CHECK(std::abs(m->area() - area) < 1e-12);
      }
      CHECK(count_hanging(m) > 0);
    }
  }

  TEST_CASE("closure lists the extra cells needed for 1-irregularity") {
    auto m = std::make_shared<SpatialMesh>(SpatialMesh::coarse(Geometry::unit_square));
    m->refine_globally(2);
    CHECK(m->closure({m->active_cells()[5]}).empty());
    const int id = active_cell_at(*m, {0.375, 0.375});
    m->refine({id});
    // a child on the left edge of the refined cell: refining it forces the coarse left neighbour
    const int child = active_cell_at(*m, {0.3125, 0.3125});
    const int left = active_cell_at(*m, {0.125, 0.375});
    REQUIRE(child >= 0);
    REQUIRE(left >= 0);
    const auto c = m->closure({child});
    CHECK(std::find(c.begin(), c.end(), left) != c.end());
    CHECK(std::find(c.begin(), c.end(), child) == c.end());
    m->refine({child});
    CHECK(m->max_level_jump() <= 1);
    CHECK(!m->cell(left).active);
  }

  TEST_CASE("geometry names roundtrip") {
    for (Geometry g : {Geometry::cylinder2d3, Geometry::backward_step, Geometry::unit_square})
      CHECK(parse_geometry(to_string(g)) == g);
    CHECK_THROWS(parse_geometry("annulus"));
  }
}
