#include <doctest.h>

#include "fixtures.hpp"
#include "stdwr/lagrange_space.hpp"
#include "stdwr/linear_solver.hpp"
#include "stdwr/polynomials.hpp"

using namespace stdwr;

namespace {

// 1D Lagrange on {0, 1/2, 1} (or {0, 1}), value and derivative
double lag(const std::vector<double>& n, int i, double x, bool deriv) {
  if (!deriv) {
    double p = 1;
    for (std::size_t j = 0; j < n.size(); ++j)
      if (int(j) != i) p *= (x - n[j]) / (n[i] - n[j]);
    return p;
  }
  double s = 0;
  for (std::size_t j = 0; j < n.size(); ++j) {
    if (int(j) == i) continue;
    double p = 1 / (n[i] - n[j]);
    for (std::size_t k = 0; k < n.size(); ++k)
      if (k != j && int(k) != i) p *= (x - n[k]) / (n[i] - n[k]);
    s += p;
  }
  return s;
}

int node_index(const std::vector<double>& n, double x) {
  for (std::size_t i = 0; i < n.size(); ++i)
    if (std::abs(n[i] - x) < 1e-12) return int(i);
  return -1;
}

}  // namespace

TEST_SUITE("forms") {
  TEST_CASE("single cell dG(0) residual against a dense oracle") {
    const double nu = 0.7, k = 0.25;
    fixture::Slab f(Geometry::unit_square, 0, 0, 0.0, k, 1, 2, 3, nu);
    const TaylorHoodSpace& s = *f.slab.space;
    const SpatialMesh& mesh = s.mesh();
    REQUIRE(mesh.n_active() == 1);
    REQUIRE(s.n_full() == 22);
    const CellGeometry geo(mesh.corners(mesh.active_cells()[0]));
    std::vector<int> vx, vy, p;
    s.cell_full_dofs(0, vx, vy, p);
    const std::vector<double> n2{0.0, 0.5, 1.0}, n1{0.0, 1.0};
    auto idx = [&](const ReferenceQuad& e, const std::vector<double>& n, int l) {
      const Eigen::Vector2d x = geo.map(e.node(l));
      return std::array<int, 2>{node_index(n, x.x()), node_index(n, x.y())};
    };
    const auto q = gauss_legendre(5);
    auto integrate = [&](auto&& f2) {
      double sum = 0;
      for (int a = 0; a < 5; ++a)
        for (int b = 0; b < 5; ++b) sum += q.weights(a) * q.weights(b) * f2(q.points(a), q.points(b));
      return sum;
    };
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(22, 22), st = m;
    const int nv = s.velocity().element().n_dofs(), np = s.pressure().element().n_dofs();
    for (int i = 0; i < nv; ++i) {
      const auto a = idx(s.velocity().element(), n2, i);
      REQUIRE(a[0] >= 0);
      for (int j = 0; j < nv; ++j) {
        const auto b = idx(s.velocity().element(), n2, j);
        const double mij = integrate([&](double x, double y) {
          return lag(n2, a[0], x, false) * lag(n2, a[1], y, false) * lag(n2, b[0], x, false) * lag(n2, b[1], y, false);
        });
        const double kij = nu * integrate([&](double x, double y) {
          return lag(n2, a[0], x, true) * lag(n2, a[1], y, false) * lag(n2, b[0], x, true) * lag(n2, b[1], y, false) +
                 lag(n2, a[0], x, false) * lag(n2, a[1], y, true) * lag(n2, b[0], x, false) * lag(n2, b[1], y, true);
        });
        m(vx[i], vx[j]) = m(vy[i], vy[j]) = mij;
        st(vx[i], vx[j]) = st(vy[i], vy[j]) = kij;
      }
      for (int l = 0; l < np; ++l) {
        const auto c = idx(s.pressure().element(), n1, l);
        REQUIRE(c[0] >= 0);
        const double bx = integrate([&](double x, double y) {
          return lag(n1, c[0], x, false) * lag(n1, c[1], y, false) * lag(n2, a[0], x, true) * lag(n2, a[1], y, false);
        });
        const double by = integrate([&](double x, double y) {
          return lag(n1, c[0], x, false) * lag(n1, c[1], y, false) * lag(n2, a[0], x, false) * lag(n2, a[1], y, true);
        });
        st(vx[i], p[l]) = -bx;
        st(vy[i], p[l]) = -by;
        st(p[l], vx[i]) = bx;
        st(p[l], vy[i]) = by;
      }
    }
    const Eigen::VectorXd u = fixture::random_vector(22, 1), prev = fixture::random_vector(22, 2);
    const SlabForm form = f.form(Equation::stokes, prev);
    const Eigen::VectorXd expected = m * (u - prev) + k * st * u;
    CHECK((form.residual_full(u) - expected).cwiseAbs().maxCoeff() < 1e-13);
    CHECK((Eigen::MatrixXd(f.ops->mass) - m).cwiseAbs().maxCoeff() < 1e-14);
    CHECK((Eigen::MatrixXd(f.ops->stokes) - st).cwiseAbs().maxCoeff() < 1e-13);
  }

  TEST_CASE("mass and stokes operators: integral identities on the cylinder mesh") {
    fixture::Slab f(Geometry::cylinder2d3, 1, 1, 0.0, 0.1, 1, 2, 3, 0.5);
    const TaylorHoodSpace& s = *f.slab.space;
    const double area = s.mesh().area();
    Eigen::VectorXd one = Eigen::VectorXd::Zero(s.n_full());
    one.head(2 * s.n_velocity()).setOnes();
    CHECK(one.dot(f.ops->mass * one) == doctest::Approx(2 * area).epsilon(1e-12));
    // v = (x, -y): |grad v|^2 = 2, div v = 0
    Eigen::VectorXd v = Eigen::VectorXd::Zero(s.n_full());
    for (int i = 0; i < s.n_velocity(); ++i) {
      v(i) = s.velocity().support_point(i).x();
      v(s.n_velocity() + i) = -s.velocity().support_point(i).y();
    }
    CHECK(v.dot(f.ops->stokes * v) == doctest::Approx(0.5 * 2 * area).epsilon(1e-12));
    Eigen::VectorXd pone = Eigen::VectorXd::Zero(s.n_full());
    pone.tail(s.n_pressure()).setOnes();
    CHECK(std::abs(pone.dot(f.ops->stokes * v)) < 1e-12);
    // v = (x, 0): (1, div v) = area
    for (int i = 0; i < s.n_velocity(); ++i) v(s.n_velocity() + i) = 0;
    CHECK(pone.dot(f.ops->stokes * v) == doctest::Approx(area).epsilon(1e-12));
    CHECK((f.ops->mass * pone).cwiseAbs().maxCoeff() == 0.0);
  }

  TEST_CASE("convection of a linear field") {
    auto m = fixture::mesh(Geometry::unit_square, 1);
    const TaylorHoodSpace s(m, 2);
    const CellQuadrature quad(s, 3);
    Eigen::VectorXd w = Eigen::VectorXd::Zero(s.n_full());
    for (int i = 0; i < s.n_velocity(); ++i) {
      w(i) = s.velocity().support_point(i).x();
      w(s.n_velocity() + i) = -s.velocity().support_point(i).y();
    }
    Eigen::VectorXd c;
    assemble_convection(s, quad, w, &c, nullptr);
    // (w . grad) w = (x, y); summing over test functions integrates it
    CHECK(c.head(s.n_velocity()).sum() == doctest::Approx(0.5).epsilon(1e-13));
    CHECK(c.segment(s.n_velocity(), s.n_velocity()).sum() == doctest::Approx(0.5).epsilon(1e-13));
    CHECK(c.tail(s.n_pressure()).cwiseAbs().maxCoeff() == 0.0);
  }

  TEST_CASE("stokes: zero data gives zero residual, jacobian independent of the state") {
    fixture::Slab f(Geometry::cylinder2d3, 0, 1, 2.0, 0.2, 2);
    f.inflow.profile = TimeProfile::zero;
    const SlabForm form = f.form(Equation::stokes);
    CHECK(form.residual(Eigen::VectorXd::Zero(form.n_unknowns())).cwiseAbs().maxCoeff() == 0.0);
    const Eigen::SparseMatrix<double> a = form.jacobian(Eigen::VectorXd::Zero(form.n_unknowns()));
    const Eigen::SparseMatrix<double> b = form.jacobian(fixture::random_vector(form.n_unknowns(), 3));
    CHECK(Eigen::MatrixXd(a - b).cwiseAbs().maxCoeff() == 0.0);
    // affine: R(x) = J x
    const Eigen::VectorXd x = fixture::random_vector(form.n_unknowns(), 4);
    CHECK((form.residual(x) - a * x).cwiseAbs().maxCoeff() < 1e-12);
  }

  TEST_CASE("navier-stokes jacobian at rest with zero data equals the stokes jacobian") {
    fixture::Slab f(Geometry::cylinder2d3, 0, 1, 2.0, 0.2, 2);
    f.inflow.profile = TimeProfile::zero;
    const auto x0 = Eigen::VectorXd::Zero(f.form(Equation::stokes).n_unknowns());
    const Eigen::SparseMatrix<double> a = f.form(Equation::stokes).jacobian(x0);
    const Eigen::SparseMatrix<double> b = f.form(Equation::navier_stokes).jacobian(x0);
    CHECK(Eigen::MatrixXd(a - b).cwiseAbs().maxCoeff() < 1e-15);
  }

  TEST_CASE("property: navier-stokes jacobian matches central differences") {
    for (int r : {0, 1, 2}) {
      fixture::Slab f(Geometry::unit_square, 1, r, 0.3, 0.1, 2, 2, 3, 0.01);
      f.inflow.profile = TimeProfile::ramp;
      f.inflow.end_time = 1.0;
      const Eigen::VectorXd incoming = fixture::random_full(*f.slab.space, 20);
      const SlabForm form = f.form(Equation::navier_stokes, incoming);
      for (unsigned seed = 0; seed < 3; ++seed) {
        const Eigen::VectorXd x = fixture::random_vector(form.n_unknowns(), 100 + seed);
        const Eigen::VectorXd d = fixture::random_vector(form.n_unknowns(), 200 + seed);
        const double eps = 1e-6;
        const Eigen::VectorXd fd = (form.residual(x + eps * d) - form.residual(x - eps * d)) / (2 * eps);
        const Eigen::VectorXd jd = form.jacobian(x) * d;
        CHECK((fd - jd).norm() <= 1e-7 * jd.norm());
      }
    }
  }

  TEST_CASE("dirichlet data enters expand at the temporal support points") {
    fixture::Slab f(Geometry::cylinder2d3, 0, 1, 3.0, 0.5, 2);
    const SlabForm form = f.form(Equation::stokes);
    const Eigen::VectorXd full = form.expand(Eigen::VectorXd::Zero(form.n_unknowns()));
    for (int m = 0; m < 2; ++m)
      for (int a = 0; a < 2; ++a) {
        const double t = f.slab.intervals[m].from_reference(f.slab.basis->support_points()(a));
        const Eigen::VectorXd ref = f.slab.space->expand(Eigen::VectorXd::Zero(f.slab.space->n_free()),
                                                         f.slab.space->dirichlet_values(f.inflow, t));
        CHECK((full.segment(f.slab.offset(m, a), f.slab.space->n_full()) - ref).cwiseAbs().maxCoeff() < 1e-14);
      }
  }
}

TEST_SUITE("linear_solver") {
  TEST_CASE("kronecker slab solver agrees with the assembled slab operator") {
    fixture::Slab f(Geometry::cylinder2d3, 0, 1, 0.0, 0.2, 3);
    f.slab.intervals = {{0.0, 0.2}, {0.2, 0.5}, {0.5, 0.7}};  // unequal lengths, shared factor for k=0.2
    const SlabForm form = f.form(Equation::stokes);
    const Eigen::SparseMatrix<double> j = form.jacobian(Eigen::VectorXd::Zero(form.n_unknowns()));
    const Eigen::VectorXd b = fixture::random_vector(form.n_unknowns(), 31);
    const DirectSolver direct(j);
    const Eigen::VectorXd xd = direct.solve(b);
    CHECK((j * xd - b).norm() < 1e-10 * b.norm());
    for (bool transposed : {false, true}) {
      auto kron = f.cache.kronecker(f.ops, f.slab.basis, transposed);
      const Eigen::SparseMatrix<double> a = transposed ? Eigen::SparseMatrix<double>(j.transpose()) : j;
      const Eigen::VectorXd x = kron->solve(f.slab.intervals, b);
      CHECK((a * x - b).norm() < 1e-9 * b.norm());
      CHECK((kron->apply(f.slab.intervals, b) - a * b).norm() < 1e-12 * (a * b).norm());
      CHECK(kron->n_factorizations() == 2);
    }
    const DirectSolver dt(Eigen::SparseMatrix<double>(j.transpose()));
    auto kt = f.cache.kronecker(f.ops, f.slab.basis, true);
    CHECK((dt.solve(b) - kt->solve(f.slab.intervals, b)).norm() < 1e-8 * dt.solve(b).norm());
  }

  TEST_CASE("singular matrix is reported") {
    Eigen::SparseMatrix<double> a(3, 3);
    a.insert(0, 0) = 1;
    a.insert(1, 1) = 1;
    CHECK_THROWS(DirectSolver{a});
  }
}
