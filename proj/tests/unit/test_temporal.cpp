#include <doctest.h>

#include "stdwr/mesh.hpp"
#include "stdwr/polynomials.hpp"
#include "stdwr/temporal.hpp"

#include <cmath>
#include <random>

using namespace stdwr;

namespace {

// independent Lagrange evaluation on the reference interval
double lagrange(const Eigen::VectorXd& nodes, int i, double x) {
  double p = 1;
  for (int j = 0; j < nodes.size(); ++j)
    if (j != i) p *= (x - nodes(j)) / (nodes(i) - nodes(j));
  return p;
}

void check_partition(const TemporalTriangulation& t) {
  CHECK(t.slab_begin(0) == 0);
  CHECK(t.slab_end(t.n_slabs() - 1) == t.n_intervals());
  for (int n = 0; n < t.n_slabs(); ++n) {
    CHECK(t.slab_size(n) >= 1);
    CHECK(t.slab_size(n) <= t.max_per_slab());
    if (n) CHECK(t.slab_begin(n) == t.slab_end(n - 1));
  }
  for (int m = 0; m < t.n_intervals(); ++m) CHECK(t.times()[m + 1] > t.times()[m]);
}

}  // namespace

TEST_SUITE("temporal") {
  TEST_CASE("support points") {
    const Eigen::VectorXd g1 = reference_support_points(1, SupportFamily::gauss_legendre);
    CHECK(g1(0) == doctest::Approx(0.5 - 0.5 / std::sqrt(3.0)).epsilon(1e-15));
    CHECK(g1(1) == doctest::Approx(0.5 + 0.5 / std::sqrt(3.0)).epsilon(1e-15));
    const Eigen::VectorXd l1 = reference_support_points(1, SupportFamily::gauss_lobatto);
    CHECK(l1(0) == 0.0);
    CHECK(l1(1) == 1.0);
    const Eigen::VectorXd g2 = reference_support_points(2, SupportFamily::gauss_legendre);
    CHECK(g2(0) == doctest::Approx(0.5 - 0.5 * std::sqrt(0.6)).epsilon(1e-15));
    CHECK(g2(1) == doctest::Approx(0.5));
    CHECK(g2(2) == doctest::Approx(0.5 + 0.5 * std::sqrt(0.6)).epsilon(1e-15));
    const Eigen::VectorXd g0 = reference_support_points(0, SupportFamily::gauss_legendre);
    CHECK(g0(0) == doctest::Approx(0.5));
  }

  TEST_CASE("temporal basis: nodal, partition of unity, physical derivatives") {
    std::mt19937 gen(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int r = 0; r <= 2; ++r)
      for (auto fam : {SupportFamily::gauss_legendre, SupportFamily::gauss_lobatto}) {
        if (r == 0 && fam == SupportFamily::gauss_lobatto) continue;
        const TemporalBasis b(r, fam);
        const Interval iv{1.5, 1.9};
        for (int j = 0; j <= r; ++j) {
          const auto v = b.eval(iv, iv.from_reference(b.support_points()(j)));
          for (int i = 0; i <= r; ++i) CHECK(std::abs(v.values(i) - (i == j)) < 1e-13);
        }
        for (int trial = 0; trial < 10; ++trial) {
          const double t = iv.from_reference(u(gen));
          const auto v = b.eval(iv, t);
          CHECK(std::abs(v.values.sum() - 1.0) < 1e-13);
          CHECK(std::abs(v.derivatives.sum()) < 1e-10);
          // d/dt t on the physical interval is 1
          double dt = 0;
          for (int i = 0; i <= r; ++i) dt += v.derivatives(i) * iv.from_reference(b.support_points()(i));
          CHECK(std::abs(dt - (r ? 1.0 : 0.0)) < 1e-11);
        }
      }
  }

  TEST_CASE("temporal basis: mass and derivative matrices against a 20-point oracle") {
    const auto q = gauss_legendre(20);
    for (int r = 0; r <= 2; ++r) {
      const TemporalBasis b(r, SupportFamily::gauss_legendre);
      const Eigen::VectorXd nodes = b.support_points();
      Eigen::MatrixXd m = Eigen::MatrixXd::Zero(r + 1, r + 1), d = m;
      for (int k = 0; k < 20; ++k) {
        const double x = q.points(k), h = 1e-5;
        for (int i = 0; i <= r; ++i)
          for (int j = 0; j <= r; ++j) {
            m(i, j) += q.weights(k) * lagrange(nodes, i, x) * lagrange(nodes, j, x);
            // derivative of the trial function, tested against i
            const double dj = (lagrange(nodes, j, x + h) - lagrange(nodes, j, x - h)) / (2 * h);
            d(i, j) += q.weights(k) * lagrange(nodes, i, x) * dj;
          }
      }
      CHECK((b.mass() - m).cwiseAbs().maxCoeff() < 1e-14);
      const bool direct = (b.derivative() - d).cwiseAbs().maxCoeff() < 1e-8;
      const bool transposed = (b.derivative() - d.transpose()).cwiseAbs().maxCoeff() < 1e-8;
      CHECK((direct || transposed));
      // endpoint values
      for (int i = 0; i <= r; ++i) {
        CHECK(std::abs(b.values_at_start()(i) - lagrange(nodes, i, 0.0)) < 1e-14);
        CHECK(std::abs(b.values_at_end()(i) - lagrange(nodes, i, 1.0)) < 1e-14);
      }
      CHECK(b.quadrature().weights.sum() == doctest::Approx(1.0).epsilon(1e-14));
    }
  }

  TEST_CASE("jumps of constants vanish, jumps of dG(0) are differences") {
    const TemporalBasis b1(1, SupportFamily::gauss_legendre);
    Eigen::MatrixXd left(3, 2), right(3, 2);
    left.col(0) = left.col(1) = Eigen::Vector3d(1, -2, 0.5);
    right = left;
    const Limits l = limits_and_jump(b1, left, right);
    CHECK(l.jump.cwiseAbs().maxCoeff() < 1e-14);
    CHECK((l.minus - Eigen::Vector3d(1, -2, 0.5)).norm() < 1e-14);

    const TemporalBasis b0(0, SupportFamily::gauss_legendre);
    Eigen::MatrixXd a(2, 1), c(2, 1);
    a << 1, 2;
    c << 4, -1;
    const Limits j = limits_and_jump(b0, a, c);
    CHECK((j.jump - Eigen::Vector2d(3, -3)).norm() < 1e-15);
    const Limits i = limits_and_jump_initial(b0, Eigen::Vector2d(0.5, 0.5), c);
    CHECK((i.jump - Eigen::Vector2d(3.5, -1.5)).norm() < 1e-15);
    CHECK((i.minus - Eigen::Vector2d(0.5, 0.5)).norm() == 0);
  }

  TEST_CASE("uniform triangulation and slab grouping") {
    auto m = std::make_shared<const SpatialMesh>(SpatialMesh::coarse(Geometry::unit_square));
    const auto t = TemporalTriangulation::uniform(8.0, 20, m, 3);
    CHECK(t.n_intervals() == 20);
    CHECK(t.n_slabs() == 7);
    CHECK(t.end_time() == 8.0);
    check_partition(t);
    for (int m2 = 0; m2 < 20; ++m2) CHECK(t.interval(m2).length() == doctest::Approx(0.4));
    CHECK(t.slab_of(19) == 6);
    CHECK_THROWS(TemporalTriangulation::uniform(8.0, 0, m, 1));
    CHECK_THROWS(TemporalTriangulation::uniform(8.0, 4, m, 0));
  }

  TEST_CASE("refine_time: none, all, forced splitting") {
    auto m = std::make_shared<const SpatialMesh>(SpatialMesh::coarse(Geometry::unit_square));
    const auto t = TemporalTriangulation::uniform(8.0, 20, m, 1);
    const auto same = t.refine_time({});
    CHECK(same.times() == t.times());
    CHECK(same.n_slabs() == 20);

    std::vector<int> all(20);
    for (int i = 0; i < 20; ++i) all[i] = i;
    const auto fine = t.refine_time(all);
    CHECK(fine.n_intervals() == 40);
    CHECK(fine.n_slabs() == 40);  // at most one interval per slab forces splitting
    check_partition(fine);
    for (int i = 0; i < 40; ++i) CHECK(fine.interval(i).length() == doctest::Approx(0.2));

    const auto g = TemporalTriangulation::uniform(8.0, 8, m, 2);
    const auto h = g.refine_time({0, 1, 5});
    CHECK(h.n_intervals() == 11);
    check_partition(h);
    // every old node survives
    for (double x : g.times()) CHECK(std::find(h.times().begin(), h.times().end(), x) != h.times().end());
    CHECK_THROWS(g.refine_time({8}));
  }

  TEST_CASE("refine_time keeps each slab's mesh") {
    auto a = std::make_shared<const SpatialMesh>(SpatialMesh::coarse(Geometry::unit_square));
    auto fine = std::make_shared<SpatialMesh>(SpatialMesh::coarse(Geometry::unit_square));
    fine->refine_globally();
    auto t = TemporalTriangulation::uniform(1.0, 4, a, 1);
    t.set_mesh(2, fine);
    const auto r = t.refine_time({2});
    CHECK(r.n_slabs() == 5);
    CHECK(r.mesh(2) == fine);
    CHECK(r.mesh(3) == fine);
    CHECK(r.mesh(4) == a);
  }
}
