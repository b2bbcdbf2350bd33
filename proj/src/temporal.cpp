#include "stdwr/temporal.hpp"

#include "stdwr/mesh.hpp"

#include <algorithm>
#include <ostream>
#include <stdexcept>

namespace stdwr {

SupportFamily parse_support_family(const std::string& name) {
  if (name == "gauss_legendre" || name == "legendre") return SupportFamily::gauss_legendre;
  if (name == "gauss_lobatto" || name == "lobatto") return SupportFamily::gauss_lobatto;
  throw std::invalid_argument("unknown support point family '" + name + "'");
}

std::string to_string(SupportFamily f) {
  return f == SupportFamily::gauss_legendre ? "gauss_legendre" : "gauss_lobatto";
}

Eigen::VectorXd reference_support_points(int r, SupportFamily family) {
  if (r < 0) throw std::invalid_argument("temporal degree must be nonnegative");
  if (family == SupportFamily::gauss_lobatto) {
    if (r < 1) throw std::invalid_argument("Gauss-Lobatto support points need r >= 1");
    return gauss_lobatto<double>(r + 1).points;
  }
  return gauss_legendre<double>(r + 1).points;
}

TemporalBasis::TemporalBasis(int r, SupportFamily family)
    : r_(r),
      family_(family),
      lagrange_(reference_support_points(r, family)),
      quadrature_(gauss_legendre<double>(r + 2)) {
  const int n = r + 1;
  const int nq = int(quadrature_.size());
  qp_values_.resize(nq, n);
  qp_derivatives_.resize(nq, n);
  for (int q = 0; q < nq; ++q) {
    qp_values_.row(q) = lagrange_.values(quadrature_.points(q)).transpose();
    qp_derivatives_.row(q) = lagrange_.derivatives(quadrature_.points(q)).transpose();
  }
  mass_ = qp_values_.transpose() * quadrature_.weights.asDiagonal() * qp_values_;
  derivative_ = qp_values_.transpose() * quadrature_.weights.asDiagonal() * qp_derivatives_;
  at_start_ = lagrange_.values(0.0);
  at_end_ = lagrange_.values(1.0);
  start_ = at_start_ * at_start_.transpose();
}

TemporalBasis::Values TemporalBasis::eval(const Interval& interval, double t) const {
  const double k = interval.length();
  const double tol = 1e-12 * std::max(1.0, std::abs(interval.t1));
  if (t < interval.t0 - tol || t > interval.t1 + tol)
    throw std::domain_error("time outside the closure of the interval");
  const double tau = interval.to_reference(t);
  return {lagrange_.values(tau), lagrange_.derivatives(tau) / k};
}

Limits limits_and_jump(const TemporalBasis& basis, const Eigen::MatrixXd& left, const Eigen::MatrixXd& right) {
  Limits l;
  l.minus = left * basis.values_at_end();
  l.plus = right * basis.values_at_start();
  l.jump = l.plus - l.minus;
  return l;
}

Limits limits_and_jump_initial(const TemporalBasis& basis, const Eigen::VectorXd& initial,
                               const Eigen::MatrixXd& right) {
  Limits l;
  l.minus = initial;
  l.plus = right * basis.values_at_start();
  l.jump = l.plus - l.minus;
  return l;
}

TemporalTriangulation TemporalTriangulation::uniform(double end_time, int n_intervals,
                                                     std::shared_ptr<const SpatialMesh> mesh, int max_per_slab) {
  if (n_intervals < 1 || end_time <= 0) throw std::invalid_argument("invalid temporal partition");
  if (max_per_slab < 1) throw std::invalid_argument("max intervals per slab must be >= 1");
  TemporalTriangulation tri;
  tri.max_per_slab_ = max_per_slab;
  tri.times_.resize(n_intervals + 1);
  for (int m = 0; m <= n_intervals; ++m) tri.times_[m] = end_time * m / n_intervals;
  tri.times_.back() = end_time;
  for (int m = 0; m < n_intervals; m += max_per_slab) tri.slab_begin_.push_back(m);
  tri.slab_begin_.push_back(n_intervals);
  tri.meshes_.assign(tri.slab_begin_.size() - 1, mesh);
  return tri;
}

int TemporalTriangulation::slab_of(int m) const {
  auto it = std::upper_bound(slab_begin_.begin(), slab_begin_.end(), m);
  return int(it - slab_begin_.begin()) - 1;
}

std::vector<Interval> TemporalTriangulation::slab_intervals(int n) const {
  std::vector<Interval> out;
  for (int m = slab_begin(n); m < slab_end(n); ++m) out.push_back(interval(m));
  return out;
}

TemporalTriangulation TemporalTriangulation::refine_time(const std::vector<int>& marked) const {
  std::vector<char> flag(n_intervals(), 0);
  for (int m : marked) {
    if (m < 0 || m >= n_intervals()) throw std::invalid_argument("marked interval out of range");
    flag[m] = 1;
  }
  TemporalTriangulation out;
  out.max_per_slab_ = max_per_slab_;
  out.times_.push_back(times_.front());
  for (int n = 0; n < n_slabs(); ++n) {
    const int first = int(out.times_.size()) - 1;
    for (int m = slab_begin(n); m < slab_end(n); ++m) {
      if (flag[m]) out.times_.push_back(0.5 * (times_[m] + times_[m + 1]));
      out.times_.push_back(times_[m + 1]);
    }
    const int last = int(out.times_.size()) - 1;
    // halve oversize slabs until every piece respects the limit
    std::vector<std::pair<int, int>> pieces{{first, last}};
    std::vector<std::pair<int, int>> done;
    while (!pieces.empty()) {
      auto [a, b] = pieces.back();
      pieces.pop_back();
      if (b - a > max_per_slab_) {
        const int mid = a + (b - a + 1) / 2;
        pieces.emplace_back(mid, b);
        pieces.emplace_back(a, mid);
      } else {
        done.emplace_back(a, b);
      }
    }
    for (const auto& [a, b] : done) {
      (void)b;
      out.slab_begin_.push_back(a);
      out.meshes_.push_back(meshes_[n]);
    }
  }
  out.slab_begin_.push_back(int(out.times_.size()) - 1);
  return out;
}

void TemporalTriangulation::write_csv(std::ostream& os) const {
  os << "m,t_start,t_end,slab\n";
  os.precision(17);
  for (int m = 0; m < n_intervals(); ++m)
    os << m + 1 << ',' << times_[m] << ',' << times_[m + 1] << ',' << slab_of(m) << '\n';
}

}  // namespace stdwr
