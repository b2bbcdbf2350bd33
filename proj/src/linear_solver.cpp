#include "stdwr/linear_solver.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <stdexcept>

namespace stdwr {

DirectSolver::DirectSolver(Eigen::SparseMatrix<double> matrix) : a_(std::move(matrix)) {
  a_.makeCompressed();
  lu_.compute(a_);
  if (lu_.info() != Eigen::Success) throw std::runtime_error("sparse LU factorization failed");
}

Eigen::VectorXd DirectSolver::solve(const Eigen::VectorXd& rhs) const {
  Eigen::VectorXd x = lu_.solve(rhs);
  const Eigen::VectorXd r = rhs - a_ * x;
  x += lu_.solve(r);
  return x;
}

KroneckerSlabSolver::KroneckerSlabSolver(std::shared_ptr<const TemporalBasis> basis,
                                         const Eigen::SparseMatrix<double>& mass,
                                         const Eigen::SparseMatrix<double>& stokes, bool transposed)
    : basis_(std::move(basis)), transposed_(transposed) {
  if (transposed) {
    mass_ = mass.transpose();
    stokes_ = stokes.transpose();
  } else {
    mass_ = mass;
    stokes_ = stokes;
  }
  const Eigen::MatrixXd de = basis_->derivative() + basis_->start_coupling();
  rhs_transform_ = basis_->mass().inverse();
  const Eigen::MatrixXd at = (transposed ? de : Eigen::MatrixXd(de.transpose())) * rhs_transform_;
  Eigen::EigenSolver<Eigen::MatrixXd> es(at);
  if (es.info() != Eigen::Success) throw std::runtime_error("temporal eigendecomposition failed");
  lambda_ = es.eigenvalues();
  v_ = es.eigenvectors();
  const int n = int(lambda_.size());
  conjugate_of_.assign(n, -1);
  const double scale = lambda_.cwiseAbs().maxCoeff();
  for (int j = 0; j < n; ++j) {
    if (lambda_(j).imag() <= 1e-12 * scale || conjugate_of_[j] >= 0) continue;
    for (int i = 0; i < n; ++i) {
      if (i == j || conjugate_of_[i] >= 0) continue;
      if (std::abs(lambda_(i) - std::conj(lambda_(j))) < 1e-10 * scale) {
        conjugate_of_[i] = j;
        lambda_(i) = std::conj(lambda_(j));
        v_.col(i) = v_.col(j).conjugate();
        break;
      }
    }
  }
  v_inv_ = v_.inverse();
}

const KroneckerSlabSolver::Factor& KroneckerSlabSolver::factor(double k) const {
  for (const auto& f : factors_)
    if (std::abs(f->k - k) <= 1e-12 * std::abs(k)) return *f;
  auto f = std::make_unique<Factor>();
  f->k = k;
  const ComplexMatrix m = mass_.cast<std::complex<double>>();
  const ComplexMatrix s = stokes_.cast<std::complex<double>>();
  f->matrices.reserve(lambda_.size());
  for (int j = 0; j < int(lambda_.size()); ++j) {
    if (conjugate_of_[j] >= 0) {
      f->lu.emplace_back(nullptr);
      continue;
    }
    f->matrices.push_back(lambda_(j) * m + std::complex<double>(k, 0.0) * s);
    ComplexMatrix& a = f->matrices.back();
    a.makeCompressed();
    auto lu = std::make_unique<Eigen::UmfPackLU<ComplexMatrix>>();
    lu->compute(a);
    if (lu->info() != Eigen::Success) throw std::runtime_error("complex sparse LU factorization failed");
    f->lu.push_back(std::move(lu));
  }
  // keep memory bounded when interval lengths vary a lot
  if (factors_.size() >= 4) factors_.erase(factors_.begin());
  factors_.push_back(std::move(f));
  return *factors_.back();
}

Eigen::MatrixXd KroneckerSlabSolver::solve_interval(double k, const Eigen::MatrixXd& rhs) const {
  const Factor& f = factor(k);
  const Eigen::MatrixXcd h = (rhs * rhs_transform_).cast<std::complex<double>>() * v_;
  Eigen::MatrixXcd y(h.rows(), h.cols());
  for (int j = 0; j < int(lambda_.size()); ++j)
    if (conjugate_of_[j] < 0) y.col(j) = f.lu[j]->solve(Eigen::VectorXcd(h.col(j)));
  for (int j = 0; j < int(lambda_.size()); ++j)
    if (conjugate_of_[j] >= 0) y.col(j) = y.col(conjugate_of_[j]).conjugate();
  return (y * v_inv_).real();
}

Eigen::MatrixXd KroneckerSlabSolver::apply_interval(double k, const Eigen::MatrixXd& x) const {
  const Eigen::MatrixXd de = basis_->derivative() + basis_->start_coupling();
  const Eigen::MatrixXd td = transposed_ ? de : Eigen::MatrixXd(de.transpose());
  return (mass_ * x) * td + k * (stokes_ * x) * basis_->mass();
}

Eigen::VectorXd KroneckerSlabSolver::apply(const std::vector<Interval>& intervals, const Eigen::VectorXd& x) const {
  const Eigen::Index n = spatial_size();
  const int nt = basis_->size();
  const int ni = int(intervals.size());
  Eigen::VectorXd y(x.size());
  auto blk = [&](const Eigen::VectorXd& v, int m) {
    return Eigen::Map<const Eigen::MatrixXd>(v.data() + Eigen::Index(m) * nt * n, n, nt);
  };
  for (int m = 0; m < ni; ++m) {
    Eigen::MatrixXd out = apply_interval(intervals[m].length(), blk(x, m));
    if (!transposed_ && m > 0)
      out -= (mass_ * (blk(x, m - 1) * basis_->values_at_end())) * basis_->values_at_start().transpose();
    if (transposed_ && m + 1 < ni)
      out -= (mass_ * (blk(x, m + 1) * basis_->values_at_start())) * basis_->values_at_end().transpose();
    Eigen::Map<Eigen::MatrixXd>(y.data() + Eigen::Index(m) * nt * n, n, nt) = out;
  }
  return y;
}

Eigen::VectorXd KroneckerSlabSolver::solve(const std::vector<Interval>& intervals, const Eigen::VectorXd& rhs) const {
  const Eigen::Index n = spatial_size();
  const int nt = basis_->size();
  const int ni = int(intervals.size());
  if (rhs.size() != n * nt * ni) throw std::invalid_argument("KroneckerSlabSolver: size mismatch");
  auto sweep = [&](const Eigen::VectorXd& b) {
    Eigen::VectorXd x(b.size());
    auto blk = [&](const Eigen::VectorXd& v, int m) {
      return Eigen::Map<const Eigen::MatrixXd>(v.data() + Eigen::Index(m) * nt * n, n, nt);
    };
    for (int step = 0; step < ni; ++step) {
      const int m = transposed_ ? ni - 1 - step : step;
      Eigen::MatrixXd f = blk(b, m);
      if (!transposed_ && m > 0)
        f += (mass_ * (blk(x, m - 1) * basis_->values_at_end())) * basis_->values_at_start().transpose();
      if (transposed_ && m + 1 < ni)
        f += (mass_ * (blk(x, m + 1) * basis_->values_at_start())) * basis_->values_at_end().transpose();
      Eigen::Map<Eigen::MatrixXd>(x.data() + Eigen::Index(m) * nt * n, n, nt) =
          solve_interval(intervals[m].length(), f);
    }
    return x;
  };
  Eigen::VectorXd x = sweep(rhs);
  x += sweep(rhs - apply(intervals, x));
  return x;
}

}  // namespace stdwr
