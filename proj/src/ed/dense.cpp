#include "bhq/ed/dense.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace bhq::ed {

DenseSolver::DenseSolver(const SparseHamiltonian& h, std::int64_t budget) : dim_(h.dim) {
  if (dim_ > budget) {
    std::ostringstream msg;
    msg << "dimension " << dim_ << " exceeds the dense budget " << budget
        << "; use the Krylov propagator with time averaging instead";
    throw std::runtime_error(msg.str());
  }

  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(dim_, dim_);
  for (std::int64_t i = 0; i < dim_; ++i) {
    m(i, i) = h.diag[i];
    for (std::int64_t e = h.row_ptr[i]; e < h.row_ptr[i + 1]; ++e) m(i, h.cols[e]) += h.vals[e];
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("dense eigendecomposition did not converge");

  evals_.assign(es.eigenvalues().data(), es.eigenvalues().data() + dim_);
  evecs_.resize(static_cast<std::size_t>(dim_) * dim_);
  for (std::int64_t l = 0; l < dim_; ++l)
    for (std::int64_t i = 0; i < dim_; ++i)
      evecs_[static_cast<std::size_t>(l) * dim_ + i] = es.eigenvectors()(i, l);
}

std::vector<complexd> DenseSolver::evolve(const std::vector<complexd>& psi0, double t) const {
  if (static_cast<std::int64_t>(psi0.size()) != dim_)
    throw std::invalid_argument("state length does not match the solver dimension");
  std::vector<complexd> out(dim_, complexd(0.0, 0.0));
  for (std::int64_t l = 0; l < dim_; ++l) {
    const double* col = evecs_.data() + static_cast<std::size_t>(l) * dim_;
    complexd c(0.0, 0.0);
    for (std::int64_t i = 0; i < dim_; ++i) c += col[i] * psi0[i];
    c *= std::exp(complexd(0.0, -evals_[l] * t));
    for (std::int64_t i = 0; i < dim_; ++i) out[i] += col[i] * c;
  }
  return out;
}

complexd DenseSolver::diagonal_ensemble(
    const std::vector<complexd>& psi0,
    const std::function<void(std::span<const complexd>, std::span<complexd>)>& apply_op) const {
  if (static_cast<std::int64_t>(psi0.size()) != dim_)
    throw std::invalid_argument("state length does not match the solver dimension");

  std::vector<complexd> coeff(dim_);
  for (std::int64_t l = 0; l < dim_; ++l) {
    const double* col = evecs_.data() + static_cast<std::size_t>(l) * dim_;
    complexd c(0.0, 0.0);
    for (std::int64_t i = 0; i < dim_; ++i) c += col[i] * psi0[i];
    coeff[l] = c;
  }

  double scale = 1.0;
  for (double e : evals_) scale = std::max(scale, std::abs(e));
  const double gap_tol = 1e-10 * scale;

  std::vector<complexd> u(dim_), y(dim_);
  complexd avg(0.0, 0.0);
  std::int64_t lo = 0;
  while (lo < dim_) {
    std::int64_t hi = lo + 1;
    while (hi < dim_ && evals_[hi] - evals_[hi - 1] <= gap_tol) ++hi;

    double weight = 0.0;
    for (std::int64_t l = lo; l < hi; ++l) weight += std::norm(coeff[l]);
    if (weight > 1e-30) {
      // project the initial state onto this eigenspace
      std::fill(u.begin(), u.end(), complexd(0.0, 0.0));
      for (std::int64_t l = lo; l < hi; ++l) {
        const double* col = evecs_.data() + static_cast<std::size_t>(l) * dim_;
        for (std::int64_t i = 0; i < dim_; ++i) u[i] += col[i] * coeff[l];
      }
      apply_op(u, y);
      for (std::int64_t i = 0; i < dim_; ++i) avg += std::conj(u[i]) * y[i];
    }
    lo = hi;
  }
  return avg;
}

}  // namespace bhq::ed
