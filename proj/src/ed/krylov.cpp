#include "bhq/ed/krylov.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace bhq::ed {

namespace {

struct Workspace {
  std::vector<std::vector<complexd>> v;  // Lanczos vectors
  std::vector<complexd> w;
  std::vector<double> alpha, beta;
};

double norm(const std::vector<complexd>& x) {
  double s = 0.0;
  for (const complexd& c : x) s += std::norm(c);
  return std::sqrt(s);
}

// psi <- exp(-i (H - center) tau) psi, one Lanczos evaluation with recursive
// halving when the residual estimate misses the tolerance
void propagate_once(const SparseHamiltonian& h, double center, double halfwidth, Workspace& ws,
                    std::vector<complexd>& psi, double tau, const KrylovOptions& opt,
                    int depth) {
  if (depth > 40)
    throw std::runtime_error("Krylov propagation failed to converge while halving substeps");

  const double norm0 = norm(psi);
  if (norm0 == 0.0) return;

  const std::size_t dim = psi.size();
  const int m = opt.m;
  ws.v.resize(m + 1);
  ws.alpha.assign(m, 0.0);
  ws.beta.assign(m + 1, 0.0);  // beta[j] couples v[j-1] and v[j]
  ws.w.resize(dim);

  ws.v[0].resize(dim);
  for (std::size_t i = 0; i < dim; ++i) ws.v[0][i] = psi[i] / norm0;

  const double breakdown = 1e-13 * std::max(1.0, halfwidth);
  int k = m;
  bool happy = false;
  for (int j = 0; j < m; ++j) {
    h.apply(ws.v[j], ws.w);
    for (std::size_t i = 0; i < dim; ++i) ws.w[i] -= center * ws.v[j][i];
    if (j > 0)
      for (std::size_t i = 0; i < dim; ++i) ws.w[i] -= ws.beta[j] * ws.v[j - 1][i];
    double a = 0.0;
    for (std::size_t i = 0; i < dim; ++i)
      a += ws.v[j][i].real() * ws.w[i].real() + ws.v[j][i].imag() * ws.w[i].imag();
    ws.alpha[j] = a;
    for (std::size_t i = 0; i < dim; ++i) ws.w[i] -= a * ws.v[j][i];
    const double b = norm(ws.w);
    ws.beta[j + 1] = b;
    if (b < breakdown) {
      k = j + 1;  // invariant subspace: the projection is exact
      happy = true;
      break;
    }
    ws.v[j + 1].resize(dim);
    for (std::size_t i = 0; i < dim; ++i) ws.v[j + 1][i] = ws.w[i] / b;
  }

  Eigen::VectorXd diag(k), sub(std::max(k - 1, 0));
  for (int j = 0; j < k; ++j) diag[j] = ws.alpha[j];
  for (int j = 0; j + 1 < k; ++j) sub[j] = ws.beta[j + 1];
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);

  const Eigen::MatrixXd& q = es.eigenvectors();
  Eigen::VectorXcd u(k);
  for (int i = 0; i < k; ++i) {
    complexd acc(0.0, 0.0);
    for (int l = 0; l < k; ++l)
      acc += q(i, l) * std::exp(complexd(0.0, -es.eigenvalues()[l] * tau)) * q(0, l);
    u[i] = acc;
  }

  if (!happy && ws.beta[k] * std::abs(u[k - 1]) > opt.tol) {
    propagate_once(h, center, halfwidth, ws, psi, 0.5 * tau, opt, depth + 1);
    propagate_once(h, center, halfwidth, ws, psi, 0.5 * tau, opt, depth + 1);
    return;
  }

  for (std::size_t i = 0; i < dim; ++i) {
    complexd acc(0.0, 0.0);
    for (int j = 0; j < k; ++j) acc += ws.v[j][i] * u[j];
    psi[i] = norm0 * acc;
  }
}

}  // namespace

void evolve_krylov(const SparseHamiltonian& h, std::vector<complexd>& psi, double dt,
                   const KrylovOptions& options) {
  if (static_cast<std::int64_t>(psi.size()) != h.dim)
    throw std::invalid_argument("state length does not match the Hamiltonian dimension");
  if (options.m < 2) throw std::invalid_argument("Krylov dimension must be >= 2");
  if (options.tol <= 0 || options.max_spread_dt <= 0)
    throw std::invalid_argument("Krylov tolerance and substep bound must be positive");
  if (dt == 0.0) return;

  const double center = 0.5 * (h.bound_high + h.bound_low);
  const double halfwidth = 0.5 * (h.bound_high - h.bound_low);
  const long nsub =
      std::max(1L, std::lround(std::ceil(std::abs(dt) * halfwidth / options.max_spread_dt)));
  const double tau = dt / nsub;

  Workspace ws;
  for (long s = 0; s < nsub; ++s) propagate_once(h, center, halfwidth, ws, psi, tau, options, 0);

  // undo the spectral shift with the accumulated global phase
  const complexd phase = std::exp(complexd(0.0, -center * dt));
  for (complexd& c : psi) c *= phase;
}

}  // namespace bhq::ed
