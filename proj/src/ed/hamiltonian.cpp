#include "bhq/ed/hamiltonian.hpp"

#include <cmath>
#include <stdexcept>

namespace bhq::ed {

SparseHamiltonian build_hamiltonian(const FockBasis& basis, const Lattice& lattice,
                                    const HamiltonianParams& params) {
  if (lattice.num_sites() != basis.num_sites())
    throw std::invalid_argument("lattice site count does not match the basis");
  if (params.U <= 0) throw std::invalid_argument("U must be positive");
  if (params.J < 0) throw std::invalid_argument("J must be non-negative");

  const std::int64_t dim = basis.dimension();
  const int sites = basis.num_sites();
  const double jz = params.J / lattice.coordination();

  SparseHamiltonian h;
  h.dim = dim;
  h.diag.resize(dim);
  h.row_ptr.assign(dim + 1, 0);

  std::vector<std::uint8_t> moved(sites);
  for (std::int64_t i = 0; i < dim; ++i) {
    const auto occ = basis.occupations(i);

    double inter = 0.0;
    for (int mu = 0; mu < sites; ++mu)
      inter += static_cast<double>(occ[mu]) * (occ[mu] - 1);
    h.diag[i] = 0.5 * params.U * inter;

    if (jz == 0.0) {
      h.row_ptr[i + 1] = h.row_ptr[i];
      continue;
    }
    // one entry per directed bond source -> target with a movable particle
    for (int src = 0; src < sites; ++src) {
      if (occ[src] == 0) continue;
      for (int tgt : lattice.neighbors(src)) {
        if (occ[tgt] >= basis.cutoff()) continue;
        std::copy(occ.begin(), occ.end(), moved.begin());
        moved[src] -= 1;
        moved[tgt] += 1;
        const std::int64_t j = basis.index_of(moved);
        if (j < 0) continue;
        h.cols.push_back(static_cast<std::int32_t>(j));
        h.vals.push_back(-jz * std::sqrt(static_cast<double>(occ[src]) * (occ[tgt] + 1)));
      }
    }
    h.row_ptr[i + 1] = static_cast<std::int64_t>(h.cols.size());
  }

  double lo = h.diag[0], hi = h.diag[0];
  for (std::int64_t i = 0; i < dim; ++i) {
    double radius = 0.0;
    for (std::int64_t e = h.row_ptr[i]; e < h.row_ptr[i + 1]; ++e)
      radius += std::abs(h.vals[e]);
    lo = std::min(lo, h.diag[i] - radius);
    hi = std::max(hi, h.diag[i] + radius);
  }
  h.bound_low = lo;
  h.bound_high = hi;
  return h;
}

void SparseHamiltonian::apply(std::span<const complexd> x, std::span<complexd> y) const {
  if (static_cast<std::int64_t>(x.size()) != dim || static_cast<std::int64_t>(y.size()) != dim)
    throw std::invalid_argument("vector length does not match the Hamiltonian dimension");
  for (std::int64_t i = 0; i < dim; ++i) {
    complexd acc = diag[i] * x[i];
    for (std::int64_t e = row_ptr[i]; e < row_ptr[i + 1]; ++e) acc += vals[e] * x[cols[e]];
    y[i] = acc;
  }
}

}  // namespace bhq::ed
