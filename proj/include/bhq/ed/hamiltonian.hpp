#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "bhq/dynamics.hpp"
#include "bhq/ed/fock_basis.hpp"
#include "bhq/lattice.hpp"

namespace bhq::ed {

using complexd = std::complex<double>;

// Sparse number-conserving Hamiltonian in a FockBasis: diagonal interaction
// (U/2) sum_mu n(n-1) plus one hopping entry -(J/Z) sqrt(n_source (n_target+1))
// per directed adjacency bond. Off-diagonal rows are stored CSR; all
// amplitudes are real, so the matrix is symmetric.
struct SparseHamiltonian {
  std::int64_t dim = 0;
  std::vector<double> diag;
  std::vector<std::int64_t> row_ptr;
  std::vector<std::int32_t> cols;
  std::vector<double> vals;

  void apply(std::span<const complexd> x, std::span<complexd> y) const;

  // Gershgorin disc bounds enclosing the spectrum.
  double bound_low = 0.0;
  double bound_high = 0.0;
};

SparseHamiltonian build_hamiltonian(const FockBasis& basis, const Lattice& lattice,
                                    const HamiltonianParams& params);

}  // namespace bhq::ed
