#pragma once

#include <complex>
#include <span>
#include <vector>

#include "bhq/lattice.hpp"

namespace bhq {

using complexd = std::complex<double>;

enum class PairLayout { Full, TranslationInvariant };

// Diagonal on-site density matrices p_mu(n), n = 0..n_max. The
// translation-invariant layout stores a single representative row.
struct OnSiteDistribution {
  int sites_stored = 0;
  int n_max = 0;
  std::vector<double> p;

  double& at(int site, int n) { return p[static_cast<std::size_t>(site) * (n_max + 1) + n]; }
  double at(int site, int n) const { return p[static_cast<std::size_t>(site) * (n_max + 1) + n]; }
  std::span<const double> row(int site) const {
    return {p.data() + static_cast<std::size_t>(site) * (n_max + 1),
            static_cast<std::size_t>(n_max + 1)};
  }
};

// Correlated two-site amplitudes f_{mu1 mu2}^{n1 n2} in the +-1 particle
// transfer sector, n1, n2 = 0..n_max-1. The first index raises the occupation
// at the first site (n1 -> n1+1), the second lowers it at the second site
// (n2+1 -> n2). Blocks are stored row-major in (n1, n2), either per ordered
// site pair (block mu1*N + mu2, diagonal blocks unused) or per canonical
// displacement (zero-displacement slot unused). Consistency under site
// exchange reads f_{mu1 mu2}^{n1 n2} = conj(f_{mu2 mu1}^{n2 n1}).
struct PairCorrelations {
  PairLayout layout = PairLayout::TranslationInvariant;
  int n_max = 0;
  int num_blocks = 0;
  std::vector<complexd> f;

  int block_values() const { return n_max * n_max; }
  complexd* block(int b) { return f.data() + static_cast<std::size_t>(b) * block_values(); }
  const complexd* block(int b) const {
    return f.data() + static_cast<std::size_t>(b) * block_values();
  }
  complexd& at(int b, int n1, int n2) { return block(b)[n1 * n_max + n2]; }
  complexd at(int b, int n1, int n2) const { return block(b)[n1 * n_max + n2]; }
};

struct SystemState {
  double time = 0.0;
  OnSiteDistribution onsite;
  PairCorrelations pairs;
};

// Product Mott state with `filling` bosons per site: p_mu(n) = delta(n, filling)
// and vanishing pair correlations. Requires filling <= n_max - 1 so the +-1
// sector around the filling is representable.
SystemState initial_mott(const Lattice& lattice, int n_max, int filling, PairLayout layout);

// Block index of the ordered pair (mu1, mu2) in the given layout.
int pair_block_index(const Lattice& lattice, const PairCorrelations& pairs, int mu1, int mu2);

// psi^{n+1,n}_{mu1 mu2} = sum_m sqrt(m+1) f_{mu1 mu2}^{n m}: the contraction
// that couples a fixed transfer channel at the first site to all channels at
// the second.
complexd psi_contract_block(const PairCorrelations& pairs, int block, int n);
complexd psi_contract(const PairCorrelations& pairs, const Lattice& lattice, int mu1, int mu2,
                      int n);

// Block of the reversed pair reconstructed from the stored one:
// out(n1, n2) = conj(in(n2, n1)).
std::vector<complexd> mirror_block(std::span<const complexd> block, int n_max);
std::vector<complexd> mirror_pair(const PairCorrelations& pairs, const Lattice& lattice, int mu1,
                                  int mu2);

}  // namespace bhq
