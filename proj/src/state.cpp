#include "bhq/state.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace bhq {

SystemState initial_mott(const Lattice& lattice, int n_max, int filling, PairLayout layout) {
  if (n_max < 2) throw std::invalid_argument("n_max must be >= 2");
  if (filling < 1) throw std::invalid_argument("filling must be >= 1");
  if (filling > n_max - 1)
    throw std::invalid_argument("filling = " + std::to_string(filling) +
                                " requires n_max >= " + std::to_string(filling + 1) +
                                " (got n_max = " + std::to_string(n_max) + ")");

  SystemState s;
  s.time = 0.0;
  const int rows = layout == PairLayout::TranslationInvariant ? 1 : lattice.num_sites();
  s.onsite.sites_stored = rows;
  s.onsite.n_max = n_max;
  s.onsite.p.assign(static_cast<std::size_t>(rows) * (n_max + 1), 0.0);
  for (int r = 0; r < rows; ++r) s.onsite.at(r, filling) = 1.0;

  s.pairs.layout = layout;
  s.pairs.n_max = n_max;
  const int n = lattice.num_sites();
  s.pairs.num_blocks = layout == PairLayout::TranslationInvariant ? n : n * n;
  s.pairs.f.assign(static_cast<std::size_t>(s.pairs.num_blocks) * s.pairs.block_values(),
                   complexd(0.0, 0.0));
  return s;
}

int pair_block_index(const Lattice& lattice, const PairCorrelations& pairs, int mu1, int mu2) {
  if (mu1 == mu2) throw std::invalid_argument("pair correlations are defined for mu1 != mu2");
  const int n = lattice.num_sites();
  if (mu1 < 0 || mu1 >= n || mu2 < 0 || mu2 >= n)
    throw std::out_of_range("site index out of range");
  if (pairs.layout == PairLayout::Full) return mu1 * n + mu2;
  return lattice.displacement_index(lattice.displacement(mu1, mu2));
}

complexd psi_contract_block(const PairCorrelations& pairs, int block, int n) {
  if (n < 0 || n >= pairs.n_max) throw std::out_of_range("transfer channel outside 0..n_max-1");
  if (block < 0 || block >= pairs.num_blocks) throw std::out_of_range("pair block out of range");
  const complexd* b = pairs.block(block);
  complexd acc(0.0, 0.0);
  for (int m = 0; m < pairs.n_max; ++m) acc += std::sqrt(m + 1.0) * b[n * pairs.n_max + m];
  return acc;
}

complexd psi_contract(const PairCorrelations& pairs, const Lattice& lattice, int mu1, int mu2,
                      int n) {
  return psi_contract_block(pairs, pair_block_index(lattice, pairs, mu1, mu2), n);
}

std::vector<complexd> mirror_block(std::span<const complexd> block, int n_max) {
  if (static_cast<int>(block.size()) != n_max * n_max)
    throw std::invalid_argument("block size does not match n_max");
  std::vector<complexd> out(block.size());
  for (int n1 = 0; n1 < n_max; ++n1)
    for (int n2 = 0; n2 < n_max; ++n2) out[n1 * n_max + n2] = std::conj(block[n2 * n_max + n1]);
  return out;
}

std::vector<complexd> mirror_pair(const PairCorrelations& pairs, const Lattice& lattice, int mu1,
                                  int mu2) {
  const int b = pair_block_index(lattice, pairs, mu1, mu2);
  return mirror_block({pairs.block(b), static_cast<std::size_t>(pairs.block_values())},
                      pairs.n_max);
}

}  // namespace bhq
