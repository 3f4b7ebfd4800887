#include <cmath>
#include <stdexcept>
#include <vector>

#include "bhq/lattice.hpp"
#include "bhq/state.hpp"
#include "doctest.h"

using namespace bhq;

namespace {

Lattice chain(int l) {
  LatticeSpec spec;
  spec.dimension = 1;
  spec.sizes = {l};
  return Lattice(spec);
}

}  // namespace

TEST_SUITE("state") {
  TEST_CASE("product state at unit filling") {
    const Lattice lat = chain(5);
    const SystemState s = initial_mott(lat, 3, 1, PairLayout::TranslationInvariant);
    CHECK(s.onsite.sites_stored == 1);
    CHECK(s.onsite.n_max == 3);
    CHECK(s.onsite.at(0, 0) == 0.0);
    CHECK(s.onsite.at(0, 1) == 1.0);
    CHECK(s.onsite.at(0, 2) == 0.0);
    CHECK(s.pairs.num_blocks == 5);
    for (const complexd& v : s.pairs.f) CHECK(v == complexd(0.0, 0.0));

    const SystemState full = initial_mott(lat, 3, 2, PairLayout::Full);
    CHECK(full.onsite.sites_stored == 5);
    CHECK(full.pairs.num_blocks == 25);
    for (int mu = 0; mu < 5; ++mu) CHECK(full.onsite.at(mu, 2) == 1.0);
  }

  TEST_CASE("filling above the truncation window is rejected") {
    const Lattice lat = chain(5);
    CHECK_THROWS_AS(initial_mott(lat, 3, 3, PairLayout::Full), std::invalid_argument);
    CHECK_THROWS_AS(initial_mott(lat, 1, 1, PairLayout::Full), std::invalid_argument);
    CHECK_THROWS_AS(initial_mott(lat, 3, 0, PairLayout::Full), std::invalid_argument);
  }

  TEST_CASE("block lookup agrees between layouts") {
    const Lattice lat = chain(5);
    const SystemState ti = initial_mott(lat, 3, 1, PairLayout::TranslationInvariant);
    const SystemState full = initial_mott(lat, 3, 1, PairLayout::Full);
    CHECK(pair_block_index(lat, full.pairs, 2, 4) == 2 * 5 + 4);
    // translation-related pairs share one displacement block
    CHECK(pair_block_index(lat, ti.pairs, 0, 1) == pair_block_index(lat, ti.pairs, 3, 4));
    CHECK(pair_block_index(lat, ti.pairs, 1, 0) == pair_block_index(lat, ti.pairs, 4, 3));
    CHECK(pair_block_index(lat, ti.pairs, 0, 1) != pair_block_index(lat, ti.pairs, 1, 0));
    CHECK_THROWS_AS(pair_block_index(lat, ti.pairs, 2, 2), std::invalid_argument);
  }

  TEST_CASE("transfer contraction weights the lowering channel") {
    const Lattice lat = chain(5);
    SystemState s = initial_mott(lat, 2, 1, PairLayout::Full);
    const int b = pair_block_index(lat, s.pairs, 0, 1);
    // row-major (n1, n2): f = [[1, 2], [3, 4i]]
    s.pairs.at(b, 0, 0) = complexd(1.0, 0.0);
    s.pairs.at(b, 0, 1) = complexd(2.0, 0.0);
    s.pairs.at(b, 1, 0) = complexd(3.0, 0.0);
    s.pairs.at(b, 1, 1) = complexd(0.0, 4.0);
    const double r2 = std::sqrt(2.0);
    CHECK(std::abs(psi_contract_block(s.pairs, b, 0) - complexd(1.0 + 2.0 * r2, 0.0)) < 1e-14);
    CHECK(std::abs(psi_contract_block(s.pairs, b, 1) - complexd(3.0, 4.0 * r2)) < 1e-14);
    CHECK(psi_contract(s.pairs, lat, 0, 1, 0) == psi_contract_block(s.pairs, b, 0));
    CHECK_THROWS_AS(psi_contract_block(s.pairs, b, 2), std::out_of_range);
  }

  TEST_CASE("site exchange mirrors the block") {
    const Lattice lat = chain(5);
    SystemState s = initial_mott(lat, 3, 1, PairLayout::Full);
    const int b = pair_block_index(lat, s.pairs, 1, 3);
    for (int n1 = 0; n1 < 3; ++n1)
      for (int n2 = 0; n2 < 3; ++n2)
        s.pairs.at(b, n1, n2) = complexd(n1 + 0.5, n2 - 1.25);

    const auto mirrored = mirror_pair(s.pairs, lat, 1, 3);
    for (int n1 = 0; n1 < 3; ++n1)
      for (int n2 = 0; n2 < 3; ++n2)
        CHECK(mirrored[n1 * 3 + n2] == std::conj(s.pairs.at(b, n2, n1)));

    // involution: mirroring twice restores the block
    const auto twice = mirror_block(mirrored, 3);
    for (int i = 0; i < 9; ++i) CHECK(twice[i] == s.pairs.at(b, i / 3, i % 3));
  }
}
