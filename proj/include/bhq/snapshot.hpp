#pragma once

#include <string>

#include "bhq/lattice.hpp"
#include "bhq/state.hpp"

namespace bhq {

// Binary state snapshot, used for restarts and cross-language comparison.
//
// Layout on disk (all multi-byte fields little-endian, doubles IEEE-754):
//   char[8]   magic "BHQSNAP1"
//   u32       format version (1)
//   u32       dimension D
//   u32[D]    axis sizes
//   u32       n_max
//   u32       layout: 0 = translation invariant, 1 = full pair storage
//   f64       time
//   f64[...]  p, site-major rows of n_max+1 entries (one row in TI layout)
//   f64[...]  f, block-major as stored in PairCorrelations (unused zero/
//             diagonal slots included), each block row-major in (n1, n2),
//             re then im per entry
void save_snapshot(const std::string& path, const Lattice& lattice, const SystemState& state);

// Reads a snapshot written by save_snapshot and checks it belongs to
// `lattice`. n_max and layout are taken from the file; callers that require
// specific values must check the returned state.
SystemState load_snapshot(const std::string& path, const Lattice& lattice);

}  // namespace bhq
