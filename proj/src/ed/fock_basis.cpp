#include "bhq/ed/fock_basis.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace bhq::ed {

std::int64_t FockBasis::count_states(int num_sites, int num_particles, int cutoff) {
  if (num_sites < 1 || num_particles < 0 || cutoff < 0) return 0;
  // ways[n] = distributions of n particles over the sites processed so far
  std::vector<std::int64_t> ways(num_particles + 1, 0);
  ways[0] = 1;
  for (int s = 0; s < num_sites; ++s) {
    std::vector<std::int64_t> next(num_particles + 1, 0);
    for (int n = 0; n <= num_particles; ++n) {
      if (ways[n] == 0) continue;
      for (int add = 0; add <= cutoff && n + add <= num_particles; ++add)
        next[n + add] += ways[n];
    }
    ways.swap(next);
  }
  return ways[num_particles];
}

FockBasis::FockBasis(int num_sites, int num_particles, int cutoff, std::int64_t budget)
    : num_sites_(num_sites), num_particles_(num_particles), cutoff_(cutoff) {
  if (num_sites < 2) throw std::invalid_argument("basis needs at least 2 sites");
  if (num_particles < 1) throw std::invalid_argument("basis needs at least 1 particle");
  if (cutoff < 1) throw std::invalid_argument("on-site cutoff must be >= 1");
  if (num_sites > kMaxSites)
    throw std::invalid_argument("packed lookup supports at most " +
                                std::to_string(kMaxSites) + " sites");
  if (std::min(cutoff, num_particles) > kMaxOccupation)
    throw std::invalid_argument("packed lookup supports occupations up to " +
                                std::to_string(kMaxOccupation));

  const std::int64_t dim = count_states(num_sites, num_particles, cutoff);
  if (dim == 0) throw std::invalid_argument("empty basis: cutoff excludes every distribution");
  if (dim > budget) {
    std::ostringstream msg;
    msg << "basis dimension " << dim << " exceeds the memory budget " << budget
        << " (sites = " << num_sites << ", particles = " << num_particles
        << ", cutoff = " << cutoff << ")";
    throw std::runtime_error(msg.str());
  }

  occ_.reserve(static_cast<std::size_t>(dim) * num_sites);
  lookup_.reserve(static_cast<std::size_t>(dim));

  // descending lexicographic order: each site takes the largest allowed count
  // before yielding to the next
  std::vector<std::uint8_t> occ(num_sites, 0);
  std::int64_t index = 0;
  auto gen = [&](auto&& self, int site, int left) -> void {
    if (site == num_sites_ - 1) {
      if (left > cutoff_) return;
      occ[site] = static_cast<std::uint8_t>(left);
      occ_.insert(occ_.end(), occ.begin(), occ.end());
      lookup_.emplace(pack(occ), index++);
      occ[site] = 0;
      return;
    }
    for (int n = std::min(cutoff_, left); n >= 0; --n) {
      occ[site] = static_cast<std::uint8_t>(n);
      self(self, site + 1, left - n);
    }
    occ[site] = 0;
  };
  gen(gen, 0, num_particles);
}

std::uint64_t FockBasis::pack(std::span<const std::uint8_t> occ) {
  std::uint64_t key = 0;
  for (std::uint8_t n : occ) key = (key << 5) | n;
  return key;
}

std::int64_t FockBasis::index_of(std::span<const std::uint8_t> occ) const {
  const auto it = lookup_.find(pack(occ));
  return it == lookup_.end() ? -1 : it->second;
}

}  // namespace bhq::ed
