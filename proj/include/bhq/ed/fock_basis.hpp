#pragma once

#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

namespace bhq::ed {

// Number-conserving bosonic Fock basis: all occupation vectors of `num_sites`
// entries summing to `num_particles` with every entry <= `cutoff`. States are
// enumerated in descending lexicographic order, e.g. (2,0), (1,1), (0,2) for
// two particles on two sites, and the ordering is the index contract for
// everything downstream (Hamiltonian rows, measured vectors, snapshots).
//
// Occupation vectors are packed 5 bits per site into a 64-bit key for the
// reverse lookup, which caps supported systems at 12 sites and 31 bosons per
// site; that covers every reference lattice this oracle is meant for.
class FockBasis {
 public:
  // cutoff = num_particles disables the on-site restriction.
  FockBasis(int num_sites, int num_particles, int cutoff, std::int64_t budget = kDefaultBudget);

  int num_sites() const { return num_sites_; }
  int num_particles() const { return num_particles_; }
  int cutoff() const { return cutoff_; }
  std::int64_t dimension() const { return static_cast<std::int64_t>(occ_.size()) / num_sites_; }

  std::span<const std::uint8_t> occupations(std::int64_t index) const {
    return {occ_.data() + index * num_sites_, static_cast<std::size_t>(num_sites_)};
  }

  // Index of an occupation vector, -1 if it is not in the basis.
  std::int64_t index_of(std::span<const std::uint8_t> occ) const;

  // Number of valid occupation vectors, computed without enumeration so a
  // too-large request can be refused cheaply.
  static std::int64_t count_states(int num_sites, int num_particles, int cutoff);

  static constexpr std::int64_t kDefaultBudget = 5'000'000;
  static constexpr int kMaxSites = 12;
  static constexpr int kMaxOccupation = 31;

 private:
  static std::uint64_t pack(std::span<const std::uint8_t> occ);

  int num_sites_;
  int num_particles_;
  int cutoff_;
  std::vector<std::uint8_t> occ_;  // dimension x num_sites, row-major
  std::unordered_map<std::uint64_t, std::int64_t> lookup_;
};

}  // namespace bhq::ed
