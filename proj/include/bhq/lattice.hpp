#pragma once

#include <span>
#include <vector>

namespace bhq {

// Hypercubic lattice with periodic boundary conditions. Sites are indexed
// row-major over coordinates (axis 0 slowest). Every axis needs L >= 3 so the
// two periodic neighbors along an axis stay distinct.
struct LatticeSpec {
  int dimension = 1;
  std::vector<int> sizes;

  int num_sites() const;
  void validate() const;  // throws std::invalid_argument with all violations
};

class Lattice {
 public:
  explicit Lattice(LatticeSpec spec);

  const LatticeSpec& spec() const { return spec_; }
  int dimension() const { return spec_.dimension; }
  int size(int axis) const { return spec_.sizes[axis]; }
  int num_sites() const { return nsites_; }
  int coordination() const { return z_; }  // Z = 2 * dimension

  // Unit steps +e0, -e0, +e1, -e1, ... ; neighbors(site) follows this order.
  const std::vector<std::vector<int>>& neighbor_displacements() const { return nbr_disp_; }
  std::span<const int> neighbors(int site) const;
  bool adjacent(int site1, int site2) const;

  std::vector<int> site_coords(int site) const;
  int site_index(std::span<const int> coords) const;  // coords wrap mod L_d
  int translate(int site, std::span<const int> displacement) const;

  // Displacements are canonicalized componentwise to the symmetric range
  // (-L_d/2, L_d/2]; for even L_d the tie at L_d/2 keeps the positive sign.
  std::vector<int> displacement(int from, int to) const;
  std::vector<int> canonicalize(std::span<const int> displacement) const;
  int displacement_index(std::span<const int> canonical) const;
  std::vector<int> displacement_from_index(int index) const;
  int zero_displacement_index() const { return zero_disp_; }
  static double displacement_norm(std::span<const int> displacement);

  // Brillouin zone grid, k_d = 2*pi*m_d/L_d with m_d = 0..L_d-1, and the
  // adjacency structure factor T_k = (1/D) sum_d cos(k_d).
  std::vector<std::vector<double>> bz_modes() const;
  double fourier_adjacency(std::span<const double> k) const;

 private:
  LatticeSpec spec_;
  int nsites_ = 0;
  int z_ = 0;
  int zero_disp_ = 0;
  std::vector<std::vector<int>> nbr_disp_;
  std::vector<int> nbr_flat_;  // nsites x z
  std::vector<int> strides_;
  std::vector<int> disp_low_;  // lower bound of the canonical range per axis
};

}  // namespace bhq
