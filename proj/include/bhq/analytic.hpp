#pragma once

#include <span>
#include <vector>

#include "bhq/dynamics.hpp"
#include "bhq/lattice.hpp"

namespace bhq {

// Leading-order (in the inverse coordination number) predictions for the
// quench from the unit-filling product state: particle/hole mode frequencies
//   omega_k = sqrt(U^2 - 6 J U T_k + J^2 T_k^2),
// the depleted-population curve p(0)(t) = p(2)(t) and the one-body coherence
// at fixed separation, both as sums over the Brillouin zone grid. Valid while
// the radicand stays positive for every mode (deep Mott regime).

double dispersion(double t_k, double J, double U);  // throws outside validity

struct DispersionMode {
  std::vector<double> k;
  double t_k = 0.0;
  double omega = 0.0;
  std::vector<double> group_velocity;
};

struct DispersionTable {
  std::vector<DispersionMode> modes;
  static DispersionTable for_lattice(const Lattice& lattice, const HamiltonianParams& params);
};

double p0_first_order(const Lattice& lattice, double J, double U, double t);
double obdm_first_order(const Lattice& lattice, double J, double U,
                        std::span<const int> separation, double t);

// Same sums on a dense D-dimensional k-grid (the large-lattice limit),
// decoupled from any finite lattice.
double p0_first_order_dense(int dimension, int grid_per_axis, double J, double U, double t);

enum class LatticeDirection { Axis, Diagonal };

// Largest group speed projected on the direction (axis unit vector or the
// main diagonal), maximized over the continuous Brillouin zone by iterative
// grid refinement until the improvement drops below 1e-4 * J.
double group_velocity_max(const Lattice& lattice, double J, double U, LatticeDirection direction);

}  // namespace bhq
