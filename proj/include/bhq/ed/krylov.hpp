#pragma once

#include <cstdint>
#include <vector>

#include "bhq/ed/hamiltonian.hpp"

namespace bhq::ed {

struct KrylovOptions {
  int m = 30;                    // subspace dimension per step
  double tol = 1e-10;            // residual-style error target per substep
  double max_spread_dt = 5.0;    // substep so (spectral halfwidth) * dt stays below this
};

// In-place psi <- exp(-i H dt) psi via the Lanczos recurrence with a spectral
// shift to the Gershgorin center. Substeps are chosen from the Gershgorin
// halfwidth and halved further whenever the a-posteriori estimate
// |beta_m * (last exp component)| misses the tolerance. Happy breakdown
// (invariant subspace) is exact and returns early. Norm and energy are
// preserved by construction, not by renormalizing.
void evolve_krylov(const SparseHamiltonian& h, std::vector<complexd>& psi, double dt,
                   const KrylovOptions& options = {});

}  // namespace bhq::ed
