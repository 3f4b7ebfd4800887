#pragma once

#include <vector>

#include "bhq/dynamics.hpp"
#include "bhq/lattice.hpp"
#include "bhq/state.hpp"

namespace bhq {

// Local density <n_mu> = sum_n n p_mu(n). For the translation-invariant
// layout any site maps to the stored representative row.
double site_density(const SystemState& state, int site);

// One-body coherence <b^dag_mu1 b_mu2> = sum_n sqrt(n+1) psi^{n+1,n}_{mu1 mu2}
// for distinct sites; carries only the correlated part, which is the full
// expectation in the symmetry-unbroken regime.
complexd obdm(const SystemState& state, const Lattice& lattice, int mu1, int mu2);
complexd obdm_displacement(const SystemState& state, const Lattice& lattice,
                           int displacement_index);

double total_number(const SystemState& state, const Lattice& lattice);
double number_variance_onsite(const SystemState& state, const Lattice& lattice);

struct EnergyParts {
  double kinetic = 0.0;
  double interaction = 0.0;
  double total() const { return kinetic + interaction; }
};
EnergyParts energy_parts(const SystemState& state, const Lattice& lattice,
                         const HamiltonianParams& params);
double energy(const SystemState& state, const Lattice& lattice, const HamiltonianParams& params);

double trace_deviation(const SystemState& state);  // max_mu |sum_n p - 1|
double min_probability(const SystemState& state);

// Ballistic front fit. `signal[i][j]` is |obdm| at times[i], separations[j]
// (separations in index steps along the cut, converted to Euclidean distance
// by the caller via `separation_scale`). Arrival at a separation is the first
// sample at or above threshold; the fit is least-squares of
// separation = velocity * t_arrival + intercept over separations
// <= max_separation with ballistic ordering enforced only through the fit.
struct FrontFit {
  std::vector<double> separations;  // Euclidean, points actually used
  std::vector<double> arrivals;
  double velocity = 0.0;
  double intercept = 0.0;
  double residual_rms = 0.0;
};
FrontFit front_arrival(const std::vector<double>& times,
                       const std::vector<double>& separations,
                       const std::vector<std::vector<double>>& signal, double threshold,
                       double max_separation, double separation_scale = 1.0);

// Collapse-and-revival detector on a p_mu(0) series sampled on a uniform
// grid: rolling peak-to-peak amplitude over a centered window; the onset is
// the first time after the amplitude minimum (the quiescent plateau) where
// the amplitude exceeds `factor` times the plateau level.
struct RevivalResult {
  bool detected = false;
  double onset = 0.0;
  double plateau_level = 0.0;
  double plateau_time = 0.0;
};
RevivalResult revival_onset(const std::vector<double>& times, const std::vector<double>& p0,
                            double window, double factor = 2.0);

}  // namespace bhq
