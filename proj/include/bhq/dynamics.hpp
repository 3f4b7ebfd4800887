#pragma once

#include <functional>
#include <span>
#include <vector>

#include "bhq/lattice.hpp"
#include "bhq/state.hpp"

namespace bhq {

struct HamiltonianParams {
  double J = 0.1;  // hopping, already divided down from J/U * U
  double U = 1.0;  // on-site repulsion
};

struct IntegratorConfig {
  double dt = 0.01;        // in units of 1/U when U = 1
  double t_final = 0.0;
  int sample_stride = 10;  // sampler fires every this many steps (and at the end)
  double max_dt_times_u = 0.05;
};

// Derivative buffer shaped like the state it belongs to.
struct StateDerivative {
  std::vector<double> dp;
  std::vector<complexd> df;
};

struct PositivityEvent {
  double time;
  double min_p;
};

struct EvolveSummary {
  long steps = 0;
  double max_trace_deviation = 0.0;
  double initial_number = 0.0;
  double max_number_drift = 0.0;      // relative to the initial total number
  double initial_energy = 0.0;
  double max_energy_drift = 0.0;      // relative to max_t(|E_kin| + |E_int|)
  double energy_scale = 0.0;
  double min_probability = 0.0;       // watermark over all samples
  std::vector<PositivityEvent> positivity_warnings;  // first crossings below -1e-12
};

// Right-hand side and fixed-step integrator for the coupled on-site /
// pair-correlation equations of motion after the hopping quench:
//
//   dp_mu1(n)/dt = -(2J/Z) sum_{mu2 nn mu1} Im[ sqrt(n)   psi_{mu1 mu2}^{n, n-1}
//                                             - sqrt(n+1) psi_{mu1 mu2}^{n+1, n} ]
//
//   i df^{n1 n2}_{mu1 mu2}/dt =
//        U (n2 - n1) f^{n1 n2}
//      - (J/Z) T_{mu1 mu2} sqrt((n1+1)(n2+1)) [ p_mu1(n1+1) p_mu2(n2) - p_mu1(n1) p_mu2(n2+1) ]
//      - (J/Z) sum_{mu3 nn mu1, mu3 != mu2} sqrt(n1+1) [ p_mu1(n1+1) - p_mu1(n1) ]
//                                           conj(psi_{mu2 mu3}^{n2+1, n2})
//      - (J/Z) sum_{mu3 nn mu2, mu3 != mu1} sqrt(n2+1) [ p_mu2(n2) - p_mu2(n2+1) ]
//                                           psi_{mu1 mu3}^{n1+1, n1}
//
// with psi^{n+1,n}_{mu1 mu2} = sum_m sqrt(m+1) f^{n m}_{mu1 mu2}. Truncation
// keeps n1, n2 < n_max; channels that would leave the stored range are
// dropped. Three-site correlated parts are neglected throughout.
//
// An Evolver instance carries preallocated workspace and is not safe for
// concurrent use; independent instances are.
class Evolver {
 public:
  Evolver(const Lattice& lattice, HamiltonianParams params);

  const HamiltonianParams& params() const { return params_; }

  void rhs(const SystemState& state, StateDerivative& out) const;
  // Spec'd sub-steps, callable on their own; each recomputes psi.
  void rhs_onsite(const SystemState& state, std::span<double> dp) const;
  void rhs_pair(const SystemState& state, std::span<complexd> df) const;

  // Classic fixed-step RK4. Throws on non-finite state entries.
  void step_rk4(SystemState& state, double dt);

  // Integrates to config.t_final, invoking the sampler at t = 0, every
  // sample_stride-th step and at the final step. Conservation monitors are
  // evaluated at sample points.
  EvolveSummary evolve(SystemState& state, const IntegratorConfig& config,
                       const std::function<void(const SystemState&)>& sampler = {});

 private:
  void ensure_shapes(const SystemState& state) const;
  void compute_psi(const PairCorrelations& pairs) const;
  void check_finite(const SystemState& state) const;

  const Lattice& lattice_;
  HamiltonianParams params_;
  mutable std::vector<double> sq_;  // sq_[a] = sqrt(a + 1)

  // Displacement-composition tables for the translation-invariant layout:
  // for displacement slot s and neighbor step delta_j,
  //   ti_from_second_[s*Z + j] = slot of (delta_j - s), the step seen from the
  //                              second site, or -1 when it is the zero vector;
  //   ti_from_first_[s*Z + j]  = slot of (s + delta_j), or -1 when zero.
  std::vector<int> ti_from_second_;
  std::vector<int> ti_from_first_;

  mutable std::vector<complexd> psi_;  // num_blocks x n_max workspace
  mutable int psi_nmax_ = 0;

  // RK4 scratch
  StateDerivative k1_, k2_, k3_, k4_;
  SystemState stage_;
};

}  // namespace bhq
