#include <cmath>
#include <complex>
#include <random>
#include <stdexcept>
#include <vector>

#include "bhq/dynamics.hpp"
#include "bhq/lattice.hpp"
#include "bhq/observables.hpp"
#include "bhq/state.hpp"
#include "doctest.h"

using namespace bhq;

namespace {

Lattice make(std::vector<int> sizes) {
  LatticeSpec spec;
  spec.dimension = static_cast<int>(sizes.size());
  spec.sizes = std::move(sizes);
  return Lattice(spec);
}

// Random state with normalized rows and exchange-consistent pair blocks,
// f_{mu1 mu2}^{n1 n2} = conj(f_{mu2 mu1}^{n2 n1}). Small |f| keeps it in the
// regime the equations are meant for, but the conservation identities tested
// below hold for any amplitude.
SystemState random_full_state(const Lattice& lat, int n_max, unsigned seed) {
  SystemState s = initial_mott(lat, n_max, 1, PairLayout::Full);
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> uni(0.05, 1.0);
  std::uniform_real_distribution<double> amp(-0.05, 0.05);

  for (int mu = 0; mu < lat.num_sites(); ++mu) {
    double sum = 0.0;
    for (int n = 0; n <= n_max; ++n) sum += (s.onsite.at(mu, n) = uni(rng));
    for (int n = 0; n <= n_max; ++n) s.onsite.at(mu, n) /= sum;
  }
  for (int mu1 = 0; mu1 < lat.num_sites(); ++mu1)
    for (int mu2 = mu1 + 1; mu2 < lat.num_sites(); ++mu2) {
      const int b = pair_block_index(lat, s.pairs, mu1, mu2);
      const int br = pair_block_index(lat, s.pairs, mu2, mu1);
      for (int n1 = 0; n1 < n_max; ++n1)
        for (int n2 = 0; n2 < n_max; ++n2) {
          s.pairs.at(b, n1, n2) = complexd(amp(rng), amp(rng));
          s.pairs.at(br, n2, n1) = std::conj(s.pairs.at(b, n1, n2));
        }
    }
  return s;
}

double state_distance(const SystemState& a, const SystemState& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.onsite.p.size(); ++i)
    d = std::max(d, std::abs(a.onsite.p[i] - b.onsite.p[i]));
  for (std::size_t i = 0; i < a.pairs.f.size(); ++i)
    d = std::max(d, std::abs(a.pairs.f[i] - b.pairs.f[i]));
  return d;
}

}  // namespace

TEST_SUITE("dynamics") {
  TEST_CASE("derivative right after the quench") {
    // From the product state the only motion is the pair source on bonds:
    // df(0,1)/dt = +i sqrt(2) J/Z and df(1,0)/dt = -i sqrt(2) J/Z.
    const Lattice lat = make({5});
    const HamiltonianParams params{0.1, 1.0};
    const Evolver ev(lat, params);
    const double expect = std::sqrt(2.0) * params.J / lat.coordination();

    for (PairLayout layout : {PairLayout::TranslationInvariant, PairLayout::Full}) {
      SystemState s = initial_mott(lat, 3, 1, layout);
      StateDerivative d;
      ev.rhs(s, d);
      for (double v : d.dp) CHECK(v == 0.0);

      const int bond = pair_block_index(lat, s.pairs, 0, 1);
      const int far = pair_block_index(lat, s.pairs, 0, 2);
      const int nm = s.pairs.n_max;
      for (int n1 = 0; n1 < nm; ++n1)
        for (int n2 = 0; n2 < nm; ++n2) {
          const complexd v = d.df[static_cast<std::size_t>(bond) * nm * nm + n1 * nm + n2];
          if (n1 == 0 && n2 == 1)
            CHECK(std::abs(v - complexd(0.0, expect)) < 1e-15);
          else if (n1 == 1 && n2 == 0)
            CHECK(std::abs(v - complexd(0.0, -expect)) < 1e-15);
          else
            CHECK(std::abs(v) == 0.0);
          CHECK(std::abs(d.df[static_cast<std::size_t>(far) * nm * nm + n1 * nm + n2]) == 0.0);
        }
    }
  }

  TEST_CASE("row trace and total number are flat directions of the flow") {
    const Lattice lat = make({3, 3});
    const Evolver ev(lat, {0.23, 1.0});
    const SystemState s = random_full_state(lat, 3, 7771);
    StateDerivative d;
    ev.rhs(s, d);

    const int nm1 = s.onsite.n_max + 1;
    double number_rate = 0.0;
    for (int mu = 0; mu < lat.num_sites(); ++mu) {
      double row = 0.0;
      for (int n = 0; n < nm1; ++n) {
        row += d.dp[static_cast<std::size_t>(mu) * nm1 + n];
        number_rate += n * d.dp[static_cast<std::size_t>(mu) * nm1 + n];
      }
      CHECK(std::abs(row) < 1e-14);
    }
    CHECK(std::abs(number_rate) < 1e-13);
  }

  TEST_CASE("energy is conserved along the trajectory") {
    const Lattice lat = make({7});
    Evolver ev(lat, {0.3, 1.0});
    SystemState s = initial_mott(lat, 4, 1, PairLayout::TranslationInvariant);
    IntegratorConfig cfg;
    cfg.dt = 0.01;
    cfg.t_final = 10.0;
    cfg.sample_stride = 5;
    const EvolveSummary sum = ev.evolve(s, cfg);
    CHECK(sum.steps == 1000);
    CHECK(sum.max_trace_deviation < 1e-12);
    CHECK(sum.max_number_drift < 1e-12);
    CHECK(sum.energy_scale > 0.0);
    CHECK(sum.max_energy_drift < 1e-5);
  }

  TEST_CASE("hopping off leaves pure phase rotation") {
    const Lattice lat = make({5});
    Evolver ev(lat, {0.0, 1.0});
    SystemState s = initial_mott(lat, 3, 1, PairLayout::TranslationInvariant);
    const int nm = s.pairs.n_max;
    const int fwd = pair_block_index(lat, s.pairs, 0, 1);
    const int bwd = pair_block_index(lat, s.pairs, 1, 0);
    for (int n1 = 0; n1 < nm; ++n1)
      for (int n2 = 0; n2 < nm; ++n2) {
        s.pairs.at(fwd, n1, n2) = complexd(0.01 * (n1 + 1), -0.02 * (n2 + 1));
        s.pairs.at(bwd, n2, n1) = std::conj(s.pairs.at(fwd, n1, n2));
      }
    const SystemState s0 = s;

    IntegratorConfig cfg;
    cfg.dt = 0.01;
    cfg.t_final = 1.0;
    ev.evolve(s, cfg);

    CHECK(s.onsite.p == s0.onsite.p);  // dp vanishes identically at J = 0
    for (int b : {fwd, bwd})
      for (int n1 = 0; n1 < nm; ++n1)
        for (int n2 = 0; n2 < nm; ++n2) {
          const complexd expect =
              s0.pairs.at(b, n1, n2) *
              std::exp(complexd(0.0, -1.0 * (n2 - n1) * s.time));
          CHECK(std::abs(s.pairs.at(b, n1, n2) - expect) < 1e-9);
        }
  }

  TEST_CASE("integrator converges at fourth order") {
    const Lattice lat = make({5});
    const HamiltonianParams params{0.2, 1.0};
    auto run = [&](double dt) {
      Evolver ev(lat, params);
      SystemState s = initial_mott(lat, 3, 1, PairLayout::TranslationInvariant);
      IntegratorConfig cfg;
      cfg.dt = dt;
      cfg.t_final = 2.0;
      cfg.sample_stride = 1000000;
      ev.evolve(s, cfg);
      return s;
    };
    const SystemState ref = run(0.0025);
    const double e1 = state_distance(run(0.04), ref);
    const double e2 = state_distance(run(0.02), ref);
    const double order = std::log2(e1 / e2);
    CHECK(order > 3.7);
    CHECK(order < 4.3);
  }

  TEST_CASE("reduced and full layouts integrate to the same trajectory") {
    const Lattice lat = make({3, 3});
    const HamiltonianParams params{0.15, 1.0};
    IntegratorConfig cfg;
    cfg.dt = 0.01;
    cfg.t_final = 2.0;
    cfg.sample_stride = 1000000;

    Evolver ev1(lat, params);
    SystemState ti = initial_mott(lat, 3, 1, PairLayout::TranslationInvariant);
    ev1.evolve(ti, cfg);

    Evolver ev2(lat, params);
    SystemState full = initial_mott(lat, 3, 1, PairLayout::Full);
    ev2.evolve(full, cfg);

    const int nm = ti.pairs.n_max;
    for (int mu = 0; mu < lat.num_sites(); ++mu)
      for (int n = 0; n <= nm; ++n)
        CHECK(std::abs(full.onsite.at(mu, n) - ti.onsite.at(0, n)) < 1e-12);

    for (int mu1 = 0; mu1 < lat.num_sites(); ++mu1)
      for (int mu2 = 0; mu2 < lat.num_sites(); ++mu2) {
        if (mu1 == mu2) continue;
        const int bf = pair_block_index(lat, full.pairs, mu1, mu2);
        const int bt = pair_block_index(lat, ti.pairs, mu1, mu2);
        for (int i = 0; i < nm * nm; ++i)
          CHECK(std::abs(full.pairs.block(bf)[i] - ti.pairs.block(bt)[i]) < 1e-12);
      }
  }

  TEST_CASE("exchange consistency survives integration") {
    const Lattice lat = make({4, 3});
    Evolver ev(lat, {0.12, 1.0});
    SystemState s = initial_mott(lat, 3, 1, PairLayout::Full);
    IntegratorConfig cfg;
    cfg.dt = 0.02;
    cfg.t_final = 3.0;
    cfg.sample_stride = 1000000;
    ev.evolve(s, cfg);

    const int nm = s.pairs.n_max;
    for (int mu1 = 0; mu1 < lat.num_sites(); ++mu1)
      for (int mu2 = mu1 + 1; mu2 < lat.num_sites(); ++mu2) {
        const auto mirrored = mirror_pair(s.pairs, lat, mu1, mu2);
        const int br = pair_block_index(lat, s.pairs, mu2, mu1);
        for (int i = 0; i < nm * nm; ++i)
          CHECK(std::abs(mirrored[i] - s.pairs.block(br)[i]) < 1e-12);
      }
  }

  TEST_CASE("guard rails") {
    const Lattice lat = make({5});
    CHECK_THROWS_AS(Evolver(lat, {0.1, 0.0}), std::invalid_argument);
    CHECK_THROWS_AS(Evolver(lat, {-0.1, 1.0}), std::invalid_argument);

    Evolver ev(lat, {0.1, 1.0});
    SystemState s = initial_mott(lat, 3, 1, PairLayout::TranslationInvariant);
    IntegratorConfig cfg;
    cfg.dt = 0.06;  // above the dt*U bound
    cfg.t_final = 1.0;
    CHECK_THROWS_AS(ev.evolve(s, cfg), std::invalid_argument);

    SystemState wrong = initial_mott(lat, 3, 1, PairLayout::Full);
    wrong.onsite.p.pop_back();
    StateDerivative d;
    CHECK_THROWS_AS(ev.rhs(wrong, d), std::invalid_argument);

    SystemState nan_state = initial_mott(lat, 3, 1, PairLayout::TranslationInvariant);
    nan_state.pairs.f[1] = complexd(std::nan(""), 0.0);
    CHECK_THROWS_AS(ev.step_rk4(nan_state, 0.01), std::runtime_error);
  }

  TEST_CASE("sampler cadence") {
    const Lattice lat = make({5});
    Evolver ev(lat, {0.1, 1.0});
    SystemState s = initial_mott(lat, 3, 1, PairLayout::TranslationInvariant);
    IntegratorConfig cfg;
    cfg.dt = 0.01;
    cfg.t_final = 0.25;
    cfg.sample_stride = 10;
    std::vector<double> seen;
    ev.evolve(s, cfg, [&](const SystemState& st) { seen.push_back(st.time); });
    // t = 0, every 10th step, and the final (25th) step
    REQUIRE(seen.size() == 4);
    CHECK(seen[0] == doctest::Approx(0.0));
    CHECK(seen[1] == doctest::Approx(0.10));
    CHECK(seen[2] == doctest::Approx(0.20));
    CHECK(seen[3] == doctest::Approx(0.25));
  }
}
