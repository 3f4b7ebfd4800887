#include <cmath>
#include <complex>
#include <random>
#include <stdexcept>
#include <vector>

#include "bhq/ed/dense.hpp"
#include "bhq/ed/fock_basis.hpp"
#include "bhq/ed/hamiltonian.hpp"
#include "bhq/ed/krylov.hpp"
#include "bhq/ed/measure.hpp"
#include "bhq/lattice.hpp"
#include "doctest.h"

using namespace bhq;
using namespace bhq::ed;

namespace {

Lattice ring(int l) {
  LatticeSpec spec;
  spec.dimension = 1;
  spec.sizes = {l};
  return Lattice(spec);
}

std::vector<complexd> mott_vector(const FockBasis& basis, int filling) {
  std::vector<std::uint8_t> occ(basis.num_sites(), static_cast<std::uint8_t>(filling));
  const std::int64_t idx = basis.index_of(occ);
  REQUIRE(idx >= 0);
  std::vector<complexd> psi(basis.dimension(), complexd(0.0, 0.0));
  psi[idx] = complexd(1.0, 0.0);
  return psi;
}

std::vector<complexd> random_unit_vector(std::int64_t dim, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<complexd> psi(dim);
  double n2 = 0.0;
  for (auto& c : psi) {
    c = complexd(g(rng), g(rng));
    n2 += std::norm(c);
  }
  for (auto& c : psi) c /= std::sqrt(n2);
  return psi;
}

double norm(const std::vector<complexd>& x) {
  double s = 0.0;
  for (const complexd& c : x) s += std::norm(c);
  return std::sqrt(s);
}

}  // namespace

TEST_SUITE("ed") {
  TEST_CASE("basis enumeration order and counts") {
    const FockBasis tiny(2, 2, 2);
    REQUIRE(tiny.dimension() == 3);
    CHECK(tiny.occupations(0)[0] == 2);
    CHECK(tiny.occupations(0)[1] == 0);
    CHECK(tiny.occupations(1)[0] == 1);
    CHECK(tiny.occupations(1)[1] == 1);
    CHECK(tiny.occupations(2)[0] == 0);
    CHECK(tiny.occupations(2)[1] == 2);

    CHECK(FockBasis::count_states(7, 7, 7) == 1716);
    CHECK(FockBasis::count_states(9, 9, 9) == 24310);
    CHECK(FockBasis::count_states(11, 11, 11) == 352716);
    CHECK(FockBasis::count_states(3, 3, 2) == 7);  // parts of 3 with entries <= 2
    CHECK(FockBasis::count_states(3, 3, 1) == 1);

    const FockBasis capped(3, 3, 2);
    CHECK(capped.dimension() == 7);
    for (std::int64_t i = 0; i < capped.dimension(); ++i) {
      int sum = 0;
      for (std::uint8_t n : capped.occupations(i)) {
        CHECK(n <= 2);
        sum += n;
      }
      CHECK(sum == 3);
      CHECK(capped.index_of(capped.occupations(i)) == i);
    }
    const std::vector<std::uint8_t> outside = {3, 0, 0};
    CHECK(capped.index_of(outside) == -1);
  }

  TEST_CASE("basis refuses to blow the memory budget") {
    try {
      FockBasis big(11, 11, 11, 100000);
      FAIL("expected refusal");
    } catch (const std::runtime_error& e) {
      const std::string msg = e.what();
      CHECK(msg.find("352716") != std::string::npos);
      CHECK(msg.find("100000") != std::string::npos);
    }
    CHECK_THROWS_AS(FockBasis(1, 1, 1), std::invalid_argument);
    CHECK_THROWS_AS(FockBasis(13, 1, 1), std::invalid_argument);
    CHECK_THROWS_AS(FockBasis(3, 3, 0), std::invalid_argument);
  }

  TEST_CASE("hamiltonian structure") {
    const Lattice lat = ring(3);
    const FockBasis basis(3, 3, 3);
    REQUIRE(basis.dimension() == 10);

    SUBCASE("hopping off means strictly diagonal") {
      const SparseHamiltonian h = build_hamiltonian(basis, lat, {0.0, 1.0});
      CHECK(h.cols.empty());
      const std::vector<std::uint8_t> stacked = {3, 0, 0};
      CHECK(h.diag[basis.index_of(stacked)] == doctest::Approx(3.0));
      const std::vector<std::uint8_t> mott = {1, 1, 1};
      CHECK(h.diag[basis.index_of(mott)] == doctest::Approx(0.0));
    }

    SUBCASE("symmetry, row degree, and spectral bounds") {
      const SparseHamiltonian h = build_hamiltonian(basis, lat, {0.1, 1.0});
      const int n = static_cast<int>(h.dim);
      std::vector<double> dense(n * n, 0.0);
      for (int i = 0; i < n; ++i) {
        CHECK(h.row_ptr[i + 1] - h.row_ptr[i] <= lat.coordination() * basis.num_sites());
        dense[i * n + i] = h.diag[i];
        for (std::int64_t e = h.row_ptr[i]; e < h.row_ptr[i + 1]; ++e)
          dense[i * n + h.cols[e]] += h.vals[e];
      }
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) CHECK(dense[i * n + j] == dense[j * n + i]);

      const DenseSolver solver(h);
      for (double e : solver.eigenvalues()) {
        CHECK(e >= h.bound_low - 1e-12);
        CHECK(e <= h.bound_high + 1e-12);
      }
    }
  }

  TEST_CASE("krylov and dense match an external 3x3 exponential") {
    // hand-built three-level system, psi0 = e0, t = 1.7
    SparseHamiltonian h;
    h.dim = 3;
    h.diag = {0.0, 0.5, 2.0};
    h.row_ptr = {0, 1, 3, 4};
    h.cols = {1, 0, 2, 1};
    h.vals = {0.3, 0.3, 0.2, 0.2};
    h.bound_low = -0.5;
    h.bound_high = 2.5;

    const std::vector<complexd> expect = {
        {0.8807702564656354, 0.03371287511310692},
        {-0.18747865834105118, -0.42876850285231793},
        {-0.011342834989876375, 0.0631495138530812}};

    std::vector<complexd> psi = {1.0, 0.0, 0.0};
    evolve_krylov(h, psi, 1.7);
    for (int i = 0; i < 3; ++i) CHECK(std::abs(psi[i] - expect[i]) < 1e-10);

    const DenseSolver solver(h);
    const std::vector<complexd> dense = solver.evolve({1.0, 0.0, 0.0}, 1.7);
    for (int i = 0; i < 3; ++i) CHECK(std::abs(dense[i] - expect[i]) < 1e-10);
  }

  TEST_CASE("krylov follows the dense trajectory on a mid-size ring") {
    const Lattice lat = ring(7);
    const FockBasis basis(7, 7, 7);
    const SparseHamiltonian h = build_hamiltonian(basis, lat, {0.1, 1.0});
    const DenseSolver solver(h);

    std::vector<complexd> psi = mott_vector(basis, 1);
    const std::vector<complexd> psi0 = psi;
    for (int step = 1; step <= 20; ++step) {
      evolve_krylov(h, psi, 0.5);
      const std::vector<complexd> ref = solver.evolve(psi0, 0.5 * step);
      const double pk = occupation_probability(basis, psi, 0, 0);
      const double pd = occupation_probability(basis, ref, 0, 0);
      CHECK(std::abs(pk - pd) < 1e-8);
    }
    CHECK(std::abs(norm(psi) - 1.0) < 1e-10);
  }

  TEST_CASE("hopping off leaves the product state invariant") {
    const Lattice lat = ring(5);
    const FockBasis basis(5, 5, 5);
    const SparseHamiltonian h = build_hamiltonian(basis, lat, {0.0, 1.0});
    std::vector<complexd> psi = mott_vector(basis, 1);
    const std::vector<complexd> psi0 = psi;
    evolve_krylov(h, psi, 3.0);
    for (std::int64_t i = 0; i < basis.dimension(); ++i)
      CHECK(std::abs(psi[i] - psi0[i]) < 1e-12);
  }

  TEST_CASE("norm is preserved over a thousand propagations") {
    const Lattice lat = ring(5);
    const FockBasis basis(5, 5, 5);
    const SparseHamiltonian h = build_hamiltonian(basis, lat, {0.1, 1.0});
    std::vector<complexd> psi = mott_vector(basis, 1);
    for (int call = 0; call < 1000; ++call) evolve_krylov(h, psi, 0.1);
    CHECK(std::abs(norm(psi) - 1.0) < 1e-8);
  }

  TEST_CASE("ring propagation is translation invariant") {
    const Lattice lat = ring(5);
    const FockBasis basis(5, 5, 5);
    const SparseHamiltonian h = build_hamiltonian(basis, lat, {0.1, 1.0});
    std::vector<complexd> psi = mott_vector(basis, 1);
    evolve_krylov(h, psi, 3.0);
    const double p0 = occupation_probability(basis, psi, 0, 0);
    for (int mu = 1; mu < 5; ++mu)
      CHECK(std::abs(occupation_probability(basis, psi, mu, 0) - p0) < 1e-10);
  }

  TEST_CASE("diagonal ensemble") {
    const Lattice lat = ring(3);
    const FockBasis basis(3, 3, 3);
    const SparseHamiltonian h = build_hamiltonian(basis, lat, {0.1, 1.0});
    const DenseSolver solver(h);
    const std::vector<complexd> psi0 = random_unit_vector(basis.dimension(), 424242);

    SUBCASE("identity averages to one") {
      const complexd one = solver.diagonal_ensemble(
          psi0, [](std::span<const complexd> x, std::span<complexd> y) {
            std::copy(x.begin(), x.end(), y.begin());
          });
      CHECK(std::abs(one - complexd(1.0, 0.0)) < 1e-12);
    }

    SUBCASE("energy averages to the conserved expectation") {
      std::vector<complexd> hx(basis.dimension());
      h.apply(psi0, hx);
      complexd e0(0.0, 0.0);
      for (std::int64_t i = 0; i < h.dim; ++i) e0 += std::conj(psi0[i]) * hx[i];
      const complexd avg = solver.diagonal_ensemble(
          psi0, [&](std::span<const complexd> x, std::span<complexd> y) { h.apply(x, y); });
      CHECK(std::abs(avg - e0) < 1e-10);
    }

    SUBCASE("matches the long-time average of the trajectory") {
      const std::vector<complexd> mott = mott_vector(basis, 1);
      const complexd ens = solver.diagonal_ensemble(
          mott, [&](std::span<const complexd> x, std::span<complexd> y) {
            for (std::int64_t i = 0; i < h.dim; ++i)
              y[i] = basis.occupations(i)[0] == 0 ? x[i] : complexd(0.0, 0.0);
          });
      double avg = 0.0;
      const int samples = 2000;
      for (int s = 1; s <= samples; ++s) {
        const std::vector<complexd> psi = solver.evolve(mott, s * 1.0);
        avg += occupation_probability(basis, psi, 0, 0);
      }
      avg /= samples;
      CHECK(std::abs(ens.imag()) < 1e-12);
      CHECK(std::abs(ens.real() - avg) < 0.02 * std::max(std::abs(avg), 1e-3));
    }
  }

  TEST_CASE("dense budget refusal suggests the fallback") {
    const Lattice lat = ring(7);
    const FockBasis basis(7, 7, 7);
    const SparseHamiltonian h = build_hamiltonian(basis, lat, {0.1, 1.0});
    try {
      DenseSolver solver(h, 1000);
      FAIL("expected refusal");
    } catch (const std::runtime_error& e) {
      CHECK(std::string(e.what()).find("Krylov") != std::string::npos);
    }
  }

  TEST_CASE("measurements on the product state") {
    const Lattice lat = ring(5);
    const FockBasis basis(5, 5, 5);
    const std::vector<complexd> mott = mott_vector(basis, 1);
    CHECK(occupation_probability(basis, mott, 2, 1) == doctest::Approx(1.0));
    CHECK(occupation_probability(basis, mott, 2, 0) == doctest::Approx(0.0));
    CHECK(std::abs(one_body(basis, mott, 0, 1)) == 0.0);
    CHECK(std::abs(one_body(basis, mott, 0, 0) - complexd(1.0, 0.0)) < 1e-15);
    CHECK(std::abs(three_point_hop(basis, mott, 0, 1, 2)) == 0.0);
    CHECK(std::abs(three_point_density_corr(basis, mott, 0, 1, 2)) == 0.0);
    CHECK(std::abs(pair_hop(basis, mott, 0, 1, 2)) == 0.0);
  }

  TEST_CASE("hand-computed matrix elements") {
    const FockBasis single(3, 1, 1);  // states (1,0,0), (0,1,0), (0,0,1)
    REQUIRE(single.dimension() == 3);
    const complexd a(0.6, 0.1), b(0.2, -0.3), c(0.5, 0.4);
    const std::vector<complexd> psi = {a, b, c};
    // <b*_0 b_1> moves (0,1,0) -> (1,0,0): conj(a) * b
    CHECK(std::abs(one_body(single, psi, 0, 1) - std::conj(a) * b) < 1e-15);
    CHECK(std::abs(one_body(single, psi, 1, 0) - std::conj(b) * a) < 1e-15);
    CHECK(std::abs(one_body(single, psi, 0, 1) - std::conj(one_body(single, psi, 1, 0))) <
          1e-15);

    const FockBasis two(3, 2, 2);  // (2,0,0),(1,1,0),(1,0,1),(0,2,0),(0,1,1),(0,0,2)
    REQUIRE(two.dimension() == 6);
    std::vector<complexd> phi(6, complexd(0.0, 0.0));
    const std::vector<std::uint8_t> src = {1, 0, 1};
    const std::vector<std::uint8_t> tgt = {0, 2, 0};
    const complexd x(0.3, 0.2), y(0.1, -0.7);
    phi[two.index_of(src)] = x;
    phi[two.index_of(tgt)] = y;
    // b_0 (b*_1)^2 b_2 on (1,0,1): amp sqrt(1) * sqrt(1) * sqrt(2) * sqrt(1)
    CHECK(std::abs(three_point_hop(two, phi, 0, 1, 2) - std::conj(y) * std::sqrt(2.0) * x) <
          1e-15);
    // (b*_0)^2 b_1 b_2 on (0,1,1) -> (2,0,0): amp sqrt(1*1*1*2)
    std::vector<complexd> chi(6, complexd(0.0, 0.0));
    const std::vector<std::uint8_t> src2 = {0, 1, 1};
    const std::vector<std::uint8_t> tgt2 = {2, 0, 0};
    chi[two.index_of(src2)] = x;
    chi[two.index_of(tgt2)] = y;
    CHECK(std::abs(pair_hop(two, chi, 0, 1, 2) - std::conj(y) * std::sqrt(2.0) * x) < 1e-15);

    CHECK_THROWS_AS(one_body(single, psi, 0, 3), std::invalid_argument);
    CHECK_THROWS_AS(occupation_probability(single, psi, 0, -1), std::invalid_argument);
  }

  TEST_CASE("density correlator subtracts the disconnected part") {
    const Lattice lat = ring(4);
    const FockBasis basis(4, 4, 4);
    const SparseHamiltonian h = build_hamiltonian(basis, lat, {0.12, 1.0});
    std::vector<complexd> psi = mott_vector(basis, 1);
    evolve_krylov(h, psi, 2.0);

    // independent dense evaluation of <n_0 b*_1 b_2> on the evolved state
    complexd raw(0.0, 0.0);
    std::vector<std::uint8_t> work(4);
    for (std::int64_t i = 0; i < basis.dimension(); ++i) {
      const auto occ = basis.occupations(i);
      if (occ[2] == 0) continue;
      std::copy(occ.begin(), occ.end(), work.begin());
      const double amp = std::sqrt(static_cast<double>(work[2]) * (work[1] + 1));
      work[2] -= 1;
      work[1] += 1;
      const std::int64_t j = basis.index_of(work);
      if (j < 0) continue;
      raw += std::conj(psi[j]) * (amp * work[0]) * psi[i];
    }
    const complexd expect = raw - one_body(basis, psi, 0, 0) * one_body(basis, psi, 1, 2);
    CHECK(std::abs(three_point_density_corr(basis, psi, 0, 1, 2) - expect) < 1e-13);
  }
}
