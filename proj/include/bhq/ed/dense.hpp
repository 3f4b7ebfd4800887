#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "bhq/ed/hamiltonian.hpp"

namespace bhq::ed {

// Full eigendecomposition for small bases, used as the exact propagator and
// for infinite-time averages. Refuses dimensions above the budget.
class DenseSolver {
 public:
  explicit DenseSolver(const SparseHamiltonian& h, std::int64_t budget = kDefaultBudget);

  std::int64_t dim() const { return dim_; }
  const std::vector<double>& eigenvalues() const { return evals_; }

  // psi(t) = V exp(-i E t) V^T psi0
  std::vector<complexd> evolve(const std::vector<complexd>& psi0, double t) const;

  // Infinite-time average of the observable over the initial state:
  // sum over degenerate eigenspaces g of <P_g psi0| O |P_g psi0>.
  // apply_op computes y = O x and must not alias its arguments.
  complexd diagonal_ensemble(
      const std::vector<complexd>& psi0,
      const std::function<void(std::span<const complexd>, std::span<complexd>)>& apply_op) const;

  static constexpr std::int64_t kDefaultBudget = 6000;

 private:
  std::int64_t dim_;
  std::vector<double> evals_;   // ascending
  std::vector<double> evecs_;   // column-major, dim x dim
};

}  // namespace bhq::ed
