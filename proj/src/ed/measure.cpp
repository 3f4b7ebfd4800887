#include "bhq/ed/measure.hpp"

#include <cmath>
#include <stdexcept>

namespace bhq::ed {

namespace {

void check(const FockBasis& basis, std::span<const complexd> psi,
           std::initializer_list<int> sites) {
  if (static_cast<std::int64_t>(psi.size()) != basis.dimension())
    throw std::invalid_argument("state length does not match the basis dimension");
  for (int s : sites)
    if (s < 0 || s >= basis.num_sites()) throw std::invalid_argument("site index out of range");
}

}  // namespace

double occupation_probability(const FockBasis& basis, std::span<const complexd> psi, int site,
                              int n) {
  check(basis, psi, {site});
  if (n < 0) throw std::invalid_argument("occupation must be non-negative");
  double p = 0.0;
  for (std::int64_t i = 0; i < basis.dimension(); ++i)
    if (basis.occupations(i)[site] == n) p += std::norm(psi[i]);
  return p;
}

complexd one_body(const FockBasis& basis, std::span<const complexd> psi, int mu1, int mu2) {
  check(basis, psi, {mu1, mu2});
  if (mu1 == mu2) {
    double d = 0.0;
    for (std::int64_t i = 0; i < basis.dimension(); ++i)
      d += basis.occupations(i)[mu1] * std::norm(psi[i]);
    return {d, 0.0};
  }
  complexd acc(0.0, 0.0);
  std::vector<std::uint8_t> work(basis.num_sites());
  for (std::int64_t i = 0; i < basis.dimension(); ++i) {
    const auto occ = basis.occupations(i);
    if (occ[mu2] == 0) continue;
    std::copy(occ.begin(), occ.end(), work.begin());
    const double amp = std::sqrt(static_cast<double>(work[mu2]) * (work[mu1] + 1));
    work[mu2] -= 1;
    work[mu1] += 1;
    const std::int64_t j = basis.index_of(work);
    if (j < 0) continue;
    acc += std::conj(psi[j]) * amp * psi[i];
  }
  return acc;
}

namespace {

// applies the annihilation/creation string right to left on the occupation
// vector, multiplying the matrix element into amp; returns false if the
// string kills the state
bool lower(std::vector<std::uint8_t>& occ, int site, double& amp) {
  if (occ[site] == 0) return false;
  amp *= std::sqrt(static_cast<double>(occ[site]));
  occ[site] -= 1;
  return true;
}

void raise(std::vector<std::uint8_t>& occ, int site, double& amp) {
  amp *= std::sqrt(static_cast<double>(occ[site]) + 1.0);
  occ[site] += 1;
}

}  // namespace

complexd three_point_hop(const FockBasis& basis, std::span<const complexd> psi, int s1, int s2,
                         int s3) {
  check(basis, psi, {s1, s2, s3});
  complexd acc(0.0, 0.0);
  std::vector<std::uint8_t> work(basis.num_sites());
  for (std::int64_t i = 0; i < basis.dimension(); ++i) {
    const auto occ = basis.occupations(i);
    std::copy(occ.begin(), occ.end(), work.begin());
    double amp = 1.0;
    if (!lower(work, s3, amp)) continue;
    raise(work, s2, amp);
    raise(work, s2, amp);
    if (!lower(work, s1, amp)) continue;
    const std::int64_t j = basis.index_of(work);
    if (j < 0) continue;
    acc += std::conj(psi[j]) * amp * psi[i];
  }
  return acc;
}

complexd three_point_density_corr(const FockBasis& basis, std::span<const complexd> psi, int s1,
                                  int s2, int s3) {
  check(basis, psi, {s1, s2, s3});
  complexd raw(0.0, 0.0);
  std::vector<std::uint8_t> work(basis.num_sites());
  for (std::int64_t i = 0; i < basis.dimension(); ++i) {
    const auto occ = basis.occupations(i);
    std::copy(occ.begin(), occ.end(), work.begin());
    double amp = 1.0;
    if (!lower(work, s3, amp)) continue;
    raise(work, s2, amp);
    const std::int64_t j = basis.index_of(work);
    if (j < 0) continue;
    // the density factor acts leftmost, i.e. on the target occupations
    raw += std::conj(psi[j]) * (amp * work[s1]) * psi[i];
  }
  const complexd disconnected = one_body(basis, psi, s1, s1) * one_body(basis, psi, s2, s3);
  return raw - disconnected;
}

complexd pair_hop(const FockBasis& basis, std::span<const complexd> psi, int s1, int s2,
                  int s3) {
  check(basis, psi, {s1, s2, s3});
  complexd acc(0.0, 0.0);
  std::vector<std::uint8_t> work(basis.num_sites());
  for (std::int64_t i = 0; i < basis.dimension(); ++i) {
    const auto occ = basis.occupations(i);
    std::copy(occ.begin(), occ.end(), work.begin());
    double amp = 1.0;
    if (!lower(work, s3, amp)) continue;
    if (!lower(work, s2, amp)) continue;
    raise(work, s1, amp);
    raise(work, s1, amp);
    const std::int64_t j = basis.index_of(work);
    if (j < 0) continue;
    acc += std::conj(psi[j]) * amp * psi[i];
  }
  return acc;
}

}  // namespace bhq::ed
