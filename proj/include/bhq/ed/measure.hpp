#pragma once

#include <complex>
#include <span>
#include <vector>

#include "bhq/ed/fock_basis.hpp"

namespace bhq::ed {

using complexd = std::complex<double>;

// Expectation values in a FockBasis vector. Operators that leave the basis
// (cutoff exceeded, occupation exhausted) contribute zero, i.e. they act
// projected onto the retained space; with cutoff = N_p nothing is projected.

// P(n_site = n)
double occupation_probability(const FockBasis& basis, std::span<const complexd> psi, int site,
                              int n);

// <b^dag_mu1 b_mu2>; mu1 == mu2 gives the density <n_mu1>
complexd one_body(const FockBasis& basis, std::span<const complexd> psi, int mu1, int mu2);

// <b_s1 (b^dag_s2)^2 b_s3>, applied right to left so coinciding sites are
// handled by the actual operator ordering
complexd three_point_hop(const FockBasis& basis, std::span<const complexd> psi, int s1, int s2,
                         int s3);

// <n_s1 b^dag_s2 b_s3> - <n_s1><b^dag_s2 b_s3>
complexd three_point_density_corr(const FockBasis& basis, std::span<const complexd> psi, int s1,
                                  int s2, int s3);

// <(b^dag_s1)^2 b_s2 b_s3>, the companion correlator without a reference value
complexd pair_hop(const FockBasis& basis, std::span<const complexd> psi, int s1, int s2, int s3);

}  // namespace bhq::ed
