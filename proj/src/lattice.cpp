#include "bhq/lattice.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace bhq {

int LatticeSpec::num_sites() const {
  int n = 1;
  for (int l : sizes) n *= l;
  return n;
}

void LatticeSpec::validate() const {
  std::ostringstream msg;
  if (dimension < 1) msg << "dimension must be >= 1 (got " << dimension << "); ";
  if (static_cast<int>(sizes.size()) != dimension)
    msg << "sizes has " << sizes.size() << " entries, expected dimension = " << dimension << "; ";
  for (std::size_t d = 0; d < sizes.size(); ++d)
    if (sizes[d] < 3)
      msg << "sizes[" << d << "] = " << sizes[d] << " but periodic neighbors require L >= 3; ";
  const std::string s = msg.str();
  if (!s.empty()) throw std::invalid_argument("invalid lattice spec: " + s);
}

Lattice::Lattice(LatticeSpec spec) : spec_(std::move(spec)) {
  spec_.validate();
  const int d = spec_.dimension;
  nsites_ = spec_.num_sites();
  z_ = 2 * d;

  strides_.assign(d, 1);
  for (int a = d - 2; a >= 0; --a) strides_[a] = strides_[a + 1] * spec_.sizes[a + 1];

  nbr_disp_.clear();
  for (int a = 0; a < d; ++a) {
    std::vector<int> plus(d, 0), minus(d, 0);
    plus[a] = 1;
    minus[a] = -1;
    nbr_disp_.push_back(plus);
    nbr_disp_.push_back(minus);
  }

  disp_low_.assign(d, 0);
  for (int a = 0; a < d; ++a) disp_low_[a] = -((spec_.sizes[a] - 1) / 2);

  std::vector<int> zero(d, 0);
  zero_disp_ = displacement_index(zero);

  nbr_flat_.assign(static_cast<std::size_t>(nsites_) * z_, -1);
  for (int s = 0; s < nsites_; ++s)
    for (int j = 0; j < z_; ++j)
      nbr_flat_[static_cast<std::size_t>(s) * z_ + j] = translate(s, nbr_disp_[j]);
}

std::span<const int> Lattice::neighbors(int site) const {
  if (site < 0 || site >= nsites_) throw std::out_of_range("site index out of range");
  return {nbr_flat_.data() + static_cast<std::size_t>(site) * z_, static_cast<std::size_t>(z_)};
}

bool Lattice::adjacent(int site1, int site2) const {
  for (int n : neighbors(site1))
    if (n == site2) return true;
  return false;
}

std::vector<int> Lattice::site_coords(int site) const {
  if (site < 0 || site >= nsites_) throw std::out_of_range("site index out of range");
  std::vector<int> c(spec_.dimension);
  for (int a = 0; a < spec_.dimension; ++a) {
    c[a] = site / strides_[a];
    site -= c[a] * strides_[a];
  }
  return c;
}

int Lattice::site_index(std::span<const int> coords) const {
  if (static_cast<int>(coords.size()) != spec_.dimension)
    throw std::invalid_argument("coordinate count does not match lattice dimension");
  int idx = 0;
  for (int a = 0; a < spec_.dimension; ++a) {
    const int l = spec_.sizes[a];
    int c = coords[a] % l;
    if (c < 0) c += l;
    idx += c * strides_[a];
  }
  return idx;
}

int Lattice::translate(int site, std::span<const int> displacement) const {
  std::vector<int> c = site_coords(site);
  if (displacement.size() != c.size())
    throw std::invalid_argument("displacement dimension mismatch");
  for (std::size_t a = 0; a < c.size(); ++a) c[a] += displacement[a];
  return site_index(c);
}

std::vector<int> Lattice::displacement(int from, int to) const {
  const std::vector<int> a = site_coords(from);
  const std::vector<int> b = site_coords(to);
  std::vector<int> d(spec_.dimension);
  for (int i = 0; i < spec_.dimension; ++i) d[i] = b[i] - a[i];
  return canonicalize(d);
}

std::vector<int> Lattice::canonicalize(std::span<const int> displacement) const {
  if (static_cast<int>(displacement.size()) != spec_.dimension)
    throw std::invalid_argument("displacement dimension mismatch");
  std::vector<int> d(spec_.dimension);
  for (int a = 0; a < spec_.dimension; ++a) {
    const int l = spec_.sizes[a];
    int v = displacement[a] % l;
    if (v < 0) v += l;          // now in [0, L)
    if (v > l / 2) v -= l;      // fold into (-L/2, L/2], keeping +L/2 for even L
    d[a] = v;
  }
  return d;
}

int Lattice::displacement_index(std::span<const int> canonical) const {
  if (static_cast<int>(canonical.size()) != spec_.dimension)
    throw std::invalid_argument("displacement dimension mismatch");
  int idx = 0;
  for (int a = 0; a < spec_.dimension; ++a) {
    const int v = canonical[a] - disp_low_[a];
    if (v < 0 || v >= spec_.sizes[a])
      throw std::out_of_range("displacement component outside canonical range");
    idx = idx * spec_.sizes[a] + v;
  }
  return idx;
}

std::vector<int> Lattice::displacement_from_index(int index) const {
  if (index < 0 || index >= nsites_) throw std::out_of_range("displacement index out of range");
  std::vector<int> d(spec_.dimension);
  for (int a = spec_.dimension - 1; a >= 0; --a) {
    const int l = spec_.sizes[a];
    d[a] = index % l + disp_low_[a];
    index /= l;
  }
  return d;
}

double Lattice::displacement_norm(std::span<const int> displacement) {
  double s = 0;
  for (int v : displacement) s += static_cast<double>(v) * v;
  return std::sqrt(s);
}

std::vector<std::vector<double>> Lattice::bz_modes() const {
  std::vector<std::vector<double>> modes;
  modes.reserve(nsites_);
  std::vector<int> m(spec_.dimension, 0);
  for (int i = 0; i < nsites_; ++i) {
    std::vector<double> k(spec_.dimension);
    for (int a = 0; a < spec_.dimension; ++a)
      k[a] = 2.0 * std::numbers::pi * m[a] / spec_.sizes[a];
    modes.push_back(std::move(k));
    for (int a = spec_.dimension - 1; a >= 0; --a) {
      if (++m[a] < spec_.sizes[a]) break;
      m[a] = 0;
    }
  }
  return modes;
}

double Lattice::fourier_adjacency(std::span<const double> k) const {
  if (static_cast<int>(k.size()) != spec_.dimension)
    throw std::invalid_argument("momentum dimension mismatch");
  double t = 0;
  for (int a = 0; a < spec_.dimension; ++a) {
    const double m = k[a] * spec_.sizes[a] / (2.0 * std::numbers::pi);
    if (std::abs(m - std::round(m)) > 1e-6)
      throw std::invalid_argument("momentum component not on the 2*pi/L grid");
    t += std::cos(k[a]);
  }
  return t / spec_.dimension;
}

}  // namespace bhq
