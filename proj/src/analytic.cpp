#include "bhq/analytic.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace bhq {

namespace {

double radicand(double t_k, double J, double U) {
  return U * U - 6.0 * J * U * t_k + J * J * t_k * t_k;
}

// d omega / d k_d = (3 J U - J^2 T_k) sin(k_d) / (D omega)
std::vector<double> group_velocity_at(std::span<const double> k, double t_k, double omega,
                                      double J, double U) {
  std::vector<double> v(k.size());
  const double c = (3.0 * J * U - J * J * t_k) / (k.size() * omega);
  for (std::size_t d = 0; d < k.size(); ++d) v[d] = c * std::sin(k[d]);
  return v;
}

double t_k_continuous(std::span<const double> k) {
  double t = 0.0;
  for (double kd : k) t += std::cos(kd);
  return t / static_cast<double>(k.size());
}

}  // namespace

double dispersion(double t_k, double J, double U) {
  const double r = radicand(t_k, J, U);
  if (r <= 0) {
    std::ostringstream msg;
    msg << "mode frequency undefined: U^2 - 6JU T + J^2 T^2 = " << r << " at T = " << t_k
        << " (J/U = " << J / U << " is outside the deep-Mott validity range)";
    throw std::domain_error(msg.str());
  }
  return std::sqrt(r);
}

DispersionTable DispersionTable::for_lattice(const Lattice& lattice,
                                             const HamiltonianParams& params) {
  DispersionTable table;
  for (auto& k : lattice.bz_modes()) {
    DispersionMode mode;
    mode.t_k = lattice.fourier_adjacency(k);
    mode.omega = dispersion(mode.t_k, params.J, params.U);
    mode.group_velocity = group_velocity_at(k, mode.t_k, mode.omega, params.J, params.U);
    mode.k = std::move(k);
    table.modes.push_back(std::move(mode));
  }
  return table;
}

double p0_first_order(const Lattice& lattice, double J, double U, double t) {
  double sum = 0.0;
  for (const auto& k : lattice.bz_modes()) {
    const double tk = lattice.fourier_adjacency(k);
    const double w = dispersion(tk, J, U);
    sum += tk * tk * (1.0 - std::cos(w * t)) / (w * w);
  }
  return 4.0 * J * J * sum / lattice.num_sites();
}

double obdm_first_order(const Lattice& lattice, double J, double U,
                        std::span<const int> separation, double t) {
  if (static_cast<int>(separation.size()) != lattice.dimension())
    throw std::invalid_argument("separation dimension mismatch");
  double sum = 0.0;
  for (const auto& k : lattice.bz_modes()) {
    const double tk = lattice.fourier_adjacency(k);
    const double w = dispersion(tk, J, U);
    double phase = 0.0;
    for (std::size_t d = 0; d < k.size(); ++d) phase += k[d] * separation[d];
    sum += tk * (1.0 - std::cos(w * t)) / (w * w) * std::cos(phase);
  }
  return 4.0 * J * U * sum / lattice.num_sites();
}

double p0_first_order_dense(int dimension, int grid_per_axis, double J, double U, double t) {
  if (dimension < 1 || grid_per_axis < 2)
    throw std::invalid_argument("dense grid needs dimension >= 1 and >= 2 points per axis");
  const long total = static_cast<long>(std::pow(static_cast<double>(grid_per_axis), dimension));
  std::vector<int> m(dimension, 0);
  double sum = 0.0;
  for (long i = 0; i < total; ++i) {
    double tk = 0.0;
    for (int d = 0; d < dimension; ++d)
      tk += std::cos(2.0 * std::numbers::pi * m[d] / grid_per_axis);
    tk /= dimension;
    const double w = dispersion(tk, J, U);
    sum += tk * tk * (1.0 - std::cos(w * t)) / (w * w);
    for (int d = dimension - 1; d >= 0; --d) {
      if (++m[d] < grid_per_axis) break;
      m[d] = 0;
    }
  }
  return 4.0 * J * J * sum / total;
}

double group_velocity_max(const Lattice& lattice, double J, double U,
                          LatticeDirection direction) {
  const int d = lattice.dimension();
  if (direction == LatticeDirection::Diagonal && d < 2)
    throw std::invalid_argument("diagonal direction needs dimension >= 2");
  std::vector<double> u(d, 0.0);
  if (direction == LatticeDirection::Axis)
    u[0] = 1.0;
  else
    for (int a = 0; a < d; ++a) u[a] = 1.0 / std::sqrt(static_cast<double>(d));

  auto projected = [&](const std::vector<double>& k) {
    const double tk = t_k_continuous(k);
    const double w = dispersion(tk, J, U);
    const std::vector<double> v = group_velocity_at(k, tk, w, J, U);
    double p = 0.0;
    for (int a = 0; a < d; ++a) p += v[a] * u[a];
    return p;
  };

  // Coarse scan of the zone, then shrinking local grids around the maximum.
  const int coarse = 33;
  std::vector<double> best_k(d, 0.0);
  double best = -1e300;
  {
    std::vector<int> m(d, 0);
    const long total = static_cast<long>(std::pow(static_cast<double>(coarse), d));
    for (long i = 0; i < total; ++i) {
      std::vector<double> k(d);
      for (int a = 0; a < d; ++a) k[a] = 2.0 * std::numbers::pi * m[a] / coarse;
      const double p = projected(k);
      if (p > best) {
        best = p;
        best_k = k;
      }
      for (int a = d - 1; a >= 0; --a) {
        if (++m[a] < coarse) break;
        m[a] = 0;
      }
    }
  }

  double h = 2.0 * std::numbers::pi / coarse;
  const int local = 7;  // points per axis in the refinement box, -3..+3
  for (int iter = 0; iter < 200; ++iter) {
    double round_best = best;
    std::vector<double> round_k = best_k;
    std::vector<int> m(d, -local / 2);
    const long total = static_cast<long>(std::pow(static_cast<double>(local), d));
    for (long i = 0; i < total; ++i) {
      std::vector<double> k(d);
      for (int a = 0; a < d; ++a) k[a] = best_k[a] + m[a] * h / (local / 2);
      const double p = projected(k);
      if (p > round_best) {
        round_best = p;
        round_k = k;
      }
      for (int a = d - 1; a >= 0; --a) {
        if (++m[a] < local / 2 + 1) break;
        m[a] = -local / 2;
      }
    }
    const double gain = round_best - best;
    best = round_best;
    best_k = round_k;
    h *= 0.5;
    if (gain < 1e-4 * J && iter > 3 && h < 1e-7) break;
  }
  return best;
}

}  // namespace bhq
