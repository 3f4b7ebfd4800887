#include "bhq/observables.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace bhq {

namespace {

int onsite_row(const SystemState& state, int site) {
  return state.onsite.sites_stored == 1 ? 0 : site;
}

complexd obdm_block(const PairCorrelations& pairs, int block) {
  const int nm = pairs.n_max;
  complexd acc(0.0, 0.0);
  for (int n = 0; n < nm; ++n) acc += std::sqrt(n + 1.0) * psi_contract_block(pairs, block, n);
  return acc;
}

}  // namespace

double site_density(const SystemState& state, int site) {
  const int row = onsite_row(state, site);
  double d = 0.0;
  for (int n = 0; n <= state.onsite.n_max; ++n) d += n * state.onsite.at(row, n);
  return d;
}

complexd obdm(const SystemState& state, const Lattice& lattice, int mu1, int mu2) {
  if (mu1 == mu2)
    throw std::invalid_argument("one-body coherence needs distinct sites; use site_density");
  return obdm_block(state.pairs, pair_block_index(lattice, state.pairs, mu1, mu2));
}

complexd obdm_displacement(const SystemState& state, const Lattice& lattice,
                           int displacement_index) {
  if (state.pairs.layout != PairLayout::TranslationInvariant)
    throw std::invalid_argument("displacement-indexed coherence needs the TI layout");
  if (displacement_index == lattice.zero_displacement_index())
    throw std::invalid_argument("zero displacement carries no pair block");
  return obdm_block(state.pairs, displacement_index);
}

double total_number(const SystemState& state, const Lattice& lattice) {
  if (state.onsite.sites_stored == 1) return lattice.num_sites() * site_density(state, 0);
  double total = 0.0;
  for (int s = 0; s < state.onsite.sites_stored; ++s) total += site_density(state, s);
  return total;
}

double number_variance_onsite(const SystemState& state, const Lattice& lattice) {
  auto row_var = [&](int row) {
    double m1 = 0.0, m2 = 0.0;
    for (int n = 0; n <= state.onsite.n_max; ++n) {
      m1 += n * state.onsite.at(row, n);
      m2 += static_cast<double>(n) * n * state.onsite.at(row, n);
    }
    return m2 - m1 * m1;
  };
  if (state.onsite.sites_stored == 1) return lattice.num_sites() * row_var(0);
  double total = 0.0;
  for (int s = 0; s < state.onsite.sites_stored; ++s) total += row_var(s);
  return total;
}

EnergyParts energy_parts(const SystemState& state, const Lattice& lattice,
                         const HamiltonianParams& params) {
  const int z = lattice.coordination();
  EnergyParts parts;

  complexd hop(0.0, 0.0);
  if (state.pairs.layout == PairLayout::TranslationInvariant) {
    complexd per_site(0.0, 0.0);
    for (const auto& delta : lattice.neighbor_displacements())
      per_site += obdm_block(state.pairs,
                             lattice.displacement_index(lattice.canonicalize(delta)));
    hop = static_cast<double>(lattice.num_sites()) * per_site;
  } else {
    const int n = lattice.num_sites();
    for (int mu1 = 0; mu1 < n; ++mu1)
      for (int mu2 : lattice.neighbors(mu1))
        hop += obdm_block(state.pairs, mu1 * n + mu2);
  }
  parts.kinetic = -(params.J / z) * hop.real();

  double inter = 0.0;
  for (int row = 0; row < state.onsite.sites_stored; ++row)
    for (int n = 2; n <= state.onsite.n_max; ++n)
      inter += static_cast<double>(n) * (n - 1) * state.onsite.at(row, n);
  if (state.onsite.sites_stored == 1) inter *= lattice.num_sites();
  parts.interaction = 0.5 * params.U * inter;
  return parts;
}

double energy(const SystemState& state, const Lattice& lattice, const HamiltonianParams& params) {
  return energy_parts(state, lattice, params).total();
}

double trace_deviation(const SystemState& state) {
  double dev = 0.0;
  for (int row = 0; row < state.onsite.sites_stored; ++row) {
    double sum = 0.0;
    for (int n = 0; n <= state.onsite.n_max; ++n) sum += state.onsite.at(row, n);
    dev = std::max(dev, std::abs(sum - 1.0));
  }
  return dev;
}

double min_probability(const SystemState& state) {
  double mn = 1.0;
  for (double v : state.onsite.p) mn = std::min(mn, v);
  return mn;
}

FrontFit front_arrival(const std::vector<double>& times, const std::vector<double>& separations,
                       const std::vector<std::vector<double>>& signal, double threshold,
                       double max_separation, double separation_scale) {
  if (times.size() < 2) throw std::invalid_argument("front fit needs at least two samples");
  if (signal.size() != times.size())
    throw std::invalid_argument("signal rows must match the time grid");
  const double dt = times[1] - times[0];
  for (std::size_t i = 1; i < times.size(); ++i)
    if (std::abs(times[i] - times[i - 1] - dt) > 1e-9 * std::max(1.0, std::abs(dt)))
      throw std::invalid_argument("front fit needs a uniform time grid");
  if (threshold <= 0) throw std::invalid_argument("threshold must be positive");

  FrontFit fit;
  for (std::size_t j = 0; j < separations.size(); ++j) {
    const double s = separations[j] * separation_scale;
    if (s > max_separation) continue;
    for (std::size_t i = 0; i < times.size(); ++i) {
      if (signal[i][j] >= threshold) {
        fit.separations.push_back(s);
        fit.arrivals.push_back(times[i]);
        break;
      }
    }
  }
  if (fit.separations.size() < 3)
    throw std::runtime_error("front not detected: fewer than 3 separations cross the threshold");

  const std::size_t n = fit.separations.size();
  double st = 0, ss = 0, stt = 0, sts = 0;
  for (std::size_t i = 0; i < n; ++i) {
    st += fit.arrivals[i];
    ss += fit.separations[i];
    stt += fit.arrivals[i] * fit.arrivals[i];
    sts += fit.arrivals[i] * fit.separations[i];
  }
  const double denom = n * stt - st * st;
  if (std::abs(denom) < 1e-30)
    throw std::runtime_error("front not detected: degenerate arrival times");
  fit.velocity = (n * sts - st * ss) / denom;
  fit.intercept = (ss - fit.velocity * st) / n;
  double r2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = fit.separations[i] - fit.velocity * fit.arrivals[i] - fit.intercept;
    r2 += r * r;
  }
  fit.residual_rms = std::sqrt(r2 / n);
  if (fit.velocity <= 0) throw std::runtime_error("front not detected: non-positive fit slope");
  return fit;
}

RevivalResult revival_onset(const std::vector<double>& times, const std::vector<double>& p0,
                            double window, double factor) {
  if (times.size() != p0.size() || times.size() < 4)
    throw std::invalid_argument("revival detection needs matching series of at least 4 samples");
  if (window <= 0 || factor <= 1.0)
    throw std::invalid_argument("revival detection needs window > 0 and factor > 1");
  const double dt = times[1] - times[0];
  for (std::size_t i = 1; i < times.size(); ++i)
    if (std::abs(times[i] - times[i - 1] - dt) > 1e-9 * std::max(1.0, std::abs(dt)))
      throw std::invalid_argument("revival detection needs a uniform time grid");

  const long half = std::lround(0.5 * window / dt);
  if (half < 1 || 2 * half + 1 > static_cast<long>(times.size()))
    throw std::invalid_argument("window does not fit the sampled series");

  const long n = static_cast<long>(times.size());
  std::vector<double> amplitude;
  std::vector<long> centers;
  for (long c = half; c + half < n; ++c) {
    double lo = p0[c - half], hi = p0[c - half];
    for (long i = c - half + 1; i <= c + half; ++i) {
      lo = std::min(lo, p0[i]);
      hi = std::max(hi, p0[i]);
    }
    amplitude.push_back(hi - lo);
    centers.push_back(c);
  }

  std::size_t imin = 0;
  for (std::size_t i = 1; i < amplitude.size(); ++i)
    if (amplitude[i] < amplitude[imin]) imin = i;

  RevivalResult res;
  res.plateau_level = amplitude[imin];
  res.plateau_time = times[centers[imin]];
  const double trigger = std::max(factor * res.plateau_level, 1e-15);
  for (std::size_t i = imin + 1; i < amplitude.size(); ++i) {
    if (amplitude[i] > trigger) {
      res.detected = true;
      res.onset = times[centers[i]];
      break;
    }
  }
  return res;
}

}  // namespace bhq
