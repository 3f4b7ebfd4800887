#include "bhq/dynamics.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "bhq/observables.hpp"

namespace bhq {

namespace {

void resize_like(StateDerivative& d, const SystemState& s) {
  d.dp.assign(s.onsite.p.size(), 0.0);
  d.df.assign(s.pairs.f.size(), complexd(0.0, 0.0));
}

}  // namespace

Evolver::Evolver(const Lattice& lattice, HamiltonianParams params)
    : lattice_(lattice), params_(params) {
  if (params_.U <= 0) throw std::invalid_argument("U must be positive");
  if (params_.J < 0) throw std::invalid_argument("J must be non-negative");

  const int z = lattice_.coordination();
  const int nslots = lattice_.num_sites();
  ti_from_second_.assign(static_cast<std::size_t>(nslots) * z, -1);
  ti_from_first_.assign(static_cast<std::size_t>(nslots) * z, -1);
  const int zero = lattice_.zero_displacement_index();
  for (int s = 0; s < nslots; ++s) {
    if (s == zero) continue;
    const std::vector<int> disp = lattice_.displacement_from_index(s);
    for (int j = 0; j < z; ++j) {
      const auto& delta = lattice_.neighbor_displacements()[j];
      std::vector<int> a(disp.size()), b(disp.size());
      for (std::size_t i = 0; i < disp.size(); ++i) {
        a[i] = delta[i] - disp[i];  // step from the second site to mu3
        b[i] = disp[i] + delta[i];  // step from the first site to mu3
      }
      const int ia = lattice_.displacement_index(lattice_.canonicalize(a));
      const int ib = lattice_.displacement_index(lattice_.canonicalize(b));
      ti_from_second_[static_cast<std::size_t>(s) * z + j] = ia == zero ? -1 : ia;
      ti_from_first_[static_cast<std::size_t>(s) * z + j] = ib == zero ? -1 : ib;
    }
  }
}

void Evolver::ensure_shapes(const SystemState& state) const {
  const int n = lattice_.num_sites();
  const int expect_rows =
      state.pairs.layout == PairLayout::TranslationInvariant ? 1 : n;
  const int expect_blocks =
      state.pairs.layout == PairLayout::TranslationInvariant ? n : n * n;
  if (state.onsite.sites_stored != expect_rows || state.pairs.num_blocks != expect_blocks ||
      state.onsite.n_max != state.pairs.n_max ||
      state.onsite.p.size() !=
          static_cast<std::size_t>(expect_rows) * (state.onsite.n_max + 1) ||
      state.pairs.f.size() !=
          static_cast<std::size_t>(expect_blocks) * state.pairs.block_values())
    throw std::invalid_argument("state shape does not match lattice/layout");
}

void Evolver::compute_psi(const PairCorrelations& pairs) const {
  const int nm = pairs.n_max;
  if (psi_nmax_ != nm || psi_.size() != static_cast<std::size_t>(pairs.num_blocks) * nm) {
    psi_.assign(static_cast<std::size_t>(pairs.num_blocks) * nm, complexd(0.0, 0.0));
    psi_nmax_ = nm;
  }
  if (static_cast<int>(sq_.size()) < nm + 1) {
    sq_.resize(nm + 1);
    for (int a = 0; a <= nm; ++a) sq_[a] = std::sqrt(a + 1.0);
  }
  const int n_lattice = lattice_.num_sites();
  const int zero = lattice_.zero_displacement_index();
  for (int b = 0; b < pairs.num_blocks; ++b) {
    if (pairs.layout == PairLayout::TranslationInvariant) {
      if (b == zero) continue;
    } else {
      if (b / n_lattice == b % n_lattice) continue;
    }
    const complexd* f = pairs.block(b);
    complexd* psi = psi_.data() + static_cast<std::size_t>(b) * nm;
    for (int a = 0; a < nm; ++a) {
      complexd acc(0.0, 0.0);
      for (int m = 0; m < nm; ++m) acc += sq_[m] * f[a * nm + m];
      psi[a] = acc;
    }
  }
}

void Evolver::rhs_onsite(const SystemState& state, std::span<double> dp) const {
  ensure_shapes(state);
  compute_psi(state.pairs);
  if (dp.size() != state.onsite.p.size())
    throw std::invalid_argument("derivative buffer size mismatch");

  const int nm = state.pairs.n_max;
  const int z = lattice_.coordination();
  const double pref = -2.0 * params_.J / z;
  const bool ti = state.pairs.layout == PairLayout::TranslationInvariant;
  const int n_lattice = lattice_.num_sites();

  for (int row = 0; row < state.onsite.sites_stored; ++row) {
    for (int n = 0; n <= nm; ++n) {
      double acc = 0.0;
      for (int j = 0; j < z; ++j) {
        int block;
        if (ti) {
          block = lattice_.displacement_index(
              lattice_.canonicalize(lattice_.neighbor_displacements()[j]));
        } else {
          block = row * n_lattice + lattice_.neighbors(row)[j];
        }
        const complexd* psi = psi_.data() + static_cast<std::size_t>(block) * nm;
        double v = 0.0;
        if (n >= 1) v += std::sqrt(static_cast<double>(n)) * psi[n - 1].imag();
        if (n < nm) v -= sq_[n] * psi[n].imag();
        acc += v;
      }
      dp[static_cast<std::size_t>(row) * (nm + 1) + n] = pref * acc;
    }
  }
}

void Evolver::rhs_pair(const SystemState& state, std::span<complexd> df) const {
  ensure_shapes(state);
  compute_psi(state.pairs);
  if (df.size() != state.pairs.f.size())
    throw std::invalid_argument("derivative buffer size mismatch");

  const int nm = state.pairs.n_max;
  const int z = lattice_.coordination();
  const double u = params_.U;
  const double jz = params_.J / z;
  const int n_lattice = lattice_.num_sites();
  const complexd minus_i(0.0, -1.0);

  std::vector<complexd> sum_c(nm), sum_d(nm);

  if (state.pairs.layout == PairLayout::TranslationInvariant) {
    const int zero = lattice_.zero_displacement_index();
    const double* p = state.onsite.p.data();
    // adjacency per displacement slot
    std::vector<char> is_nbr(n_lattice, 0);
    for (int j = 0; j < z; ++j)
      is_nbr[lattice_.displacement_index(
          lattice_.canonicalize(lattice_.neighbor_displacements()[j]))] = 1;

    for (int s = 0; s < n_lattice; ++s) {
      if (s == zero) continue;
      const complexd* f = state.pairs.block(s);
      complexd* out = df.data() + static_cast<std::size_t>(s) * nm * nm;

      for (int n2 = 0; n2 < nm; ++n2) {
        complexd acc(0.0, 0.0);
        for (int j = 0; j < z; ++j) {
          const int t = ti_from_second_[static_cast<std::size_t>(s) * z + j];
          if (t >= 0) acc += std::conj(psi_[static_cast<std::size_t>(t) * nm + n2]);
        }
        sum_c[n2] = acc;
      }
      for (int n1 = 0; n1 < nm; ++n1) {
        complexd acc(0.0, 0.0);
        for (int j = 0; j < z; ++j) {
          const int t = ti_from_first_[static_cast<std::size_t>(s) * z + j];
          if (t >= 0) acc += psi_[static_cast<std::size_t>(t) * nm + n1];
        }
        sum_d[n1] = acc;
      }

      for (int n1 = 0; n1 < nm; ++n1) {
        for (int n2 = 0; n2 < nm; ++n2) {
          complexd acc = u * static_cast<double>(n2 - n1) * f[n1 * nm + n2];
          if (is_nbr[s])
            acc -= jz * sq_[n1] * sq_[n2] * (p[n1 + 1] * p[n2] - p[n1] * p[n2 + 1]);
          acc -= jz * sq_[n1] * (p[n1 + 1] - p[n1]) * sum_c[n2];
          acc -= jz * sq_[n2] * (p[n2] - p[n2 + 1]) * sum_d[n1];
          out[n1 * nm + n2] = minus_i * acc;
        }
      }
    }
    return;
  }

  for (int mu1 = 0; mu1 < n_lattice; ++mu1) {
    const double* p1 = state.onsite.row(mu1).data();
    const auto nbr1 = lattice_.neighbors(mu1);
    for (int mu2 = 0; mu2 < n_lattice; ++mu2) {
      if (mu2 == mu1) continue;
      const double* p2 = state.onsite.row(mu2).data();
      const int b = mu1 * n_lattice + mu2;
      const complexd* f = state.pairs.block(b);
      complexd* out = df.data() + static_cast<std::size_t>(b) * nm * nm;
      const bool bond = lattice_.adjacent(mu1, mu2);

      for (int n2 = 0; n2 < nm; ++n2) {
        complexd acc(0.0, 0.0);
        for (int mu3 : nbr1) {
          if (mu3 == mu2) continue;
          acc += std::conj(psi_[static_cast<std::size_t>(mu2 * n_lattice + mu3) * nm + n2]);
        }
        sum_c[n2] = acc;
      }
      for (int n1 = 0; n1 < nm; ++n1) {
        complexd acc(0.0, 0.0);
        for (int mu3 : lattice_.neighbors(mu2)) {
          if (mu3 == mu1) continue;
          acc += psi_[static_cast<std::size_t>(mu1 * n_lattice + mu3) * nm + n1];
        }
        sum_d[n1] = acc;
      }

      for (int n1 = 0; n1 < nm; ++n1) {
        for (int n2 = 0; n2 < nm; ++n2) {
          complexd acc = u * static_cast<double>(n2 - n1) * f[n1 * nm + n2];
          if (bond)
            acc -= jz * sq_[n1] * sq_[n2] * (p1[n1 + 1] * p2[n2] - p1[n1] * p2[n2 + 1]);
          acc -= jz * sq_[n1] * (p1[n1 + 1] - p1[n1]) * sum_c[n2];
          acc -= jz * sq_[n2] * (p2[n2] - p2[n2 + 1]) * sum_d[n1];
          out[n1 * nm + n2] = minus_i * acc;
        }
      }
    }
  }
}

void Evolver::rhs(const SystemState& state, StateDerivative& out) const {
  out.dp.resize(state.onsite.p.size());
  out.df.resize(state.pairs.f.size());
  // rhs_pair runs first so rhs_onsite reuses the freshly computed psi table;
  // both entry points stay independently callable.
  rhs_pair(state, out.df);
  rhs_onsite(state, out.dp);
}

void Evolver::check_finite(const SystemState& state) const {
  double max_f = 0.0;
  bool bad = false;
  for (double v : state.onsite.p)
    if (!std::isfinite(v)) bad = true;
  for (const complexd& v : state.pairs.f) {
    const double a = std::abs(v);
    if (!std::isfinite(a))
      bad = true;
    else if (a > max_f)
      max_f = a;
  }
  if (bad) {
    std::ostringstream msg;
    msg << "non-finite state entry at t*U = " << state.time * params_.U
        << " (largest finite |f| = " << max_f << ")";
    throw std::runtime_error(msg.str());
  }
}

void Evolver::step_rk4(SystemState& state, double dt) {
  ensure_shapes(state);
  resize_like(k1_, state);
  resize_like(k2_, state);
  resize_like(k3_, state);
  resize_like(k4_, state);

  auto stage = [&](const StateDerivative& k, double a) {
    stage_.time = state.time + a;
    stage_.onsite = state.onsite;
    stage_.pairs = state.pairs;
    for (std::size_t i = 0; i < stage_.onsite.p.size(); ++i)
      stage_.onsite.p[i] += a * k.dp[i];
    for (std::size_t i = 0; i < stage_.pairs.f.size(); ++i) stage_.pairs.f[i] += a * k.df[i];
  };

  rhs(state, k1_);
  stage(k1_, 0.5 * dt);
  rhs(stage_, k2_);
  stage(k2_, 0.5 * dt);
  rhs(stage_, k3_);
  stage(k3_, dt);
  rhs(stage_, k4_);

  const double w = dt / 6.0;
  for (std::size_t i = 0; i < state.onsite.p.size(); ++i)
    state.onsite.p[i] += w * (k1_.dp[i] + 2.0 * k2_.dp[i] + 2.0 * k3_.dp[i] + k4_.dp[i]);
  for (std::size_t i = 0; i < state.pairs.f.size(); ++i)
    state.pairs.f[i] += w * (k1_.df[i] + 2.0 * k2_.df[i] + 2.0 * k3_.df[i] + k4_.df[i]);
  state.time += dt;
  check_finite(state);
}

EvolveSummary Evolver::evolve(SystemState& state, const IntegratorConfig& config,
                              const std::function<void(const SystemState&)>& sampler) {
  ensure_shapes(state);
  if (config.dt <= 0) throw std::invalid_argument("dt must be positive");
  if (config.t_final < 0) throw std::invalid_argument("t_final must be non-negative");
  if (config.sample_stride < 1) throw std::invalid_argument("sample_stride must be >= 1");
  if (config.dt * params_.U > config.max_dt_times_u * (1.0 + 1e-12)) {
    std::ostringstream msg;
    msg << "dt*U = " << config.dt * params_.U << " violates the stability bound dt*U <= "
        << config.max_dt_times_u;
    throw std::invalid_argument(msg.str());
  }

  const long nsteps = std::llround(config.t_final / config.dt);

  EvolveSummary summary;
  summary.initial_number = total_number(state, lattice_);
  summary.initial_energy = energy(state, lattice_, params_);
  summary.min_probability = 1.0;
  double max_abs_energy_drift = 0.0;

  auto monitor = [&](const SystemState& s) {
    summary.max_trace_deviation = std::max(summary.max_trace_deviation, trace_deviation(s));
    const double n_now = total_number(s, lattice_);
    summary.max_number_drift =
        std::max(summary.max_number_drift, std::abs(n_now - summary.initial_number) /
                                               std::max(std::abs(summary.initial_number), 1e-30));
    const EnergyParts parts = energy_parts(s, lattice_, params_);
    summary.energy_scale =
        std::max(summary.energy_scale, std::abs(parts.kinetic) + std::abs(parts.interaction));
    max_abs_energy_drift =
        std::max(max_abs_energy_drift, std::abs(parts.total() - summary.initial_energy));
    const double mp = min_probability(s);
    if (mp < summary.min_probability) {
      if (mp < -1e-12 && summary.min_probability >= -1e-12)
        summary.positivity_warnings.push_back({s.time, mp});
      summary.min_probability = mp;
    }
    if (sampler) sampler(s);
  };

  monitor(state);
  for (long i = 1; i <= nsteps; ++i) {
    step_rk4(state, config.dt);
    if (i % config.sample_stride == 0 || i == nsteps) monitor(state);
  }
  summary.steps = nsteps;
  summary.max_energy_drift = max_abs_energy_drift / std::max(summary.energy_scale, 1e-30);
  return summary;
}

}  // namespace bhq
