#include "bhq/io/run.hpp"

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdint>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

#include "bhq/analytic.hpp"
#include "bhq/dynamics.hpp"
#include "bhq/ed/dense.hpp"
#include "bhq/ed/fock_basis.hpp"
#include "bhq/ed/hamiltonian.hpp"
#include "bhq/ed/krylov.hpp"
#include "bhq/ed/measure.hpp"
#include "bhq/io/compare.hpp"
#include "bhq/io/csv.hpp"
#include "bhq/observables.hpp"
#include "bhq/snapshot.hpp"

namespace bhq::io {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string utc_now() {
  const std::time_t now = std::time(nullptr);
  std::tm tm = {};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string artifact_path(const RunConfig& cfg, const char* name) {
  return (std::filesystem::path(cfg.output_dir) / name).string();
}

// Sample grid of Evolver::evolve: t = 0, every sample_stride-th step, and the
// final step.
std::vector<double> sample_times(double dt, double t_final, int stride) {
  const long nsteps = std::llround(t_final / dt);
  std::vector<double> times{0.0};
  for (long i = 1; i <= nsteps; ++i)
    if (i % stride == 0 || i == nsteps) times.push_back(static_cast<double>(i) * dt);
  return times;
}

// Canonical non-zero displacements in index order; the obdm row schema.
std::vector<int> obdm_displacement_indices(const Lattice& lattice) {
  std::vector<int> indices;
  indices.reserve(lattice.num_sites() - 1);
  for (int idx = 0; idx < lattice.num_sites(); ++idx)
    if (idx != lattice.zero_displacement_index()) indices.push_back(idx);
  return indices;
}

complexd obdm_at_displacement(const SystemState& state, const Lattice& lattice, int disp_index) {
  if (state.pairs.layout == PairLayout::TranslationInvariant)
    return obdm_displacement(state, lattice, disp_index);
  const std::vector<int> disp = lattice.displacement_from_index(disp_index);
  return obdm(state, lattice, 0, lattice.translate(0, disp));
}

void record_evolve_summary(const EvolveSummary& summary, double u, ordered_json& solver,
                           std::vector<std::string>& warnings) {
  solver["steps"] = summary.steps;
  solver["max_trace_deviation"] = summary.max_trace_deviation;
  solver["max_number_drift"] = summary.max_number_drift;
  solver["max_energy_drift"] = summary.max_energy_drift;
  solver["min_probability"] = summary.min_probability;
  solver["positivity_events"] = summary.positivity_warnings.size();
  if (!summary.positivity_warnings.empty()) {
    const PositivityEvent& first = summary.positivity_warnings.front();
    solver["first_positivity_event_t"] = first.time * u;
    std::ostringstream msg;
    msg << "on-site probabilities dipped below zero (min " << summary.min_probability
        << ", first at tU = " << first.time * u
        << "); the truncation monitors positivity but does not enforce it";
    warnings.push_back(msg.str());
  }
}

struct EdSetup {
  ed::FockBasis basis;
  ed::SparseHamiltonian h;
  std::vector<complexd> psi0;
  int cutoff = 0;
  bool dense = false;
};

EdSetup make_ed_setup(const RunConfig& cfg, const Lattice& lattice) {
  const int num_sites = lattice.num_sites();
  const std::int64_t particles64 =
      static_cast<std::int64_t>(cfg.filling) * static_cast<std::int64_t>(num_sites);
  if (particles64 > ed::FockBasis::kMaxOccupation)
    throw std::runtime_error("ed: particle number exceeds what the packed basis can hold");
  const int num_particles = static_cast<int>(particles64);
  int cutoff = cfg.ed.cutoff == 0 ? num_particles
                                  : static_cast<int>(std::min<std::int64_t>(
                                        cfg.ed.cutoff, num_particles));
  ed::FockBasis basis(num_sites, num_particles, cutoff);
  ed::SparseHamiltonian h =
      ed::build_hamiltonian(basis, lattice, HamiltonianParams{cfg.hopping(), cfg.U});

  std::vector<std::uint8_t> occ(static_cast<std::size_t>(num_sites),
                                static_cast<std::uint8_t>(cfg.filling));
  const std::int64_t start = basis.index_of(occ);
  if (start < 0) throw std::runtime_error("ed: uniform product state missing from the basis");
  std::vector<complexd> psi0(static_cast<std::size_t>(basis.dimension()), complexd(0, 0));
  psi0[static_cast<std::size_t>(start)] = complexd(1, 0);

  EdSetup setup{std::move(basis), std::move(h), std::move(psi0), cutoff, false};
  setup.dense = setup.basis.dimension() <= cfg.ed.dense_budget;
  return setup;
}

// Evaluates psi on each physical sample time, either exactly from the dense
// spectrum or by stepping the Krylov propagator between samples.
void for_each_ed_sample(const RunConfig& cfg, EdSetup& setup,
                        const std::vector<double>& times_physical,
                        const std::function<void(double, const std::vector<complexd>&)>& visit) {
  if (setup.dense) {
    ed::DenseSolver solver(setup.h, cfg.ed.dense_budget);
    for (double t : times_physical) visit(t, solver.evolve(setup.psi0, t));
    return;
  }
  ed::KrylovOptions options;
  options.m = cfg.ed.krylov_m;
  std::vector<complexd> psi = setup.psi0;
  double t_prev = 0.0;
  for (double t : times_physical) {
    if (t > t_prev) ed::evolve_krylov(setup.h, psi, t - t_prev, options);
    t_prev = t;
    visit(t, psi);
  }
}

struct EdProbeSites {
  int obdm_a = 0, obdm_b = 0;       // nearest neighbors along axis 0
  int tp1 = 0, tp2 = 0, tp3 = 0;    // consecutive along axis 0
};

EdProbeSites ed_probe_sites(const Lattice& lattice) {
  EdProbeSites sites;
  std::vector<int> step(static_cast<std::size_t>(lattice.dimension()), 0);
  step[0] = 1;
  sites.obdm_a = 0;
  sites.obdm_b = lattice.translate(0, step);
  sites.tp1 = 0;
  sites.tp2 = sites.obdm_b;
  step[0] = 2;
  sites.tp3 = lattice.translate(0, step);
  return sites;
}

void run_simulate(const RunConfig& cfg, const Lattice& lattice, ordered_json& solver,
                  std::vector<std::string>& outputs, std::vector<std::string>& warnings) {
  const HamiltonianParams params{cfg.hopping(), cfg.U};
  SystemState state;
  if (cfg.snapshot.load.empty()) {
    state = initial_mott(lattice, cfg.n_max, cfg.filling, cfg.layout);
  } else {
    state = load_snapshot(cfg.snapshot.load, lattice);
    if (state.onsite.n_max != cfg.n_max)
      throw std::runtime_error("snapshot n_max does not match the configured n_max");
    if (state.pairs.layout != cfg.layout)
      throw std::runtime_error("snapshot pair layout does not match the configured layout");
    solver["resumed_from"] = cfg.snapshot.load;
    solver["resumed_at_t"] = state.time * cfg.U;
  }

  const bool ti = cfg.layout == PairLayout::TranslationInvariant;
  CsvWriter onsite_csv(artifact_path(cfg, "onsite.csv"), {"t", "site", "n", "p"});
  std::vector<std::string> obdm_header{"t"};
  for (int d = 0; d < lattice.dimension(); ++d) obdm_header.push_back("s" + std::to_string(d));
  obdm_header.push_back("re");
  obdm_header.push_back("im");
  CsvWriter obdm_csv(artifact_path(cfg, "obdm.csv"), obdm_header);
  CsvWriter conservation_csv(artifact_path(cfg, "conservation.csv"),
                             {"t", "trace_dev", "total_number", "energy", "min_p"});
  const std::vector<int> displacements = obdm_displacement_indices(lattice);

  Evolver evolver(lattice, params);
  IntegratorConfig integ{cfg.dt, cfg.t_final, cfg.sample_stride};
  const EvolveSummary summary = evolver.evolve(state, integ, [&](const SystemState& s) {
    const double t_out = s.time * cfg.U;
    const int rows = ti ? 1 : lattice.num_sites();
    for (int site = 0; site < rows; ++site)
      for (int n = 0; n <= s.onsite.n_max; ++n) {
        onsite_csv.field(t_out);
        if (ti)
          onsite_csv.field(std::string_view("TI"));
        else
          onsite_csv.field(site);
        onsite_csv.field(n);
        onsite_csv.field(s.onsite.at(site, n));
        onsite_csv.end_row();
      }
    for (int idx : displacements) {
      const complexd value = obdm_at_displacement(s, lattice, idx);
      obdm_csv.field(t_out);
      for (int component : lattice.displacement_from_index(idx)) obdm_csv.field(component);
      obdm_csv.field(value.real());
      obdm_csv.field(value.imag());
      obdm_csv.end_row();
    }
    conservation_csv.row(t_out, trace_deviation(s), total_number(s, lattice),
                         energy(s, lattice, params) / cfg.U, min_probability(s));
  });
  onsite_csv.close();
  obdm_csv.close();
  conservation_csv.close();
  outputs.insert(outputs.end(), {"onsite.csv", "obdm.csv", "conservation.csv"});
  record_evolve_summary(summary, cfg.U, solver, warnings);

  if (!cfg.snapshot.save.empty()) {
    save_snapshot(cfg.snapshot.save, lattice, state);
    solver["saved_snapshot"] = cfg.snapshot.save;
  }
}

void run_analytic(const RunConfig& cfg, const Lattice& lattice, ordered_json& solver,
                  std::vector<std::string>& outputs) {
  const double j = cfg.hopping();
  CsvWriter analytic_csv(artifact_path(cfg, "analytic.csv"), {"t", "p0"});
  for (double t : sample_times(cfg.dt, cfg.t_final, cfg.sample_stride))
    analytic_csv.row(t * cfg.U, p0_first_order(lattice, j, cfg.U, t));
  analytic_csv.close();
  outputs.push_back("analytic.csv");

  solver["group_velocity_max_axis"] =
      group_velocity_max(lattice, j, cfg.U, LatticeDirection::Axis) / cfg.U;
  if (lattice.dimension() >= 2)
    solver["group_velocity_max_diagonal"] =
        group_velocity_max(lattice, j, cfg.U, LatticeDirection::Diagonal) / cfg.U;
}

void run_ed(const RunConfig& cfg, const Lattice& lattice, ordered_json& solver,
            std::vector<std::string>& outputs) {
  EdSetup setup = make_ed_setup(cfg, lattice);
  solver["basis_dimension"] = setup.basis.dimension();
  solver["cutoff"] = setup.cutoff;
  solver["propagator"] = setup.dense ? "dense" : "krylov";
  if (!setup.dense) solver["krylov_m"] = cfg.ed.krylov_m;
  const EdProbeSites sites = ed_probe_sites(lattice);

  CsvWriter ed_csv(artifact_path(cfg, "ed.csv"),
                   {"t", "p0", "p1", "p2", "p3", "obdm_re", "obdm_im", "threept_hop_re",
                    "threept_hop_im", "threept_density_re", "threept_density_im"});
  for_each_ed_sample(cfg, setup, sample_times(cfg.dt, cfg.t_final, cfg.sample_stride),
                     [&](double t, const std::vector<complexd>& psi) {
                       double p[4] = {0, 0, 0, 0};
                       for (int n = 0; n <= 3 && n <= setup.cutoff; ++n)
                         p[n] = ed::occupation_probability(setup.basis, psi, 0, n);
                       const complexd ob =
                           ed::one_body(setup.basis, psi, sites.obdm_a, sites.obdm_b);
                       const complexd hop = ed::three_point_hop(setup.basis, psi, sites.tp1,
                                                                sites.tp2, sites.tp3);
                       const complexd dens = ed::three_point_density_corr(
                           setup.basis, psi, sites.tp1, sites.tp2, sites.tp3);
                       ed_csv.row(t * cfg.U, p[0], p[1], p[2], p[3], ob.real(), ob.imag(),
                                  hop.real(), hop.imag(), dens.real(), dens.imag());
                     });
  ed_csv.close();
  outputs.push_back("ed.csv");
}

void run_compare(const RunConfig& cfg, const Lattice& lattice, ordered_json& solver,
                 std::vector<std::string>& outputs, std::vector<std::string>& warnings) {
  const HamiltonianParams params{cfg.hopping(), cfg.U};
  const bool ti = cfg.layout == PairLayout::TranslationInvariant;
  const EdProbeSites sites = ed_probe_sites(lattice);
  const int nn_disp = [&] {
    std::vector<int> step(static_cast<std::size_t>(lattice.dimension()), 0);
    step[0] = 1;
    return lattice.displacement_index(lattice.canonicalize(step));
  }();

  TimeSeries p0_truncated;
  TimeSeries obdm_truncated;
  SystemState state = initial_mott(lattice, cfg.n_max, cfg.filling, cfg.layout);
  Evolver evolver(lattice, params);
  IntegratorConfig integ{cfg.dt, cfg.t_final, cfg.sample_stride};
  const EvolveSummary summary = evolver.evolve(state, integ, [&](const SystemState& s) {
    const double t_out = s.time * cfg.U;
    p0_truncated.t.push_back(t_out);
    p0_truncated.y.push_back(s.onsite.at(0, 0));
    const complexd ob = ti ? obdm_displacement(s, lattice, nn_disp)
                           : obdm(s, lattice, sites.obdm_a, sites.obdm_b);
    obdm_truncated.t.push_back(t_out);
    obdm_truncated.y.push_back(std::abs(ob));
  });
  record_evolve_summary(summary, cfg.U, solver, warnings);

  std::vector<double> times_physical;
  times_physical.reserve(p0_truncated.t.size());
  for (double t_out : p0_truncated.t) times_physical.push_back(t_out / cfg.U);

  TimeSeries p0_reference;
  TimeSeries obdm_reference;
  const bool against_ed = cfg.compare_reference == "ed";
  if (against_ed) {
    EdSetup setup = make_ed_setup(cfg, lattice);
    solver["basis_dimension"] = setup.basis.dimension();
    solver["propagator"] = setup.dense ? "dense" : "krylov";
    for_each_ed_sample(cfg, setup, times_physical,
                       [&](double t, const std::vector<complexd>& psi) {
                         p0_reference.t.push_back(t * cfg.U);
                         p0_reference.y.push_back(
                             ed::occupation_probability(setup.basis, psi, 0, 0));
                         obdm_reference.t.push_back(t * cfg.U);
                         obdm_reference.y.push_back(std::abs(
                             ed::one_body(setup.basis, psi, sites.obdm_a, sites.obdm_b)));
                       });
  } else {
    for (double t : times_physical) {
      p0_reference.t.push_back(t * cfg.U);
      p0_reference.y.push_back(p0_first_order(lattice, cfg.hopping(), cfg.U, t));
    }
  }
  solver["reference"] = cfg.compare_reference;

  CsvWriter compare_csv(artifact_path(cfg, "compare.csv"),
                        {"t", "observable", "value_a", "value_b", "abs_diff"});
  for (std::size_t i = 0; i < p0_truncated.t.size(); ++i) {
    compare_csv.row(p0_truncated.t[i], std::string_view("p0"), p0_truncated.y[i],
                    p0_reference.y[i], std::abs(p0_truncated.y[i] - p0_reference.y[i]));
    if (against_ed)
      compare_csv.row(obdm_truncated.t[i], std::string_view("obdm_nn_abs"),
                      obdm_truncated.y[i], obdm_reference.y[i],
                      std::abs(obdm_truncated.y[i] - obdm_reference.y[i]));
  }
  compare_csv.close();
  outputs.push_back("compare.csv");

  CsvWriter summary_csv(
      artifact_path(cfg, "compare_summary.csv"),
      {"observable", "max_abs_diff", "max_rel_diff", "rms_diff", "resampled"});
  auto emit = [&](const char* name, const TimeSeries& a, const TimeSeries& b) {
    const SeriesMetrics m = compare_series(a, b);
    summary_csv.row(std::string_view(name), m.max_abs, m.max_rel, m.rms,
                    m.resampled ? 1 : 0);
    ordered_json entry;
    entry["max_abs_diff"] = m.max_abs;
    entry["max_rel_diff"] = m.max_rel;
    entry["rms_diff"] = m.rms;
    solver["metrics"][name] = entry;
  };
  emit("p0", p0_truncated, p0_reference);
  if (against_ed) emit("obdm_nn_abs", obdm_truncated, obdm_reference);
  summary_csv.close();
  outputs.push_back("compare_summary.csv");
}

void run_front(const RunConfig& cfg, const Lattice& lattice, ordered_json& solver,
               std::vector<std::string>& outputs, std::vector<std::string>& warnings) {
  const HamiltonianParams params{cfg.hopping(), cfg.U};
  const bool diagonal = cfg.front.direction == FrontDirection::Diagonal;
  const double scale = diagonal ? std::sqrt(static_cast<double>(lattice.dimension())) : 1.0;

  int extent = lattice.size(0);
  if (diagonal)
    for (int d = 1; d < lattice.dimension(); ++d) extent = std::min(extent, lattice.size(d));
  const int max_steps = extent / 2;
  if (max_steps < 3)
    throw std::runtime_error("front: lattice too small to resolve a front along this direction");

  std::vector<int> disp_indices;
  std::vector<double> separations;  // in index steps; scaled inside front_arrival
  for (int k = 1; k <= max_steps; ++k) {
    std::vector<int> step(static_cast<std::size_t>(lattice.dimension()), 0);
    step[0] = k;
    if (diagonal)
      for (int d = 1; d < lattice.dimension(); ++d) step[d] = k;
    disp_indices.push_back(lattice.displacement_index(lattice.canonicalize(step)));
    separations.push_back(static_cast<double>(k));
  }

  std::vector<double> times;
  std::vector<std::vector<double>> signal;  // [time][separation]
  SystemState state = initial_mott(lattice, cfg.n_max, cfg.filling, cfg.layout);
  Evolver evolver(lattice, params);
  IntegratorConfig integ{cfg.dt, cfg.t_final, cfg.sample_stride};
  const EvolveSummary summary = evolver.evolve(state, integ, [&](const SystemState& s) {
    times.push_back(s.time * cfg.U);
    std::vector<double> row;
    row.reserve(disp_indices.size());
    for (int idx : disp_indices)
      row.push_back(std::abs(obdm_at_displacement(s, lattice, idx)));
    signal.push_back(std::move(row));
  });
  record_evolve_summary(summary, cfg.U, solver, warnings);

  // Arrival fits stop short of the wrap-around echo.
  const double max_separation = (static_cast<double>(max_steps) - 2.0) * scale;
  const double thetas[3] = {cfg.front.theta / 2, cfg.front.theta, cfg.front.theta * 2};
  CsvWriter fit_csv(artifact_path(cfg, "front_fit.csv"),
                    {"theta", "velocity", "intercept", "residual_rms", "points"});
  FrontFit base;
  for (double theta : thetas) {
    const FrontFit fit =
        front_arrival(times, separations, signal, theta, max_separation, scale);
    fit_csv.row(theta, fit.velocity, fit.intercept, fit.residual_rms,
                static_cast<long long>(fit.separations.size()));
    if (theta == cfg.front.theta) base = fit;
  }
  fit_csv.close();
  outputs.push_back("front_fit.csv");

  CsvWriter front_csv(artifact_path(cfg, "front.csv"), {"s_index", "s_euclid", "t_arrival"});
  for (std::size_t i = 0; i < base.separations.size(); ++i)
    front_csv.row(static_cast<long long>(std::llround(base.separations[i] / scale)),
                  base.separations[i], base.arrivals[i]);
  front_csv.close();
  outputs.push_back("front.csv");

  solver["direction"] = diagonal ? "diagonal" : "axis";
  solver["theta"] = cfg.front.theta;
  solver["velocity"] = base.velocity;
  solver["intercept"] = base.intercept;
  solver["analytic_group_velocity_max"] =
      group_velocity_max(lattice, cfg.hopping(), cfg.U,
                         diagonal ? LatticeDirection::Diagonal : LatticeDirection::Axis) /
      cfg.U;
}

}  // namespace

void run(const RunConfig& cfg) {
  std::filesystem::create_directories(cfg.output_dir);

  ordered_json manifest;
  manifest["artifact"] = "bhquench";
  manifest["code_version"] = kCodeVersion;
  manifest["mode"] = mode_name(cfg.mode);
  manifest["started_utc"] = utc_now();
  manifest["config"] = ordered_json::parse(serialize_config(cfg));

  ordered_json solver = ordered_json::object();
  std::vector<std::string> outputs;
  std::vector<std::string> warnings = cfg.warnings;
  const auto t0 = std::chrono::steady_clock::now();

  auto finalize = [&](const char* error) {
    const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - t0;
    manifest["wall_time_seconds"] = elapsed.count();
    manifest["solver"] = solver;
    manifest["outputs"] = outputs;
    manifest["warnings"] = warnings;
    if (error != nullptr) manifest["error"] = error;
    std::ofstream out(artifact_path(cfg, "run_manifest.json"), std::ios::trunc);
    out << manifest.dump(2) << "\n";
  };

  try {
    const Lattice lattice(cfg.lattice);
    switch (cfg.mode) {
      case RunMode::Simulate: run_simulate(cfg, lattice, solver, outputs, warnings); break;
      case RunMode::Analytic: run_analytic(cfg, lattice, solver, outputs); break;
      case RunMode::Ed: run_ed(cfg, lattice, solver, outputs); break;
      case RunMode::Compare: run_compare(cfg, lattice, solver, outputs, warnings); break;
      case RunMode::Front: run_front(cfg, lattice, solver, outputs, warnings); break;
    }
  } catch (const std::exception& e) {
    finalize(e.what());
    throw;
  }
  finalize(nullptr);
}

}  // namespace bhq::io
