#pragma once

// Packaged experiments: weak-strong stability, uniqueness smoke tests, and
// convergence to equilibrium. Each produces a DiagnosticsReport and is
// bit-for-bit reproducible from (config, seed).

#include "erds/diagnostics.hpp"

namespace erds {

struct InitialData {
  double u_bar = 1.0;
  double A_u = 0.3;
  std::vector<double> c_bar;  // species means
  std::vector<double> A_c;    // species amplitudes
  std::vector<int> k_c;       // species wavenumbers (cos(2 pi k x))
};

struct Perturbation {
  double eps = 0.05;
  int j0 = 16; // cell window [j0, j1], inclusive
  int j1 = 31;
};

struct ExperimentConfig {
  EntropyModel model;
  MobilitySpec mobility;
  ReactionSpec reactions;
  Grid1D grid;
  double T = 0.5;
  double dt0 = 5e-5;
  int snapshot_stride = 25;
  TruncationParams trunc;
  bool auto_E = true, auto_N = true, auto_iota = true, auto_alpha = true;
  InitialData init;
  Perturbation pert;
  std::uint64_t seed = 0;
};

inline StateField make_initial_data(const ExperimentConfig& cfg) {
  const int n = cfg.model.n();
  if (static_cast<int>(cfg.init.c_bar.size()) != n ||
      static_cast<int>(cfg.init.A_c.size()) != n ||
      static_cast<int>(cfg.init.k_c.size()) != n)
    throw std::invalid_argument("initial data: c_bar/A_c/k_c must have length n");
  StateField s(cfg.grid, n);
  for (int j = 0; j < cfg.grid.cells; ++j) {
    const double x = cfg.grid.x_center(j);
    s.values(j, 0) = cfg.init.u_bar + cfg.init.A_u * std::cos(2.0 * M_PI * x);
    for (int i = 0; i < n; ++i)
      s.values(j, i + 1) =
          cfg.init.c_bar[i] + cfg.init.A_c[i] * std::cos(2.0 * M_PI * cfg.init.k_c[i] * x);
  }
  if (s.values.minCoeff() <= 0.0)
    throw std::invalid_argument("initial data: not strictly positive");
  return s;
}

// Localized smooth bump added to every component on cells [j0, j1].
inline StateField apply_perturbation(const StateField& base, const Perturbation& p,
                                     double eps) {
  if (p.j0 < 0 || p.j1 >= base.grid.cells || p.j0 > p.j1)
    throw std::invalid_argument("perturbation: bad cell window");
  StateField s = base;
  const int width = p.j1 - p.j0 + 1;
  for (int j = p.j0; j <= p.j1; ++j) {
    const double r = (j - p.j0 + 0.5) / width; // in (0,1)
    const double bump = eps * 0.5 * (1.0 - std::cos(2.0 * M_PI * r));
    for (int i = 0; i < static_cast<int>(s.values.cols()); ++i) s.values(j, i) += bump;
  }
  if (s.values.minCoeff() < 0.0)
    throw std::invalid_argument("perturbation: produced negative data");
  return s;
}

// ---------------------------------------------------------------------------
// Truncation auto-tuning. Quantifier order: iota from the reference box,
// then E >= max(2B, coercivity scale), then N until the intermediate-regime
// derivative margin holds, then alpha by the m branch.

inline TruncationParams auto_tune(const ExperimentConfig& cfg, double ref_min,
                                  double ref_max) {
  TruncationParams p = cfg.trunc;
  if (cfg.auto_iota) p.iota = std::min(0.5 * ref_min, 0.5);
  if (cfg.auto_alpha) p.alpha = cfg.mobility.has_zero_m() ? 1.0 : 2.0;

  if (cfg.auto_E) {
    // dominate the l1 norm of every trajectory state: |z|_1 <= (1+n) B <= E/2,
    // so xi* = 1 on the data range and E >= 2B componentwise a fortiori
    p.E = std::max(2.0, 2.0 * (1 + cfg.model.n()) * ref_max);
    std::mt19937_64 rng(cfg.seed ^ 0x9e3779b97f4a7c15ull);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const int d = 1 + cfg.model.n();
    for (int attempt = 0; attempt < 8; ++attempt) {
      p.N = std::max(p.N, 2.0);
      bool ok = true;
      // dist_alpha must be nonnegative and coercive against the entropy tail
      // with margin eps >= 1e-3 for references in [2 iota, B].
      for (int k = 0; k < 2000 && ok; ++k) {
        Vec z(d), zt(d);
        for (int i = 0; i < d; ++i) {
          z[i] = 1e-4 + unit(rng) * 4.0 * p.E;
          zt[i] = 2.0 * p.iota + unit(rng) * (ref_max - 2.0 * p.iota);
        }
        const double dist = dist_alpha_density(z, zt, p, cfg.model);
        if (dist < -1e-12) ok = false;
        if (z.sum() > p.E) { // coercivity against the entropy tail outside A
          double tail = z[0] * z[0] + 1.0;
          for (int i = 1; i < d; ++i) tail += z[i] * std::max(std::log(z[i]), 0.0);
          if (dist < 1e-3 * tail) ok = false;
        }
      }
      if (ok) break;
      p.E *= 2.0;
    }
  }

  if (cfg.auto_N) {
    // |D xi*| |z|_1 = |theta'| / ((N-1) log E) <= max 1.875 / ((N-1) log E);
    // grow N until the cross-term margin drops below 1/4.
    p.N = 2.0;
    while (1.875 / ((p.N - 1.0) * std::log(p.E)) > 0.25 && p.N < 1024.0) p.N *= 2.0;
  }
  p.validate();
  return p;
}

// ---------------------------------------------------------------------------
// Fixed-step trajectory runner used by the experiments; fixed dt keeps the
// reference and perturbed series time-aligned.

inline Trajectory run_fixed(const StateField& init, const ExperimentConfig& cfg,
                            double dt, int stride) {
  SimulateConfig sc;
  sc.T = cfg.T;
  sc.dt0 = dt;
  sc.adaptive = false;
  sc.snapshot_stride = stride;
  return simulate(init, cfg.mobility, cfg.reactions, cfg.model, sc);
}

// ---------------------------------------------------------------------------
// Weak-strong stability

inline DiagnosticsReport weak_strong_experiment(const ExperimentConfig& cfg,
                                                Trajectory* main_traj = nullptr) {
  DiagnosticsReport rep;
  rep.experiment = "weak_strong";

  const StateField ref0 = make_initial_data(cfg);
  Trajectory ref = run_fixed(ref0, cfg, cfg.dt0, cfg.snapshot_stride);

  double ref_min = std::numeric_limits<double>::infinity(), ref_max = 0.0;
  for (const auto& s : ref.states) {
    ref_min = std::min(ref_min, s.values.minCoeff());
    ref_max = std::max(ref_max, s.values.maxCoeff());
  }
  const TruncationParams p = auto_tune(cfg, ref_min, ref_max);
  if (ref_min < 2.0 * p.iota)
    throw std::runtime_error("weak_strong: reference run violates 2 iota positivity");
  rep.scalars["E"] = p.E;
  rep.scalars["N"] = p.N;
  rep.scalars["iota"] = p.iota;
  rep.scalars["alpha"] = p.alpha;
  rep.scalars["ref_min"] = ref_min;
  rep.scalars["ref_max"] = ref_max;

  auto dist_series = [&](const Trajectory& t) {
    std::vector<std::pair<double, double>> out;
    for (std::size_t k = 0; k < t.states.size(); ++k)
      out.emplace_back(t.times[k], dist_alpha_total(t.states[k], ref.states[k], p, cfg.model));
    return out;
  };

  // zero perturbation: Dist identically ~0
  {
    Trajectory same = run_fixed(ref0, cfg, cfg.dt0, cfg.snapshot_stride);
    double worst = 0.0;
    for (const auto& [t, v] : dist_series(same)) worst = std::max(worst, std::abs(v));
    rep.set_check("zero_perturbation_dist", worst, 1e-12, worst <= 1e-12);
  }

  // amplitude family eps, eps/2, eps/4
  std::vector<double> d0(3), dT(3);
  std::vector<std::pair<double, double>> main_series;
  for (int l = 0; l < 3; ++l) {
    const double eps = cfg.pert.eps / std::pow(2.0, l);
    Trajectory t = run_fixed(apply_perturbation(ref0, cfg.pert, eps), cfg, cfg.dt0,
                             cfg.snapshot_stride);
    auto ds = dist_series(t);
    d0[l] = ds.front().second;
    dT[l] = ds.back().second;
    if (l == 0) {
      if (main_traj) {
        *main_traj = t;
        for (std::size_t k = 0; k < ds.size(); ++k) {
          const std::size_t idx = k * cfg.snapshot_stride;
          if (idx < main_traj->series.size()) main_traj->series[idx].dist = ds[k].second;
        }
        main_traj->series.back().dist = ds.back().second;
      }
      main_series = std::move(ds);
    }
  }
  rep.scalars["dist0_eps"] = d0[0];
  rep.scalars["dist0_eps2"] = d0[1];
  rep.scalars["dist0_eps4"] = d0[2];
  for (int l = 0; l < 2; ++l) {
    const double r = d0[l + 1] / d0[l];
    rep.set_check("quadratic_scaling_" + std::to_string(l), r, 0.3,
                  r >= 0.2 && r <= 0.3);
  }
  {
    // final-time ratio tracks the initial ratio within factor 4
    const double track = (dT[1] / dT[0]) / (d0[1] / d0[0]);
    rep.set_check("final_ratio_tracking", track, 4.0, track >= 0.25 && track <= 4.0);
  }

  // log-linear envelope anchored at the measured initial distance:
  // Dist(t) <= Dist(0) e^{k t} with k the log-linear fitted slope.
  DecayFit fit = decay_fit(main_series);
  const double k_fit = -fit.rate;
  rep.scalars["gronwall_k"] = k_fit;
  double violation = 0.0;
  for (const auto& [t, v] : main_series)
    if (v > 0.0)
      violation = std::max(violation, std::log(v) - (std::log(d0[0]) + k_fit * t));
  const double scale = 0.05 * std::abs(std::log(d0[0]));
  rep.set_check("gronwall_envelope", violation, scale,
                std::isfinite(k_fit) && violation <= scale);
  return rep;
}

// ---------------------------------------------------------------------------
// Uniqueness smoke test: dt refinement drives runs to a common limit.

inline DiagnosticsReport uniqueness_smoke(const ExperimentConfig& cfg,
                                          Trajectory* main_traj = nullptr) {
  DiagnosticsReport rep;
  rep.experiment = "uniqueness";
  const StateField init = make_initial_data(cfg);
  const double dx = cfg.grid.dx();
  std::vector<Mat> finals;
  for (int l = 0; l < 4; ++l) {
    Trajectory t = run_fixed(init, cfg, cfg.dt0 / std::pow(2.0, l), 1 << 30);
    finals.push_back(t.states.back().values);
    if (l == 0 && main_traj) *main_traj = std::move(t);
  }
  std::vector<double> diffs;
  for (int l = 0; l < 3; ++l)
    diffs.push_back((finals[l] - finals[l + 1]).cwiseAbs().sum() * dx);
  for (int l = 0; l < 3; ++l)
    rep.scalars["l1_diff_" + std::to_string(l)] = diffs[l];
  for (int l = 0; l < 2; ++l) {
    const double r = diffs[l] / diffs[l + 1];
    rep.set_check("refinement_ratio_" + std::to_string(l), r, 1.8, r >= 1.8);
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Convergence to equilibrium (R = 0, M0): exponential decay of the
// untruncated distance to the constant steady state of the averages.

inline DiagnosticsReport equilibrium_experiment(const ExperimentConfig& cfg,
                                                Trajectory* main_traj = nullptr) {
  if (!cfg.reactions.empty())
    throw std::invalid_argument("equilibrium_experiment: requires R = 0");
  if (cfg.mobility.variant != MobilityVariant::M0)
    throw std::invalid_argument("equilibrium_experiment: requires the M0 variant");
  DiagnosticsReport rep;
  rep.experiment = "equilibrium";

  const StateField init = make_initial_data(cfg);
  const int n = cfg.model.n();
  const StateIntegrals gi0 = state_integrals(init, cfg.model);
  Vec zbar(1 + n);
  zbar[0] = gi0.energy / cfg.grid.length;
  for (int i = 0; i < n; ++i) zbar[i + 1] = gi0.masses[i] / cfg.grid.length;

  const double alpha = cfg.auto_alpha ? 1.0 : cfg.trunc.alpha;
  Trajectory traj = run_fixed(init, cfg, cfg.dt0, cfg.snapshot_stride);

  // conservation of energy and unreacted masses
  const auto& last = traj.series.back();
  double cons = std::abs(last.energy - gi0.energy) / std::max(1.0, std::abs(gi0.energy));
  for (int i = 0; i < n; ++i)
    cons = std::max(cons, std::abs(last.masses[i] - gi0.masses[i]) /
                              std::max(1.0, std::abs(gi0.masses[i])));
  rep.set_check("conservation", cons, 1e-12, cons <= 1e-12);
  rep.scalars["floor_activations"] = static_cast<double>(traj.total_floor_activations);

  std::vector<std::pair<double, double>> series;
  double ckp_const = 0.0;
  const double dx = cfg.grid.dx();
  for (std::size_t k = 0; k < traj.states.size(); ++k) {
    const StateField& s = traj.states[k];
    series.emplace_back(traj.times[k], dist_alpha_classical(s, zbar, alpha, cfg.model));
    // Csiszar-Kullback-Pinsker: ||c_i - cbar_i||_{L1}^2 <= C * H_rel part
    for (int i = 0; i < n; ++i) {
      double l1 = 0.0, hrel = 0.0;
      for (int j = 0; j < s.grid.cells; ++j) {
        const double ci = s.values(j, i + 1);
        l1 += std::abs(ci - zbar[i + 1]) * dx;
        hrel += (boltzmann_lambda(ci) - boltzmann_lambda(zbar[i + 1]) -
                 std::log(zbar[i + 1]) * (ci - zbar[i + 1])) * dx;
      }
      if (hrel > 1e-14) ckp_const = std::max(ckp_const, l1 * l1 / hrel);
    }
  }
  rep.scalars["ckp_constant"] = ckp_const;
  rep.set_check("ckp_finite", ckp_const, std::numeric_limits<double>::infinity(),
                std::isfinite(ckp_const));

  double worst_increase = 0.0;
  for (std::size_t k = 1; k < series.size(); ++k)
    worst_increase = std::max(worst_increase, series[k].second - series[k - 1].second);
  rep.set_check("dist_monotone", worst_increase, 1e-10, worst_increase <= 1e-10);

  DecayFit fit = decay_fit(series);
  rep.scalars["lambda_fit"] = fit.rate;
  rep.scalars["dist_initial"] = series.front().second;
  rep.scalars["dist_final"] = series.back().second;
  rep.set_check("lambda_positive", fit.rate, 0.0, fit.rate > 0.0);
  if (main_traj) {
    *main_traj = std::move(traj);
    for (std::size_t k = 0; k < series.size(); ++k) {
      const std::size_t idx = k * cfg.snapshot_stride;
      if (idx < main_traj->series.size()) main_traj->series[idx].dist = series[k].second;
    }
    main_traj->series.back().dist = series.back().second;
  }
  return rep;
}

} // namespace erds
