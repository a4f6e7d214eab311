// erds: structure-preserving 1-D simulator and verification harness for
// energy-reaction-diffusion systems.
//
// Subcommands: simulate | stability | uniqueness | equilibrium | check,
// each taking --config <file> --out <dir> [--seed <u64>].
// Exit codes: 0 all checks passed, 2 a check failed (report written),
// 1 usage or configuration error.

#include <CLI11.hpp>

#include "erds/io.hpp"

namespace {

using namespace erds;

DiagnosticsReport run_simulate(const RunConfig& cfg, Trajectory& traj) {
  DiagnosticsReport rep;
  rep.experiment = "simulate";
  SimulateConfig sc;
  sc.T = cfg.exp.T;
  sc.dt0 = cfg.exp.dt0;
  sc.snapshot_stride = cfg.exp.snapshot_stride;
  traj = simulate(make_initial_data(cfg.exp), cfg.exp.mobility, cfg.exp.reactions,
                  cfg.exp.model, sc);
  const auto& first = traj.series.front();
  const auto& last = traj.series.back();
  rep.scalars["H_initial"] = first.H;
  rep.scalars["H_final"] = last.H;
  rep.scalars["floor_activations"] = static_cast<double>(traj.total_floor_activations);
  double worst_inc = 0.0;
  for (std::size_t k = 1; k < traj.series.size(); ++k)
    worst_inc = std::max(worst_inc, traj.series[k].H - traj.series[k - 1].H);
  rep.set_check("entropy_monotone", worst_inc, 1e-10, worst_inc <= 1e-10);
  const double dE = std::abs(last.energy - first.energy) / std::max(1.0, std::abs(first.energy));
  rep.set_check("energy_conserved", dE, 1e-11, dE <= 1e-11);
  for (int i = 0; i < cfg.exp.model.n(); ++i) {
    if (cfg.exp.reactions.touches(i + 1)) continue;
    const double dm = std::abs(last.masses[i] - first.masses[i]) /
                      std::max(1.0, std::abs(first.masses[i]));
    rep.set_check("mass_conserved_" + std::to_string(i + 1), dm, 1e-11, dm <= 1e-11);
  }
  return rep;
}

// Sampled property suite: derivative correctness, sign structure, diffusion
// identity, coercivity, and the per-regime stability-density constants.
DiagnosticsReport run_check(const RunConfig& cfg) {
  DiagnosticsReport rep;
  rep.experiment = "check";
  const EntropyModel& model = cfg.exp.model;
  const MobilitySpec& spec = cfg.exp.mobility;
  const int d = 1 + model.n();
  std::mt19937_64 rng(cfg.exp.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto rand_state = [&](double lo, double hi) {
    Vec z(d);
    for (int i = 0; i < d; ++i) z[i] = lo + unit(rng) * (hi - lo);
    return z;
  };

  // derivative correctness vs central differences
  double worst_fd = 0.0;
  const double fd_h = 1e-5;
  for (int k = 0; k < 1000; ++k) {
    const Vec z = rand_state(0.3, 3.0);
    const Vec g = entropy_gradient(z, model);
    const Mat H = entropy_hessian(z, model);
    for (int i = 0; i < d; ++i) {
      Vec zp = z, zm = z;
      zp[i] += fd_h;
      zm[i] -= fd_h;
      const double fd = (entropy_density(zp, model) - entropy_density(zm, model)) / (2 * fd_h);
      worst_fd = std::max(worst_fd, std::abs(fd - g[i]) / std::max(1.0, std::abs(g[i])));
      const Vec fdg = (entropy_gradient(zp, model) - entropy_gradient(zm, model)) / (2 * fd_h);
      for (int j = 0; j < d; ++j)
        worst_fd = std::max(worst_fd, std::abs(fdg[j] - H(i, j)) / std::max(1.0, std::abs(H(i, j))));
    }
  }
  rep.set_check("derivatives_fd", worst_fd, 1e-5, worst_fd <= 1e-5);

  // sign structure
  long violations = 0;
  for (int k = 0; k < 20000; ++k) {
    const Vec z = rand_state(0.05, 5.0);
    const Mat M = mobility_matrix(z, spec, model);
    const Mat H = entropy_hessian(z, model);
    Eigen::SelfAdjointEigenSolver<Mat> esM(M), esH(H);
    if (esM.eigenvalues().minCoeff() < -1e-12) ++violations;
    if (esH.eigenvalues().minCoeff() <= 0.0) ++violations;
    Vec gz = rand_state(-1.0, 1.0);
    if (dissipation_density(z, gz, spec, model) < -1e-12) ++violations;
    if (reaction_dissipation(z, cfg.exp.reactions, model) > 1e-12) ++violations;
  }
  rep.set_check("sign_structure", static_cast<double>(violations), 0.0, violations == 0);

  // diffusion identity A grad z = explicit flux (M0 family)
  if (spec.variant == MobilityVariant::M0) {
    double worst = 0.0;
    for (int k = 0; k < 10000; ++k) {
      const Vec z = rand_state(0.1, 4.0);
      const Vec gz = rand_state(-1.0, 1.0);
      const Vec f1 = diffusion_matrix(z, spec, model) * gz;
      const Vec f2 = explicit_flux_m0(z, gz, spec, model);
      worst = std::max(worst, (f1 - f2).cwiseAbs().maxCoeff() /
                                  std::max(1.0, f2.cwiseAbs().maxCoeff()));
    }
    rep.set_check("diffusion_identity", worst, 1e-10, worst <= 1e-10);
  }

  // coercivity and stability densities with the auto-tuned schedule
  ExperimentConfig tuned = cfg.exp;
  const TruncationParams p = auto_tune(tuned, 0.2, 2.0);
  rep.scalars["E"] = p.E;
  rep.scalars["N"] = p.N;
  rep.scalars["iota"] = p.iota;
  rep.scalars["alpha"] = p.alpha;
  double coercA_min = std::numeric_limits<double>::infinity();
  for (int k = 0; k < 10000; ++k) {
    Vec z = rand_state(0.05, p.E / d);
    Vec zt = rand_state(0.2, 2.0);
    const double hrel = adjusted_rel_entropy_density(z, zt, p, model);
    const double q = (z - zt).squaredNorm();
    if (q > 1e-12) coercA_min = std::min(coercA_min, hrel / q);
  }
  rep.set_check("coercA_lower_bound", coercA_min, 0.0, coercA_min > 0.0);

  StabilitySampler box;
  box.iota = p.iota;
  box.B = 2.0;
  auto sres = stability_density_check(20000, cfg.exp.seed, p, model, spec,
                                      cfg.exp.reactions, box);
  for (const auto& [name, v] : sres.max_ratio) {
    rep.scalars["stability_C_" + name] = v;
    rep.tallies["regime_samples"][name] = static_cast<double>(sres.tally[name]);
  }
  rep.set_check("stability_unbounded_events",
                static_cast<double>(sres.unbounded_events), 0.0,
                sres.unbounded_events == 0);
  return rep;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"erds: entropy-structured reaction-diffusion simulator and checker"};
  app.require_subcommand(1);

  std::string config_path, out_dir;
  std::uint64_t seed = 0;
  bool seed_set = false;
  for (const char* name : {"simulate", "stability", "uniqueness", "equilibrium", "check"}) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "JSON configuration file")->required();
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--seed", seed, "seed override")->each([&](const std::string&) {
      seed_set = true;
    });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    erds::RunConfig cfg = erds::load_config(config_path);
    const std::string kind = app.get_subcommands().front()->get_name();
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    if (seed_set) {
      cfg.exp.seed = seed;
      cfg.echo["seed"] = seed;
    }
    cfg.echo["experiment"]["kind"] = kind;

    erds::Trajectory traj;
    erds::DiagnosticsReport rep;
    if (kind == "simulate") rep = run_simulate(cfg, traj);
    else if (kind == "stability") rep = erds::weak_strong_experiment(cfg.exp, &traj);
    else if (kind == "uniqueness") rep = erds::uniqueness_smoke(cfg.exp, &traj);
    else if (kind == "equilibrium") rep = erds::equilibrium_experiment(cfg.exp, &traj);
    else rep = run_check(cfg);

    erds::write_outputs(traj, rep, cfg);
    if (!rep.all_pass()) {
      for (const auto& [name, c] : rep.checks)
        if (!c.pass)
          std::fprintf(stderr, "FAIL %s: value %.6g vs tolerance %.6g\n", name.c_str(),
                       c.value, c.tolerance);
      return 2;
    }
    return 0;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
