// Acceptance gate: one pass/fail line per criterion, all run at desk scale.
// Exit code 0 iff every criterion passes.

#include <cstdio>
#include <random>

#include "erds/io.hpp"
#include "erds/skt.hpp"

using namespace erds;

namespace {

int failures = 0;

void report(int idx, bool pass, const char* name, const std::string& detail) {
  std::printf("[%2d] %s  %s (%s)\n", idx, pass ? "PASS" : "FAIL", name, detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.3g", v);
  return buf;
}

EntropyModel witness_model(int n) {
  EntropyModel m;
  SpeciesSpec sp;
  sp.b0 = 1.0;
  sp.b1 = 1.0;
  sp.beta = 0.5;
  m.species.assign(n, sp);
  return m;
}

MobilitySpec witness_mobility(int n) {
  MobilitySpec spec;
  spec.kappa0 = Vec::Constant(n, 1.0);
  spec.kappa1 = Vec::Zero(n);
  return spec;
}

Vec rand_state(std::mt19937_64& rng, int d, double lo, double hi) {
  std::uniform_real_distribution<double> dist(lo, hi);
  Vec z(d);
  for (int i = 0; i < d; ++i) z[i] = dist(rng);
  return z;
}

ExperimentConfig base_cfg(int n, int cells) {
  ExperimentConfig cfg;
  cfg.model = witness_model(n);
  cfg.mobility = witness_mobility(n);
  cfg.grid.cells = cells;
  cfg.init.c_bar.assign(n, 1.0);
  cfg.init.A_c.assign(n, 0.2);
  cfg.init.k_c.resize(n);
  for (int i = 0; i < n; ++i) cfg.init.k_c[i] = i + 1;
  cfg.pert.j0 = cells / 4;
  cfg.pert.j1 = cells / 2 - 1;
  return cfg;
}

// 1. structure identities
void criterion_1() {
  const EntropyModel m = witness_model(2);
  const MobilitySpec spec = witness_mobility(2);
  std::mt19937_64 rng(101);
  double worst = 0.0;
  for (int k = 0; k < 10000; ++k) {
    const Vec z = rand_state(rng, 3, 0.1, 4.0);
    const Vec gz = rand_state(rng, 3, -1.0, 1.0);
    const Vec f1 = diffusion_matrix(z, spec, m) * gz;
    const Vec f2 = explicit_flux_m0(z, gz, spec, m);
    worst = std::max(worst, (f1 - f2).cwiseAbs().maxCoeff() /
                                std::max(1.0, f2.cwiseAbs().maxCoeff()));
  }
  const EntropyModel m1 = witness_model(1);
  Vec z(2);
  z << 1.0, 1.0;
  const Mat A = diffusion_matrix(z, witness_mobility(1), m1);
  const double dev = (A - Mat::Identity(2, 2)).cwiseAbs().maxCoeff();
  report(1, worst < 1e-10 && dev < 1e-12, "structure identities A = M D2h",
         "flux dev " + fmt(worst) + " < 1e-10, witness dev " + fmt(dev) + " < 1e-12");
}

// 2. derivative correctness
void criterion_2() {
  const EntropyModel m = witness_model(2);
  std::mt19937_64 rng(102);
  const double h = 1e-5;
  double worst = 0.0;
  for (int s = 0; s < 1000; ++s) {
    const Vec z = rand_state(rng, 3, 0.3, 3.0);
    const Vec g = entropy_gradient(z, m);
    const Mat H = entropy_hessian(z, m);
    const auto T = entropy_third(z, m);
    for (int k = 0; k < 3; ++k) {
      Vec zp = z, zm = z;
      zp[k] += h;
      zm[k] -= h;
      const double fd = (entropy_density(zp, m) - entropy_density(zm, m)) / (2 * h);
      worst = std::max(worst, std::abs(fd - g[k]) / std::max(1.0, std::abs(g[k])));
      const Vec fdH = (entropy_gradient(zp, m) - entropy_gradient(zm, m)) / (2 * h);
      const Mat fdT = (entropy_hessian(zp, m) - entropy_hessian(zm, m)) / (2 * h);
      for (int i = 0; i < 3; ++i) {
        worst = std::max(worst, std::abs(fdH[i] - H(k, i)) / std::max(1.0, std::abs(H(k, i))));
        for (int j = 0; j < 3; ++j)
          worst = std::max(worst,
                           std::abs(fdT(i, j) - T[k](i, j)) / std::max(1.0, std::abs(T[k](i, j))));
      }
    }
  }
  report(2, worst <= 1e-5, "derivative correctness vs finite differences",
         "max rel err " + fmt(worst) + " <= 1e-5");
}

// 3. sign structure
void criterion_3() {
  const EntropyModel m = witness_model(2);
  const MobilitySpec spec = witness_mobility(2);
  ReactionSpec rspec;
  rspec.pairs.push_back({1, 2, 0.8});
  std::mt19937_64 rng(103);
  long violations = 0;
  for (long k = 0; k < 100000; ++k) {
    const Vec z = rand_state(rng, 3, 0.02, 6.0);
    Eigen::SelfAdjointEigenSolver<Mat> esM(mobility_matrix(z, spec, m));
    if (esM.eigenvalues().minCoeff() < -1e-12) ++violations;
    Eigen::SelfAdjointEigenSolver<Mat> esH(entropy_hessian(z, m));
    if (esH.eigenvalues().minCoeff() <= 0.0) ++violations;
    const Vec gz = rand_state(rng, 3, -2.0, 2.0);
    if (dissipation_density(z, gz, spec, m) < -1e-12) ++violations;
    if (reaction_dissipation(z, rspec, m) > 1e-12) ++violations;
  }
  report(3, violations == 0, "sign structure (M PSD, D2h PD, P >= 0, R.Dh <= 0)",
         std::to_string(violations) + " violations over 1e5 samples");
}

Trajectory run_cfg(const ExperimentConfig& cfg, double dt, int stride) {
  SimulateConfig sc;
  sc.T = cfg.T;
  sc.dt0 = dt;
  sc.adaptive = false;
  sc.snapshot_stride = stride;
  return simulate(make_initial_data(cfg), cfg.mobility, cfg.reactions, cfg.model, sc);
}

// 4. conservation
void criterion_4() {
  ExperimentConfig cfg = base_cfg(2, 64);
  cfg.T = 1.0;
  const Trajectory traj = run_cfg(cfg, 5e-5, 1 << 30);
  const auto& a = traj.series.front();
  const auto& b = traj.series.back();
  double worst = std::abs(b.energy - a.energy) / std::abs(a.energy);
  for (int i = 0; i < 2; ++i)
    worst = std::max(worst, std::abs(b.masses[i] - a.masses[i]) / std::abs(a.masses[i]));
  const bool pass = worst <= 1e-11 && traj.total_floor_activations == 0;
  report(4, pass, "conservation of energy and masses",
         "rel defect " + fmt(worst) + " <= 1e-11, floors " +
             std::to_string(traj.total_floor_activations));
}

// 5. entropy/energy dissipation residuals, first order in dt
void criterion_5() {
  ExperimentConfig cfg = base_cfg(2, 64);
  cfg.T = 0.5;
  const Trajectory t1 = run_cfg(cfg, 5e-5, 1 << 30);
  const Trajectory t2 = run_cfg(cfg, 2.5e-5, 1 << 30);
  const double ed1 = ed_residual(t1, 0, t1.series.size() - 1);
  const double ed2 = ed_residual(t2, 0, t2.series.size() - 1);
  const double en1 = ene_residual(t1, 0, t1.series.size() - 1);
  const double en2 = ene_residual(t2, 0, t2.series.size() - 1);
  const double red = ed1 / ed2, ren = en1 / en2;
  const bool pass = ed1 <= 1e-3 && std::abs(en1) <= 1e-3 && red >= 1.7 && red <= 2.3 &&
                    ren >= 1.7 && ren <= 2.3;
  report(5, pass, "dissipation residuals first order in dt",
         "ed " + fmt(ed1) + " ratio " + fmt(red) + ", ene " + fmt(en1) + " ratio " +
             fmt(ren));
}

// 6. minimum principle
void criterion_6() {
  ExperimentConfig cfg = base_cfg(2, 64);
  cfg.T = 0.5;
  cfg.init.A_u = 0.5; // u in [0.5, 1.5]
  const Trajectory traj = run_cfg(cfg, 5e-5, 1 << 30);
  const double defect = min_principle_check(traj, cfg.mobility);
  report(6, defect <= 1e-10, "minimum principle for u (m = 0)",
         "worst defect " + fmt(defect) + " <= 1e-10");
}

// 7. coercivity of the generalised distance
void criterion_7() {
  const EntropyModel m = witness_model(2);
  ExperimentConfig cfg = base_cfg(2, 16);
  const TruncationParams p = auto_tune(cfg, 0.2, 2.0);
  std::mt19937_64 rng(107);
  double ratio_min = std::numeric_limits<double>::infinity();
  double epsAc = std::numeric_limits<double>::infinity();
  for (int k = 0; k < 10000; ++k) {
    const Vec zt = rand_state(rng, 3, 0.2, 2.0);
    // inside A: quadratic coercivity
    Vec z = rand_state(rng, 3, 0.05, p.E / 3.0);
    const double q = (z - zt).squaredNorm();
    if (q > 1e-10)
      ratio_min = std::min(ratio_min, adjusted_rel_entropy_density(z, zt, p, m) / q);
    // outside A: entropy-tail coercivity
    Vec zo = rand_state(rng, 3, 0.05, 3.0) * (p.E);
    if (zo.sum() <= p.E) zo *= 2.0 * p.E / zo.sum();
    double tail = zo[0] * zo[0] + 1.0;
    for (int i = 1; i < 3; ++i) tail += zo[i] * std::max(std::log(zo[i]), 0.0);
    epsAc = std::min(epsAc, dist_alpha_density(zo, zt, p, m) / tail);
  }
  const bool pass = ratio_min > 0.0 && epsAc >= 1e-3;
  report(7, pass, "coercivity of dist_alpha",
         "coercA ratio " + fmt(ratio_min) + " > 0, coercAc eps " + fmt(epsAc) +
             " >= 1e-3 (E=" + fmt(p.E) + ")");
}

// 8. stability densities bounded by the distance
void criterion_8() {
  const EntropyModel m = witness_model(2);
  const MobilitySpec spec = witness_mobility(2);
  ExperimentConfig cfg = base_cfg(2, 16);
  const TruncationParams p = auto_tune(cfg, 0.2, 2.0);
  StabilitySampler box;
  box.iota = p.iota;
  box.B = 2.0;
  const auto res = stability_density_check(100000, 108, p, m, spec, ReactionSpec{}, box);
  bool pass = res.unbounded_events == 0;
  std::string detail = "C:";
  for (const auto& [name, v] : res.max_ratio) {
    pass = pass && std::isfinite(v);
    detail += " " + name + "=" + fmt(v);
  }
  detail += ", unbounded " + std::to_string(res.unbounded_events);
  report(8, pass, "stability density rho_alpha <~ dist_alpha per regime", detail);
}

// 9. weak-strong stability
void criterion_9() {
  ExperimentConfig cfg = base_cfg(2, 64);
  cfg.T = 0.5;
  cfg.dt0 = 5e-5;
  cfg.snapshot_stride = 25;
  cfg.pert.eps = 0.05;
  const DiagnosticsReport rep = weak_strong_experiment(cfg);
  std::string detail;
  bool pass = true;
  for (const auto& [name, c] : rep.checks) {
    pass = pass && c.pass;
    if (!c.pass) detail += name + "=" + fmt(c.value) + " ";
  }
  detail += "k=" + fmt(rep.scalars.at("gronwall_k")) +
            ", dist0 ratio " + fmt(rep.scalars.at("dist0_eps2") / rep.scalars.at("dist0_eps"));
  report(9, pass, "weak-strong stability experiment", detail);
}

// 10. uniqueness smoke
void criterion_10() {
  ExperimentConfig cfg = base_cfg(2, 48);
  cfg.T = 0.5;
  cfg.dt0 = 1e-4;
  const DiagnosticsReport rep = uniqueness_smoke(cfg);
  const double r0 = rep.scalars.at("l1_diff_0") / rep.scalars.at("l1_diff_1");
  const double r1 = rep.scalars.at("l1_diff_1") / rep.scalars.at("l1_diff_2");
  const bool mono = rep.scalars.at("l1_diff_0") > rep.scalars.at("l1_diff_1") &&
                    rep.scalars.at("l1_diff_1") > rep.scalars.at("l1_diff_2");
  report(10, rep.all_pass() && mono, "uniqueness under dt refinement",
         "ratios " + fmt(r0) + ", " + fmt(r1) + " >= 1.8");
}

// 11. exponential equilibration
void criterion_11() {
  ExperimentConfig cfg = base_cfg(1, 64);
  cfg.T = 1.0;
  cfg.dt0 = 5e-5;
  cfg.snapshot_stride = 25;
  cfg.init.A_u = 0.3;
  cfg.init.A_c = {0.3};
  cfg.init.k_c = {2};
  const DiagnosticsReport rep = equilibrium_experiment(cfg);
  report(11, rep.all_pass(), "exponential convergence to equilibrium",
         "lambda " + fmt(rep.scalars.at("lambda_fit")) + ", dist " +
             fmt(rep.scalars.at("dist_initial")) + " -> " +
             fmt(rep.scalars.at("dist_final")));
}

// 12. renormalised residual
void criterion_12() {
  const EntropyModel m = witness_model(1);
  const MobilitySpec spec = witness_mobility(1);
  auto run = [&](int J, double dt, double T) {
    ExperimentConfig cfg = base_cfg(1, J);
    cfg.T = T;
    return run_cfg(cfg, dt, 1);
  };
  const Trajectory cons = run(32, 1e-4, 0.05);
  double mass_res = 0.0;
  for (int l = 0; l < 2; ++l) {
    auto xi = [l](const Vec& z) { return phi_conservation(z, l, 100.0); };
    mass_res = std::max(mass_res, renormalized_residual(
                                      cons, xi, [](double, double) { return 1.0; }, m,
                                      spec, {}));
  }
  TruncationParams p;
  p.E = 2.0;
  p.N = 2.0;
  auto xi = [&p](const Vec& z) { return xi_star(z, p); };
  auto psi = [](double, double x) { return std::cos(2.0 * M_PI * x); };
  const double r1 = renormalized_residual(run(32, 1e-4, 0.02), xi, psi, m, spec, {});
  const double r2 = renormalized_residual(run(64, 2.5e-5, 0.02), xi, psi, m, spec, {});
  const double r3 = renormalized_residual(run(128, 6.25e-6, 0.02), xi, psi, m, spec, {});
  const bool pass = mass_res <= 1e-11 && r1 / r2 >= 1.5 && r2 / r3 >= 1.5;
  report(12, pass, "renormalised-formulation residual",
         "mass " + fmt(mass_res) + " <= 1e-11, refinement ratios " + fmt(r1 / r2) +
             ", " + fmt(r2 / r3) + " >= 1.5");
}

// 13. SKT cross-diffusion family
void criterion_13() {
  bool pass = true;
  std::string detail;
  for (double s : {1.0, 2.0}) {
    SktSpec spec;
    spec.s = s;
    spec.pi = Vec(2);
    spec.pi << 1.0, 2.0;
    spec.a = Mat(2, 3);
    // detailed balance (pi_1 a_12 = pi_2 a_21) with dominant self-diffusion
    spec.a << 0.5, 2.0, 0.3, 0.4, 0.15, 1.0;
    std::mt19937_64 rng(113);

    double asym = 0.0, eps = std::numeric_limits<double>::infinity();
    for (int k = 0; k < 5000; ++k) {
      const Vec c = rand_state(rng, 2, 0.1, 4.0);
      const Mat M = skt_mobility(c, spec);
      asym = std::max(asym, (M - M.transpose()).cwiseAbs().maxCoeff() /
                                std::max(1.0, M.cwiseAbs().maxCoeff()));
      const Vec v = rand_state(rng, 2, -1.0, 1.0);
      const Vec d = skt_entropy_hessian_diag(c, spec);
      const double num = v.dot(d.asDiagonal() * (skt_diffusion_matrix(c, spec) * v));
      double den = 0.0;
      for (int i = 0; i < 2; ++i)
        den += spec.pi[i] * s * std::pow(c[i], s - 2.0) * spec.a(i, 0) * v[i] * v[i];
      if (den > 1e-14) eps = std::min(eps, num / den);
    }

    // entropy decay on a J = 64 run
    const int J = 64;
    const double dx = 1.0 / J, dt = 5e-6;
    Mat cells(J, 2);
    for (int j = 0; j < J; ++j) {
      const double x = (j + 0.5) * dx;
      cells(j, 0) = 1.0 + 0.4 * std::cos(2.0 * M_PI * x);
      cells(j, 1) = 1.0 + 0.3 * std::cos(4.0 * M_PI * x);
    }
    auto total = [&]() {
      double H = 0.0;
      for (int j = 0; j < J; ++j) H += skt_entropy(cells.row(j).transpose(), spec) * dx;
      return H;
    };
    double H_prev = total();
    bool mono = true;
    for (int k = 0; k < 2000; ++k) {
      skt_step(cells, dx, dt, spec);
      const double H = total();
      if (H > H_prev + 1e-10) mono = false;
      H_prev = H;
    }

    // xi*_s: plateau, support, N-independent decay constant
    bool xi_ok = true;
    Vec c(2);
    c << 0.5, 0.5;
    if (xi_star_s(c, 4.0, 2.0, std::max(s, 1.5)).value != 1.0) xi_ok = false;
    c << 30.0, 30.0;
    if (xi_star_s(c, 4.0, 2.0, std::max(s, 1.5)).value != 0.0) xi_ok = false;
    for (double N : {2.0, 4.0, 8.0}) {
      const double ss = std::max(s, 1.5);
      const double delta = (ss == 2.0) ? 0.0 : 1.0;
      for (double scale = 5.0; scale < std::pow(4.0, N); scale *= 1.5) {
        c << scale, scale;
        const auto t = xi_star_s(c, 4.0, N, ss);
        double S = 2.0 * std::pow(scale + delta, ss);
        for (int i = 0; i < 2; ++i)
          if (std::abs(t.grad[i]) * (N - 1.0) * std::log(4.0) * S /
                  std::pow(c[i] + delta, ss - 1.0) >
              1.875 + 1e-12)
            xi_ok = false;
      }
    }

    const bool ok = asym < 1e-10 && eps > 0.0 && mono && xi_ok;
    pass = pass && ok;
    detail += "s=" + fmt(s) + ": sym " + fmt(asym) + ", eps " + fmt(eps) +
              (mono ? ", H monotone" : ", H NOT monotone") + "; ";
  }
  report(13, pass, "SKT family (s = 1, 2)", detail);
}

} // namespace

int main() {
  std::printf("acceptance criteria\n-------------------\n");
  criterion_1();
  criterion_2();
  criterion_3();
  criterion_4();
  criterion_5();
  criterion_6();
  criterion_7();
  criterion_8();
  criterion_9();
  criterion_10();
  criterion_11();
  criterion_12();
  criterion_13();
  std::printf("-------------------\n%s (%d failing)\n",
              failures == 0 ? "ALL CRITERIA PASSED" : "FAILURES PRESENT", failures);
  return failures == 0 ? 0 : 1;
}
