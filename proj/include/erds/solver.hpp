#pragma once

// 1-D cell-centered finite-volume solver for d_t z = div(A(z) grad z) + R(z)
// with no-flux boundaries. Face fluxes are taken in entropy variables,
// F = M(z_face) (Dh(zR) - Dh(zL))/dx with z_face the arithmetic mean, so the
// discrete dissipation at every face is a nonnegative quadratic form of the
// PSD mobility. Time stepping is explicit Euler with an entropy-decrease
// step control.

#include <functional>

#include "erds/grid.hpp"
#include "erds/mobility.hpp"
#include "erds/reactions.hpp"

namespace erds {

inline Vec face_flux(const Vec& zL, const Vec& zR, double dx, const MobilitySpec& spec,
                     const EntropyModel& model) {
  const Vec zf = 0.5 * (zL + zR);
  const Vec dDh = entropy_gradient(zR, model) - entropy_gradient(zL, model);
  return mobility_matrix(zf, spec, model) * dDh / dx;
}

struct StateIntegrals {
  double H = 0.0;
  double energy = 0.0;
  std::vector<double> masses;
  double G = 0.0;
  double min_u = 0.0;
};

inline StateIntegrals state_integrals(const StateField& s, const EntropyModel& model) {
  StateIntegrals out;
  const double dx = s.grid.dx();
  const int n = s.n();
  out.masses.assign(n, 0.0);
  out.min_u = s.values.col(0).minCoeff();
  for (int j = 0; j < s.grid.cells; ++j) {
    const Vec z = s.cell(j);
    out.H += entropy_density(z, model) * dx;
    out.energy += z[0] * dx;
    out.G += 0.5 * z[0] * z[0] * dx;
    for (int i = 0; i < n; ++i) out.masses[i] += z[i + 1] * dx;
  }
  return out;
}

struct StepAccumulators {
  double P = 0.0;      // sum over faces of dDh.M dDh / dx  (the discrete int P dx)
  double RDh = 0.0;    // sum over cells of D_ih R_i dx
  double ene_a = 0.0;  // sum over faces of a (du/dx)^2 dx
  double ene_m = 0.0;  // remainder of the energy face flux against du/dx
};

struct StepResult {
  bool finite = true;
  long floor_activations = 0;
  StepAccumulators acc;
};

// Explicit Euler step. Returns the accumulators evaluated at the pre-step
// state, which make the discrete entropy/energy identities exact up to the
// second-order-in-dt remainder.
inline StepResult step(StateField& state, double dt, const MobilitySpec& spec,
                       const ReactionSpec& rspec, const EntropyModel& model,
                       double delta_pos = 1e-12) {
  const int J = state.grid.cells;
  const int n = state.n();
  const double dx = state.grid.dx();
  StepResult res;

  Mat flux = Mat::Zero(J + 1, 1 + n); // boundary faces carry zero flux
  for (int f = 1; f < J; ++f) {
    const Vec zL = state.cell(f - 1);
    const Vec zR = state.cell(f);
    const Vec zf = 0.5 * (zL + zR);
    const Vec dDh = entropy_gradient(zR, model) - entropy_gradient(zL, model);
    const Vec F = mobility_matrix(zf, spec, model) * dDh / dx;
    flux.row(f) = F.transpose();
    res.acc.P += dDh.dot(F); // = dDh . M dDh / dx, one dx from the cell measure
    const double dudx = (zR[0] - zL[0]) / dx;
    const double a = spec.pi1_scale; // a = pi_1 gamma by construction
    res.acc.ene_a += a * dudx * dudx * dx;
    res.acc.ene_m += (F[0] - a * dudx) * dudx * dx;
  }

  Mat next = state.values;
  for (int j = 0; j < J; ++j) {
    const Vec z = state.cell(j);
    Vec rhs = (flux.row(j + 1) - flux.row(j)).transpose() / dx;
    if (!rspec.empty()) {
      const Vec R = reaction(z, rspec, model);
      rhs += R;
      res.acc.RDh += entropy_gradient(z, model).dot(R) * dx;
    }
    next.row(j) += dt * rhs.transpose();
  }

  for (int j = 0; j < J; ++j) {
    for (int i = 0; i <= n; ++i) {
      double& v = next(j, i);
      if (!std::isfinite(v)) { res.finite = false; return res; }
      if (v < delta_pos) {
        ++res.floor_activations;
        v = delta_pos;
      }
    }
  }
  state.values = next;
  return res;
}

struct SimulateConfig {
  double T = 0.5;
  double dt0 = 5e-5;
  bool adaptive = true;
  int snapshot_stride = 100;
  double delta_pos = 1e-12;
  double entropy_slack = 1e-10; // relative per-step tolerance on H increase
  int max_halvings = 40;
  int grow_after = 20;  // accepted steps before dt grows by 1.1x
};

using StepObserver = std::function<void(double t, const StateField&, SeriesRow&)>;

inline Trajectory simulate(const StateField& initial, const MobilitySpec& spec,
                           const ReactionSpec& rspec, const EntropyModel& model,
                           const SimulateConfig& cfg, const StepObserver& observer = {}) {
  Trajectory traj;
  StateField state = initial;

  auto record_series = [&](double t, double dt, const StateIntegrals& gi,
                           const SeriesRow* prev, const StepAccumulators* acc,
                           long floors) {
    SeriesRow row;
    row.t = t;
    row.dt = dt;
    row.H = gi.H;
    row.energy = gi.energy;
    row.masses = gi.masses;
    row.G = gi.G;
    row.min_u = gi.min_u;
    row.floor_count = floors;
    if (prev && acc) {
      row.cumP = prev->cumP + dt * acc->P;
      row.cumRDh = prev->cumRDh + dt * acc->RDh;
      row.cum_ene_a = prev->cum_ene_a + dt * acc->ene_a;
      row.cum_ene_m = prev->cum_ene_m + dt * acc->ene_m;
    }
    if (observer) observer(t, state, row);
    traj.series.push_back(std::move(row));
  };

  StateIntegrals gi = state_integrals(state, model);
  record_series(0.0, 0.0, gi, nullptr, nullptr, 0);
  traj.times.push_back(0.0);
  traj.states.push_back(state);

  double t = 0.0;
  double dt = cfg.dt0;
  int accepted_streak = 0;
  long steps = 0;
  double H_prev = gi.H;

  while (t < cfg.T - 1e-15 * std::max(1.0, cfg.T)) {
    const double dt_eff = std::min(dt, cfg.T - t);
    StateField trial = state;
    StepResult r;
    int halvings = 0;
    double dt_try = dt_eff;
    for (;;) {
      trial = state;
      r = step(trial, dt_try, spec, rspec, model, cfg.delta_pos);
      bool ok = r.finite;
      double H_new = 0.0;
      if (ok) {
        H_new = state_integrals(trial, model).H;
        ok = std::isfinite(H_new) &&
             H_new <= H_prev + cfg.entropy_slack * (1.0 + std::abs(H_prev));
      }
      if (ok) break;
      if (!cfg.adaptive || ++halvings > cfg.max_halvings || dt_try < 1e-14)
        throw std::runtime_error("simulate: step rejected at dt=" + std::to_string(dt_try) +
                                 ", t=" + std::to_string(t));
      dt_try *= 0.5;
      dt = dt_try;
      accepted_streak = 0;
    }

    state = trial;
    t += dt_try;
    ++steps;
    traj.total_floor_activations += r.floor_activations;
    gi = state_integrals(state, model);
    record_series(t, dt_try, gi, &traj.series.back(), &r.acc, r.floor_activations);
    H_prev = gi.H;

    if (cfg.adaptive && ++accepted_streak >= cfg.grow_after) {
      dt *= 1.1;
      accepted_streak = 0;
    }
    if (steps % std::max(1, cfg.snapshot_stride) == 0 || t >= cfg.T - 1e-15) {
      traj.times.push_back(t);
      traj.states.push_back(state);
    }
  }
  return traj;
}

} // namespace erds
