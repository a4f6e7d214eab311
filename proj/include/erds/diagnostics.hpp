#pragma once

// Discrete functionals and inequality residuals: entropy/energy dissipation
// residuals, the generalised distance, regime-resolved stability densities
// rho^(h), rho^(en), the renormalised-formulation residual, the minimum
// principle defect, and exponential decay fits.

#include <algorithm>
#include <map>
#include <random>
#include <string>
#include <utility>

#include "erds/distance.hpp"
#include "erds/solver.hpp"

namespace erds {

struct CheckFlag {
  bool pass = false;
  double tolerance = 0.0;
  double value = 0.0;
};

struct DiagnosticsReport {
  std::string experiment;
  std::map<std::string, double> scalars;
  std::map<std::string, CheckFlag> checks;
  std::map<std::string, std::map<std::string, double>> tallies;

  void set_check(const std::string& name, double value, double tol, bool pass) {
    checks[name] = CheckFlag{pass, tol, value};
  }
  bool all_pass() const {
    for (const auto& [k, c] : checks)
      if (!c.pass) return false;
    return true;
  }
};

inline StateIntegrals integrals(const StateField& s, const EntropyModel& model) {
  return state_integrals(s, model);
}

// H(t) - H(s) + int_s^t int P - int_s^t int R.Dh, from the recorded series.
// Non-positive up to the O(dt) remainder of the explicit scheme.
inline double ed_residual(const Trajectory& traj, std::size_t s_idx, std::size_t t_idx) {
  const auto& a = traj.series.at(s_idx);
  const auto& b = traj.series.at(t_idx);
  return b.H - a.H + (b.cumP - a.cumP) - (b.cumRDh - a.cumRDh);
}

// G(t) - G(s) + int a|grad u|^2 + int m grad D_0h . grad u  (discrete split).
inline double ene_residual(const Trajectory& traj, std::size_t s_idx, std::size_t t_idx) {
  const auto& a = traj.series.at(s_idx);
  const auto& b = traj.series.at(t_idx);
  return b.G - a.G + (b.cum_ene_a - a.cum_ene_a) + (b.cum_ene_m - a.cum_ene_m);
}

// Dist_alpha(z, zt) = int dist_alpha dx by midpoint quadrature.
inline double dist_alpha_total(const StateField& state, const StateField& ref,
                               const TruncationParams& p, const EntropyModel& model) {
  if (state.grid.cells != ref.grid.cells)
    throw std::invalid_argument("dist_alpha_total: grid mismatch");
  const double B = ref.values.maxCoeff();
  if (p.E < 2.0 * B)
    throw std::invalid_argument("dist_alpha_total: E below 2B for the reference state");
  const double dx = state.grid.dx();
  double total = 0.0;
  for (int j = 0; j < state.grid.cells; ++j)
    total += dist_alpha_density(state.cell(j), ref.cell(j), p, model) * dx;
  return total;
}

// Untruncated variant used by the equilibrium experiment (constant reference).
inline double dist_alpha_classical(const StateField& state, const Vec& zbar, double alpha,
                                   const EntropyModel& model) {
  const double dx = state.grid.dx();
  double total = 0.0;
  for (int j = 0; j < state.grid.cells; ++j) {
    const Vec z = state.cell(j);
    const double du = z[0] - zbar[0];
    total += (rel_entropy_density(z, zbar, model) + 0.5 * alpha * du * du) * dx;
  }
  return total;
}

// ---------------------------------------------------------------------------
// Stability densities

struct RhoDensities {
  double rho_h = 0.0;
  double rho_en = 0.0;
  double rho_alpha = 0.0;
};

// Pointwise evaluation of the five entropic terms and the four energetic
// terms of the Dist evolution density, with the xi*-dependent brackets
// expanded by the chain rule using analytic gradients and Hessians.
inline RhoDensities rho_densities(const Vec& z, const Vec& zt, const Vec& grad_z,
                                  const Vec& grad_zt, const TruncationParams& params,
                                  const EntropyModel& model, const MobilitySpec& spec,
                                  const ReactionSpec& rspec) {
  check_state_positive(z);
  check_state_positive(zt);
  const int d = static_cast<int>(z.size());

  const SmoothTrunc xi = xi_star(z, params);
  const Mat Hz = entropy_hessian(z, model);
  const Mat Ht = entropy_hessian(zt, model);
  const Vec gz = entropy_gradient(z, model);
  const Vec gt = entropy_gradient(zt, model);
  const std::vector<Mat> Tt = entropy_third(zt, model);

  const Vec gradDh_z = Hz * grad_z;
  const Vec gradDh_t = Ht * grad_zt;
  const Vec flux_z = mobility_matrix(z, spec, model) * gradDh_z;
  const Vec flux_t = mobility_matrix(zt, spec, model) * gradDh_t;

  RhoDensities out;

  // term 1: -P(z)
  const double P = gradDh_z.dot(flux_z);
  double rho_h = -P;

  // term 2: grad( D_i(xi z_j) D_jh(zt) ) . [M(z) grad D h(z)]_i
  const double gt_dot_z = gt.dot(z);
  const double gt_dot_Gz = gt.dot(grad_z);
  const double dxi_dot_Gz = xi.grad.dot(grad_z);
  const Vec hzeta = xi.hess * grad_z;
  const Vec HtGt = Ht * grad_zt;
  const double zHtGt = z.dot(HtGt);
  for (int i = 0; i < d; ++i) {
    const double grad_psi_i = gt_dot_z * hzeta[i] + gt_dot_Gz * xi.grad[i] +
                              gt[i] * dxi_dot_Gz + xi.grad[i] * zHtGt +
                              xi.value * HtGt[i];
    rho_h += grad_psi_i * flux_z[i];
  }

  // term 3: grad( D_ij h(zt) (xi z_j - zt_j) ) . [M(zt) grad D h(zt)]_i
  const Vec dev = xi.value * z - zt;
  for (int i = 0; i < d; ++i) {
    double grad_phi_i = 0.0;
    for (int j = 0; j < d; ++j) {
      double third = 0.0;
      for (int k = 0; k < d; ++k) third += Tt[k](i, j) * grad_zt[k];
      const double grad_xizj = z[j] * dxi_dot_Gz + xi.value * grad_z[j];
      grad_phi_i += third * dev[j] + Ht(i, j) * (grad_xizj - grad_zt[j]);
    }
    rho_h += grad_phi_i * flux_t[i];
  }

  // terms 4 and 5: reaction contributions
  if (!rspec.empty()) {
    const Vec Rt = reaction(zt, rspec, model);
    const Vec Rz = reaction(z, rspec, model);
    rho_h -= (Ht * dev).dot(Rt);
    for (int i = 0; i < d; ++i)
      rho_h += (gz[i] - (xi.grad[i] * gt_dot_z + xi.value * gt[i])) * Rz[i];
  }
  out.rho_h = rho_h;

  // energetic density; a(z) = pi1_scale identically for the M0/M1 families
  const double a_z = spec.pi1_scale;
  const double a_t = spec.pi1_scale;
  const double m_z = m_coeff(z, spec, model);
  const double m_t = m_coeff(zt, spec, model);
  const double du = grad_z[0] - grad_zt[0];
  out.rho_en = -a_z * du * du - (a_z - a_t) * du * grad_zt[0] -
               m_z * du * (gradDh_z[0] - gradDh_t[0]) - (m_z - m_t) * du * gradDh_t[0];

  out.rho_alpha = out.rho_h + params.alpha * out.rho_en;
  return out;
}

// ---------------------------------------------------------------------------
// Sampled stability-density check: max of rho_alpha / dist_alpha per regime.

struct StabilityCheckResult {
  std::map<std::string, double> max_ratio;  // per regime name
  std::map<std::string, long> tally;
  long unbounded_events = 0;
};

struct StabilitySampler {
  double iota = 0.1;       // reference box is [2 iota, B]
  double B = 2.0;
  double grad_bound = 1.0; // componentwise gradient box
  double positivity_floor = 1e-6;
};

inline StabilityCheckResult stability_density_check(long nsamples, std::uint64_t seed,
                                                    const TruncationParams& params,
                                                    const EntropyModel& model,
                                                    const MobilitySpec& spec,
                                                    const ReactionSpec& rspec,
                                                    const StabilitySampler& box = {}) {
  const int d = 1 + model.n();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  StabilityCheckResult res;
  for (Regime r : {Regime::APlus, Regime::AZero, Regime::B, Regime::C}) {
    res.max_ratio[regime_name(r)] = 0.0;
    res.tally[regime_name(r)] = 0;
  }

  auto sample_simplex_scaled = [&](double total) {
    Vec w(d);
    double s = 0.0;
    for (int i = 0; i < d; ++i) {
      w[i] = -std::log(1.0 - unit(rng));
      s += w[i];
    }
    Vec z = w * (total / s);
    for (int i = 0; i < d; ++i) z[i] = std::max(z[i], box.positivity_floor);
    return z;
  };

  for (long k = 0; k < nsamples; ++k) {
    const int which = static_cast<int>(k % 4);
    Vec z(d);
    if (which == 0) { // A_plus: min >= iota, |z|_1 <= E
      for (int i = 0; i < d; ++i)
        z[i] = box.iota + unit(rng) * (params.E / d - box.iota);
    } else if (which == 1) { // A_zero: some component below iota
      for (int i = 0; i < d; ++i)
        z[i] = box.iota + unit(rng) * (params.E / d - box.iota);
      const int low = static_cast<int>(unit(rng) * d) % d;
      z[low] = box.positivity_floor + unit(rng) * (box.iota - box.positivity_floor) * 0.99;
    } else if (which == 2) { // B: log-uniform |z|_1 in (E, E^N)
      const double lo = std::log(params.E), hi = std::log(params.outer());
      z = sample_simplex_scaled(std::exp(lo + unit(rng) * (hi - lo) * 0.999 + 1e-3));
    } else { // C: |z|_1 >= E^N
      z = sample_simplex_scaled(params.outer() * (1.0 + unit(rng) * 9.0));
    }
    Vec zt(d), gz(d), gzt(d);
    for (int i = 0; i < d; ++i) {
      zt[i] = 2.0 * box.iota + unit(rng) * (box.B - 2.0 * box.iota);
      gz[i] = (2.0 * unit(rng) - 1.0) * box.grad_bound;
      gzt[i] = (2.0 * unit(rng) - 1.0) * box.grad_bound;
    }

    const Regime reg = regime_classify(z, params);
    ++res.tally[regime_name(reg)];
    const double dist = dist_alpha_density(z, zt, params, model);
    const double rho = rho_densities(z, zt, gz, gzt, params, model, spec, rspec).rho_alpha;
    if (dist < 1e-14) {
      if (rho > 1e-10) ++res.unbounded_events;
      continue;
    }
    double& mr = res.max_ratio[regime_name(reg)];
    mr = std::max(mr, rho / dist);
  }
  return res;
}

// ---------------------------------------------------------------------------
// Renormalised-formulation residual

// The trajectory must carry a snapshot at every step (snapshot_stride = 1).
// xi supplies value/gradient/Hessian at a state; psi is evaluated at cell
// centers and step times, with time and space derivatives taken as the same
// discrete differences the scheme uses.
inline double renormalized_residual(
    const Trajectory& traj, const std::function<SmoothTrunc(const Vec&)>& xi,
    const std::function<double(double, double)>& psi, const EntropyModel& model,
    const MobilitySpec& spec, const ReactionSpec& rspec) {
  if (traj.states.size() != traj.series.size())
    throw std::invalid_argument("renormalized_residual: need per-step snapshots");
  const std::size_t K = traj.states.size() - 1;
  const StateField& s0 = traj.states.front();
  const int J = s0.grid.cells;
  const double dx = s0.grid.dx();
  auto xc = [&](int j) { return s0.grid.x_center(j); };
  auto t_of = [&](std::size_t k) { return traj.series[k].t; };

  auto check_psi = [&](double v) {
    if (!std::isfinite(v)) throw std::invalid_argument("renormalized_residual: psi not finite");
    return v;
  };

  for (int j = 0; j < J; ++j) {
    check_psi(psi(t_of(K), xc(j)));
    check_psi(psi(0.0, xc(j)));
  }
  // lhs in discrete product-rule form: the boundary terms minus the
  // psi time differences collapse to per-step xi increments, so a
  // constant xi yields exactly zero in floating point as well.
  double lhs = 0.0;
  double rhs = 0.0;
  for (std::size_t k = 0; k < K; ++k) {
    const StateField& s = traj.states[k];
    const double t = t_of(k);
    const double dt = traj.series[k + 1].t - t;
    for (int j = 0; j < J; ++j)
      lhs += (xi(traj.states[k + 1].cell(j)).value - xi(s.cell(j)).value) *
             psi(t_of(k + 1), xc(j)) * dx;

    for (int f = 1; f < J; ++f) {
      const Vec zL = s.cell(f - 1);
      const Vec zR = s.cell(f);
      const Vec zf = 0.5 * (zL + zR);
      const Vec F = face_flux(zL, zR, dx, spec, model); // A(z) grad z at the face
      const Vec dz = (zR - zL) / dx;
      const SmoothTrunc xf = xi(zf);
      const double psi_face = 0.5 * (psi(t, xc(f - 1)) + psi(t, xc(f)));
      const double dpsi = (psi(t, xc(f)) - psi(t, xc(f - 1))) / dx;
      rhs -= dt * dz.dot(xf.hess * F) * psi_face * dx;
      rhs -= dt * xf.grad.dot(F) * dpsi * dx;
    }
    if (!rspec.empty()) {
      for (int j = 0; j < J; ++j) {
        const Vec z = s.cell(j);
        rhs += dt * xi(z).grad.dot(reaction(z, rspec, model)) * psi(t, xc(j)) * dx;
      }
    }
  }
  return std::abs(lhs - rhs);
}

// ---------------------------------------------------------------------------
// Minimum principle and decay fits

// Worst defect min_j u_j(0) - min_j u_j(t) over the series; only meaningful
// for m == 0 variants.
inline double min_principle_check(const Trajectory& traj, const MobilitySpec& spec) {
  if (!spec.has_zero_m())
    throw std::domain_error("min_principle_check: requires m == 0");
  const double u0 = traj.series.front().min_u;
  double worst = -std::numeric_limits<double>::infinity();
  for (const auto& row : traj.series) worst = std::max(worst, u0 - row.min_u);
  return worst;
}

struct DecayFit {
  double rate = 0.0;      // -slope of the log-linear fit
  double intercept = 0.0;
  double max_violation = 0.0; // max of log v - fitted line
  bool truncated = false;     // non-positive tail dropped
};

inline DecayFit decay_fit(const std::vector<std::pair<double, double>>& series) {
  std::vector<std::pair<double, double>> pts;
  DecayFit out;
  for (const auto& [t, v] : series) {
    if (v <= 0.0) { out.truncated = true; break; }
    pts.emplace_back(t, std::log(v));
  }
  if (pts.size() < 10) throw std::invalid_argument("decay_fit: need >= 10 positive samples");
  double st = 0, sy = 0, stt = 0, sty = 0;
  for (const auto& [t, y] : pts) {
    st += t; sy += y; stt += t * t; sty += t * y;
  }
  const double m = pts.size();
  const double slope = (m * sty - st * sy) / (m * stt - st * st);
  out.intercept = (sy - slope * st) / m;
  out.rate = -slope;
  for (const auto& [t, y] : pts)
    out.max_violation = std::max(out.max_violation, y - (out.intercept + slope * t));
  return out;
}

} // namespace erds
