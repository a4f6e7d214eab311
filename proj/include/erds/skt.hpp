#pragma once

// Isoenergetic cross-diffusion (SKT) family:
//   d_t c_i = div(A_ij(c) grad c_j),  A_ij = delta_ij p_i + c_i dp_i/dc_j,
//   p_i(c) = a_i0 + sum_k a_ik c_k^s,  entropy h(c) = sum_i pi_i lambda_s(c_i).
// The mobility A (D^2h)^-1 is symmetric under detailed balance.

#include "erds/mobility.hpp"

namespace erds {

inline double lambda_s_d1(double c, double s) {
  if (s == 1.0) return std::log(c);
  return s * (std::pow(c, s - 1.0) - 1.0) / (s - 1.0);
}

inline double lambda_s_d2(double c, double s) {
  if (s == 1.0) return 1.0 / c;
  return s * std::pow(c, s - 2.0);
}

inline double skt_entropy(const Vec& c, const SktSpec& spec) {
  double h = 0.0;
  for (int i = 0; i < spec.n(); ++i)
    h += spec.pi[i] * (spec.s == 1.0 ? boltzmann_lambda(c[i]) : lambda_s(c[i], spec.s));
  return h;
}

inline Vec skt_entropy_gradient(const Vec& c, const SktSpec& spec) {
  Vec g(spec.n());
  for (int i = 0; i < spec.n(); ++i) g[i] = spec.pi[i] * lambda_s_d1(c[i], spec.s);
  return g;
}

inline Vec skt_entropy_hessian_diag(const Vec& c, const SktSpec& spec) {
  Vec d(spec.n());
  for (int i = 0; i < spec.n(); ++i) d[i] = spec.pi[i] * lambda_s_d2(c[i], spec.s);
  return d;
}

inline Mat skt_diffusion_matrix(const Vec& c, const SktSpec& spec) {
  const int n = spec.n();
  const double s = spec.s;
  for (int i = 0; i < n; ++i)
    if (c[i] < 0.0) throw std::domain_error("skt_diffusion_matrix: c_i < 0");
  Vec p(n);
  for (int i = 0; i < n; ++i) {
    p[i] = spec.a(i, 0);
    for (int k = 0; k < n; ++k) p[i] += spec.a(i, k + 1) * std::pow(c[k], s);
  }
  Mat A = Mat::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    A(i, i) = p[i];
    for (int j = 0; j < n; ++j)
      A(i, j) += c[i] * s * spec.a(i, j + 1) * std::pow(c[j], s - 1.0);
  }
  return A;
}

// M = A (D^2h)^-1 with the diagonal Hessian of h(c) = sum pi_i lambda_s(c_i).
inline Mat skt_mobility(const Vec& c, const SktSpec& spec) {
  Mat M = skt_diffusion_matrix(c, spec);
  const Vec d = skt_entropy_hessian_diag(c, spec);
  for (int j = 0; j < spec.n(); ++j) M.col(j) /= d[j];
  return M;
}

inline double skt_dissipation_density(const Vec& c, const Vec& grad_c, const SktSpec& spec) {
  const Vec d = skt_entropy_hessian_diag(c, spec);
  const Vec w = d.cwiseProduct(grad_c); // grad D_ih
  return w.dot(skt_mobility(c, spec) * w);
}

// One explicit Euler step of the 1-D finite-volume scheme with no-flux
// boundaries and entropy-variable face fluxes F = M(c_face) dDh / dx.
inline void skt_step(Mat& cells, double dx, double dt, const SktSpec& spec,
                     double floor = 1e-12) {
  const int J = static_cast<int>(cells.rows());
  const int n = spec.n();
  Mat flux = Mat::Zero(J + 1, n); // boundary faces stay zero
  for (int f = 1; f < J; ++f) {
    const Vec cl = cells.row(f - 1).transpose();
    const Vec cr = cells.row(f).transpose();
    const Vec cf = 0.5 * (cl + cr);
    const Vec dDh = skt_entropy_gradient(cr, spec) - skt_entropy_gradient(cl, spec);
    flux.row(f) = (skt_mobility(cf, spec) * dDh / dx).transpose();
  }
  for (int j = 0; j < J; ++j)
    cells.row(j) += dt / dx * (flux.row(j + 1) - flux.row(j));
  cells = cells.cwiseMax(floor);
}

} // namespace erds
