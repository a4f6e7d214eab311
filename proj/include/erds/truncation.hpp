#pragma once

// Truncation functions xi*(z) that equal 1 below the scale E and 0 above E^N
// in the l1 norm of the state, with 1/(N|z|_1) derivative decay, plus the
// superlinear variant driven by rho_s(c) and the conservation truncation
// phi_l^E used by the renormalised-residual diagnostic.

#include <cmath>
#include <stdexcept>

#include "erds/entropy.hpp"

namespace erds {

struct TruncationParams {
  double E = 4.0;    // inner scale, >= 2
  double N = 2.0;    // outer scale exponent, >= 2  (outer scale is E^N)
  double iota = 0.1; // positivity margin in (0,1)
  double alpha = 1.0;

  void validate() const {
    if (E < 2.0) throw std::invalid_argument("truncation: E must be >= 2");
    if (N < 2.0) throw std::invalid_argument("truncation: N must be >= 2");
    if (N * std::log10(E) > 300.0)
      throw std::invalid_argument("truncation: E^N overflows (E^N > 1e300)");
    if (!(iota > 0.0 && iota < 1.0))
      throw std::invalid_argument("truncation: iota must lie in (0,1)");
    if (alpha <= 0.0) throw std::invalid_argument("truncation: alpha must be > 0");
  }

  double outer() const { return std::pow(E, N); }
};

// Profile theta: reversed quintic smoothstep, C^2, non-increasing,
// 1 on (-inf,0], 0 on [1,inf).
inline double theta_profile(double r) {
  if (r <= 0.0) return 1.0;
  if (r >= 1.0) return 0.0;
  return 1.0 - r * r * r * (10.0 + r * (-15.0 + 6.0 * r));
}
inline double theta_profile_d1(double r) {
  if (r <= 0.0 || r >= 1.0) return 0.0;
  return -30.0 * r * r * (1.0 - r) * (1.0 - r);
}
inline double theta_profile_d2(double r) {
  if (r <= 0.0 || r >= 1.0) return 0.0;
  return -60.0 * r * (1.0 - r) * (1.0 - 2.0 * r);
}

struct SmoothTrunc {
  double value = 0.0;
  Vec grad;
  Mat hess;
};

// xi*(z) = theta( (log|z|_1 - log E) / (log E^N - log E) ).
inline SmoothTrunc xi_star(const Vec& z, const TruncationParams& p) {
  const int d = static_cast<int>(z.size());
  SmoothTrunc out;
  out.grad = Vec::Zero(d);
  out.hess = Mat::Zero(d, d);
  double s = 0.0;
  for (int i = 0; i < d; ++i) {
    if (z[i] < 0.0) throw std::domain_error("xi_star: negative component");
    s += z[i];
  }
  if (s <= p.E) { // includes |z|_1 = 0
    out.value = 1.0;
    return out;
  }
  const double L = (p.N - 1.0) * std::log(p.E);
  const double r = (std::log(s) - std::log(p.E)) / L;
  out.value = theta_profile(r);
  const double t1 = theta_profile_d1(r);
  const double t2 = theta_profile_d2(r);
  // D_i r = 1/(L s),  D_ij r = -1/(L s^2)
  const double g = t1 / (L * s);
  const double hh = t2 / (L * L * s * s) - t1 / (L * s * s);
  out.grad.setConstant(g);
  out.hess.setConstant(hh);
  return out;
}

// Superlinear variant for cross-diffusion systems:
// xi*_s(c) = theta( (log rho_s(c) - log E)/(log E^N - log E) ),
// rho_s(c) = (sum (c_i+delta)^s)^(1/s), delta = 1 for s in (1,2), 0 for s = 2.
inline SmoothTrunc xi_star_s(const Vec& c, double E, double N, double s) {
  if (!(s > 1.0 && s <= 2.0)) throw std::domain_error("xi_star_s: s outside (1,2]");
  const int n = static_cast<int>(c.size());
  const double delta = (s == 2.0) ? 0.0 : 1.0;
  SmoothTrunc out;
  out.grad = Vec::Zero(n);
  out.hess = Mat::Zero(n, n);
  double S = 0.0;
  for (int i = 0; i < n; ++i) {
    if (c[i] < 0.0) throw std::domain_error("xi_star_s: negative component");
    S += std::pow(c[i] + delta, s);
  }
  const double rho = std::pow(S, 1.0 / s);
  if (rho <= E) {
    out.value = 1.0;
    return out;
  }
  const double L = (N - 1.0) * std::log(E);
  const double r = (std::log(rho) - std::log(E)) / L;
  out.value = theta_profile(r);
  if (r >= 1.0) return out; // regime C: value 0, zero derivatives
  const double t1 = theta_profile_d1(r);
  const double t2 = theta_profile_d2(r);
  // log rho = (1/s) log S;  D_i log rho = (c_i+delta)^{s-1}/S
  Vec dlr(n);
  for (int i = 0; i < n; ++i) dlr[i] = std::pow(c[i] + delta, s - 1.0) / S;
  for (int i = 0; i < n; ++i) {
    out.grad[i] = t1 / L * dlr[i];
    for (int j = 0; j < n; ++j) {
      double d2lr = -s * dlr[i] * dlr[j];
      if (i == j) d2lr += (s - 1.0) * std::pow(c[i] + delta, s - 2.0) / S;
      out.hess(i, j) = t2 / (L * L) * dlr[i] * dlr[j] + t1 / L * d2lr;
    }
  }
  return out;
}

// phi_l^E(z) = z_l for |z|_1 <= E, smoothly cut off to 0 on |z|_1 >= 2E.
// Compactly supported derivative; used to probe discrete mass conservation
// through the renormalised formulation.
inline SmoothTrunc phi_conservation(const Vec& z, int l, double E) {
  const int d = static_cast<int>(z.size());
  if (l < 0 || l >= d) throw std::invalid_argument("phi_conservation: bad index");
  SmoothTrunc out;
  out.grad = Vec::Zero(d);
  out.hess = Mat::Zero(d, d);
  const double s = z.sum();
  const double r = (s - E) / E;
  const double th = theta_profile(r);
  const double t1 = theta_profile_d1(r) / E;
  const double t2 = theta_profile_d2(r) / (E * E);
  out.value = z[l] * th;
  for (int i = 0; i < d; ++i) {
    out.grad[i] = th * (i == l ? 1.0 : 0.0) + z[l] * t1;
    for (int j = 0; j < d; ++j) {
      out.hess(i, j) = t1 * ((i == l ? 1.0 : 0.0) + (j == l ? 1.0 : 0.0)) + z[l] * t2;
    }
  }
  return out;
}

enum class Regime { APlus, AZero, B, C };

inline const char* regime_name(Regime r) {
  switch (r) {
    case Regime::APlus: return "A_plus";
    case Regime::AZero: return "A_zero";
    case Regime::B: return "B";
    case Regime::C: return "C";
  }
  return "?";
}

// Partition by |z|_1 against E, E^N; the A regime splits on min(z) vs iota.
inline Regime regime_classify(const Vec& z, const TruncationParams& p) {
  const double s = z.sum();
  if (s <= p.E) return z.minCoeff() >= p.iota ? Regime::APlus : Regime::AZero;
  if (s >= p.outer()) return Regime::C;
  return Regime::B;
}

} // namespace erds
