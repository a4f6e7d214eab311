#pragma once

// Entropy densities for energy-reaction-diffusion systems:
// h(u,c) = -sigma(u) + sum_i [ lambda(c_i) - c_i log w_i(u) ]
// with a concave thermal part sigma and concave equilibrium profiles w_i.
// All derivatives are closed-form per coefficient family.

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace erds {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// ---------------------------------------------------------------------------
// Boltzmann-type scalar functions

// lambda(r) = r log r - r + 1, continuously extended by lambda(0) = 1.
inline double boltzmann_lambda(double r) {
  if (r < 0.0) throw std::domain_error("boltzmann_lambda: r < 0");
  if (r == 0.0) return 1.0;
  return r * std::log(r) - r + 1.0;
}

// lambda_s(r) = (r^s - s r)/(s-1) + 1 for s in (1,2]; lambda_s(1) = 0.
inline double lambda_s(double r, double s) {
  if (r < 0.0) throw std::domain_error("lambda_s: r < 0");
  if (!(s > 1.0 && s <= 2.0)) throw std::domain_error("lambda_s: s outside (1,2]");
  return (std::pow(r, s) - s * r) / (s - 1.0) + 1.0;
}

// Relative Boltzmann entropy b(s,e) = e lambda(s/e), e > 0.
inline double rel_boltzmann_b(double s, double e) {
  if (e <= 0.0) throw std::domain_error("rel_boltzmann_b: e <= 0");
  if (s < 0.0) throw std::domain_error("rel_boltzmann_b: s < 0");
  return e * boltzmann_lambda(s / e);
}

// ---------------------------------------------------------------------------
// Coefficient families

enum class SigmaKind { Log, Power };

struct SigmaSpec {
  SigmaKind kind = SigmaKind::Log;
  double a = 1.0;   // overall scale, a > 0
  double nu = 0.5;  // exponent for the power family, nu in (0,1)

  void validate() const {
    if (a <= 0.0) throw std::invalid_argument("sigma: a must be > 0");
    if (kind == SigmaKind::Power && !(nu > 0.0 && nu < 1.0))
      throw std::invalid_argument("sigma: nu must lie in (0,1)");
  }

  double value(double u) const {
    return kind == SigmaKind::Log ? a * std::log(u) : a * std::pow(u, nu);
  }
  double d1(double u) const {
    return kind == SigmaKind::Log ? a / u : a * nu * std::pow(u, nu - 1.0);
  }
  double d2(double u) const {
    return kind == SigmaKind::Log ? -a / (u * u)
                                  : a * nu * (nu - 1.0) * std::pow(u, nu - 2.0);
  }
  double d3(double u) const {
    return kind == SigmaKind::Log
               ? 2.0 * a / (u * u * u)
               : a * nu * (nu - 1.0) * (nu - 2.0) * std::pow(u, nu - 3.0);
  }
};

enum class SpeciesForm { PowerOfAffine, AffineOfPower };

struct SpeciesSpec {
  SpeciesForm form = SpeciesForm::PowerOfAffine;
  double b0 = 1.0;   // > 0, keeps w(0) > 0
  double b1 = 1.0;   // >= 0
  double beta = 0.5; // in (0,1)

  void validate() const {
    if (b0 <= 0.0) throw std::invalid_argument("species: b0 must be > 0");
    if (b1 < 0.0) throw std::invalid_argument("species: b1 must be >= 0");
    if (!(beta > 0.0 && beta < 1.0))
      throw std::invalid_argument("species: beta must lie in (0,1)");
  }

  double w(double u) const {
    return form == SpeciesForm::PowerOfAffine
               ? std::pow(b1 * u + b0, beta)
               : b1 * std::pow(u, beta) + b0;
  }
  double w1(double u) const {
    return form == SpeciesForm::PowerOfAffine
               ? beta * b1 * std::pow(b1 * u + b0, beta - 1.0)
               : b1 * beta * std::pow(u, beta - 1.0);
  }
  double w2(double u) const {
    return form == SpeciesForm::PowerOfAffine
               ? beta * (beta - 1.0) * b1 * b1 * std::pow(b1 * u + b0, beta - 2.0)
               : b1 * beta * (beta - 1.0) * std::pow(u, beta - 2.0);
  }
  double w3(double u) const {
    return form == SpeciesForm::PowerOfAffine
               ? beta * (beta - 1.0) * (beta - 2.0) * b1 * b1 * b1 *
                     std::pow(b1 * u + b0, beta - 3.0)
               : b1 * beta * (beta - 1.0) * (beta - 2.0) * std::pow(u, beta - 3.0);
  }
};

struct EntropyModel {
  SigmaSpec sigma;
  std::vector<SpeciesSpec> species;

  int n() const { return static_cast<int>(species.size()); }

  void validate() const {
    sigma.validate();
    if (species.empty()) throw std::invalid_argument("entropy: need at least one species");
    for (const auto& s : species) s.validate();
  }

  // max beta over species; w_i(u) <= C(1+u^beta)
  double beta_max() const {
    double b = 0.0;
    for (const auto& s : species) b = std::max(b, s.beta);
    return b;
  }
};

// ---------------------------------------------------------------------------
// Entropy density and derivatives. State points are z = (u, c_1..c_n).

inline void check_state_u(const Vec& z) {
  if (z[0] <= 0.0) throw std::domain_error("entropy: u <= 0");
}

inline void check_state_positive(const Vec& z) {
  for (Eigen::Index i = 0; i < z.size(); ++i)
    if (z[i] <= 0.0) throw std::domain_error("entropy: state component <= 0");
}

inline double entropy_density(const Vec& z, const EntropyModel& m) {
  check_state_u(z);
  const double u = z[0];
  double h = -m.sigma.value(u);
  for (int i = 0; i < m.n(); ++i) {
    const double ci = z[i + 1];
    if (ci < 0.0) throw std::domain_error("entropy: c_i < 0");
    h += boltzmann_lambda(ci) - ci * std::log(m.species[i].w(u));
  }
  return h;
}

// D_0 h = -sigma'(u) - sum_i c_i w_i'/w_i ;  D_i h = log(c_i / w_i(u)).
inline Vec entropy_gradient(const Vec& z, const EntropyModel& m) {
  check_state_positive(z);
  const double u = z[0];
  Vec g(z.size());
  double g0 = -m.sigma.d1(u);
  for (int i = 0; i < m.n(); ++i) {
    const auto& sp = m.species[i];
    const double ci = z[i + 1];
    const double w = sp.w(u);
    g0 -= ci * sp.w1(u) / w;
    g[i + 1] = std::log(ci / w);
  }
  g[0] = g0;
  return g;
}

inline Mat entropy_hessian(const Vec& z, const EntropyModel& m) {
  check_state_positive(z);
  const double u = z[0];
  const int n = m.n();
  Mat H = Mat::Zero(1 + n, 1 + n);
  double h00 = -m.sigma.d2(u);
  for (int i = 0; i < n; ++i) {
    const auto& sp = m.species[i];
    const double ci = z[i + 1];
    const double w = sp.w(u);
    const double q = sp.w1(u) / w;                  // w'/w
    const double q1 = sp.w2(u) / w - q * q;         // (w''w - w'^2)/w^2
    h00 -= ci * q1;
    H(0, i + 1) = H(i + 1, 0) = -q;
    H(i + 1, i + 1) = 1.0 / ci;
  }
  H(0, 0) = h00;
  return H;
}

// Third derivatives T[k](i,j) = D_k D_i D_j h, needed for the chain-rule
// expansion of the stability densities. Fully symmetric.
inline std::vector<Mat> entropy_third(const Vec& z, const EntropyModel& m) {
  check_state_positive(z);
  const double u = z[0];
  const int n = m.n();
  std::vector<Mat> T(1 + n, Mat::Zero(1 + n, 1 + n));
  double t000 = -m.sigma.d3(u);
  for (int i = 0; i < n; ++i) {
    const auto& sp = m.species[i];
    const double ci = z[i + 1];
    const double w = sp.w(u);
    const double q = sp.w1(u) / w;
    const double q1 = sp.w2(u) / w - q * q;
    // q'' = w'''/w - w''w'/w^2 - 2 q q'
    const double q2 = sp.w3(u) / w - sp.w2(u) * sp.w1(u) / (w * w) - 2.0 * q * q1;
    t000 -= ci * q2;
    T[0](0, i + 1) = T[0](i + 1, 0) = -q1;
    T[i + 1](0, 0) = -q1;
    T[i + 1](i + 1, i + 1) = -1.0 / (ci * ci);
  }
  T[0](0, 0) = t000;
  return T;
}

// gamma(u,c) = -sigma''(u) - sum_i c_i w_i''(u)/w_i(u) > 0.
// Equals D_00 h - sum_i c_i (w_i'/w_i)^2.
inline double gamma_coeff(const Vec& z, const EntropyModel& m) {
  check_state_u(z);
  const double u = z[0];
  double g = -m.sigma.d2(u);
  for (int i = 0; i < m.n(); ++i) {
    const auto& sp = m.species[i];
    const double ci = z[i + 1];
    if (ci < 0.0) throw std::domain_error("gamma_coeff: c_i < 0");
    g -= ci * sp.w2(u) / sp.w(u);
  }
  return g;
}

} // namespace erds
