#pragma once

// Mobility matrices M(z) = diag(m, m_1..m_n) + pi_1 mu (x) mu for the
// M0/M1 model families, the induced diffusion matrix A = M D^2h, the
// explicit M0 flux forms, and the dissipation density P(z).

#include <optional>

#include "erds/entropy.hpp"

namespace erds {

enum class MobilityVariant { M0, M1, SKT };
enum class MCoeffKind { Zero, Constant, Bounded };

struct SktSpec {
  double s = 1.0;       // transition-rate exponent in [1,2]
  Mat a;                // n x (n+1): row i holds a_{i0}, a_{i1}, ..., a_{in}
  Vec pi;               // positive entropy weights

  int n() const { return static_cast<int>(pi.size()); }

  void validate() const {
    if (!(s >= 1.0 && s <= 2.0)) throw std::invalid_argument("skt: s outside [1,2]");
    if (pi.size() == 0) throw std::invalid_argument("skt: empty pi");
    if (a.rows() != pi.size() || a.cols() != pi.size() + 1)
      throw std::invalid_argument("skt: a must be n x (n+1)");
    for (int i = 0; i < n(); ++i) {
      if (pi[i] <= 0.0) throw std::invalid_argument("skt: pi_i must be > 0");
      for (int j = 0; j <= n(); ++j)
        if (a(i, j) < 0.0) throw std::invalid_argument("skt: a_ij must be >= 0");
    }
  }

  bool detailed_balance(double tol = 1e-12) const {
    for (int i = 0; i < n(); ++i)
      for (int j = 0; j < n(); ++j)
        if (std::abs(pi[i] * a(i, j + 1) - pi[j] * a(j, i + 1)) > tol) return false;
    return true;
  }
};

struct MobilitySpec {
  MobilityVariant variant = MobilityVariant::M0;
  MCoeffKind m_kind = MCoeffKind::Zero;
  double m_bar = 0.0;      // in [0,1] for the constant/bounded families
  Vec kappa0, kappa1;      // per-species coefficients in m_i = c_i(k0 + k1 c_i)
  double pi1_scale = 1.0;  // p in pi_1(z) = p / gamma(z); a(z) = p exactly
  std::optional<SktSpec> skt;

  void validate(int n) const {
    if (variant == MobilityVariant::SKT) {
      if (!skt) throw std::invalid_argument("mobility: SKT variant requires skt block");
      skt->validate();
      return;
    }
    if (m_kind != MCoeffKind::Zero && !(m_bar >= 0.0 && m_bar <= 1.0))
      throw std::invalid_argument("mobility: m_bar must lie in [0,1]");
    if (kappa0.size() != n || kappa1.size() != n)
      throw std::invalid_argument("mobility: kappa vectors must have length n");
    for (int i = 0; i < n; ++i)
      if (kappa0[i] < 0.0 || kappa1[i] < 0.0)
        throw std::invalid_argument("mobility: kappa coefficients must be >= 0");
    if (pi1_scale <= 0.0) throw std::invalid_argument("mobility: pi1_scale must be > 0");
  }

  bool has_zero_m() const {
    return m_kind == MCoeffKind::Zero || m_bar == 0.0;
  }
};

inline double m_coeff(const Vec& z, const MobilitySpec& spec, const EntropyModel& model) {
  switch (spec.m_kind) {
    case MCoeffKind::Zero: return 0.0;
    case MCoeffKind::Constant: return spec.m_bar;
    case MCoeffKind::Bounded: return spec.m_bar / (1.0 + gamma_coeff(z, model));
  }
  return 0.0;
}

// M = diag(m, m_1..m_n) + pi_1 mu (x) mu, mu = (1, mu_1..mu_n),
// mu_i = (w_i'/w_i) c_i, m_i = c_i (kappa0_i + kappa1_i c_i), pi_1 = p/gamma.
inline Mat mobility_matrix(const Vec& z, const MobilitySpec& spec,
                           const EntropyModel& model) {
  check_state_u(z);
  const int n = model.n();
  const double u = z[0];
  Vec mu(1 + n);
  mu[0] = 1.0;
  Mat M = Mat::Zero(1 + n, 1 + n);
  M(0, 0) = m_coeff(z, spec, model);
  for (int i = 0; i < n; ++i) {
    const double ci = z[i + 1];
    const auto& sp = model.species[i];
    mu[i + 1] = sp.w1(u) / sp.w(u) * ci;
    M(i + 1, i + 1) = ci * (spec.kappa0[i] + spec.kappa1[i] * ci);
  }
  const double pi1 = spec.pi1_scale / gamma_coeff(z, model);
  M += pi1 * mu * mu.transpose();
  return M;
}

inline Mat diffusion_matrix(const Vec& z, const MobilitySpec& spec,
                            const EntropyModel& model) {
  return mobility_matrix(z, spec, model) * entropy_hessian(z, model);
}

// Explicit M0 flux forms (per spatial direction; grad_z holds the spatial
// gradient of every component):
//   flux_0 = a grad u + m grad D_0h
//   flux_i = m_i grad D_ih + a c_i (w_i'/w_i) grad u
// with a = pi_1 gamma = p. Agrees with A(z) grad_z.
inline Vec explicit_flux_m0(const Vec& z, const Vec& grad_z, const MobilitySpec& spec,
                            const EntropyModel& model) {
  if (spec.variant != MobilityVariant::M0)
    throw std::domain_error("explicit_flux_m0: M0 variant required");
  check_state_positive(z);
  const int n = model.n();
  const double u = z[0];
  const double a = spec.pi1_scale;
  const Mat H = entropy_hessian(z, model);
  const Vec gradDh = H * grad_z; // grad D_ih via chain rule
  const double m = m_coeff(z, spec, model);
  Vec flux(1 + n);
  flux[0] = a * grad_z[0] + m * gradDh[0];
  for (int i = 0; i < n; ++i) {
    const double ci = z[i + 1];
    const auto& sp = model.species[i];
    const double mi = ci * (spec.kappa0[i] + spec.kappa1[i] * ci);
    flux[i + 1] = mi * gradDh[i + 1] + a * ci * sp.w1(u) / sp.w(u) * grad_z[0];
  }
  return flux;
}

// P(z) = grad D_ih . M_il grad D_lh  with grad D_ih = D^2h grad_z.
inline double dissipation_density(const Vec& z, const Vec& grad_z,
                                  const MobilitySpec& spec, const EntropyModel& model) {
  const Vec w = entropy_hessian(z, model) * grad_z;
  return w.dot(mobility_matrix(z, spec, model) * w);
}

} // namespace erds
