#pragma once

// Relative entropy densities and the generalised distance
// dist_alpha(z,zt) = h*_rel(z,zt) + (alpha/2)(u - ut)^2,
// where h*_rel truncates the linear term through xi*.

#include "erds/entropy.hpp"
#include "erds/truncation.hpp"

namespace erds {

// Classical (Bregman) relative entropy density h(z) - Dh(zt).(z-zt) - h(zt).
inline double rel_entropy_density(const Vec& z, const Vec& zt, const EntropyModel& m) {
  check_state_positive(zt);
  const Vec g = entropy_gradient(zt, m);
  return entropy_density(z, m) - g.dot(z - zt) - entropy_density(zt, m);
}

// Adjusted version: h(z) - Dh(zt).(xi*(z) z - zt) - h(zt).
inline double adjusted_rel_entropy_density(const Vec& z, const Vec& zt,
                                           const TruncationParams& p,
                                           const EntropyModel& m) {
  check_state_positive(zt);
  const Vec g = entropy_gradient(zt, m);
  const double xi = xi_star(z, p).value;
  return entropy_density(z, m) - g.dot(xi * z - zt) - entropy_density(zt, m);
}

inline double dist_alpha_density(const Vec& z, const Vec& zt,
                                 const TruncationParams& p, const EntropyModel& m) {
  const double du = z[0] - zt[0];
  return adjusted_rel_entropy_density(z, zt, p, m) + 0.5 * p.alpha * du * du;
}

} // namespace erds
