#pragma once

// Pairwise exchange reactions c_i <-> c_j with rate kappa. The zeroth
// component never reacts, the species sum is conserved, and the entropy
// production sum_i D_ih R_i is non-positive pointwise.

#include "erds/entropy.hpp"

namespace erds {

struct ExchangePair {
  int i = 1; // species indices, 1-based as in the state layout
  int j = 2;
  double kappa = 0.0;
};

struct ReactionSpec {
  std::vector<ExchangePair> pairs;

  bool empty() const { return pairs.empty(); }

  void validate(int n) const {
    for (const auto& p : pairs) {
      if (!(p.i >= 1 && p.j <= n && p.i < p.j))
        throw std::invalid_argument("reactions: require 1 <= i < j <= n");
      if (p.kappa < 0.0) throw std::invalid_argument("reactions: kappa must be >= 0");
    }
  }

  bool touches(int species) const {
    for (const auto& p : pairs)
      if (p.i == species || p.j == species) return true;
    return false;
  }
};

// R_i += kappa (c_j/w_j - c_i/w_i), R_j -= the same; R_0 = 0.
inline Vec reaction(const Vec& z, const ReactionSpec& rspec, const EntropyModel& model) {
  Vec R = Vec::Zero(z.size());
  if (rspec.empty()) return R;
  check_state_u(z);
  const double u = z[0];
  for (const auto& p : rspec.pairs) {
    const double xi = z[p.i] / model.species[p.i - 1].w(u);
    const double xj = z[p.j] / model.species[p.j - 1].w(u);
    const double r = p.kappa * (xj - xi);
    R[p.i] += r;
    R[p.j] -= r;
  }
  return R;
}

// sum_i D_ih(z) R_i(z) = -sum_pairs kappa (log x_i - log x_j)(x_i - x_j) <= 0,
// evaluated directly from the gradient for use in diagnostics.
inline double reaction_dissipation(const Vec& z, const ReactionSpec& rspec,
                                   const EntropyModel& model) {
  if (rspec.empty()) return 0.0;
  const Vec g = entropy_gradient(z, model);
  const Vec R = reaction(z, rspec, model);
  return g.dot(R);
}

} // namespace erds
