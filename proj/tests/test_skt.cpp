#include <catch_amalgamated.hpp>

#include "erds/skt.hpp"
#include "test_models.hpp"

using namespace erds;
using Catch::Approx;

namespace {

SktSpec balanced_spec(double s) {
  SktSpec spec;
  spec.s = s;
  spec.pi = Vec(2);
  spec.pi << 1.0, 2.0;
  spec.a = Mat(2, 3);
  // detailed balance pi_1 a_12 = 0.3 = pi_2 a_21, with self-diffusion
  // dominating the cross terms so the symmetrized form stays PSD
  spec.a << 0.5, 2.0, 0.3,
            0.4, 0.15, 1.0;
  return spec;
}

} // namespace

TEST_CASE("lambda_s derivative limits") {
  CHECK(lambda_s_d1(2.0, 1.0) == Approx(std::log(2.0)));
  CHECK(lambda_s_d2(2.0, 1.0) == Approx(0.5));
  CHECK(lambda_s_d1(2.0, 2.0) == Approx(2.0 * (2.0 - 1.0)));
  // d1 is the derivative of lambda_s
  const double h = 1e-6;
  for (double s : {1.3, 1.7, 2.0})
    for (double c : {0.3, 1.0, 2.5}) {
      const double fd = (lambda_s(c + h, s) - lambda_s(c - h, s)) / (2 * h);
      CHECK(fd == Approx(lambda_s_d1(c, s)).epsilon(1e-6).margin(1e-9));
    }
}

TEST_CASE("SKT diffusion matrix matches its definition by finite differences") {
  // A_ij = delta_ij p_i + c_i dp_i/dc_j
  for (double s : {1.0, 1.5, 2.0}) {
    const SktSpec spec = balanced_spec(s);
    std::mt19937_64 rng(41);
    auto p_of = [&](const Vec& c, int i) {
      double p = spec.a(i, 0);
      for (int k = 0; k < 2; ++k) p += spec.a(i, k + 1) * std::pow(c[k], s);
      return p;
    };
    for (int trial = 0; trial < 50; ++trial) {
      const Vec c = testutil::random_state(rng, 2, 0.2, 3.0);
      const Mat A = skt_diffusion_matrix(c, spec);
      const double h = 1e-6;
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
          Vec cp = c, cm = c;
          cp[j] += h;
          cm[j] -= h;
          const double dpij = (p_of(cp, i) - p_of(cm, i)) / (2 * h);
          const double expect = (i == j ? p_of(c, i) : 0.0) + c[i] * dpij;
          CHECK(A(i, j) == Approx(expect).epsilon(1e-6).margin(1e-8));
        }
    }
  }
}

TEST_CASE("detailed balance is equivalent to mobility symmetry") {
  std::mt19937_64 rng(43);
  for (double s : {1.0, 2.0}) {
    SktSpec spec = balanced_spec(s);
    REQUIRE(spec.detailed_balance());
    double worst = 0.0;
    for (int k = 0; k < 1000; ++k) {
      const Vec c = testutil::random_state(rng, 2, 0.1, 4.0);
      const Mat M = skt_mobility(c, spec);
      worst = std::max(worst, (M - M.transpose()).cwiseAbs().maxCoeff() /
                                  std::max(1.0, M.cwiseAbs().maxCoeff()));
    }
    CHECK(worst < 1e-10);

    spec.a(0, 2) = 3.0; // break the balance
    REQUIRE_FALSE(spec.detailed_balance());
    double asym = 0.0;
    for (int k = 0; k < 100; ++k) {
      const Vec c = testutil::random_state(rng, 2, 0.5, 2.0);
      const Mat M = skt_mobility(c, spec);
      asym = std::max(asym, (M - M.transpose()).cwiseAbs().maxCoeff());
    }
    CHECK(asym > 1e-3);
  }
}

TEST_CASE("SKT coercivity of the dissipation form") {
  // sampled epsilon for  v.(D^2h A v) >= eps sum_i pi_i s c_i^{s-2} a_i0 v_i^2
  for (double s : {1.0, 1.5, 2.0}) {
    const SktSpec spec = balanced_spec(s);
    std::mt19937_64 rng(47);
    double eps = std::numeric_limits<double>::infinity();
    for (int k = 0; k < 5000; ++k) {
      const Vec c = testutil::random_state(rng, 2, 0.1, 4.0);
      const Vec v = testutil::random_state(rng, 2, -1.0, 1.0);
      const Mat Q = skt_diffusion_matrix(c, spec); // A
      const Vec d = skt_entropy_hessian_diag(c, spec);
      const double num = v.dot(d.asDiagonal() * (Q * v));
      double den = 0.0;
      for (int i = 0; i < 2; ++i)
        den += spec.pi[i] * spec.s * std::pow(c[i], s - 2.0) * spec.a(i, 0) * v[i] * v[i];
      if (den > 1e-14) eps = std::min(eps, num / den);
    }
    INFO("s = " << s << ", sampled eps = " << eps);
    CHECK(eps > 0.0);
  }
}

TEST_CASE("dissipation density is nonnegative under detailed balance") {
  for (double s : {1.0, 2.0}) {
    const SktSpec spec = balanced_spec(s);
    std::mt19937_64 rng(53);
    for (int k = 0; k < 2000; ++k) {
      const Vec c = testutil::random_state(rng, 2, 0.1, 4.0);
      const Vec g = testutil::random_state(rng, 2, -2.0, 2.0);
      CHECK(skt_dissipation_density(c, g, spec) >= -1e-12);
    }
  }
}

TEST_CASE("SKT entropy decays along the finite-volume flow") {
  for (double s : {1.0, 2.0}) {
    const SktSpec spec = balanced_spec(s);
    const int J = 64;
    const double dx = 1.0 / J, dt = 5e-6, T = 0.01;
    Mat cells(J, 2);
    for (int j = 0; j < J; ++j) {
      const double x = (j + 0.5) * dx;
      cells(j, 0) = 1.0 + 0.4 * std::cos(2.0 * M_PI * x);
      cells(j, 1) = 1.0 + 0.3 * std::cos(4.0 * M_PI * x);
    }
    const double mass0 = cells.col(0).sum() * dx;
    auto total_entropy = [&]() {
      double H = 0.0;
      for (int j = 0; j < J; ++j) H += skt_entropy(cells.row(j).transpose(), spec) * dx;
      return H;
    };
    double H_prev = total_entropy();
    for (int k = 0; k < static_cast<int>(T / dt); ++k) {
      skt_step(cells, dx, dt, spec);
      const double H = total_entropy();
      CHECK(H <= H_prev + 1e-10);
      H_prev = H;
    }
    CHECK(cells.col(0).sum() * dx == Approx(mass0).epsilon(1e-12));
    CHECK(cells.minCoeff() > 0.0);
  }
}
