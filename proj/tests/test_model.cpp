#include <gtest/gtest.h>

#include <cmath>

#include "weyl/model.hpp"
#include "weyl/presets.hpp"
#include "weyl/rng.hpp"
#include "weyl/sampling.hpp"
#include "weyl/sympoly.hpp"

using namespace weyl;
using V = std::vector<double>;

TEST(SingularForce, Examples) {
  const auto d = dyson(2, 2.0);
  const auto G = singular_force(d.model, d.rs, 0.0, V{1, -1});
  EXPECT_NEAR(G[0], 0.5, 1e-15);
  EXPECT_NEAR(G[1], -0.5, 1e-15);
  const auto G2 = singular_force(d.model, d.rs, 0.0, V{1, -1}, 1e-12);
  EXPECT_EQ(G, G2);
  const auto b = bessel_rank1(1.3);
  EXPECT_NEAR(singular_force(b.model, b.rs, 0.0, V{2.0})[0], 1.3 / 2.0, 1e-15);
}

TEST(SingularForce, IndicatorDropsWallTerms) {
  const auto d = dyson(3, 2.0);
  const auto G = singular_force(d.model, d.rs, 0.0, V{1, 1, 0}, 1e-10);
  // only e1-e3 and e2-e3 contribute
  EXPECT_NEAR(G[0], 1.0, 1e-15);
  EXPECT_NEAR(G[1], 1.0, 1e-15);
  EXPECT_NEAR(G[2], -2.0, 1e-15);
}

TEST(SingularForce, WallProductStaysBounded) {
  const auto s = constant_repulsion(RootType::B, 3, 0.7);
  Stream rng(3);
  for (const auto& a : s.rs.roots()) {
    const auto y = random_wall_point(s.rs, a, rng);
    // the approach direction is fixed, so other roots vanishing on the same wall
    // shrink proportionally and the product converges
    const auto d = random_chamber_point(s.rs, rng);
    std::vector<double> prod;
    for (double gap : {1e-4, 1e-6, 1e-8}) {
      const double c = gap / a.dot(d);
      V x(3);
      for (int i = 0; i < 3; ++i) x[i] = y[i] + c * d[i];
      const auto G = singular_force(s.model, s.rs, 0.0, x);
      const double along = G.dot(a.dense(3)) / a.norm2();
      EXPECT_GT(std::abs(along), 0.1 / gap);
      prod.push_back(gap * along);
    }
    EXPECT_NEAR(prod[2], prod[1], 1e-3 * std::abs(prod[1])) << a.name();
  }
}

TEST(AAlpha, Examples) {
  const auto d = dyson(2, 1.0);
  EXPECT_DOUBLE_EQ(a_alpha(d.model, 0, V{1, 0}, Root::minus(0, 1)), 2.0);
  const auto w = beta_wishart({.n = 2, .beta = 1, .delta = 3, .gamma = 0});
  EXPECT_DOUBLE_EQ(a_alpha(w.model, 0, V{4, 1}, Root::minus(0, 1)), 20.0);
  auto m = zero_model();
  m.sigma = [](double, std::span<const double>, int) { return 3.0; };
  EXPECT_DOUBLE_EQ(a_alpha(m, 0, V{1, 0}, Root::shortroot(0)), 9.0);
}

TEST(DetectorDrift, Examples) {
  const auto d = dyson(3, 1.0);
  const double c = 0.8;
  const V x{c, c, 0};
  const auto face = *face_signature(d.rs, x);
  EXPECT_NEAR(detector_drift(d.model, d.rs, face, Root::minus(0, 1).dense(3), 0, x), 0.0, 1e-15);

  auto m = zero_model();
  m.drift = [](double, std::span<const double>, int i) { return double(i + 1); };
  const Eigen::Vector3d u(1, -1, 0);
  EXPECT_DOUBLE_EQ(detector_drift(m, d.rs, face, u, 0, x), 1.0 - 2.0);

  // Wishart: the whole configuration at zero, block-center detector
  const WishartParams p{.n = 3, .beta = 1, .delta = 3, .gamma = 0.5, .theta0 = 0.5, .theta_plus = 1};
  const auto w = beta_wishart(p);
  const V zero{0, 0, 0};
  const auto fz = *face_signature(w.rs, zero);
  const Eigen::Vector3d center(1.0 / 3, 1.0 / 3, 1.0 / 3);
  EXPECT_NEAR(detector_drift(w.model, w.rs, fz, center, 0, zero), wishart_thresholds(p)[2], 1e-14);
  EXPECT_NEAR(q_S_u(w.model, center, 0, zero), 0.0, 1e-15);
}

TEST(DetectorDrift, LocalizationViolation) {
  const auto d = dyson(3, 1.0);
  const auto face = *face_signature(d.rs, V{1, 1, 0});
  EXPECT_THROW(detector_drift(d.model, d.rs, face, Eigen::Vector3d(1, 0, -1), 0, V{1, 1, 1}),
               LocalizationError);
}

TEST(QSU, Examples) {
  const auto d = dyson(4, 1.0);
  Eigen::VectorXd u = Eigen::VectorXd::Zero(4);
  u[1] = 2;
  u[3] = -2;
  EXPECT_DOUBLE_EQ(q_S_u(d.model, u, 0, V{4, 3, 2, 1}), 8.0);
}

TEST(UCoeffs, FirstInvariantHasNoSingularPart) {
  const auto d = dyson(4, 1.5);
  const V x{2, 1, 0, -1.5};
  const auto c = u_sde_coeffs(d.model, d.rs, 0, x);
  for (int i = 0; i < 4; ++i) {
    EXPECT_DOUBLE_EQ(c.a(i, 0), 1.0);
    EXPECT_DOUBLE_EQ(c.h(i, 0), 0.0);
  }
  EXPECT_DOUBLE_EQ(c.Hk[0], 0.0);
  const auto z = zero_model();
  const auto cz = u_sde_coeffs(z, d.rs, 0, x);
  EXPECT_EQ(cz.h.cwiseAbs().maxCoeff(), 0.0);
}

namespace {

CoefficientModel generic_model() {
  CoefficientModel m;
  m.name = "generic";
  m.sigma = [](double t, std::span<const double> x, int i) { return 0.5 + 0.1 * i + 0.2 * std::sin(x[i] + t); };
  m.drift = [](double t, std::span<const double> x, int i) { return std::cos(x[i]) - 0.3 * i * t; };
  m.k = [](double, std::span<const double> x, const Root& a) {
    return 0.4 + 0.1 * a.i + 0.05 * a.dot(x) * a.dot(x);
  };
  return m;
}

// Ito drift of w_k(X) from finite differences of w_map.
Eigen::VectorXd ito_drift_fd(const CoefficientModel& m, const RootSystem& rs, double t, const V& x) {
  const int n = rs.dim();
  const auto G = singular_force(m, rs, t, x);
  const auto b = drift_vector(m, t, x);
  const auto s = sigma_vector(m, t, x);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(n);
  const double h = 1e-4;
  for (int i = 0; i < n; ++i) {
    V xp = x, xm = x;
    xp[i] += h;
    xm[i] -= h;
    const auto wp = w_map(rs, xp).u, wm = w_map(rs, xm).u, w0 = w_map(rs, x).u;
    for (int k = 0; k < n; ++k) {
      const double d1 = (wp[k] - wm[k]) / (2 * h);
      const double d2 = (wp[k] - 2 * w0[k] + wm[k]) / (h * h);
      out[k] += d1 * (b[i] + G[i]) + 0.5 * d2 * s[i] * s[i];
    }
  }
  return out;
}

}  // namespace

TEST(UCoeffs, DesingularizationMatchesItoDrift) {
  Stream rng(19);
  const auto m = generic_model();
  for (auto type : {RootType::A, RootType::B, RootType::D})
    for (int n = 2; n <= 5; ++n) {
      const RootSystem rs(type, n);
      for (int s = 0; s < 10; ++s) {
        const auto x = random_chamber_point(rs, rng, 0.8);
        const double t = rng.uniform();
        const auto c = u_sde_coeffs(m, rs, t, x);
        const auto want = ito_drift_fd(m, rs, t, x);
        const auto got = c.drift();
        for (int k = 0; k < n; ++k)
          EXPECT_NEAR(got[k], want[k], 1e-6 * (1 + std::abs(want[k])))
              << to_string(type) << n << " k=" << k + 1;
        // exact identity for the power-sum invariants
        const auto G = singular_force(m, rs, t, x);
        const auto b = drift_vector(m, t, x);
        const auto sg = sigma_vector(m, t, x);
        const int cols = type == RootType::D ? n - 1 : n;
        for (int k = 1; k <= cols; ++k) {
          const int deg = type == RootType::A ? k : 2 * k;
          double exact = 0;
          for (int i = 0; i < n; ++i)
            exact += std::pow(x[i], deg - 1) * (b[i] + G[i]) +
                     0.5 * (deg - 1) * std::pow(x[i], deg - 2) * sg[i] * sg[i];
          EXPECT_NEAR(got[k - 1], exact, 1e-8 * (1 + std::abs(exact)));
        }
      }
    }
}

TEST(UCoeffs, DiffusionMatchesGradient) {
  const auto m = generic_model();
  const RootSystem rs(RootType::D, 4);
  const V x{2.0, 1.2, 0.7, -0.3};
  const auto c = u_sde_coeffs(m, rs, 0.2, x);
  const double h = 1e-6;
  for (int i = 0; i < 4; ++i) {
    V xp = x, xm = x;
    xp[i] += h;
    xm[i] -= h;
    const auto wp = w_map(rs, xp).u, wm = w_map(rs, xm).u;
    for (int k = 0; k < 4; ++k)
      EXPECT_NEAR(c.a(i, k), (wp[k] - wm[k]) / (2 * h) * m.sigma(0.2, x, i), 1e-7);
  }
}

TEST(Checkers, DysonPassesAdvertised) {
  const auto d = dyson(3, 1.0);
  CheckGrid g;
  const auto reps = run_checks(d.model, d.rs, {"C1", "C2", "A1", "D1", "D2", "G1", "U3", "U3'"}, g);
  for (const auto& r : reps) EXPECT_EQ(r.verdict, Verdict::Pass) << r.id << " " << r.witness;
  EXPECT_NEAR(reps[3].margin, 0.25, 1e-12);  // k / a_alpha = (1/2) / 2
}

TEST(Checkers, ConstantKDominanceHalf) {
  const auto s = constant_repulsion(RootType::A, 3, 1.0);
  const auto r = check_dominance(s.model, s.rs, CheckGrid{});
  EXPECT_EQ(r.verdict, Verdict::Pass);
  EXPECT_NEAR(r.margin, 0.5, 1e-12);
}

TEST(Checkers, ZeroModelGrowth) {
  const auto z = zero_model();
  const RootSystem rs(RootType::B, 3);
  const auto r = check_growth(z, rs, CheckGrid{});
  EXPECT_EQ(r.verdict, Verdict::Pass);
  EXPECT_EQ(r.margin, 0.0);
}

TEST(Checkers, NegativeKFailsWithWitness) {
  auto m = constant_repulsion(RootType::A, 3, 1.0).model;
  m.k = [](double, std::span<const double> x, const Root&) { return x[0] - 0.5; };
  const RootSystem rs(RootType::A, 3);
  const auto r = check_nonnegativity(m, rs, CheckGrid{});
  EXPECT_EQ(r.verdict, Verdict::Fail);
  EXPECT_FALSE(r.witness.empty());
  const auto a = check_positivity(m, rs, CheckGrid{});
  EXPECT_EQ(a.verdict, Verdict::Fail);
  EXPECT_FALSE(a.witness.empty());
}

TEST(Checkers, SigmaIncompatibilityDetected) {
  auto m = constant_repulsion(RootType::A, 2, 1.0).model;
  m.sigma = [](double, std::span<const double>, int i) { return i == 0 ? 1.0 : 2.0; };
  const auto r = check_sigma_compat(m, RootSystem(RootType::A, 2), CheckGrid{});
  EXPECT_EQ(r.verdict, Verdict::Fail);
}

TEST(Checkers, Deterministic) {
  const auto s = abs_squared_bessel_A(3, 1.0, 2.0, 0.5);
  CheckGrid g;
  const auto a = run_checks(s.model, s.rs, all_check_ids(), g);
  const auto b = run_checks(s.model, s.rs, all_check_ids(), g);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t k = 0; k < a.size(); ++k) {
    EXPECT_EQ(a[k].verdict, b[k].verdict);
    EXPECT_EQ(a[k].witness, b[k].witness);
    if (std::isfinite(a[k].margin)) EXPECT_EQ(a[k].margin, b[k].margin);
  }
}

TEST(Checkers, HorizonBeyondValidityRejected) {
  const auto s = bridge_A(3, 1.0);
  CheckGrid g;
  g.T = 1.0;
  EXPECT_THROW(check_growth(s.model, s.rs, g), std::invalid_argument);
  g.T = 0.9;
  EXPECT_EQ(check_growth(s.model, s.rs, g).verdict, Verdict::Pass);
}
