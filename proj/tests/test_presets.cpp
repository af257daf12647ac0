#include <gtest/gtest.h>

#include <cmath>

#include "weyl/model.hpp"
#include "weyl/presets.hpp"
#include "weyl/rng.hpp"
#include "weyl/sampling.hpp"

using namespace weyl;
using V = std::vector<double>;

TEST(Dyson, ForceAndAssumptions) {
  const auto d = dyson(2, 2.0);
  const auto G = singular_force(d.model, d.rs, 0, V{1, -1});
  EXPECT_NEAR(G[0], 0.5, 1e-15);
  EXPECT_NEAR(G[1], -0.5, 1e-15);
  EXPECT_THROW(dyson(3, 0.0), std::invalid_argument);
  const auto d3 = dyson(4, 1.0);
  CheckGrid g;
  EXPECT_EQ(check_positivity(d3.model, d3.rs, g).verdict, Verdict::Pass);
  EXPECT_EQ(check_force_monotone(d3.model, d3.rs, g).verdict, Verdict::Pass);
  EXPECT_EQ(check_force_l1_dissipative(d3.model, d3.rs, g).verdict, Verdict::Pass);
}

TEST(LogRootBarrier, TimeDependentStrength) {
  const auto s = log_root_barrier(
      RootSystem(RootType::B, 3), [](double t, const Root& a) { return 1.0 + t + (a.is_pair() ? 0 : 1); },
      [](double, std::span<const double>, int) { return 1.0; },
      [](double, std::span<const double>, int) { return 0.0; });
  EXPECT_DOUBLE_EQ(s.model.k(0.5, V{3, 2, 1}, Root::shortroot(0)), 2.5);
  EXPECT_EQ(check_positivity(s.model, s.rs, CheckGrid{}).verdict, Verdict::Pass);
}

TEST(Wishart, ThresholdsExample) {
  const WishartParams p{.n = 3, .beta = 1, .delta = 3, .gamma = 0.5, .theta0 = 0.5, .theta_plus = 1};
  const auto c = wishart_thresholds(p);
  ASSERT_EQ(c.size(), 3u);
  for (double v : c) EXPECT_NEAR(v, 0.5, 1e-15);
  EXPECT_NO_THROW(beta_wishart(p));
}

TEST(Wishart, AutoThetas) {
  const auto p = resolve_wishart_thetas({.n = 3, .beta = 0.5, .delta = 1.5, .gamma = 0.5});
  EXPECT_DOUBLE_EQ(*p.theta_plus, 0.5);
  EXPECT_DOUBLE_EQ(*p.theta0, 0.25);
  for (double c : wishart_thresholds(p)) EXPECT_NEAR(c, 0.25, 1e-15);
}

TEST(Wishart, RejectsAtAndBelowThreshold) {
  try {
    beta_wishart({.n = 3, .beta = 0.5, .delta = 1.0, .gamma = 0.5});
    FAIL() << "delta = beta (N - 1) accepted";
  } catch (const WishartParameterError& e) {
    EXPECT_GE(e.r, 1);
    EXPECT_LE(e.r, 3);
  }
  try {
    beta_wishart({.n = 3, .beta = 0.5, .delta = 0.9, .gamma = 0.5});
    FAIL() << "delta below the threshold accepted";
  } catch (const WishartParameterError& e) {
    EXPECT_EQ(e.r, 1);
    EXPECT_LT(e.value, 0.0);
  }
  // explicit thetas violating one threshold only
  try {
    beta_wishart({.n = 3, .beta = 1, .delta = 3, .gamma = 0, .theta0 = 0.5, .theta_plus = 1.6});
    FAIL();
  } catch (const WishartParameterError& e) {
    EXPECT_EQ(e.r, 2);
  }
  EXPECT_THROW(beta_wishart({.n = 2, .beta = 1, .delta = 3, .gamma = 0, .theta0 = 0.5}),
               std::invalid_argument);
}

TEST(Wishart, InteriorDriftIdentity) {
  Stream rng(5);
  for (int n : {2, 3, 5}) {
    const WishartParams p{.n = n, .beta = 0.7, .delta = 0.7 * n + 0.4, .gamma = 0.3};
    const auto s = beta_wishart(p);
    for (int k = 0; k < 50; ++k) {
      const auto x = random_chamber_point(s.rs, rng, 2.0);
      EXPECT_LE(wishart_interior_residual(s, p, x), 1e-12);
    }
  }
}

TEST(Wishart, DifferentThetasSameInteriorDynamics) {
  Stream rng(6);
  WishartParams a{.n = 3, .beta = 1, .delta = 3, .gamma = 0.5, .theta0 = 0.5, .theta_plus = 1};
  WishartParams b = a;
  b.theta0 = 0.2;
  b.theta_plus = 0.9;
  const auto sa = beta_wishart(a), sb = beta_wishart(b);
  for (int k = 0; k < 50; ++k) {
    const auto x = random_chamber_point(sa.rs, rng, 2.0);
    const auto Ga = singular_force(sa.model, sa.rs, 0, x), Gb = singular_force(sb.model, sb.rs, 0, x);
    for (int i = 0; i < 3; ++i)
      EXPECT_NEAR(sa.model.drift(0, x, i) + Ga[i], sb.model.drift(0, x, i) + Gb[i], 1e-12);
  }
}

TEST(Wishart, GammaZeroIsSquaredBesselSystem) {
  const WishartParams p{.n = 1, .beta = 1, .delta = 2.5, .gamma = 0};
  const auto s = beta_wishart(p);
  const V x{1.7};
  EXPECT_NEAR(s.model.drift(0, x, 0) + singular_force(s.model, s.rs, 0, x)[0], 2.5, 1e-14);
  EXPECT_DOUBLE_EQ(s.model.sigma(0, x, 0), 2 * std::sqrt(1.7));
}

TEST(Wishart, PairSumCancels) {
  Stream rng(7);
  const V x = random_chamber_point(RootSystem(RootType::B, 6), rng, 3.0);
  double s = 0;
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j)
      if (i != j) s += (x[i] + x[j]) / (x[i] - x[j]);
  EXPECT_NEAR(s, 0.0, 1e-12);
}

TEST(Wishart, AutoThetaPassesDegenerateChecks) {
  const auto s = beta_wishart({.n = 3, .beta = 0.5, .delta = 1.5, .gamma = 0.5});
  const auto reps = run_checks(s.model, s.rs, {"C1", "C2", "D1", "D2", "D3", "G1"}, CheckGrid{});
  for (const auto& r : reps) EXPECT_EQ(r.verdict, Verdict::Pass) << r.id << ": " << r.witness << " " << r.detail;
}

TEST(AbsSquaredBessel, DominanceAndZeroBlocks) {
  const auto s = abs_squared_bessel_A(3, 1.2, 2.0, 0.5);
  const auto d1 = check_dominance(s.model, s.rs, CheckGrid{});
  EXPECT_EQ(d1.verdict, Verdict::Pass);
  EXPECT_NEAR(d1.margin, 1.2 / 4, 1e-12);
  // cut detectors see zero drift by symmetry
  const V x{1.5, 0.4, 0.4};
  const auto f = *face_signature(s.rs, x);
  const auto cut = cut_detector(f, 1, 2, 1);
  EXPECT_NEAR(detector_drift(s.model, s.rs, f, cut.direction, 0, x), 0.0, 1e-12);
  const auto d3 = check_nonsticky(s.model, s.rs, checker_faces(s.rs), CheckGrid{});
  EXPECT_EQ(d3.verdict, Verdict::Inconclusive) << d3.detail;
}

TEST(GMPair, SymmetryEnforced) {
  auto one = [](double, std::span<const double>, int) { return 1.0; };
  auto zero = [](double, std::span<const double>, int) { return 0.0; };
  EXPECT_THROW(gm_pair_system(3, one, zero, [](double, double x, double y) { return x; }),
               std::invalid_argument);
  const auto s = gm_pair_system(3, one, zero, [](double, double, double) { return 1.0; });
  const auto c = constant_repulsion(RootType::A, 3, 1.0);
  const V x{2, 0.5, -1};
  EXPECT_EQ(singular_force(s.model, s.rs, 0, x), singular_force(c.model, c.rs, 0, x));
  EXPECT_EQ(check_sigma_compat(s.model, s.rs, CheckGrid{}).verdict, Verdict::Pass);
}

TEST(GMPair, DominanceEstimateMatchesGridOracle) {
  auto sig = [](double, std::span<const double> x, int i) { return std::sqrt(1 + x[i] * x[i]); };
  auto zero = [](double, std::span<const double>, int) { return 0.0; };
  const auto s = gm_pair_system(2, sig, zero, [](double, double x, double y) { return 1 + x * x + y * y; });
  // k / a on the wall x1 = x2 = c is (1 + 2c^2) / (2 + 2c^2) >= 1/2
  const auto r = check_dominance(s.model, s.rs, CheckGrid{});
  EXPECT_EQ(r.verdict, Verdict::Pass);
  EXPECT_GE(r.margin, 0.5 - 1e-6);
  EXPECT_LE(r.margin, 0.6);
}

TEST(Bridge, GrowthBeforeTerminalAndRadialDrift) {
  const auto s = bridge_B(3, 2.0);
  CheckGrid g;
  for (double T0 : {0.5, 1.5, 1.99}) {
    g.T = T0;
    EXPECT_EQ(check_growth(s.model, s.rs, g).verdict, Verdict::Pass);
  }
  const V x{3, 2, 1};
  double radial = 0, r2 = 0;
  for (int i = 0; i < 3; ++i) {
    radial += x[i] * s.model.drift(1.0, x, i);
    r2 += x[i] * x[i];
  }
  EXPECT_NEAR(radial, -r2 / 1.0, 1e-12);
  const auto a = bridge_A(3, 2.0);
  EXPECT_NEAR(a.model.drift(0, x, 0), -1.5, 1e-15);
  EXPECT_DOUBLE_EQ(a.model.k(0, x, Root::minus(0, 1)), 1.0);
}

TEST(Bessel, DimensionAndIndex) {
  EXPECT_DOUBLE_EQ(bessel_dimension(1.0), 3.0);
  EXPECT_DOUBLE_EQ(bessel_dimension(0.5), 2.0);
  EXPECT_DOUBLE_EQ(bessel_index(1.0), 0.5);
  const auto s = bessel_rank1(1.0);
  EXPECT_EQ(s.rs.type(), RootType::B);
  EXPECT_EQ(s.rs.size(), 1u);
}

TEST(MeanFieldSystem, Scaling) {
  const auto s = meanfield_system(RootType::A, 4, dyson_meanfield_coefficients(2.0));
  const V x{3, 1, 0, -2};
  EXPECT_DOUBLE_EQ(s.model.k(0, x, Root::minus(0, 1)), 0.5);
  EXPECT_DOUBLE_EQ(s.model.sigma(0, x, 2), 0.5);
  const auto one = meanfield_system(RootType::A, 1, dyson_meanfield_coefficients(2.0));
  EXPECT_EQ(one.rs.size(), 0u);
  MeanFieldCoefficients c{[](double, double) { return 1.0; }, [](double, double) { return 0.0; },
                          [](double, double x, double y) { return x + y; },
                          [](double, double x) { return 3.0 + x; }};
  const auto b = meanfield_system(RootType::B, 4, c);
  EXPECT_DOUBLE_EQ(b.model.k(0, x, Root::shortroot(1)), 4.0);  // not scaled
  const auto d = meanfield_system(RootType::D, 3, c);
  EXPECT_DOUBLE_EQ(d.model.k(0, V{3, 2, -1}, Root::plus(1, 2)), 1.0);  // |x_N| in the argument
}
