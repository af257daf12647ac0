#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "weyl/meanfield.hpp"
#include "weyl/rng.hpp"
#include "weyl/sampling.hpp"

using namespace weyl;
using V = std::vector<double>;

namespace {

MeanFieldCoefficients constant_coeffs(double sigma, double b, double k, double ks = 0.0) {
  MeanFieldCoefficients c;
  c.sigma = [sigma](double, double) { return sigma; };
  c.drift = [b](double, double) { return b; };
  c.k_pair = [k](double, double, double) { return k; };
  c.k_short = [ks](double, double) { return ks; };
  return c;
}

MeanFieldCoefficients varying_coeffs() {
  MeanFieldCoefficients c;
  c.sigma = [](double, double x) { return 1.0 + 0.3 * std::cos(x); };
  c.drift = [](double, double x) { return -0.5 * x; };
  c.k_pair = [](double, double x, double y) { return 1.0 + 0.1 * (x * x + y * y); };
  c.k_short = [](double, double x) { return 0.7 + 0.1 * x * x; };
  return c;
}

EmpiricalMeasure measure(V atoms) {
  EmpiricalMeasure mu;
  mu.weight = 1.0 / double(atoms.size());
  mu.atoms = std::move(atoms);
  return mu;
}

}  // namespace

TEST(Empirical, Examples) {
  const auto a = empirical(RootSystem(RootType::A, 3), V{2, 0, -1});
  EXPECT_EQ(a.atoms, (V{2, 0, -1}));
  EXPECT_DOUBLE_EQ(a.weight, 1.0 / 3);
  EXPECT_DOUBLE_EQ(a.integrate([](double x) { return x * x; }), 5.0 / 3);
  const RootSystem d3(RootType::D, 3);
  EXPECT_EQ(empirical(d3, V{3, 2, -1}).atoms, (V{3, 2}));
  EXPECT_EQ(empirical(d3, V{3, 2, -1}, DAtoms::Magnitudes).atoms, (V{3, 2, 1}));
}

TEST(DfOperators, Examples) {
  const auto sq = monomial(2), cube = monomial(3), lin = monomial(1);
  EXPECT_DOUBLE_EQ(D_f_minus(sq, 3.0, -1.0), 2.0);
  EXPECT_DOUBLE_EQ(D_f_minus(cube, 1.5, 1.5), 9.0);
  EXPECT_DOUBLE_EQ(D_f_minus(lin, 1.5, -7.0), 0.0);
  EXPECT_DOUBLE_EQ(D_f_plus(sq, 3.0, 1.0), 2.0);
  EXPECT_DOUBLE_EQ(D_f_plus(sq, 0.0, 0.0), 2.0);
  EXPECT_THROW(D_f_plus(sq, -1.0, 2.0), std::domain_error);
  EXPECT_THROW(D_f_plus(lin, 0.0, 0.0), std::domain_error);
  EXPECT_DOUBLE_EQ(D_f(RootType::A, sq, 3.0, 1.0), 2.0);
  EXPECT_DOUBLE_EQ(D_f(RootType::B, sq, 3.0, 1.0), 4.0);
  EXPECT_DOUBLE_EQ(D_f(RootType::D, sq, 3.0, 1.0), 4.0);
  // x^4: 4(x^2 + xy + y^2)
  EXPECT_NEAR(D_f_minus(monomial(4), 2.0, -1.0), 4.0 * (4 - 2 + 1), 1e-12);
}

TEST(DfOperators, SymmetricAndContinuousOnDiagonal) {
  Stream rng(3);
  for (int p = 1; p <= 4; ++p) {
    const auto f = monomial(p);
    for (int t = 0; t < 20; ++t) {
      const double x = rng.uniform(0.1, 3), y = rng.uniform(0.1, 3);
      EXPECT_NEAR(D_f_minus(f, x, y), D_f_minus(f, y, x), 1e-12);
      EXPECT_NEAR(D_f_plus(f, x, y), D_f_plus(f, y, x), 1e-12);
      EXPECT_NEAR(D_f_minus(f, x, x + 1e-7), D_f_minus(f, x, x), 1e-5);
    }
  }
}

TEST(LimitRhs, Examples) {
  const double beta = 1.7;
  const auto c = constant_coeffs(1.0, 0.0, beta);
  Stream rng(5);
  V atoms(9);
  for (auto& v : atoms) v = rng.normal();
  double mean = 0;
  for (double v : atoms) mean += v / 9;
  for (auto& v : atoms) v -= mean;
  const auto mu = measure(atoms);
  double m2 = 0;
  for (double v : atoms) m2 += v * v / 9;
  EXPECT_NEAR(limit_rhs(RootType::A, mu, monomial(1), 0, c), 0.0, 1e-12);
  EXPECT_NEAR(limit_rhs(RootType::A, mu, monomial(2), 0, c), beta, 1e-12);
  EXPECT_NEAR(limit_rhs(RootType::A, mu, monomial(4), 0, c), 4 * beta * m2, 1e-10);
  // drift only
  const auto cb = constant_coeffs(1.0, 2.0, 0.0);
  EXPECT_NEAR(limit_rhs(RootType::A, measure(V{1, 3}), monomial(2), 0, cb), 2.0 * 2 * 2, 1e-12);
}

TEST(LimitRhs, ShortRootTermAtZero) {
  const auto c = constant_coeffs(1.0, 0.0, 0.0, 0.5);
  // x^2: k f'/x = 2k away from 0, k f''(0) = 2k at 0
  EXPECT_NEAR(limit_rhs(RootType::B, measure(V{0.0, 2.0}), monomial(2), 0, c), 1.0, 1e-14);
  EXPECT_NEAR(limit_rhs(RootType::D, measure(V{0.0, 2.0}), monomial(2), 0, c), 0.0, 1e-14);
}

TEST(LimitRhs, PermutationInvariant) {
  const auto c = varying_coeffs();
  Stream rng(9);
  V atoms(7);
  for (auto& v : atoms) v = rng.uniform(0.1, 2);
  for (auto type : {RootType::A, RootType::B}) {
    for (int p = 2; p <= 4; p += 2) {
      const double ref = limit_rhs(type, measure(atoms), monomial(p), 0.3, c);
      V perm = atoms;
      for (int k = 0; k < 5; ++k) {
        std::next_permutation(perm.begin(), perm.end());
        EXPECT_NEAR(limit_rhs(type, measure(perm), monomial(p), 0.3, c), ref, 1e-12 * (1 + std::abs(ref)));
      }
    }
  }
}

// generator minus limit = (1/2N) <mu, sigma^2 f''> - (1/2N^2) sum_i k(x_i,x_i) D_f(x_i,x_i)
TEST(FiniteGenerator, OneOverNBookkeeping) {
  const auto c = varying_coeffs();
  Stream rng(21);
  for (auto type : {RootType::A, RootType::B}) {
    for (int n : {5, 12, 40}) {
      const auto sys = meanfield_system(type, n, c);
      const auto x = random_chamber_point(sys.rs, rng);
      const auto mu = empirical(sys.rs, x);
      for (const auto& f : default_test_functions(type)) {
        const double gen = finite_generator(sys, x, f, 0.0);
        const double lim = limit_rhs(type, mu, f, 0.0, c);
        double diff = 0;
        for (double v : x) {
          const double s = c.sigma(0, v);
          diff += s * s * f.d2f(v) / (2.0 * n * n);
          diff -= c.k_pair(0, v, v) * D_f(type, f, v, v) / (2.0 * n * n);
        }
        EXPECT_NEAR(gen - lim, diff, 1e-9 * (1 + std::abs(gen))) << to_string(type) << n << f.name;
      }
    }
  }
}

TEST(DysonReference, Examples) {
  auto m = dyson_moment_reference(1.0, 0.0, 0.0, 1.0);
  EXPECT_DOUBLE_EQ(m.m1, 0.0);
  EXPECT_DOUBLE_EQ(m.m2, 1.0);
  EXPECT_DOUBLE_EQ(m.m4, 2.0);
  m = dyson_moment_reference(2.0, 0.5, 0.7, 0.0, 0.3);
  EXPECT_DOUBLE_EQ(m.m1, 0.3);
  EXPECT_DOUBLE_EQ(m.m2, 0.5);
  EXPECT_DOUBLE_EQ(m.m4, 0.7);
  m = dyson_moment_reference(0.0, 0.5, 0.7, 3.0);
  EXPECT_DOUBLE_EQ(m.m2, 0.5);
  EXPECT_DOUBLE_EQ(m.m4, 0.7);
  m = dyson_moment_reference(1.5, 0.4, 0.3, 2.0);
  EXPECT_NEAR(m.m4, 0.3 + 4 * 1.5 * 0.4 * 2 + 2 * 1.5 * 1.5 * 4, 1e-12);
}

TEST(ResidualCheck, DeterministicTranslationIsExact) {
  // sigma = k = 0, b = 1: every atom moves at unit speed
  const auto c = constant_coeffs(0.0, 1.0, 0.0);
  Trajectory tr;
  tr.n = 3;
  for (int r = 0; r <= 40; ++r) {
    const double t = 0.01 * r;
    tr.times.push_back(t);
    for (double v : {1.0, 0.0, -2.0}) tr.states.push_back(v + t);
  }
  const RootSystem rs(RootType::A, 3);
  const auto st = residual_check(rs, {tr, tr}, {monomial(1), monomial(2)}, c, 5);
  for (const auto& s : st) {
    EXPECT_NEAR(s.mean, 0.0, 1e-10) << s.name;
    EXPECT_NEAR(s.sd, 0.0, 1e-10);
    EXPECT_EQ(s.per_path.size(), 2u);
    EXPECT_EQ(s.samples, 7);
  }
  EXPECT_THROW(residual_check(rs, {tr}, {monomial(1)}, c, 0), std::invalid_argument);
}

TEST(ResidualCheck, DysonSecondMomentUnbiased) {
  const double beta = 1.0;
  const auto c = dyson_meanfield_coefficients(beta);
  const auto sys = meanfield_system(RootType::A, 30, c);
  SimConfig cfg;
  cfg.T = 0.5;
  cfg.dt = 1e-3;
  cfg.seed = 17;
  cfg.record_stride = 5;
  V x0(30);
  for (int i = 0; i < 30; ++i) x0[i] = 1.5 - 0.1 * i;
  const auto paths = simulate_ensemble(sys.model, sys.rs, x0, cfg, 16, 0);
  const auto st = residual_check(sys.rs, paths, {monomial(2)}, c, 4);
  ASSERT_EQ(st.size(), 1u);
  EXPECT_LE(std::abs(st[0].mean), 3 * st[0].sd / std::sqrt(16.0) + 0.05);
}
