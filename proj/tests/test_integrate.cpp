#include <gtest/gtest.h>

#include <cmath>

#include "weyl/integrate.hpp"
#include "weyl/presets.hpp"
#include "weyl/sympoly.hpp"

using namespace weyl;
using V = std::vector<double>;

TEST(SimConfig, Validation) {
  SimConfig c;
  EXPECT_NO_THROW(c.validate());
  c.dt = 0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c.dt = -1e-3;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = SimConfig{};
  c.T = c.dt / 2;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = SimConfig{};
  c.kappa = 1.5;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = SimConfig{};
  c.record_stride = 0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  EXPECT_EQ(parse_scheme("both"), Scheme::Both);
  EXPECT_THROW(parse_scheme("milstein"), std::invalid_argument);
}

TEST(StepDirect, Examples) {
  SimConfig cfg;
  cfg.dt = 0.01;
  const V zero_dw{0, 0};
  const auto z = zero_model();
  const RootSystem a2(RootType::A, 2);
  EXPECT_EQ(step_direct(z, a2, 0, V{1, -1}, zero_dw, cfg), (V{1, -1}));

  const auto b = bessel_rank1(1.0);
  const auto y = step_direct(b.model, b.rs, 0, V{1.0}, V{0.0}, cfg);
  EXPECT_NEAR(y[0], 1.01, 1e-15);

  auto d = constant_repulsion(RootType::A, 2, 1.0);
  const auto yd = step_direct(d.model, d.rs, 0, V{1, -1}, zero_dw, cfg);
  EXPECT_NEAR(yd[0], 1.005, 1e-15);
  EXPECT_NEAR(yd[1], -1.005, 1e-15);
}

TEST(StepDirect, CapPreventsDriftCrossing) {
  SimConfig cfg;
  cfg.dt = 0.1;
  const auto b = bessel_rank1(5.0);
  StepStats st;
  // uncapped drift would add 5 / 1e-3 * 0.1 = 500
  const auto y = step_direct(b.model, b.rs, 0, V{1e-3}, V{0.0}, cfg, &st);
  EXPECT_NEAR(y[0], 1e-3 * (1 + cfg.kappa), 1e-15);
  EXPECT_EQ(st.cap_activations, 1u);
}

TEST(StepDirect, ProjectionBackIntoChamber) {
  SimConfig cfg;
  const auto s = constant_repulsion(RootType::B, 2, 0.1);
  StepStats st;
  const auto y = step_direct(s.model, s.rs, 0, V{1.0, 0.01}, V{0.0, -0.5}, cfg, &st);
  EXPECT_TRUE(st.projected);
  EXPECT_TRUE(chamber_contains(s.rs, y, true));
  EXPECT_GT(y[1], 0);
}

TEST(StepInvariant, Examples) {
  SimConfig cfg;
  cfg.dt = 0.01;
  const RootSystem b3(RootType::B, 3);
  const auto u = w_map(b3, V{3, 2, 1}).u;
  EXPECT_EQ(step_invariant(zero_model(), b3, 0, u, V{0.3, -0.1, 0.2}, cfg), u);

  // N = 1 in type A: Euler on the particle itself
  auto m = zero_model();
  m.sigma = [](double, std::span<const double> x, int) { return 1 + x[0] * x[0]; };
  m.drift = [](double, std::span<const double> x, int) { return -x[0]; };
  const RootSystem a1(RootType::A, 1);
  const auto v = step_invariant(m, a1, 0, V{0.5}, V{0.2}, cfg);
  EXPECT_NEAR(v[0], 0.5 + 1.25 * 0.2 - 0.5 * 0.01, 1e-15);
}

TEST(Simulate, ZeroModelConstantPath) {
  SimConfig cfg;
  cfg.T = 0.1;
  for (auto sch : {Scheme::Direct, Scheme::Invariant, Scheme::Both}) {
    cfg.scheme = sch;
    const RootSystem rs(RootType::A, 3);
    const auto tr = simulate(zero_model(), rs, V{2, 1, -1}, cfg);
    EXPECT_EQ(tr.size(), 101u);
    for (std::size_t r = 0; r < tr.size(); ++r) {
      for (int i = 0; i < 3; ++i) EXPECT_NEAR(tr.state(r)[i], (V{2, 1, -1})[i], 1e-12);
    }
  }
}

TEST(Simulate, ChamberAccumulatorsAndDeterminism) {
  SimConfig cfg;
  cfg.T = 0.5;
  cfg.dt = 1e-3;
  cfg.seed = 77;
  cfg.scheme = Scheme::Both;
  cfg.record_stride = 5;
  for (auto type : {RootType::A, RootType::B, RootType::D}) {
    const auto s = constant_repulsion(type, 4, 0.8);
    const V x0 = type == RootType::D ? V{3, 2, 1, -0.5} : V{3, 2, 1, 0.5};
    const auto tr = simulate(s.model, s.rs, x0, cfg, 3);
    const auto again = simulate(s.model, s.rs, x0, cfg, 3);
    EXPECT_EQ(tr.states, again.states);
    EXPECT_EQ(tr.shadow, again.shadow);
    EXPECT_EQ(tr.accumulators, again.accumulators);
    EXPECT_FALSE(tr.events.exploded);
    for (std::size_t r = 0; r < tr.size(); ++r) {
      EXPECT_TRUE(chamber_contains(s.rs, tr.state(r), true));
      EXPECT_TRUE(chamber_contains(s.rs, tr.shadow_state(r), true));
      if (r > 0)
        for (int q = 0; q < tr.n_roots; ++q) EXPECT_GE(tr.accumulator(r)[q], tr.accumulator(r - 1)[q]);
    }
    for (int q = 0; q < tr.n_roots; ++q) EXPECT_LT(tr.accumulator(tr.size() - 1)[q], 1e6);
  }
}

TEST(Simulate, RejectsBadStart) {
  SimConfig cfg;
  const auto d = dyson(3, 1.0);
  EXPECT_THROW(simulate(d.model, d.rs, V{1, 2, 3}, cfg), std::invalid_argument);
  EXPECT_THROW(simulate(d.model, d.rs, V{1, 2}, cfg), std::invalid_argument);
  const auto br = bridge_A(2, 0.5);
  EXPECT_THROW(simulate(br.model, br.rs, V{1, 0}, cfg), std::invalid_argument);
}

TEST(Simulate, BridgeCollapses) {
  const auto br = bridge_A(3, 1.0);
  SimConfig cfg;
  cfg.dt = 1e-3;
  cfg.T = 1.0 - cfg.dt;
  for (std::uint64_t m = 0; m < 20; ++m) {
    const auto tr = simulate(br.model, br.rs, V{1, 0, -1}, cfg, m);
    const auto last = tr.state(tr.size() - 1);
    for (double v : last) EXPECT_LE(std::abs(v), 5 * std::sqrt(cfg.dt) * 3);
  }
}

TEST(Simulate, DiffractionFromDiagonal) {
  const auto d = dyson(4, 1.0);
  SimConfig cfg;
  cfg.T = 0.01;
  for (std::uint64_t m = 0; m < 20; ++m) {
    const auto tr = simulate(d.model, d.rs, V{0, 0, 0, 0}, cfg, m);
    const auto x = tr.state(1);
    for (const auto& a : d.rs.roots()) EXPECT_GT(a.dot(x), 0.0);
  }
}

TEST(Ensemble, OrderIndependentAndMatchesSimulate) {
  const auto s = constant_repulsion(RootType::B, 3, 0.6);
  SimConfig cfg;
  cfg.T = 0.2;
  cfg.seed = 5;
  const V x0{2, 1, 0.5};
  const auto e1 = simulate_ensemble(s.model, s.rs, x0, cfg, 8, 1);
  const auto e4 = simulate_ensemble(s.model, s.rs, x0, cfg, 8, 4);
  for (int m = 0; m < 8; ++m) EXPECT_EQ(e1[m].states, e4[m].states);
  EXPECT_EQ(e1[0].states, simulate(s.model, s.rs, x0, cfg, 0).states);
  EXPECT_NE(e1[0].states, e1[1].states);
}

TEST(Ensemble, BesselSquaredMean) {
  const auto b = bessel_rank1(1.0);
  SimConfig cfg;
  cfg.dt = 1e-2;
  cfg.T = 1.0;
  cfg.seed = 2024;
  cfg.record_stride = 100;
  for (auto sch : {Scheme::Direct, Scheme::Invariant}) {
    cfg.scheme = sch;
    const auto ens = simulate_ensemble(b.model, b.rs, V{0.0}, cfg, 4000, 0);
    double s = 0;
    for (const auto& tr : ens) s += tr.state(tr.size() - 1)[0] * tr.state(tr.size() - 1)[0];
    EXPECT_NEAR(s / 4000, 3.0, 0.25) << to_string(sch);
  }
}

TEST(SharedNoise, ZeroModelHasNoDiscrepancy) {
  SimConfig cfg;
  cfg.dt = 1e-2;
  cfg.T = 0.2;
  const RootSystem rs(RootType::A, 3);
  const auto rep = shared_noise_compare(zero_model(), rs, V{1, 0, -1}, cfg, 2, 2);
  for (double d : rep.discrepancy) EXPECT_NEAR(d, 0.0, 1e-12);
}

TEST(SharedNoise, DiscrepancyShrinks) {
  const auto d = dyson(3, 2.0);
  SimConfig cfg;
  cfg.dt = 4e-3;
  cfg.T = 0.5;
  cfg.seed = 9;
  const auto rep = shared_noise_compare(d.model, d.rs, V{1.5, 0, -1.5}, cfg, 2, 8, 0);
  EXPECT_TRUE(rep.monotone());
  EXPECT_GT(rep.min_ratio(), 1.0);
}
