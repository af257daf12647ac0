#include <gtest/gtest.h>

#include <cmath>

#include "weyl/rng.hpp"

using namespace weyl;

TEST(Philox, KnownAnswerZero) {
  const auto w = philox4x32({0, 0, 0, 0}, {0, 0});
  EXPECT_EQ(w[0], 0x6627e8d5u);
  EXPECT_EQ(w[1], 0xe169c58du);
  EXPECT_EQ(w[2], 0xbc57ac4cu);
  EXPECT_EQ(w[3], 0x9b00dbd8u);
}

TEST(Philox, KnownAnswerOnes) {
  const auto w = philox4x32({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                            {0xffffffffu, 0xffffffffu});
  EXPECT_EQ(w[0], 0x408f276du);
  EXPECT_EQ(w[1], 0x41c83b0eu);
  EXPECT_EQ(w[2], 0xa20bc7c6u);
  EXPECT_EQ(w[3], 0x6d5451fdu);
}

TEST(CounterNormal, AddressedNotSequential) {
  CounterNormal g(7);
  const double a = g(3, 10, 1);
  g(0, 0, 0);
  EXPECT_EQ(a, g(3, 10, 1));
  EXPECT_NE(g(3, 10, 1), g(3, 11, 1));
  EXPECT_NE(g(3, 10, 1), g(4, 10, 1));
}

TEST(CounterNormal, Moments) {
  CounterNormal g(123);
  const int n = 200000;
  double s = 0, s2 = 0, s4 = 0;
  for (int k = 0; k < n; ++k) {
    const double z = g(k % 17, k / 17, k % 5);
    s += z;
    s2 += z * z;
    s4 += z * z * z * z;
  }
  EXPECT_NEAR(s / n, 0.0, 0.01);
  EXPECT_NEAR(s2 / n, 1.0, 0.015);
  EXPECT_NEAR(s4 / n, 3.0, 0.1);
}

TEST(Stream, UniformRangeAndMean) {
  Stream st(99, 4);
  double s = 0;
  for (int k = 0; k < 100000; ++k) {
    const double u = st.uniform();
    ASSERT_GT(u, 0.0);
    ASSERT_LT(u, 1.0);
    s += u;
  }
  EXPECT_NEAR(s / 100000, 0.5, 0.005);
  for (int k = 0; k < 1000; ++k) {
    const int i = st.index(5);
    ASSERT_GE(i, 0);
    ASSERT_LT(i, 5);
  }
}
