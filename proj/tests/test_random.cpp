#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "pensiongame/random.hpp"

namespace rnd = pensiongame::random;

TEST(Philox, KnownAnswers) {
  using P = rnd::Philox4x32;
  EXPECT_EQ(P::generate({0, 0, 0, 0}, {0, 0}), (P::Counter{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8}));
  EXPECT_EQ(P::generate({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}),
            (P::Counter{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd}));
  EXPECT_EQ(P::generate({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}),
            (P::Counter{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1}));
}

TEST(Xoshiro, KnownAnswer) {
  rnd::Xoshiro256pp g({1, 2, 3, 4});
  EXPECT_EQ(g(), 41943041u);  // rotl(1 + 4, 23) + 1
}

TEST(Xoshiro, ZeroStateIsReplaced) {
  rnd::Xoshiro256pp g({0, 0, 0, 0});
  EXPECT_NE(g(), 0u);
}

TEST(Substream, DistinctAndReproducible) {
  EXPECT_EQ(rnd::substream_state(5, 9), rnd::substream_state(5, 9));
  EXPECT_NE(rnd::substream_state(5, 9), rnd::substream_state(5, 10));
  EXPECT_NE(rnd::substream_state(5, 9), rnd::substream_state(6, 9));
  EXPECT_NE(rnd::substream_state(0, 1ull << 32), rnd::substream_state(0, 0));
}

TEST(Uniform, OpenInterval) {
  EXPECT_GT(rnd::to_open_unit(0), 0.0);
  EXPECT_LT(rnd::to_open_unit(~0ull), 1.0);
  EXPECT_EQ(rnd::to_open_unit(~0ull), 0x1.fffffffffffffp-1);
  EXPECT_EQ(rnd::to_open_unit(0), 0x1.0p-54);
}

TEST(InverseNormal, KnownQuantiles) {
  EXPECT_EQ(rnd::inverse_normal_cdf(0.5), 0.0);
  EXPECT_NEAR(rnd::inverse_normal_cdf(0.975), 1.959963984540054, 1e-15);
  EXPECT_NEAR(rnd::inverse_normal_cdf(0.8413447460685429), 1.0, 1e-14);
  EXPECT_NEAR(rnd::inverse_normal_cdf(1e-10), -6.361340902404056, 1e-13);
  EXPECT_NEAR(rnd::inverse_normal_cdf(1e-300), -37.047096299361199, 1e-12);
}

TEST(InverseNormal, Symmetric) {
  // dyadic p so that 1 - p is exact
  for (double p : {0x1.0p-40, 0x1.0p-17, 0x1.0p-7, 0.25, 0.375, 0.4921875}) {
    EXPECT_NEAR(rnd::inverse_normal_cdf(p), -rnd::inverse_normal_cdf(1.0 - p), 1e-14) << p;
  }
}

TEST(InverseNormal, BlockMatchesScalar) {
  rnd::Xoshiro256pp g(rnd::substream_state(1, 2));
  std::vector<double> p(5000), z(5000);
  for (auto& u : p) u = rnd::to_open_unit(g());
  p[0] = 1e-300;
  p[1] = 1.0 - 1e-16;
  p[2] = 0.075;  // region boundary
  p[3] = 0.925;
  rnd::inverse_normal_cdf_block(p, z);
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double s = rnd::inverse_normal_cdf(p[i]);
    EXPECT_EQ(z[i], s) << p[i];
  }
}

TEST(NormalStream, FillMatchesNext) {
  rnd::NormalStream a(3, 4), b(3, 4);
  std::vector<double> buf(1000);
  b.fill(std::span<double>(buf.data(), 100));
  b.fill(std::span<double>(buf.data() + 100, 900));
  for (double v : buf) EXPECT_EQ(a.next(), v);
}

TEST(NormalStream, MomentsProperty) {
  rnd::NormalStream s(11, 0);
  const int n = 400000;
  double m1 = 0, m2 = 0, m4 = 0;
  for (int i = 0; i < n; ++i) {
    const double z = s.next();
    m1 += z;
    m2 += z * z;
    m4 += z * z * z * z;
  }
  m1 /= n;
  m2 /= n;
  m4 /= n;
  EXPECT_NEAR(m1, 0.0, 4.0 / std::sqrt(n));
  EXPECT_NEAR(m2, 1.0, 4.0 * std::sqrt(2.0 / n));
  EXPECT_NEAR(m4, 3.0, 4.0 * std::sqrt(96.0 / n));
}
