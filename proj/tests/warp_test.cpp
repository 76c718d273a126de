#include <gtest/gtest.h>

#include <random>

#include "support.hpp"

using namespace dwta;
using dwta::testing::make_frame;
using dwta::testing::random_frame;

TEST(Warp, ZeroFlowIsExact) {
  const auto f = random_frame(23, 17, 3, 1);
  const auto r = warp_backward(f, FlowField(23, 17));
  EXPECT_EQ(r.frame, f);
  for (auto v : r.validity.values) EXPECT_EQ(v, 1.0f);
}

TEST(Warp, RampShiftsByOneStep) {
  const int W = 16;
  const auto ramp = make_frame(W, 4, 1, [&](int x, int, int) { return x / double(W - 1); });
  const auto r = warp_backward(ramp, FlowField::constant(W, 4, 1.0f, 0.0f));
  for (int y = 0; y < 4; ++y)
    for (int x = 0; x < W - 1; ++x) EXPECT_NEAR(r.frame.at(x, y) - ramp.at(x, y), 1.0 / (W - 1), 1e-6);
  for (int y = 0; y < 4; ++y) EXPECT_EQ(r.validity.at(W - 1, y), 0.0f);
}

TEST(Warp, FullyOutOfBounds) {
  const int W = 10, H = 6;
  const auto f = random_frame(W, H, 3, 4);
  const auto r = warp_backward(f, FlowField::constant(W, H, float(W), 0.0f));
  for (auto v : r.validity.values) EXPECT_EQ(v, 0.0f);
  for (int c = 0; c < 3; ++c)
    for (int y = 0; y < H; ++y)
      for (int x = 0; x < W; ++x) EXPECT_EQ(r.frame.at(x, y, c), f.at(W - 1, y, c));
}

TEST(Warp, RangePreservedAndMaskMatchesBruteForce) {
  std::mt19937 rng(9);
  std::uniform_real_distribution<float> d(-8.0f, 8.0f);
  for (std::uint32_t seed = 0; seed < 10; ++seed) {
    const int W = 20, H = 14;
    const auto f = random_frame(W, H, 3, seed, 0.2, 0.7);
    std::vector<float> vec(W * H * 2);
    for (auto& v : vec) v = d(rng);
    const auto flow = FlowField::from_vectors(W, H, vec);
    const auto r = warp_backward(f, flow);
    const auto [lo, hi] = std::minmax_element(f.samples().begin(), f.samples().end());
    for (auto v : r.frame.samples()) {
      EXPECT_GE(v, *lo);
      EXPECT_LE(v, *hi);
    }
    for (int y = 0; y < H; ++y)
      for (int x = 0; x < W; ++x) {
        const double sx = x + double(flow.u(x, y)), sy = y + double(flow.v(x, y));
        const bool inside = sx >= 0 && sx <= W - 1 && sy >= 0 && sy <= H - 1;
        EXPECT_EQ(r.validity.at(x, y), inside ? 1.0f : 0.0f);
      }
  }
}

TEST(Warp, BilinearMidpoint) {
  const auto f = Frame::from_samples(2, 2, 1, {0.0f, 1.0f, 0.5f, 0.25f});
  const auto r = warp_backward(f, FlowField::constant(2, 2, 0.5f, 0.5f));
  EXPECT_NEAR(r.frame.at(0, 0), (0.0 + 1.0 + 0.5 + 0.25) / 4, 1e-7);
  EXPECT_EQ(r.validity.at(0, 0), 1.0f);
  EXPECT_EQ(r.validity.at(1, 1), 0.0f);
}

TEST(Warp, DimensionMismatch) {
  EXPECT_THROW(warp_backward(Frame(4, 4, 3), FlowField(5, 4)), ArgumentError);
}

TEST(Warp, PanningSceneOracle) {
  const auto frames = gen_scene(SceneKind::PanningTexture, 48, 40, 2, 5);
  const auto r = warp_backward(frames[0], FlowField::constant(48, 40, -2.0f, -1.0f));
  for (int c = 0; c < 3; ++c)
    for (int y = 2; y < 38; ++y)
      for (int x = 3; x < 45; ++x) EXPECT_NEAR(r.frame.at(x, y, c), frames[1].at(x, y, c), 1e-6);
}
