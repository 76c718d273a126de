#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "support.hpp"

using namespace dwta;
using dwta::testing::make_frame;
using dwta::testing::random_frame;

namespace {

// Brute-force oracle: best integer offset for one block, full search, same tie rules.
std::pair<int, int> brute_force_block(const Frame& prev, const Frame& curr, int x0, int y0, int b, int r) {
  const auto yp = luma(prev), yc = luma(curr);
  const int w = prev.width(), h = prev.height();
  double best = std::numeric_limits<double>::infinity();
  long best_mag = 0;
  std::pair<int, int> arg{0, 0};
  for (int v = -r; v <= r; ++v)
    for (int u = -r; u <= r; ++u) {
      double sad = 0.0;
      for (int y = y0; y < std::min(h, y0 + b); ++y)
        for (int x = x0; x < std::min(w, x0 + b); ++x) {
          const int sx = std::clamp(x + u, 0, w - 1), sy = std::clamp(y + v, 0, h - 1);
          sad += std::abs(static_cast<double>(yc.at(x, y)) - yp.at(sx, sy));
        }
      const long mag = u * u + v * v;
      if (sad < best || (sad == best && mag < best_mag)) {
        best = sad;
        best_mag = mag;
        arg = {u, v};
      }
    }
  return arg;
}

Frame textured(int w, int h, std::uint64_t seed) { return gen_scene(SceneKind::StaticTexture, w, h, 1, seed)[0]; }

// curr(x) = prev(x + dx), border replicated.
Frame shifted(const Frame& prev, int dx, int dy) {
  return make_frame(prev.width(), prev.height(), prev.channels(), [&](int x, int y, int c) {
    return prev.at(std::clamp(x + dx, 0, prev.width() - 1), std::clamp(y + dy, 0, prev.height() - 1), c);
  });
}

}  // namespace

TEST(Flow, IdenticalFramesGiveZero) {
  const auto f = textured(48, 40, 2);
  const auto flow = estimate_flow(f, f);
  for (float v : flow.vectors()) EXPECT_EQ(v, 0.0f);
}

TEST(Flow, FlatFramesGiveZero) {
  const Frame a(32, 32, 3, 0.3f), b(32, 32, 3, 0.3f);
  for (float v : estimate_flow(a, b).vectors()) EXPECT_EQ(v, 0.0f);
}

TEST(Flow, IntegerTranslationSingleLevel) {
  const auto prev = textured(64, 64, 4);
  const auto curr = shifted(prev, 3, 0);
  FlowParams p;
  p.levels = 1;
  p.radius = 4;
  const auto flow = estimate_flow(prev, curr, p);
  // The oracle confirms a unique minimum at (+3, 0) for interior blocks.
  for (int by = 1; by < 7; ++by)
    for (int bx = 1; bx < 6; ++bx) {
      const auto [u, v] = brute_force_block(prev, curr, bx * 8, by * 8, 8, 4);
      EXPECT_EQ(u, 3);
      EXPECT_EQ(v, 0);
    }
  for (int y = 12; y < 52; ++y)
    for (int x = 12; x < 44; ++x) {
      EXPECT_NEAR(flow.u(x, y), 3.0, 1e-6) << x << "," << y;
      EXPECT_NEAR(flow.v(x, y), 0.0, 1e-6);
    }
}

TEST(Flow, MatchesBruteForceOnSingleBlock) {
  // One block covering the frame: the dense field is that block's vector everywhere.
  FlowParams p;
  p.levels = 1;
  p.radius = 3;
  p.block = 8;
  for (std::uint32_t seed = 0; seed < 40; ++seed) {
    const auto prev = random_frame(8, 8, 3, seed), curr = random_frame(8, 8, 3, seed + 500);
    const auto [u, v] = brute_force_block(prev, curr, 0, 0, 8, 3);
    const auto flow = estimate_flow(prev, curr, p);
    for (int y = 0; y < 8; ++y)
      for (int x = 0; x < 8; ++x) {
        ASSERT_EQ(flow.u(x, y), u) << "seed " << seed;
        ASSERT_EQ(flow.v(x, y), v) << "seed " << seed;
      }
  }
}

TEST(Flow, CoarseToFineRecoversLargeMotion) {
  const auto prev = textured(96, 96, 9);
  const auto curr = shifted(prev, 10, -6);
  const auto flow = estimate_flow(prev, curr);  // 3 levels, radius 4: reach 4*(1+2+4)=28
  int good = 0, total = 0;
  for (int y = 20; y < 76; ++y)
    for (int x = 20; x < 76; ++x) {
      ++total;
      if (std::abs(flow.u(x, y) - 10.0f) <= 0.5f && std::abs(flow.v(x, y) + 6.0f) <= 0.5f) ++good;
    }
  EXPECT_GE(good, total * 95 / 100);
}

TEST(Flow, ZeroMotionRecoveryUnderNoise) {
  const auto clean = textured(64, 64, 1);
  DegradeParams dp;
  dp.gain = 1.0;
  dp.gamma = 1.0;
  dp.read_sigma = 0.02;
  dp.shot_k = 0.0;
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    dp.seed = seed;
    const auto a = degrade_frame(clean, dp, 0), b = degrade_frame(clean, dp, 1);
    const auto flow = estimate_flow(a, b);
    int ok = 0, n = 0;
    for (int y = 8; y < 56; ++y)
      for (int x = 8; x < 56; ++x) {
        ++n;
        if (std::hypot(flow.u(x, y), flow.v(x, y)) <= 0.5) ++ok;
      }
    EXPECT_GE(ok, n * 95 / 100) << "seed " << seed;
  }
}

TEST(Flow, Deterministic) {
  const auto a = random_frame(40, 33, 3, 1), b = random_frame(40, 33, 3, 2);
  FlowParams p;
  p.subpixel = true;
  EXPECT_EQ(estimate_flow(a, b, p), estimate_flow(a, b, p));
}

TEST(Flow, MagnitudeBounded) {
  const auto a = random_frame(16, 16, 1, 3), b = random_frame(16, 16, 1, 4);
  FlowParams p;
  p.radius = 12;
  const auto f = estimate_flow(a, b, p);
  for (std::size_t i = 0; i < f.vectors().size(); i += 2)
    EXPECT_LE(std::hypot(f.vectors()[i], f.vectors()[i + 1]), 16.0);
}

TEST(Flow, DimensionMismatch) {
  EXPECT_THROW(estimate_flow(Frame(8, 8, 3), Frame(9, 8, 3)), ArgumentError);
}

TEST(Flow, ParamValidation) {
  FlowParams p;
  p.block = 1;
  EXPECT_THROW(estimate_flow(Frame(8, 8, 3), Frame(8, 8, 3), p), ArgumentError);
  p = {};
  p.radius = 0;
  EXPECT_THROW(p.validate(), ArgumentError);
  p = {};
  p.levels = 0;
  EXPECT_THROW(p.validate(), ArgumentError);
}

TEST(Flow, ParabolicOffset) {
  EXPECT_DOUBLE_EQ(detail::parabolic_offset(2.0, 1.0, 2.0), 0.0);
  // Vertex of y = (x - 0.25)^2 sampled at -1, 0, 1.
  EXPECT_NEAR(detail::parabolic_offset(1.5625, 0.0625, 0.5625), 0.25, 1e-12);
  EXPECT_EQ(detail::parabolic_offset(1.0, 1.0, 1.0), 0.0);
}

TEST(Brightness, RatioExample) {
  const Frame src(4, 4, 3, 0.2f), ref(4, 4, 3, 0.4f);
  EXPECT_NEAR(brightness_gain(src, ref), 2.0, 1e-6);
  const auto src2 = make_frame(2, 1, 3, [](int x, int, int) { return x == 0 ? 0.1 : 0.3; });
  const auto out = brightness_adjust(src2, Frame(2, 1, 3, 0.4f));
  EXPECT_NEAR(out.at(0, 0), 0.2, 1e-6);
}

TEST(Brightness, IdentityWhenEqual) {
  const auto f = random_frame(8, 8, 3, 7);
  EXPECT_EQ(brightness_adjust(f, f), f);
}

TEST(Brightness, BlackSourceClamps) {
  const Frame black(4, 4, 3, 0.0f), ref(4, 4, 3, 0.5f);
  EXPECT_EQ(brightness_gain(black, ref), 4.0);
  for (auto v : brightness_adjust(black, ref).samples()) EXPECT_EQ(v, 0.0f);
  EXPECT_EQ(brightness_gain(ref, black), 0.25);
}

TEST(Brightness, Idempotent) {
  const auto src = random_frame(16, 16, 3, 1, 0.1, 0.4);
  const auto ref = random_frame(16, 16, 3, 2, 0.2, 0.6);
  const auto once = brightness_adjust(src, ref);
  const auto twice = brightness_adjust(once, ref);
  for (std::size_t i = 0; i < once.samples().size(); ++i) EXPECT_NEAR(once.samples()[i], twice.samples()[i], 1e-6);
}

TEST(Brightness, DimensionMismatch) {
  EXPECT_THROW(brightness_adjust(Frame(4, 4, 3), Frame(5, 4, 3)), ArgumentError);
}
