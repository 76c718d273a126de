#pragma once

// Synthetic experiment material: low-light degradation, procedural scenes, static-region
// pseudo ground truth and non-learned enhancement baselines.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <variant>
#include <vector>

#include "dwta/core.hpp"
#include "dwta/parallel.hpp"

namespace dwta {

// Philox4x32-10 counter-based generator (Salmon et al., Random123).
class Philox4x32 {
 public:
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Counter generate(Counter ctr, Key key) {
    for (int round = 0; round < 10; ++round) {
      if (round > 0) {
        key[0] += kW0;
        key[1] += kW1;
      }
      const std::uint64_t p0 = static_cast<std::uint64_t>(kM0) * ctr[0];
      const std::uint64_t p1 = static_cast<std::uint64_t>(kM1) * ctr[2];
      const auto hi0 = static_cast<std::uint32_t>(p0 >> 32), lo0 = static_cast<std::uint32_t>(p0);
      const auto hi1 = static_cast<std::uint32_t>(p1 >> 32), lo1 = static_cast<std::uint32_t>(p1);
      ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    }
    return ctr;
  }

  static Key key_from_seed(std::uint64_t seed) {
    return {static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
  }

  // Open interval (0,1).
  static double to_unit(std::uint32_t x) { return (static_cast<double>(x) + 0.5) * 0x1p-32; }

 private:
  static constexpr std::uint32_t kM0 = 0xD2511F53u;
  static constexpr std::uint32_t kM1 = 0xCD9E8D57u;
  static constexpr std::uint32_t kW0 = 0x9E3779B9u;
  static constexpr std::uint32_t kW1 = 0xBB67AE85u;
};

namespace detail {

enum class Stream : std::uint32_t { Degrade = 0x6e6f6973u, Texture = 0x74657874u };

// Standard normal via Box-Muller from one Philox block.
inline double standard_normal(std::uint64_t seed, std::uint64_t index, std::uint32_t frame) {
  const auto r = Philox4x32::generate(
      {static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32), frame,
       static_cast<std::uint32_t>(Stream::Degrade)},
      Philox4x32::key_from_seed(seed));
  const double u1 = Philox4x32::to_unit(r[0]);
  const double u2 = Philox4x32::to_unit(r[1]);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace detail

struct DegradeParams {
  double gain = 0.15;
  double gamma = 2.2;
  double read_sigma = 0.03;
  double shot_k = 0.02;
  std::uint64_t seed = 0;

  void validate() const {
    if (!(gain > 0.0 && gain <= 1.0)) throw ArgumentError("gain must lie in (0,1]");
    if (!(gamma >= 1.0) || !std::isfinite(gamma)) throw ArgumentError("gamma must be >= 1");
    if (!(read_sigma >= 0.0) || !std::isfinite(read_sigma)) throw ArgumentError("read_sigma must be >= 0");
    if (!(shot_k >= 0.0) || !std::isfinite(shot_k)) throw ArgumentError("shot_k must be >= 0");
  }
};

// d = (gain x)^gamma + n,  n ~ N(0, read_sigma^2 + shot_k gain x), clamped. Noise for sample i
// of frame t depends only on (seed, t, i).
inline Frame degrade_frame(const Frame& clean, const DegradeParams& p, std::uint32_t frame_index) {
  p.validate();
  const auto s = clean.samples();
  std::vector<Sample> out(s.size());
  const bool noisy = p.read_sigma > 0.0 || p.shot_k > 0.0;
  const int rows = clean.channels() * clean.height();
  const std::size_t w = clean.width();
  parallel_for(rows, [&](int row) {
    for (std::size_t i = row * w; i < (row + 1) * w; ++i) {
      const double x = p.gain * s[i];
      double d = p.gamma == 1.0 ? x : std::pow(x, p.gamma);
      if (noisy) {
        const double sd = std::sqrt(p.read_sigma * p.read_sigma + p.shot_k * x);
        d += sd * detail::standard_normal(p.seed, i, frame_index);
      }
      out[i] = static_cast<Sample>(std::clamp(d, 0.0, 1.0));
    }
  });
  return Frame::from_samples(clean.width(), clean.height(), clean.channels(), std::move(out));
}

inline std::vector<Frame> degrade_sequence(std::span<const Frame> clean, const DegradeParams& p) {
  std::vector<Frame> out;
  out.reserve(clean.size());
  for (std::size_t t = 0; t < clean.size(); ++t)
    out.push_back(degrade_frame(clean[t], p, static_cast<std::uint32_t>(t)));
  return out;
}

// ---------------------------------------------------------------------------------------------
// Procedural scenes

enum class SceneKind { StaticTexture, MovingSquare, PanningTexture };

inline constexpr int kSquareStep = 5;  // px per frame, +x
inline constexpr int kPanStepX = 2;
inline constexpr int kPanStepY = 1;

// Seeded value noise over the integer plane: three octaves of bilinearly interpolated lattice
// values, contrast-expanded about 0.5, clipped and mapped to [lo, hi]. Deterministic from
// (seed, channel, x, y).
class ValueNoise {
 public:
  ValueNoise(std::uint64_t seed, double lo, double hi) : key_(Philox4x32::key_from_seed(seed)), lo_(lo), hi_(hi) {}

  double operator()(int channel, int x, int y) const {
    double acc = 0.0, norm = 0.0;
    for (int o = 0; o < static_cast<int>(kSpacing.size()); ++o) {
      const int s = kSpacing[o];
      const int gx = floor_div(x, s), gy = floor_div(y, s);
      const double tx = static_cast<double>(x - gx * s) / s;
      const double ty = static_cast<double>(y - gy * s) / s;
      const double v00 = lattice(channel, o, gx, gy), v10 = lattice(channel, o, gx + 1, gy);
      const double v01 = lattice(channel, o, gx, gy + 1), v11 = lattice(channel, o, gx + 1, gy + 1);
      const double v = (1 - ty) * ((1 - tx) * v00 + tx * v10) + ty * ((1 - tx) * v01 + tx * v11);
      acc += kAmplitude[o] * v;
      norm += kAmplitude[o];
    }
    const double v = std::clamp(0.5 + kContrast * (acc / norm - 0.5), 0.0, 1.0);
    return lo_ + (hi_ - lo_) * v;
  }

 private:
  static constexpr std::array<int, 3> kSpacing{8, 4, 2};
  static constexpr std::array<double, 3> kAmplitude{1.0, 0.7, 0.5};
  static constexpr double kContrast = 2.5;

  static int floor_div(int a, int b) { return a >= 0 ? a / b : -((-a + b - 1) / b); }

  double lattice(int channel, int octave, int gx, int gy) const {
    const auto r = Philox4x32::generate(
        {static_cast<std::uint32_t>(gx), static_cast<std::uint32_t>(gy),
         static_cast<std::uint32_t>(channel | (octave << 8)),
         static_cast<std::uint32_t>(detail::Stream::Texture)},
        key_);
    return Philox4x32::to_unit(r[0]);
  }

  Philox4x32::Key key_;
  double lo_, hi_;
};

struct SquareGeometry {
  int size, x0, y0;
};

inline SquareGeometry square_geometry(int width, int height) {
  const int size = std::max(4, std::min(width, height) / 4);
  return {size, width / 4, (height - size) / 2};
}

// Top-left x of the moving square at frame t.
inline int square_left(int width, int height, int t) {
  return (square_geometry(width, height).x0 + kSquareStep * t) % width;
}

inline bool in_square(int width, int height, int t, int x, int y) {
  const auto g = square_geometry(width, height);
  const int left = square_left(width, height, t);
  return ((x - left) % width + width) % width < g.size && y >= g.y0 && y < g.y0 + g.size;
}

// Texture intensity ranges: a mid-grey texture for static / panning scenes, a dark grey
// background under the white square so the square stays high-contrast.
inline constexpr double kTextureLo = 0.1, kTextureHi = 0.9;
inline constexpr double kBackgroundLo = 0.0, kBackgroundHi = 0.1;

inline std::vector<Frame> gen_scene(SceneKind kind, int width, int height, int n_frames,
                                    std::uint64_t seed) {
  if (width < 16 || height < 16) throw ArgumentError("gen_scene: dimensions must be >= 16");
  if (n_frames < 1) throw ArgumentError("gen_scene: need at least one frame");
  const std::size_t npix = static_cast<std::size_t>(width) * height;

  const auto render = [&](const ValueNoise& noise, int shift_x, int shift_y, bool grey = false) {
    std::vector<Sample> s(npix * 3);
    for (int c = 0; c < 3; ++c)
      for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x)
          s[c * npix + static_cast<std::size_t>(y) * width + x] =
              static_cast<Sample>(noise(grey ? 0 : c, x - shift_x, y - shift_y));
    return Frame::from_samples(width, height, 3, std::move(s));
  };

  std::vector<Frame> frames;
  frames.reserve(n_frames);
  switch (kind) {
    case SceneKind::StaticTexture: {
      const Frame f = render(ValueNoise(seed, kTextureLo, kTextureHi), 0, 0);
      frames.assign(n_frames, f);
      break;
    }
    case SceneKind::PanningTexture: {
      const ValueNoise noise(seed, kTextureLo, kTextureHi);
      for (int t = 0; t < n_frames; ++t) frames.push_back(render(noise, kPanStepX * t, kPanStepY * t));
      break;
    }
    case SceneKind::MovingSquare: {
      const Frame bg = render(ValueNoise(seed, kBackgroundLo, kBackgroundHi), 0, 0, true);
      for (int t = 0; t < n_frames; ++t) {
        std::vector<Sample> s(bg.samples().begin(), bg.samples().end());
        for (int y = 0; y < height; ++y)
          for (int x = 0; x < width; ++x)
            if (in_square(width, height, t, x, y))
              for (int c = 0; c < 3; ++c) s[c * npix + static_cast<std::size_t>(y) * width + x] = 1.0f;
        frames.push_back(Frame::from_samples(width, height, 3, std::move(s)));
      }
      break;
    }
  }
  return frames;
}

// ---------------------------------------------------------------------------------------------
// Pseudo ground truth

struct Roi {
  int x = 0, y = 0, width = 0, height = 0;
};

// Per-pixel temporal mean of the ROI crop.
inline Frame pseudo_gt(std::span<const Frame> frames, const Roi& roi) {
  if (frames.size() < 2) throw ArgumentError("pseudo_gt: need at least two frames");
  const Frame& f0 = frames[0];
  if (roi.width <= 0 || roi.height <= 0 || roi.x < 0 || roi.y < 0 || roi.x + roi.width > f0.width() ||
      roi.y + roi.height > f0.height())
    throw ArgumentError("pseudo_gt: roi out of bounds");
  const int ch = f0.channels();
  const std::size_t n = static_cast<std::size_t>(roi.width) * roi.height;
  std::vector<double> acc(n * ch, 0.0);
  for (const auto& f : frames) {
    if (!f.same_shape(f0)) throw FormatError("pseudo_gt: frames differ in shape");
    for (int c = 0; c < ch; ++c)
      for (int y = 0; y < roi.height; ++y)
        for (int x = 0; x < roi.width; ++x)
          acc[c * n + static_cast<std::size_t>(y) * roi.width + x] += f.at(roi.x + x, roi.y + y, c);
  }
  std::vector<Sample> out(acc.size());
  const double k = static_cast<double>(frames.size());
  for (std::size_t i = 0; i < acc.size(); ++i) out[i] = static_cast<Sample>(acc[i] / k);
  return Frame::from_samples(roi.width, roi.height, ch, std::move(out));
}

// ---------------------------------------------------------------------------------------------
// Enhancement baselines (stand-ins for a learned first-stage enhancer)

struct IdentityEnhance {};
struct HistStretch {
  double p_lo = 1.0;  // percent
  double p_hi = 99.0;
};
struct GammaEnhance {
  double gamma = 2.2;
};
using Enhancer = std::variant<IdentityEnhance, HistStretch, GammaEnhance>;

struct EnhanceResult {
  Frame frame;
  bool degenerate = false;  // percentile range collapsed; input returned unchanged
};

// Linear-interpolated percentile of an already sorted vector.
inline double percentile_sorted(const std::vector<double>& sorted, double pct) {
  const double pos = pct / 100.0 * (sorted.size() - 1);
  const auto i = static_cast<std::size_t>(std::floor(pos));
  const std::size_t j = std::min(i + 1, sorted.size() - 1);
  return sorted[i] + (pos - i) * (sorted[j] - sorted[i]);
}

inline EnhanceResult enhance_baseline(const Frame& frame, const Enhancer& method) {
  if (std::holds_alternative<IdentityEnhance>(method)) return {frame, false};

  if (const auto* g = std::get_if<GammaEnhance>(&method)) {
    if (!(g->gamma > 0.0)) throw ArgumentError("gamma must be > 0");
    std::vector<Sample> out(frame.samples().begin(), frame.samples().end());
    for (auto& v : out) v = static_cast<Sample>(std::pow(static_cast<double>(v), 1.0 / g->gamma));
    return {Frame::from_samples(frame.width(), frame.height(), frame.channels(), std::move(out)), false};
  }

  const auto& hs = std::get<HistStretch>(method);
  if (!(hs.p_lo >= 0.0 && hs.p_lo < hs.p_hi && hs.p_hi <= 100.0))
    throw ArgumentError("percentiles must satisfy 0 <= p_lo < p_hi <= 100");
  const Frame y = luma(frame);
  std::vector<double> sorted(y.samples().begin(), y.samples().end());
  std::sort(sorted.begin(), sorted.end());
  const double lo = percentile_sorted(sorted, hs.p_lo);
  const double hi = percentile_sorted(sorted, hs.p_hi);
  if (!(hi - lo > 1e-12)) return {frame, true};
  std::vector<Sample> out(frame.samples().begin(), frame.samples().end());
  for (auto& v : out) v = static_cast<Sample>(std::clamp((v - lo) / (hi - lo), 0.0, 1.0));
  return {Frame::from_samples(frame.width(), frame.height(), frame.channels(), std::move(out)), false};
}

}  // namespace dwta
