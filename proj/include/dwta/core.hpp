#pragma once

// Pixel-domain value types shared by every dwta module.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace dwta {

// 24-bit mantissa is plenty for unit-interval samples; reductions accumulate in double.
using Sample = float;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad arguments or violated preconditions.
class ArgumentError : public Error {
 public:
  using Error::Error;
};

// Missing / unreadable / unwritable files.
class IoError : public Error {
 public:
  using Error::Error;
};

// Malformed file contents or inconsistent sequence data.
class FormatError : public Error {
 public:
  using Error::Error;
};

namespace detail {

inline Sample clamp_unit(double v) {
  if (!std::isfinite(v)) throw ArgumentError("non-finite sample");
  return static_cast<Sample>(std::clamp(v, 0.0, 1.0));
}

inline void check_dims(int width, int height) {
  if (width <= 0 || height <= 0)
    throw ArgumentError("dimensions must be positive, got " + std::to_string(width) + "x" +
                        std::to_string(height));
}

}  // namespace detail

// One video frame: planar (channel-major), row-major within a channel, samples in [0,1].
// Immutable once built; every constructor clamps.
class Frame {
 public:
  Frame(int width, int height, int channels, Sample fill = 0.0f)
      : width_(width), height_(height), channels_(channels) {
    detail::check_dims(width, height);
    if (channels != 1 && channels != 3)
      throw ArgumentError("channels must be 1 or 3, got " + std::to_string(channels));
    if (!(fill >= 0.0f && fill <= 1.0f)) throw ArgumentError("fill must lie in [0,1]");
    samples_.assign(static_cast<std::size_t>(width) * height * channels, fill);
  }

  static Frame from_samples(int width, int height, int channels, std::vector<Sample> samples) {
    Frame f(width, height, channels);
    if (samples.size() != f.samples_.size())
      throw ArgumentError("sample count " + std::to_string(samples.size()) + " != " +
                          std::to_string(f.samples_.size()));
    for (auto& s : samples) s = detail::clamp_unit(s);
    f.samples_ = std::move(samples);
    return f;
  }

  int width() const { return width_; }
  int height() const { return height_; }
  int channels() const { return channels_; }
  std::size_t pixel_count() const { return static_cast<std::size_t>(width_) * height_; }

  std::span<const Sample> samples() const& { return samples_; }
  std::vector<Sample> samples() && { return std::move(samples_); }
  std::span<const Sample> plane(int c) const {
    return std::span<const Sample>(samples_).subspan(c * pixel_count(), pixel_count());
  }
  Sample at(int x, int y, int c = 0) const {
    return samples_[c * pixel_count() + static_cast<std::size_t>(y) * width_ + x];
  }

  bool same_shape(const Frame& o) const {
    return width_ == o.width_ && height_ == o.height_ && channels_ == o.channels_;
  }
  bool operator==(const Frame&) const = default;

 private:
  int width_;
  int height_;
  int channels_;
  std::vector<Sample> samples_;
};

// Single-channel real-valued working map (residuals, loss maps, sub-bands). Unbounded.
struct Plane {
  int width = 0;
  int height = 0;
  std::vector<Sample> values;

  Plane() = default;
  Plane(int w, int h, Sample fill = 0.0f) : width(w), height(h) {
    detail::check_dims(w, h);
    values.assign(static_cast<std::size_t>(w) * h, fill);
  }

  std::size_t size() const { return values.size(); }
  Sample& at(int x, int y) { return values[static_cast<std::size_t>(y) * width + x]; }
  Sample at(int x, int y) const { return values[static_cast<std::size_t>(y) * width + x]; }
  // Edge-replicated read.
  Sample clamped(int x, int y) const {
    return at(std::clamp(x, 0, width - 1), std::clamp(y, 0, height - 1));
  }
  double mean() const {
    double s = 0.0;
    for (Sample v : values) s += v;
    return values.empty() ? 0.0 : s / static_cast<double>(values.size());
  }
  bool operator==(const Plane&) const = default;
};

// Dense per-pixel backward displacement (u right, v down), interleaved (u,v), row-major.
class FlowField {
 public:
  FlowField(int width, int height) : width_(width), height_(height) {
    detail::check_dims(width, height);
    vectors_.assign(static_cast<std::size_t>(width) * height * 2, 0.0f);
  }

  static FlowField from_vectors(int width, int height, std::vector<float> vectors) {
    FlowField f(width, height);
    if (vectors.size() != f.vectors_.size())
      throw ArgumentError("flow vector count " + std::to_string(vectors.size()) + " != " +
                          std::to_string(f.vectors_.size()));
    const double bound = std::max(width, height);
    for (std::size_t i = 0; i < vectors.size(); i += 2) {
      const double u = vectors[i], v = vectors[i + 1];
      if (!std::isfinite(u) || !std::isfinite(v)) throw ArgumentError("non-finite flow vector");
      if (std::hypot(u, v) > bound) throw ArgumentError("flow magnitude exceeds frame size");
    }
    f.vectors_ = std::move(vectors);
    return f;
  }

  static FlowField constant(int width, int height, float u, float v) {
    std::vector<float> vec(static_cast<std::size_t>(width) * height * 2);
    for (std::size_t i = 0; i < vec.size(); i += 2) {
      vec[i] = u;
      vec[i + 1] = v;
    }
    return from_vectors(width, height, std::move(vec));
  }

  int width() const { return width_; }
  int height() const { return height_; }
  std::span<const float> vectors() const& { return vectors_; }
  std::vector<float> vectors() && { return std::move(vectors_); }
  float u(int x, int y) const { return vectors_[2 * (static_cast<std::size_t>(y) * width_ + x)]; }
  float v(int x, int y) const {
    return vectors_[2 * (static_cast<std::size_t>(y) * width_ + x) + 1];
  }
  bool operator==(const FlowField&) const = default;

 private:
  int width_;
  int height_;
  std::vector<float> vectors_;
};

// Per-pixel blend weight; every value lies in [floor, 1].
class WeightMap {
 public:
  WeightMap(Plane values, double floor) : floor_(floor), plane_(std::move(values)) {
    for (Sample& w : plane_.values) {
      if (!std::isfinite(w)) throw ArgumentError("non-finite weight");
      w = std::clamp(w, static_cast<Sample>(floor), 1.0f);
    }
  }
  static WeightMap constant(int width, int height, double value) {
    return WeightMap(Plane(width, height, static_cast<Sample>(value)), value);
  }

  double floor() const { return floor_; }
  const Plane& plane() const& { return plane_; }
  Plane plane() && { return std::move(plane_); }
  int width() const { return plane_.width; }
  int height() const { return plane_.height; }
  Sample at(int x, int y) const { return plane_.at(x, y); }
  double mean() const { return plane_.mean(); }

 private:
  double floor_;
  Plane plane_;
};

// Normalized texture complexity, every value in [0,1].
class TextureMap {
 public:
  explicit TextureMap(Plane values) : plane_(std::move(values)) {
    for (Sample& m : plane_.values) {
      if (!std::isfinite(m)) throw ArgumentError("non-finite texture value");
      m = std::clamp(m, 0.0f, 1.0f);
    }
  }
  const Plane& plane() const& { return plane_; }
  Plane plane() && { return std::move(plane_); }
  int width() const { return plane_.width; }
  int height() const { return plane_.height; }
  Sample at(int x, int y) const { return plane_.at(x, y); }

 private:
  Plane plane_;
};

// Aggregation modes: the residual-gated sigmoid, a fixed exponential moving average, or a
// plain unaligned mean over the last N frames.
struct DynamicMode {};
struct FixedEmaMode {
  double lambda = 0.2;
};
struct SlidingWindowMode {
  int n = 5;
};
using AggregationMode = std::variant<DynamicMode, FixedEmaMode, SlidingWindowMode>;

enum class ResidualReduction { ChannelMean, Luma };

struct AggregationParams {
  double a = 10.0;  // sigmoid steepness
  double b = 0.5;   // residual threshold, unit-interval full scale
  double c = 0.1;   // minimum weight of the current frame
  AggregationMode mode = DynamicMode{};
  ResidualReduction residual = ResidualReduction::ChannelMean;
  bool median_weights = false;   // 3x3 median on the weight map before blending
  bool adjust_history = true;    // blend against the brightness-adjusted history

  void validate() const {
    if (!(a > 0.0) || !std::isfinite(a)) throw ArgumentError("a must be > 0");
    if (!(b > 0.0 && b < 1.0)) throw ArgumentError("b must lie in (0,1)");
    if (!(c >= 0.0 && c < 1.0)) throw ArgumentError("c must lie in [0,1)");
    if (auto* ema = std::get_if<FixedEmaMode>(&mode)) {
      if (!(ema->lambda > 0.0 && ema->lambda <= 1.0))
        throw ArgumentError("lambda must lie in (0,1]");
    }
    if (auto* win = std::get_if<SlidingWindowMode>(&mode)) {
      if (win->n < 1) throw ArgumentError("window length must be >= 1");
    }
  }
};

inline const char* mode_name(const AggregationMode& mode) {
  switch (mode.index()) {
    case 0: return "dynamic";
    case 1: return "ema";
    default: return "window";
  }
}

// ITU-R BT.601 luma. One-channel frames are returned unchanged.
inline Frame luma(const Frame& frame) {
  if (frame.channels() == 1) return frame;
  const auto r = frame.plane(0), g = frame.plane(1), b = frame.plane(2);
  std::vector<Sample> out(frame.pixel_count());
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = static_cast<Sample>(0.299 * r[i] + 0.587 * g[i] + 0.114 * b[i]);
  return Frame::from_samples(frame.width(), frame.height(), 1, std::move(out));
}

inline Plane luma_plane(const Frame& frame) {
  Frame y = luma(frame);
  Plane p(y.width(), y.height());
  std::copy(y.samples().begin(), y.samples().end(), p.values.begin());
  return p;
}

inline double mean_sample(const Frame& frame) {
  double s = 0.0;
  for (Sample v : frame.samples()) s += v;
  return s / static_cast<double>(frame.samples().size());
}

}  // namespace dwta
