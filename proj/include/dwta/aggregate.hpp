#pragma once

// Flow-guided recurrent temporal aggregation.
//
// Each step aligns the previous refined frame to the current input and blends
//
//   out = w * curr + (1 - w) * warped_prev,   w = c + (1 - c) / (1 + exp(-a (R - b)))
//
// where R is the per-pixel residual between curr and warped_prev. Static regions (small R)
// keep accumulating history; moving or misaligned regions (large R) fall back to the current
// frame. Fixed-weight EMA and an unaligned sliding-window mean are provided as baselines.

#include <cmath>
#include <deque>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "dwta/core.hpp"
#include "dwta/flow.hpp"
#include "dwta/imgproc.hpp"
#include "dwta/io.hpp"
#include "dwta/parallel.hpp"
#include "dwta/warp.hpp"

namespace dwta {

inline Plane residual(const Frame& curr, const Frame& warped_prev,
                      ResidualReduction reduction = ResidualReduction::ChannelMean) {
  if (!curr.same_shape(warped_prev)) throw ArgumentError("residual: dimension mismatch");
  const std::size_t npix = curr.pixel_count();
  Plane out(curr.width(), curr.height());
  if (reduction == ResidualReduction::Luma) {
    const Frame a = luma(curr), b = luma(warped_prev);
    for (std::size_t i = 0; i < npix; ++i)
      out.values[i] = static_cast<Sample>(std::abs(static_cast<double>(a.samples()[i]) - b.samples()[i]));
    return out;
  }
  const int ch = curr.channels();
  const auto s = curr.samples(), p = warped_prev.samples();
  for (std::size_t i = 0; i < npix; ++i) {
    double acc = 0.0;
    for (int c = 0; c < ch; ++c)
      acc += std::abs(static_cast<double>(s[c * npix + i]) - p[c * npix + i]);
    out.values[i] = static_cast<Sample>(acc / ch);
  }
  return out;
}

inline double dynamic_weight_value(double r, double a, double b, double c) {
  return c + (1.0 - c) / (1.0 + std::exp(-a * (r - b)));
}

inline WeightMap dynamic_weight(const Plane& r, const AggregationParams& params) {
  params.validate();
  Plane w(r.width, r.height);
  for (std::size_t i = 0; i < r.size(); ++i)
    w.values[i] = static_cast<Sample>(dynamic_weight_value(r.values[i], params.a, params.b, params.c));
  return WeightMap(std::move(w), params.c);
}

// Convex blend; the weight is forced to 1 wherever validity is 0 (no history there).
inline Frame blend(const Frame& curr, const Frame& warped_prev, const WeightMap& weight,
                   const Plane& validity) {
  if (!curr.same_shape(warped_prev) || weight.width() != curr.width() ||
      weight.height() != curr.height() || validity.width != curr.width() ||
      validity.height != curr.height())
    throw ArgumentError("blend: dimension mismatch");
  const std::size_t npix = curr.pixel_count();
  const int ch = curr.channels();
  const auto s = curr.samples(), p = warped_prev.samples();
  std::vector<Sample> out(npix * ch);
  for (std::size_t i = 0; i < npix; ++i) {
    const double w = validity.values[i] == 0.0f ? 1.0 : static_cast<double>(weight.plane().values[i]);
    for (int c = 0; c < ch; ++c) {
      const std::size_t k = c * npix + i;
      out[k] = static_cast<Sample>(w * s[k] + (1.0 - w) * p[k]);
    }
  }
  return Frame::from_samples(curr.width(), curr.height(), ch, std::move(out));
}

// Where per-transition flow comes from: the built-in estimator, or a directory of .flo files
// named flow_NNNNN.flo for the transition (N-1 -> N).
struct FlowSource {
  std::variant<FlowParams, std::filesystem::path> source = FlowParams{};

  static FlowSource builtin(FlowParams p = {}) { return {p}; }
  static FlowSource directory(std::filesystem::path dir) { return {std::move(dir)}; }
};

struct StepResult {
  Frame refined;
  std::optional<WeightMap> weight;  // absent at t = 0 and in window mode
  double mean_weight = 1.0;
  double mean_residual = 0.0;
};

struct FrameStats {
  std::size_t index = 0;
  double mean_weight = 1.0;
  double mean_residual = 0.0;
};

struct RefineSummary {
  AggregationParams params;
  std::vector<FrameStats> frames;

  double mean_weight() const {
    double s = 0.0;
    for (const auto& f : frames) s += f.mean_weight;
    return frames.empty() ? 0.0 : s / frames.size();
  }
  double mean_residual() const {
    double s = 0.0;
    for (const auto& f : frames) s += f.mean_residual;
    return frames.empty() ? 0.0 : s / frames.size();
  }
};

// Owns the recurrence state; feed frames in order.
class Refiner {
 public:
  explicit Refiner(AggregationParams params, FlowSource flow = {})
      : params_(std::move(params)), flow_(std::move(flow)) {
    params_.validate();
    if (auto* fp = std::get_if<FlowParams>(&flow_.source)) fp->validate();
  }

  std::size_t frames_seen() const { return t_; }
  const std::optional<Frame>& previous() const { return prev_; }

  StepResult step(const Frame& curr) {
    if (prev_ && !prev_->same_shape(curr))
      throw FormatError("frame " + std::to_string(t_) + " changes sequence dimensions");
    StepResult r = std::holds_alternative<SlidingWindowMode>(params_.mode) ? step_window(curr)
                                                                            : step_recurrent(curr);
    prev_ = r.refined;
    ++t_;
    return r;
  }

 private:
  StepResult step_window(const Frame& curr) {
    const int n = std::get<SlidingWindowMode>(params_.mode).n;
    double mean_res = 0.0;
    if (prev_) mean_res = residual(curr, *prev_, params_.residual).mean();
    window_.push_back(curr);
    while (static_cast<int>(window_.size()) > n) window_.pop_front();
    const std::size_t len = curr.samples().size();
    std::vector<double> acc(len, 0.0);
    for (const auto& f : window_) {
      const auto s = f.samples();
      for (std::size_t i = 0; i < len; ++i) acc[i] += s[i];
    }
    std::vector<Sample> out(len);
    const double k = static_cast<double>(window_.size());
    for (std::size_t i = 0; i < len; ++i) out[i] = static_cast<Sample>(acc[i] / k);
    return {Frame::from_samples(curr.width(), curr.height(), curr.channels(), std::move(out)),
            std::nullopt, 1.0 / k, mean_res};
  }

  FlowField flow_for(const Frame& history, const Frame& curr) const {
    if (const auto* fp = std::get_if<FlowParams>(&flow_.source)) return estimate_flow(history, curr, *fp);
    const auto& dir = std::get<std::filesystem::path>(flow_.source);
    const auto path = dir / io::flow_file_name(t_);
    if (!std::filesystem::exists(path))
      throw IoError("missing flow for transition " + std::to_string(t_) + " (" + path.string() + ")");
    FlowField f = io::read_flo(path);
    if (f.width() != curr.width() || f.height() != curr.height())
      throw FormatError("flow for transition " + std::to_string(t_) + " has wrong dimensions");
    return f;
  }

  StepResult step_recurrent(const Frame& curr) {
    if (!prev_) return {curr, std::nullopt, 1.0, 0.0};

    const Frame adjusted = brightness_adjust(*prev_, curr);
    const FlowField flow = flow_for(adjusted, curr);
    WarpResult warped = warp_backward(params_.adjust_history ? adjusted : *prev_, flow);
    const Plane res = residual(curr, warped.frame, params_.residual);

    std::optional<WeightMap> weight;
    if (const auto* ema = std::get_if<FixedEmaMode>(&params_.mode)) {
      weight.emplace(WeightMap::constant(curr.width(), curr.height(), ema->lambda));
    } else {
      weight.emplace(dynamic_weight(res, params_));
      if (params_.median_weights)
        weight.emplace(WeightMap(imgproc::median3x3(weight->plane()), params_.c));
    }
    // Report the weight actually applied, including the out-of-frame override.
    Plane applied = weight->plane();
    for (std::size_t i = 0; i < applied.size(); ++i)
      if (warped.validity.values[i] == 0.0f) applied.values[i] = 1.0f;
    WeightMap effective(std::move(applied), weight->floor());

    Frame out = blend(curr, warped.frame, effective, warped.validity);
    const double mw = effective.mean();
    return {std::move(out), std::move(effective), mw, res.mean()};
  }

  AggregationParams params_;
  FlowSource flow_;
  std::optional<Frame> prev_;
  std::deque<Frame> window_;
  std::size_t t_ = 0;
};

using FrameSourceFn = std::function<std::optional<Frame>()>;
using FrameSinkFn = std::function<void(std::size_t index, const StepResult&)>;

// Runs the recurrence over every frame the source yields; t = 0 passes through unchanged.
inline RefineSummary refine_sequence(const FrameSourceFn& next, const FlowSource& flow,
                                     const AggregationParams& params, const FrameSinkFn& emit) {
  Refiner refiner(params, flow);
  RefineSummary summary{params, {}};
  while (auto frame = next()) {
    const std::size_t t = refiner.frames_seen();
    StepResult r = refiner.step(*frame);
    summary.frames.push_back({t, r.mean_weight, r.mean_residual});
    if (emit) emit(t, r);
  }
  if (summary.frames.empty()) throw ArgumentError("refine_sequence: no frames");
  return summary;
}

inline RefineSummary refine_sequence(std::span<const Frame> frames, const FlowSource& flow,
                                     const AggregationParams& params, const FrameSinkFn& emit) {
  std::size_t i = 0;
  return refine_sequence(
      [&]() -> std::optional<Frame> {
        if (i >= frames.size()) return std::nullopt;
        return frames[i++];
      },
      flow, params, emit);
}

// Convenience: refine an in-memory sequence and collect the outputs.
inline std::vector<Frame> refine_all(std::span<const Frame> frames, const AggregationParams& params,
                                     const FlowSource& flow = {}, RefineSummary* summary = nullptr) {
  std::vector<Frame> out;
  out.reserve(frames.size());
  auto s = refine_sequence(frames, flow, params,
                           [&](std::size_t, const StepResult& r) { out.push_back(r.refined); });
  if (summary) *summary = std::move(s);
  return out;
}

}  // namespace dwta
