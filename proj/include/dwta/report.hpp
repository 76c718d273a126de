#pragma once

// JSON reports with stable field names. Non-finite numbers serialize as the strings "inf" /
// "-inf" / "nan".

#include <cmath>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dwta/aggregate.hpp"
#include "dwta/quality.hpp"

namespace dwta::report {

inline nlohmann::json number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

inline nlohmann::json refine_summary(const RefineSummary& s) {
  nlohmann::json frames = nlohmann::json::array();
  for (const auto& f : s.frames)
    frames.push_back({{"index", f.index},
                      {"mean_weight", number(f.mean_weight)},
                      {"mean_residual", number(f.mean_residual)}});
  nlohmann::json j{{"mode", mode_name(s.params.mode)},
                   {"a", s.params.a},
                   {"b", s.params.b},
                   {"c", s.params.c},
                   {"residual", s.params.residual == ResidualReduction::Luma ? "luma" : "mean"},
                   {"frame_count", s.frames.size()},
                   {"mean_weight", number(s.mean_weight())},
                   {"mean_residual", number(s.mean_residual())},
                   {"frames", std::move(frames)}};
  if (const auto* ema = std::get_if<FixedEmaMode>(&s.params.mode)) j["lambda"] = ema->lambda;
  if (const auto* win = std::get_if<SlidingWindowMode>(&s.params.mode)) j["window_n"] = win->n;
  return j;
}

struct EvalSelection {
  bool psnr = true;
  bool ssim = true;
  bool composite = false;
  CompositeOptions composite_options{};
};

struct FrameScores {
  std::size_t index = 0;
  double psnr = 0.0;
  double ssim = 0.0;
  LossBreakdown composite{};
};

inline FrameScores score_frame(std::size_t index, const Frame& test, const Frame& ref,
                               const EvalSelection& sel) {
  FrameScores s;
  s.index = index;
  if (sel.psnr) s.psnr = dwta::psnr(test, ref);
  if (sel.ssim) s.ssim = dwta::ssim(test, ref);
  if (sel.composite) s.composite = composite_loss(test, ref, sel.composite_options);
  return s;
}

inline nlohmann::json composite_json(const LossBreakdown& l) {
  return {{"total", number(l.total)},
          {"pixel", number(l.pixel)},
          {"perceptual_proxy", number(l.perceptual_proxy)},
          {"tv", number(l.tv)},
          {"alpha", l.alpha}};
}

// Per-frame values plus their means (an infinite PSNR makes the mean "inf").
inline nlohmann::json eval_report(const std::vector<FrameScores>& scores, const EvalSelection& sel) {
  nlohmann::json frames = nlohmann::json::array();
  double psnr_sum = 0.0, ssim_sum = 0.0;
  LossBreakdown csum{};
  for (const auto& s : scores) {
    nlohmann::json f{{"index", s.index}};
    if (sel.psnr) f["psnr"] = number(s.psnr);
    if (sel.ssim) f["ssim"] = number(s.ssim);
    if (sel.composite) f["composite"] = composite_json(s.composite);
    frames.push_back(std::move(f));
    psnr_sum += s.psnr;
    ssim_sum += s.ssim;
    csum.total += s.composite.total;
    csum.pixel += s.composite.pixel;
    csum.perceptual_proxy += s.composite.perceptual_proxy;
    csum.tv += s.composite.tv;
  }
  const double n = scores.empty() ? 1.0 : static_cast<double>(scores.size());
  nlohmann::json metrics = nlohmann::json::array();
  nlohmann::json mean = nlohmann::json::object();
  if (sel.psnr) {
    metrics.push_back("psnr");
    mean["psnr"] = number(psnr_sum / n);
  }
  if (sel.ssim) {
    metrics.push_back("ssim");
    mean["ssim"] = number(ssim_sum / n);
  }
  if (sel.composite) {
    metrics.push_back("composite");
    LossBreakdown m{csum.pixel / n, csum.perceptual_proxy / n, csum.tv / n,
                    sel.composite_options.alpha, csum.total / n};
    mean["composite"] = composite_json(m);
  }
  return {{"metrics", std::move(metrics)},
          {"frame_count", scores.size()},
          {"frames", std::move(frames)},
          {"mean", std::move(mean)}};
}

}  // namespace dwta::report
