#pragma once

// One-level orthonormal Haar DWT and the normalized texture-complexity map built from its
// detail sub-bands.

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "dwta/core.hpp"
#include "dwta/imgproc.hpp"

namespace dwta {

// Sub-bands of one channel at ceil(w/2) x ceil(h/2). For each 2x2 block [[p,q],[r,s]]:
//   ll = (p+q+r+s)/2   lh = (p-q+r-s)/2   hl = (p+q-r-s)/2   hh = (p-q-r+s)/2
struct HaarBands {
  Plane ll, lh, hl, hh;
};

// Odd dimensions are edge-replicated to even before the transform.
inline std::vector<HaarBands> dwt2_haar(const Frame& frame) {
  const int hw = (frame.width() + 1) / 2, hh = (frame.height() + 1) / 2;
  const int W = frame.width(), H = frame.height();
  std::vector<HaarBands> out;
  out.reserve(frame.channels());
  for (int c = 0; c < frame.channels(); ++c) {
    HaarBands b{Plane(hw, hh), Plane(hw, hh), Plane(hw, hh), Plane(hw, hh)};
    const auto px = [&](int x, int y) -> double {
      return frame.at(std::min(x, W - 1), std::min(y, H - 1), c);
    };
    for (int y = 0; y < hh; ++y)
      for (int x = 0; x < hw; ++x) {
        const double p = px(2 * x, 2 * y), q = px(2 * x + 1, 2 * y);
        const double r = px(2 * x, 2 * y + 1), s = px(2 * x + 1, 2 * y + 1);
        b.ll.at(x, y) = static_cast<Sample>((p + q + r + s) * 0.5);
        b.lh.at(x, y) = static_cast<Sample>((p - q + r - s) * 0.5);
        b.hl.at(x, y) = static_cast<Sample>((p + q - r - s) * 0.5);
        b.hh.at(x, y) = static_cast<Sample>((p - q - r + s) * 0.5);
      }
    out.push_back(std::move(b));
  }
  return out;
}

// Inverse transform, cropped back to width x height.
inline Frame idwt2_haar(const std::vector<HaarBands>& bands, int width, int height) {
  const int ch = static_cast<int>(bands.size());
  if (ch != 1 && ch != 3) throw ArgumentError("idwt2_haar: expected 1 or 3 channels");
  const std::size_t npix = static_cast<std::size_t>(width) * height;
  std::vector<Sample> out(npix * ch);
  for (int c = 0; c < ch; ++c) {
    const auto& b = bands[c];
    if (b.ll.width != (width + 1) / 2 || b.ll.height != (height + 1) / 2)
      throw ArgumentError("idwt2_haar: sub-band size does not match output size");
    for (int y = 0; y < b.ll.height; ++y)
      for (int x = 0; x < b.ll.width; ++x) {
        const double ll = b.ll.at(x, y), lh = b.lh.at(x, y), hl = b.hl.at(x, y), hh = b.hh.at(x, y);
        const double vals[4] = {(ll + lh + hl + hh) * 0.5, (ll - lh + hl - hh) * 0.5,
                                (ll + lh - hl - hh) * 0.5, (ll - lh - hl + hh) * 0.5};
        for (int k = 0; k < 4; ++k) {
          const int px = 2 * x + (k & 1), py = 2 * y + (k >> 1);
          if (px < width && py < height)
            out[c * npix + static_cast<std::size_t>(py) * width + px] = static_cast<Sample>(vals[k]);
        }
      }
  }
  return Frame::from_samples(width, height, ch, std::move(out));
}

enum class TextureReduction {
  // std across the detail planes per pixel, then spatial box mean (default)
  ChannelStdThenSpatialMean,
  // local spatial std per detail plane, then mean across planes
  SpatialStdThenChannelMean,
};

struct TextureOptions {
  int window = 8;
  TextureReduction reduction = TextureReduction::ChannelStdThenSpatialMean;
};

inline constexpr double kTextureDegenerateRange = 1e-8;

// Half-resolution texture score before min-max normalization.
inline Plane texture_score(const Frame& frame, const TextureOptions& opt = {}) {
  if (frame.width() < 2 || frame.height() < 2) throw ArgumentError("texture_map: frame must be >= 2x2");
  if (opt.window < 1) throw ArgumentError("texture_map: window must be >= 1");
  const auto bands = dwt2_haar(frame);
  std::vector<const Plane*> detail;
  for (const auto& b : bands) {
    detail.push_back(&b.lh);
    detail.push_back(&b.hl);
    detail.push_back(&b.hh);
  }
  const int w = bands[0].ll.width, h = bands[0].ll.height;
  const double n = static_cast<double>(detail.size());

  if (opt.reduction == TextureReduction::ChannelStdThenSpatialMean) {
    Plane sigma(w, h);
    for (std::size_t i = 0; i < sigma.size(); ++i) {
      double s = 0.0, s2 = 0.0;
      for (const Plane* p : detail) {
        const double v = p->values[i];
        s += v;
        s2 += v * v;
      }
      const double m = s / n;
      sigma.values[i] = static_cast<Sample>(std::sqrt(std::max(0.0, s2 / n - m * m)));
    }
    return imgproc::box_mean(sigma, opt.window);
  }

  Plane score(w, h);
  std::vector<double> acc(score.size(), 0.0);
  for (const Plane* p : detail) {
    const Plane sd = imgproc::box_stddev(*p, opt.window);
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += sd.values[i];
  }
  for (std::size_t i = 0; i < acc.size(); ++i) score.values[i] = static_cast<Sample>(acc[i] / n);
  return score;
}

// Min-max normalized texture score, upsampled to frame resolution. A flat score (range below
// 1e-8) yields an all-zero map.
inline TextureMap texture_map(const Frame& frame, const TextureOptions& opt = {}) {
  Plane score = texture_score(frame, opt);
  const auto [lo_it, hi_it] = std::minmax_element(score.values.begin(), score.values.end());
  const double lo = *lo_it, hi = *hi_it;
  if (hi - lo < kTextureDegenerateRange)
    return TextureMap(Plane(frame.width(), frame.height(), 0.0f));
  for (auto& v : score.values) v = static_cast<Sample>((v - lo) / (hi - lo));
  return TextureMap(imgproc::resize_bilinear(score, frame.width(), frame.height()));
}

}  // namespace dwta
