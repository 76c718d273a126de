#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "dwta/core.hpp"
#include "dwta/parallel.hpp"

namespace dwta {

struct WarpResult {
  Frame frame;
  // 1 where the unclamped source position lies inside the image, 0 otherwise.
  Plane validity;
};

// Pull warp: out(x,y) = frame(x + u, y + v), bilinear, source position clamped to the image.
inline WarpResult warp_backward(const Frame& frame, const FlowField& flow) {
  const int w = frame.width(), h = frame.height(), ch = frame.channels();
  if (flow.width() != w || flow.height() != h) throw ArgumentError("warp_backward: dimension mismatch");

  const std::size_t npix = frame.pixel_count();
  std::vector<Sample> out(npix * ch);
  Plane validity(w, h, 0.0f);
  parallel_for(h, [&](int y) {
    for (int x = 0; x < w; ++x) {
      const double sx = x + static_cast<double>(flow.u(x, y));
      const double sy = y + static_cast<double>(flow.v(x, y));
      const bool inside = sx >= 0.0 && sx <= w - 1.0 && sy >= 0.0 && sy <= h - 1.0;
      validity.at(x, y) = inside ? 1.0f : 0.0f;

      const double fx = std::clamp(sx, 0.0, w - 1.0);
      const double fy = std::clamp(sy, 0.0, h - 1.0);
      const int x0 = static_cast<int>(std::floor(fx));
      const int y0 = static_cast<int>(std::floor(fy));
      const int x1 = std::min(x0 + 1, w - 1);
      const int y1 = std::min(y0 + 1, h - 1);
      const double tx = fx - x0, ty = fy - y0;
      const std::size_t i = static_cast<std::size_t>(y) * w + x;
      for (int c = 0; c < ch; ++c) {
        const double top = (1.0 - tx) * frame.at(x0, y0, c) + tx * frame.at(x1, y0, c);
        const double bot = (1.0 - tx) * frame.at(x0, y1, c) + tx * frame.at(x1, y1, c);
        out[c * npix + i] = static_cast<Sample>((1.0 - ty) * top + ty * bot);
      }
    }
  });
  return {Frame::from_samples(w, h, ch, std::move(out)), std::move(validity)};
}

}  // namespace dwta
