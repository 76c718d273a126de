#pragma once

// Small single-plane filters shared by flow, texture and quality.

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "dwta/core.hpp"
#include "dwta/parallel.hpp"

namespace dwta::imgproc {

// 2x2 mean pooling; odd trailing row/column is edge-replicated. Output is ceil(w/2) x ceil(h/2).
inline Plane pool2(const Plane& in) {
  Plane out((in.width + 1) / 2, (in.height + 1) / 2);
  for (int y = 0; y < out.height; ++y) {
    for (int x = 0; x < out.width; ++x) {
      const double s = static_cast<double>(in.clamped(2 * x, 2 * y)) + in.clamped(2 * x + 1, 2 * y) +
                       in.clamped(2 * x, 2 * y + 1) + in.clamped(2 * x + 1, 2 * y + 1);
      out.at(x, y) = static_cast<Sample>(s * 0.25);
    }
  }
  return out;
}

// Bilinear resampling with pixel-centre alignment and edge clamping.
inline Plane resize_bilinear(const Plane& in, int width, int height) {
  if (in.width == width && in.height == height) return in;
  Plane out(width, height);
  const double sx = static_cast<double>(in.width) / width;
  const double sy = static_cast<double>(in.height) / height;
  for (int y = 0; y < height; ++y) {
    const double fy = std::clamp((y + 0.5) * sy - 0.5, 0.0, in.height - 1.0);
    const int y0 = static_cast<int>(fy);
    const int y1 = std::min(y0 + 1, in.height - 1);
    const double ty = fy - y0;
    for (int x = 0; x < width; ++x) {
      const double fx = std::clamp((x + 0.5) * sx - 0.5, 0.0, in.width - 1.0);
      const int x0 = static_cast<int>(fx);
      const int x1 = std::min(x0 + 1, in.width - 1);
      const double tx = fx - x0;
      const double top = (1.0 - tx) * in.at(x0, y0) + tx * in.at(x1, y0);
      const double bot = (1.0 - tx) * in.at(x0, y1) + tx * in.at(x1, y1);
      out.at(x, y) = static_cast<Sample>((1.0 - ty) * top + ty * bot);
    }
  }
  return out;
}

// Summed-area table with a zero border row/column, (w+1) x (h+1).
inline std::vector<double> integral(const Plane& in, bool squared = false) {
  const int w = in.width, h = in.height;
  std::vector<double> sat(static_cast<std::size_t>(w + 1) * (h + 1), 0.0);
  for (int y = 0; y < h; ++y) {
    double row = 0.0;
    for (int x = 0; x < w; ++x) {
      const double v = in.at(x, y);
      row += squared ? v * v : v;
      sat[static_cast<std::size_t>(y + 1) * (w + 1) + x + 1] =
          sat[static_cast<std::size_t>(y) * (w + 1) + x + 1] + row;
    }
  }
  return sat;
}

// Window covering [x - window/2, x - window/2 + window - 1] clipped to the plane.
struct BoxWindow {
  int x0, x1, y0, y1;  // half-open
  double count() const { return static_cast<double>(x1 - x0) * (y1 - y0); }
};

inline BoxWindow box_window(int x, int y, int window, int width, int height) {
  const int lo = window / 2;
  return {std::max(0, x - lo), std::min(width, x - lo + window), std::max(0, y - lo),
          std::min(height, y - lo + window)};
}

inline double box_sum(const std::vector<double>& sat, int width, const BoxWindow& b) {
  const auto idx = [width](int x, int y) { return static_cast<std::size_t>(y) * (width + 1) + x; };
  return sat[idx(b.x1, b.y1)] - sat[idx(b.x0, b.y1)] - sat[idx(b.x1, b.y0)] + sat[idx(b.x0, b.y0)];
}

// Spatial box mean over a window x window neighbourhood, averaging only in-bounds pixels.
inline Plane box_mean(const Plane& in, int window) {
  if (window < 1) throw ArgumentError("box window must be >= 1");
  const auto sat = integral(in);
  Plane out(in.width, in.height);
  for (int y = 0; y < in.height; ++y)
    for (int x = 0; x < in.width; ++x) {
      const auto b = box_window(x, y, window, in.width, in.height);
      out.at(x, y) = static_cast<Sample>(box_sum(sat, in.width, b) / b.count());
    }
  return out;
}

// Local standard deviation over the same window as box_mean.
inline Plane box_stddev(const Plane& in, int window) {
  if (window < 1) throw ArgumentError("box window must be >= 1");
  const auto sat = integral(in);
  const auto sat2 = integral(in, true);
  Plane out(in.width, in.height);
  for (int y = 0; y < in.height; ++y)
    for (int x = 0; x < in.width; ++x) {
      const auto b = box_window(x, y, window, in.width, in.height);
      const double n = b.count();
      const double m = box_sum(sat, in.width, b) / n;
      const double var = box_sum(sat2, in.width, b) / n - m * m;
      out.at(x, y) = static_cast<Sample>(std::sqrt(std::max(0.0, var)));
    }
  return out;
}

// Sobel gradient magnitude, kernels scaled by 1/8 so a unit ramp gives 1. Replicated border.
inline Plane sobel_magnitude(const Plane& in) {
  Plane out(in.width, in.height);
  for (int y = 0; y < in.height; ++y)
    for (int x = 0; x < in.width; ++x) {
      const auto p = [&](int dx, int dy) -> double { return in.clamped(x + dx, y + dy); };
      const double gx = (p(1, -1) + 2.0 * p(1, 0) + p(1, 1)) - (p(-1, -1) + 2.0 * p(-1, 0) + p(-1, 1));
      const double gy = (p(-1, 1) + 2.0 * p(0, 1) + p(1, 1)) - (p(-1, -1) + 2.0 * p(0, -1) + p(1, -1));
      out.at(x, y) = static_cast<Sample>(std::sqrt(gx * gx + gy * gy) / 8.0);
    }
  return out;
}

inline Plane median3x3(const Plane& in) {
  Plane out(in.width, in.height);
  std::array<Sample, 9> win{};
  for (int y = 0; y < in.height; ++y)
    for (int x = 0; x < in.width; ++x) {
      int k = 0;
      for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx) win[k++] = in.clamped(x + dx, y + dy);
      std::nth_element(win.begin(), win.begin() + 4, win.end());
      out.at(x, y) = win[4];
    }
  return out;
}

}  // namespace dwta::imgproc
