#pragma once

// Full-reference metrics and the texture-adaptive composite objective.
//
// The composite is  L = mean(sq_err) + alpha * mean(M_T * P + (1 - M_T) * TV)  with M_T the
// texture map of the reference, P a multi-scale gradient-magnitude discrepancy standing in for
// a learned perceptual feature distance, and TV the anisotropic total variation of the test
// frame itself.

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "dwta/core.hpp"
#include "dwta/imgproc.hpp"
#include "dwta/texture.hpp"

namespace dwta {

inline void require_same_shape(const Frame& a, const Frame& b, const char* what) {
  if (!a.same_shape(b)) throw ArgumentError(std::string(what) + ": dimension mismatch");
}

inline double mse(const Frame& test, const Frame& ref) {
  require_same_shape(test, ref, "mse");
  const auto a = test.samples(), b = ref.samples();
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = static_cast<double>(a[i]) - b[i];
    s += d * d;
  }
  return s / static_cast<double>(a.size());
}

// 10 log10(1 / MSE) over all channels; +inf for identical inputs.
inline double psnr(const Frame& test, const Frame& ref) {
  const double e = mse(test, ref);
  if (e == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(1.0 / e);
}

struct SsimParams {
  int window = 11;
  double sigma = 1.5;
  double k1 = 0.01;
  double k2 = 0.03;
};

namespace detail {

inline std::vector<double> gaussian_kernel(int radius, double sigma) {
  std::vector<double> k(2 * radius + 1);
  double s = 0.0;
  for (int i = -radius; i <= radius; ++i) s += k[i + radius] = std::exp(-(i * i) / (2.0 * sigma * sigma));
  for (auto& v : k) v /= s;
  return k;
}

// 'valid' separable correlation of a w x h double image.
inline std::vector<double> filter_valid(const std::vector<double>& in, int w, int h,
                                        const std::vector<double>& k, int& ow, int& oh) {
  const int n = static_cast<int>(k.size());
  ow = w - n + 1;
  oh = h - n + 1;
  std::vector<double> tmp(static_cast<std::size_t>(ow) * h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < ow; ++x) {
      double s = 0.0;
      for (int i = 0; i < n; ++i) s += k[i] * in[static_cast<std::size_t>(y) * w + x + i];
      tmp[static_cast<std::size_t>(y) * ow + x] = s;
    }
  std::vector<double> out(static_cast<std::size_t>(ow) * oh);
  for (int y = 0; y < oh; ++y)
    for (int x = 0; x < ow; ++x) {
      double s = 0.0;
      for (int i = 0; i < n; ++i) s += k[i] * tmp[static_cast<std::size_t>(y + i) * ow + x];
      out[static_cast<std::size_t>(y) * ow + x] = s;
    }
  return out;
}

}  // namespace detail

// Mean local SSIM on luma, Gaussian window over every position where it fits entirely.
// Frames smaller than the window shrink it to the largest odd size that fits.
inline double ssim(const Frame& test, const Frame& ref, const SsimParams& p = {}) {
  if (test.width() != ref.width() || test.height() != ref.height())
    throw ArgumentError("ssim: dimension mismatch");
  const int w = test.width(), h = test.height();
  const int radius = std::min(p.window / 2, (std::min(w, h) - 1) / 2);
  const auto k = detail::gaussian_kernel(radius, p.sigma);

  const Frame lx = luma(test), ly = luma(ref);
  const std::size_t n = lx.pixel_count();
  std::vector<double> x(n), y(n), xx(n), yy(n), xy(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = lx.samples()[i];
    y[i] = ly.samples()[i];
    xx[i] = x[i] * x[i];
    yy[i] = y[i] * y[i];
    xy[i] = x[i] * y[i];
  }
  int ow = 0, oh = 0;
  const auto mx = detail::filter_valid(x, w, h, k, ow, oh);
  const auto my = detail::filter_valid(y, w, h, k, ow, oh);
  const auto mxx = detail::filter_valid(xx, w, h, k, ow, oh);
  const auto myy = detail::filter_valid(yy, w, h, k, ow, oh);
  const auto mxy = detail::filter_valid(xy, w, h, k, ow, oh);

  constexpr double kRange = 1.0;  // unit-interval samples
  const double c1 = (p.k1 * kRange) * (p.k1 * kRange), c2 = (p.k2 * kRange) * (p.k2 * kRange);
  double total = 0.0;
  for (std::size_t i = 0; i < mx.size(); ++i) {
    const double vx = mxx[i] - mx[i] * mx[i];
    const double vy = myy[i] - my[i] * my[i];
    const double cxy = mxy[i] - mx[i] * my[i];
    const double num = (2.0 * mx[i] * my[i] + c1) * (2.0 * cxy + c2);
    const double den = (mx[i] * mx[i] + my[i] * my[i] + c1) * (vx + vy + c2);
    total += num / den;
  }
  return total / static_cast<double>(mx.size());
}

// Anisotropic TV per pixel: channel mean of |dx| + |dy|, forward differences, zero at the
// last row/column.
inline Plane tv_map(const Frame& frame) {
  const int w = frame.width(), h = frame.height(), ch = frame.channels();
  Plane out(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int c = 0; c < ch; ++c) {
        const double v = frame.at(x, y, c);
        if (x + 1 < w) acc += std::abs(static_cast<double>(frame.at(x + 1, y, c)) - v);
        if (y + 1 < h) acc += std::abs(static_cast<double>(frame.at(x, y + 1, c)) - v);
      }
      out.at(x, y) = static_cast<Sample>(acc / ch);
    }
  return out;
}

inline constexpr int kProxyScales = 3;

// Squared difference of Sobel gradient magnitudes on luma at scales 1, 1/2, 1/4, coarser
// scales upsampled bilinearly, averaged.
inline Plane perceptual_proxy_map(const Frame& test, const Frame& ref) {
  if (test.width() != ref.width() || test.height() != ref.height())
    throw ArgumentError("perceptual_proxy_map: dimension mismatch");
  const int w = test.width(), h = test.height();
  Plane lt = luma_plane(test), lr = luma_plane(ref);
  std::vector<double> acc(static_cast<std::size_t>(w) * h, 0.0);
  for (int s = 0; s < kProxyScales; ++s) {
    if (s > 0) {
      lt = imgproc::pool2(lt);
      lr = imgproc::pool2(lr);
    }
    const Plane gt = imgproc::sobel_magnitude(lt), gr = imgproc::sobel_magnitude(lr);
    Plane d(gt.width, gt.height);
    for (std::size_t i = 0; i < d.size(); ++i) {
      const double e = static_cast<double>(gt.values[i]) - gr.values[i];
      d.values[i] = static_cast<Sample>(e * e);
    }
    const Plane up = imgproc::resize_bilinear(d, w, h);
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += up.values[i];
  }
  Plane out(w, h);
  for (std::size_t i = 0; i < acc.size(); ++i) out.values[i] = static_cast<Sample>(acc[i] / kProxyScales);
  return out;
}

// Channel-mean squared error per pixel.
inline Plane squared_error_map(const Frame& test, const Frame& ref) {
  require_same_shape(test, ref, "squared_error_map");
  const std::size_t npix = test.pixel_count();
  const int ch = test.channels();
  Plane out(test.width(), test.height());
  const auto a = test.samples(), b = ref.samples();
  for (std::size_t i = 0; i < npix; ++i) {
    double s = 0.0;
    for (int c = 0; c < ch; ++c) {
      const double d = static_cast<double>(a[c * npix + i]) - b[c * npix + i];
      s += d * d;
    }
    out.values[i] = static_cast<Sample>(s / ch);
  }
  return out;
}

struct CompositeOptions {
  double alpha = 0.5;
  TextureOptions texture{};
};

struct LossBreakdown {
  double pixel = 0.0;             // mean squared error
  double perceptual_proxy = 0.0;  // mean(M_T * P)
  double tv = 0.0;                // mean((1 - M_T) * TV)
  double alpha = 0.5;
  double total = 0.0;
};

inline LossBreakdown composite_loss(const Frame& test, const Frame& ref,
                                    const CompositeOptions& opt = {}) {
  require_same_shape(test, ref, "composite_loss");
  const Plane sq = squared_error_map(test, ref);
  const Plane proxy = perceptual_proxy_map(test, ref);
  const Plane tv = tv_map(test);
  const TextureMap mt = texture_map(ref, opt.texture);

  double s_pix = 0.0, s_proxy = 0.0, s_tv = 0.0;
  for (std::size_t i = 0; i < sq.size(); ++i) {
    const double m = mt.plane().values[i];
    s_pix += sq.values[i];
    s_proxy += m * proxy.values[i];
    s_tv += (1.0 - m) * tv.values[i];
  }
  const double n = static_cast<double>(sq.size());
  LossBreakdown out;
  out.pixel = s_pix / n;
  out.perceptual_proxy = s_proxy / n;
  out.tv = s_tv / n;
  out.alpha = opt.alpha;
  out.total = out.pixel + opt.alpha * (out.perceptual_proxy + out.tv);
  return out;
}

inline LossBreakdown composite_loss(const Frame& test, const Frame& ref, double alpha) {
  CompositeOptions opt;
  opt.alpha = alpha;
  return composite_loss(test, ref, opt);
}

}  // namespace dwta
