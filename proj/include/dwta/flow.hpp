#pragma once

// Built-in dense flow (coarse-to-fine block matching on luma) and global brightness matching.
//
// Flow is *backward*: vector (u,v) at pixel p of the current frame points at p + (u,v) in the
// previous frame, which is what warp_backward consumes.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "dwta/core.hpp"
#include "dwta/imgproc.hpp"
#include "dwta/parallel.hpp"

namespace dwta {

struct FlowParams {
  int levels = 3;
  int block = 8;
  int radius = 4;
  bool subpixel = false;  // parabolic refinement; off by default, see README

  void validate() const {
    if (levels < 1) throw ArgumentError("flow levels must be >= 1");
    if (block < 2) throw ArgumentError("flow block size must be >= 2");
    if (radius < 1) throw ArgumentError("flow search radius must be >= 1");
  }
};

inline constexpr double kBrightnessEps = 1e-6;
inline constexpr double kMinBrightnessGain = 0.25;
inline constexpr double kMaxBrightnessGain = 4.0;

// Clamped ratio of mean lumas, reference over source.
inline double brightness_gain(const Frame& source, const Frame& reference) {
  const double src = mean_sample(luma(source));
  const double ref = mean_sample(luma(reference));
  return std::clamp(ref / std::max(src, kBrightnessEps), kMinBrightnessGain, kMaxBrightnessGain);
}

inline Frame brightness_adjust(const Frame& source, const Frame& reference) {
  if (source.width() != reference.width() || source.height() != reference.height())
    throw ArgumentError("brightness_adjust: dimension mismatch");
  const double g = brightness_gain(source, reference);
  if (g == 1.0) return source;
  std::vector<Sample> out(source.samples().begin(), source.samples().end());
  for (auto& s : out) s = static_cast<Sample>(std::min(1.0, s * g));
  return Frame::from_samples(source.width(), source.height(), source.channels(), std::move(out));
}

namespace detail {

struct BlockGrid {
  int width, height, block, nx, ny;

  BlockGrid(int w, int h, int b)
      : width(w), height(h), block(b), nx((w + b - 1) / b), ny((h + b - 1) / b) {}

  int x0(int bx) const { return bx * block; }
  int y0(int by) const { return by * block; }
  int x1(int bx) const { return std::min(width, (bx + 1) * block); }
  int y1(int by) const { return std::min(height, (by + 1) * block); }
  double cx(int bx) const { return x0(bx) + (x1(bx) - x0(bx) - 1) * 0.5; }
  double cy(int by) const { return y0(by) + (y1(by) - y0(by) - 1) * 0.5; }
};

// Piecewise-linear interpolation weights along one axis between block centres.
struct AxisLerp {
  int i0, i1;
  double t;
};

template <typename CenterFn>
std::vector<AxisLerp> axis_lerp(int length, int nblocks, CenterFn center) {
  std::vector<AxisLerp> out(length);
  int k = 0;
  for (int p = 0; p < length; ++p) {
    if (nblocks == 1 || p <= center(0)) {
      out[p] = {0, 0, 0.0};
      continue;
    }
    if (p >= center(nblocks - 1)) {
      out[p] = {nblocks - 1, nblocks - 1, 0.0};
      continue;
    }
    while (k + 1 < nblocks && center(k + 1) <= p) ++k;
    const double c0 = center(k), c1 = center(k + 1);
    out[p] = {k, k + 1, (p - c0) / (c1 - c0)};
  }
  return out;
}

struct BlockVector {
  double u = 0.0, v = 0.0;
};

// Bilinear interpolation of block vectors to a per-pixel field.
inline std::vector<BlockVector> densify(const BlockGrid& g, const std::vector<BlockVector>& blocks) {
  const auto lx = axis_lerp(g.width, g.nx, [&](int i) { return g.cx(i); });
  const auto ly = axis_lerp(g.height, g.ny, [&](int i) { return g.cy(i); });
  std::vector<BlockVector> dense(static_cast<std::size_t>(g.width) * g.height);
  for (int y = 0; y < g.height; ++y) {
    const auto& ay = ly[y];
    for (int x = 0; x < g.width; ++x) {
      const auto& ax = lx[x];
      const auto& b00 = blocks[ay.i0 * g.nx + ax.i0];
      const auto& b01 = blocks[ay.i0 * g.nx + ax.i1];
      const auto& b10 = blocks[ay.i1 * g.nx + ax.i0];
      const auto& b11 = blocks[ay.i1 * g.nx + ax.i1];
      const double w00 = (1 - ax.t) * (1 - ay.t), w01 = ax.t * (1 - ay.t);
      const double w10 = (1 - ax.t) * ay.t, w11 = ax.t * ay.t;
      dense[static_cast<std::size_t>(y) * g.width + x] = {
          w00 * b00.u + w01 * b01.u + w10 * b10.u + w11 * b11.u,
          w00 * b00.v + w01 * b01.v + w10 * b10.v + w11 * b11.v};
    }
  }
  return dense;
}

// Sum of absolute differences between a block of `curr` and `prev` displaced by (du,dv),
// with prev read edge-replicated.
inline double block_sad(const Plane& curr, const Plane& prev, int x0, int x1, int y0, int y1,
                        int du, int dv) {
  double sad = 0.0;
  for (int y = y0; y < y1; ++y) {
    const int sy = std::clamp(y + dv, 0, prev.height - 1);
    const Sample* crow = &curr.values[static_cast<std::size_t>(y) * curr.width];
    const Sample* prow = &prev.values[static_cast<std::size_t>(sy) * prev.width];
    for (int x = x0; x < x1; ++x) {
      const int sx = std::clamp(x + du, 0, prev.width - 1);
      sad += std::abs(static_cast<double>(crow[x]) - prow[sx]);
    }
  }
  return sad;
}

// Vertex offset of the parabola through (-1,sm), (0,s0), (+1,sp), limited to half a pixel.
inline double parabolic_offset(double sm, double s0, double sp) {
  const double denom = sm - 2.0 * s0 + sp;
  if (!(denom > 0.0)) return 0.0;
  return std::clamp((sm - sp) / (2.0 * denom), -0.5, 0.5);
}

inline std::vector<BlockVector> match_level(const Plane& prev, const Plane& curr,
                                            const BlockGrid& g,
                                            const std::vector<BlockVector>* coarse_dense,
                                            int coarse_width, int coarse_height,
                                            const FlowParams& params) {
  std::vector<BlockVector> blocks(static_cast<std::size_t>(g.nx) * g.ny);
  const int r = params.radius;
  parallel_for(g.ny, [&](int by) {
    for (int bx = 0; bx < g.nx; ++bx) {
      const int x0 = g.x0(bx), x1 = g.x1(bx), y0 = g.y0(by), y1 = g.y1(by);
      int pu = 0, pv = 0;
      if (coarse_dense) {
        const int cx = std::clamp(static_cast<int>(g.cx(bx)) / 2, 0, coarse_width - 1);
        const int cy = std::clamp(static_cast<int>(g.cy(by)) / 2, 0, coarse_height - 1);
        const auto& c = (*coarse_dense)[static_cast<std::size_t>(cy) * coarse_width + cx];
        pu = static_cast<int>(std::lround(2.0 * c.u));
        pv = static_cast<int>(std::lround(2.0 * c.v));
      }
      double best_sad = std::numeric_limits<double>::infinity();
      long best_mag = std::numeric_limits<long>::max();
      int best_u = pu, best_v = pv;
      // Row-major candidate order; strict comparisons keep the earliest among equals.
      for (int dv = -r; dv <= r; ++dv) {
        for (int du = -r; du <= r; ++du) {
          const int u = pu + du, v = pv + dv;
          const double sad = block_sad(curr, prev, x0, x1, y0, y1, u, v);
          const long mag = static_cast<long>(u) * u + static_cast<long>(v) * v;
          if (sad < best_sad || (sad == best_sad && mag < best_mag)) {
            best_sad = sad;
            best_mag = mag;
            best_u = u;
            best_v = v;
          }
        }
      }
      BlockVector bv{static_cast<double>(best_u), static_cast<double>(best_v)};
      if (params.subpixel) {
        const double sl = block_sad(curr, prev, x0, x1, y0, y1, best_u - 1, best_v);
        const double sr = block_sad(curr, prev, x0, x1, y0, y1, best_u + 1, best_v);
        const double su = block_sad(curr, prev, x0, x1, y0, y1, best_u, best_v - 1);
        const double sd = block_sad(curr, prev, x0, x1, y0, y1, best_u, best_v + 1);
        bv.u += parabolic_offset(sl, best_sad, sr);
        bv.v += parabolic_offset(su, best_sad, sd);
      }
      blocks[static_cast<std::size_t>(by) * g.nx + bx] = bv;
    }
  });
  return blocks;
}

}  // namespace detail

// Coarse-to-fine block matching on luma. Deterministic: ties in SAD go to the smaller
// displacement, then to the earlier candidate in row-major order.
inline FlowField estimate_flow(const Frame& prev, const Frame& curr, const FlowParams& params = {}) {
  params.validate();
  if (prev.width() != curr.width() || prev.height() != curr.height())
    throw ArgumentError("estimate_flow: dimension mismatch");

  std::vector<Plane> pyr_prev{luma_plane(prev)};
  std::vector<Plane> pyr_curr{luma_plane(curr)};
  for (int l = 1; l < params.levels; ++l) {
    pyr_prev.push_back(imgproc::pool2(pyr_prev.back()));
    pyr_curr.push_back(imgproc::pool2(pyr_curr.back()));
  }

  std::vector<detail::BlockVector> dense;
  int dense_w = 0, dense_h = 0;
  for (int l = params.levels - 1; l >= 0; --l) {
    const Plane& p = pyr_prev[l];
    const Plane& c = pyr_curr[l];
    const detail::BlockGrid grid(c.width, c.height, params.block);
    const auto blocks = detail::match_level(p, c, grid, dense.empty() ? nullptr : &dense,
                                            dense_w, dense_h, params);
    dense = detail::densify(grid, blocks);
    dense_w = c.width;
    dense_h = c.height;
  }

  const double bound = std::max(curr.width(), curr.height());
  std::vector<float> vec(dense.size() * 2);
  for (std::size_t i = 0; i < dense.size(); ++i) {
    double u = dense[i].u, v = dense[i].v;
    const double mag = std::hypot(u, v);
    if (mag > bound) {
      u *= bound / mag;
      v *= bound / mag;
    }
    vec[2 * i] = static_cast<float>(u);
    vec[2 * i + 1] = static_cast<float>(v);
  }
  // Float rounding of a rescaled vector can land a hair above the bound.
  for (std::size_t i = 0; i < vec.size(); i += 2) {
    while (std::hypot(static_cast<double>(vec[i]), static_cast<double>(vec[i + 1])) > bound) {
      vec[i] = std::nextafter(vec[i], 0.0f);
      vec[i + 1] = std::nextafter(vec[i + 1], 0.0f);
    }
  }
  return FlowField::from_vectors(curr.width(), curr.height(), std::move(vec));
}

}  // namespace dwta
