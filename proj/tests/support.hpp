#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include <unistd.h>

#include "dwta/dwta.hpp"

namespace dwta::testing {

namespace fs = std::filesystem;

inline Frame random_frame(int w, int h, int ch, std::uint32_t seed, double lo = 0.0, double hi = 1.0) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> dist(lo, hi);
  std::vector<Sample> s(static_cast<std::size_t>(w) * h * ch);
  for (auto& v : s) v = static_cast<Sample>(dist(rng));
  return Frame::from_samples(w, h, ch, std::move(s));
}

inline Frame constant_frame(int w, int h, int ch, double v) { return Frame(w, h, ch, static_cast<Sample>(v)); }

inline Frame make_frame(int w, int h, int ch, const auto& fn) {
  std::vector<Sample> s(static_cast<std::size_t>(w) * h * ch);
  const std::size_t n = static_cast<std::size_t>(w) * h;
  for (int c = 0; c < ch; ++c)
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) s[c * n + static_cast<std::size_t>(y) * w + x] = static_cast<Sample>(fn(x, y, c));
  return Frame::from_samples(w, h, ch, std::move(s));
}

// Scratch directory removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path_ = fs::temp_directory_path() /
            ("dwta_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const fs::path& path() const { return path_; }
  fs::path operator/(const std::string& name) const { return path_ / name; }

 private:
  fs::path path_;
};

// Temporally constant textured signal plus i.i.d. Gaussian noise of the given std, frame by
// frame from a counter-based stream.
struct NoisyStatic {
  Frame clean;
  std::vector<Frame> noisy;
};

inline NoisyStatic noisy_static(int w, int h, int n, double sigma, std::uint64_t scene_seed,
                                std::uint64_t noise_seed) {
  NoisyStatic s{gen_scene(SceneKind::StaticTexture, w, h, 1, scene_seed)[0], {}};
  DegradeParams p;
  p.gain = 1.0;
  p.gamma = 1.0;
  p.read_sigma = sigma;
  p.shot_k = 0.0;
  p.seed = noise_seed;
  s.noisy.reserve(n);
  for (int t = 0; t < n; ++t) s.noisy.push_back(degrade_frame(s.clean, p, static_cast<std::uint32_t>(t)));
  return s;
}

// Output error power over input error power against the clean signal, frames [t0, t1).
inline double variance_ratio(const NoisyStatic& s, const std::vector<Frame>& out, std::size_t t0,
                             std::size_t t1) {
  const auto c = s.clean.samples();
  double vin = 0.0, vout = 0.0;
  for (std::size_t t = t0; t < t1; ++t) {
    const auto a = s.noisy[t].samples(), b = out[t].samples();
    for (std::size_t i = 0; i < c.size(); ++i) {
      const double ei = static_cast<double>(a[i]) - c[i];
      const double eo = static_cast<double>(b[i]) - c[i];
      vin += ei * ei;
      vout += eo * eo;
    }
  }
  return vout / vin;
}

}  // namespace dwta::testing
