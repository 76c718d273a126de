#pragma once

// On-disk formats: PNG frames + JSON manifest sequences, Middlebury .flo flow, grayscale maps.

#include <png.h>

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dwta/core.hpp"

namespace dwta::io {

namespace fs = std::filesystem;

struct SequenceManifest {
  int width = 0;
  int height = 0;
  double fps = 30.0;
  std::vector<std::string> frames;  // relative to the manifest's directory

  void validate() const {
    detail::check_dims(width, height);
    if (!(fps > 0.0) || !std::isfinite(fps)) throw FormatError("manifest fps must be > 0");
    if (frames.empty()) throw FormatError("manifest lists no frames");
    std::set<std::string> seen;
    for (const auto& f : frames)
      if (!seen.insert(f).second) throw FormatError("manifest lists '" + f + "' twice");
  }
};

inline nlohmann::json to_json(const SequenceManifest& m) {
  return {{"width", m.width}, {"height", m.height}, {"fps", m.fps}, {"frames", m.frames}};
}

inline SequenceManifest manifest_from_json(const nlohmann::json& j) {
  SequenceManifest m;
  try {
    m.width = j.at("width").get<int>();
    m.height = j.at("height").get<int>();
    m.fps = j.at("fps").get<double>();
    m.frames = j.at("frames").get<std::vector<std::string>>();
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("bad manifest: ") + e.what());
  }
  try {
    m.validate();
  } catch (const ArgumentError& e) {
    throw FormatError(std::string("bad manifest: ") + e.what());
  }
  return m;
}

inline SequenceManifest read_manifest(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open manifest " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("manifest " + path.string() + " is not valid JSON: " + e.what());
  }
  return manifest_from_json(j);
}

inline void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("write failed for " + path.string());
}

inline void write_manifest(const SequenceManifest& m, const fs::path& path) {
  write_text(path, to_json(m).dump(2) + "\n");
}

inline void ensure_directory(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw IoError("cannot create directory " + dir.string());
}

// ---------------------------------------------------------------------------------------------
// PNG

namespace detail {

[[noreturn]] inline void png_throw(png_structp, png_const_charp msg) {
  throw FormatError(std::string("libpng: ") + msg);
}
inline void png_ignore_warning(png_structp, png_const_charp) {}

struct FileCloser {
  void operator()(std::FILE* f) const { std::fclose(f); }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

}  // namespace detail

// 8-bit samples map to v/255, 16-bit to v/65535. Gray stays one channel; alpha is dropped.
inline Frame read_png(const fs::path& path) {
  detail::FilePtr file(std::fopen(path.c_str(), "rb"));
  if (!file) throw IoError("cannot open image " + path.string());
  unsigned char sig[8];
  if (std::fread(sig, 1, 8, file.get()) != 8 || png_sig_cmp(sig, 0, 8) != 0)
    throw FormatError(path.string() + " is not a PNG file");

  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, detail::png_throw,
                                           detail::png_ignore_warning);
  if (!png) throw Error("png_create_read_struct failed");
  png_infop info = png_create_info_struct(png);
  struct Guard {
    png_structp* png;
    png_infop* info;
    ~Guard() { png_destroy_read_struct(png, info, nullptr); }
  } guard{&png, &info};
  if (!info) throw Error("png_create_info_struct failed");

  std::vector<png_byte> pixels;
  int width = 0, height = 0, channels = 0, depth = 0;
  try {
    png_init_io(png, file.get());
    png_set_sig_bytes(png, 8);
    png_read_info(png, info);
    const auto color = png_get_color_type(png, info);
    if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (color == PNG_COLOR_TYPE_GRAY && png_get_bit_depth(png, info) < 8)
      png_set_expand_gray_1_2_4_to_8(png);
    if (color & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
    png_read_update_info(png, info);

    width = static_cast<int>(png_get_image_width(png, info));
    height = static_cast<int>(png_get_image_height(png, info));
    channels = png_get_channels(png, info);
    depth = png_get_bit_depth(png, info);
    if (channels == 4) channels = 3;  // tRNS expansion on some inputs
    const std::size_t rowbytes = png_get_rowbytes(png, info);
    pixels.resize(rowbytes * height);
    std::vector<png_bytep> rows(height);
    for (int y = 0; y < height; ++y) rows[y] = pixels.data() + rowbytes * y;
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
  if (channels != 1 && channels != 3)
    throw FormatError(path.string() + ": unsupported channel count " + std::to_string(channels));

  const int stride_ch = static_cast<int>(png_get_channels(png, info));
  const std::size_t rowbytes = pixels.size() / height;
  const std::size_t npix = static_cast<std::size_t>(width) * height;
  std::vector<Sample> samples(npix * channels);
  for (int y = 0; y < height; ++y) {
    const png_byte* row = pixels.data() + rowbytes * y;
    for (int x = 0; x < width; ++x) {
      for (int c = 0; c < channels; ++c) {
        const std::size_t k = static_cast<std::size_t>(x) * stride_ch + c;
        double v;
        if (depth == 16)
          v = ((row[2 * k] << 8) | row[2 * k + 1]) / 65535.0;
        else
          v = row[k] / 255.0;
        samples[c * npix + static_cast<std::size_t>(y) * width + x] = static_cast<Sample>(v);
      }
    }
  }
  return Frame::from_samples(width, height, channels, std::move(samples));
}

// round(v * 255), half away from zero, clamped to [0,255].
inline std::uint8_t quantize8(double v) {
  const long q = std::lround(v * 255.0);
  return static_cast<std::uint8_t>(std::clamp(q, 0L, 255L));
}

// Writes interleaved 8-bit samples (1 or 3 channels).
inline void write_png8(const fs::path& path, int width, int height, int channels,
                       const std::vector<std::uint8_t>& interleaved) {
  detail::FilePtr file(std::fopen(path.c_str(), "wb"));
  if (!file) throw IoError("cannot write image " + path.string());
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, detail::png_throw,
                                            detail::png_ignore_warning);
  if (!png) throw Error("png_create_write_struct failed");
  png_infop info = png_create_info_struct(png);
  struct Guard {
    png_structp* png;
    png_infop* info;
    ~Guard() { png_destroy_write_struct(png, info); }
  } guard{&png, &info};
  if (!info) throw Error("png_create_info_struct failed");
  try {
    png_init_io(png, file.get());
    png_set_IHDR(png, info, width, height, 8,
                 channels == 3 ? PNG_COLOR_TYPE_RGB : PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    std::vector<png_bytep> rows(height);
    for (int y = 0; y < height; ++y)
      rows[y] = const_cast<png_bytep>(interleaved.data()) + static_cast<std::size_t>(y) * width * channels;
    png_write_image(png, rows.data());
    png_write_end(png, nullptr);
  } catch (const FormatError& e) {
    throw IoError(path.string() + ": " + e.what());
  }
  if (std::fflush(file.get()) != 0) throw IoError("write failed for " + path.string());
}

inline void write_png(const fs::path& path, const Frame& frame) {
  const int w = frame.width(), h = frame.height(), ch = frame.channels();
  const std::size_t npix = frame.pixel_count();
  std::vector<std::uint8_t> buf(npix * ch);
  const auto s = frame.samples();
  for (std::size_t i = 0; i < npix; ++i)
    for (int c = 0; c < ch; ++c) buf[i * ch + c] = quantize8(s[c * npix + i]);
  write_png8(path, w, h, ch, buf);
}

// Grayscale 8-bit image of a [0,1] map, v*255 rounded.
inline void write_map(const Plane& map, const fs::path& path) {
  std::vector<std::uint8_t> buf(map.size());
  for (std::size_t i = 0; i < buf.size(); ++i) buf[i] = quantize8(map.values[i]);
  write_png8(path, map.width, map.height, 1, buf);
}
inline void write_map(const WeightMap& map, const fs::path& path) { write_map(map.plane(), path); }
inline void write_map(const TextureMap& map, const fs::path& path) { write_map(map.plane(), path); }

// ---------------------------------------------------------------------------------------------
// Frame sequences

// Manifest-backed sequence; frames decode on demand. Every referenced file must exist at open.
class SequenceReader {
 public:
  explicit SequenceReader(const fs::path& manifest_path)
      : dir_(manifest_path.parent_path()), manifest_(read_manifest(manifest_path)) {
    for (const auto& name : manifest_.frames)
      if (!fs::exists(dir_ / name)) throw IoError("missing frame file " + (dir_ / name).string());
  }

  const SequenceManifest& manifest() const { return manifest_; }
  std::size_t size() const { return manifest_.frames.size(); }

  Frame frame(std::size_t index) const {
    const fs::path p = dir_ / manifest_.frames.at(index);
    if (!fs::exists(p)) throw IoError("missing frame file " + p.string());
    Frame f = read_png(p);
    if (f.width() != manifest_.width || f.height() != manifest_.height)
      throw FormatError("frame " + std::to_string(index) + " (" + p.string() + ") is " +
                        std::to_string(f.width()) + "x" + std::to_string(f.height()) +
                        ", manifest says " + std::to_string(manifest_.width) + "x" +
                        std::to_string(manifest_.height));
    return f;
  }

  // Ordered lazy iteration.
  std::optional<Frame> next() {
    if (cursor_ >= size()) return std::nullopt;
    return frame(cursor_++);
  }

  std::vector<Frame> read_all() const {
    std::vector<Frame> out;
    out.reserve(size());
    for (std::size_t i = 0; i < size(); ++i) out.push_back(frame(i));
    return out;
  }

 private:
  fs::path dir_;
  SequenceManifest manifest_;
  std::size_t cursor_ = 0;
};

inline SequenceReader read_sequence(const fs::path& manifest_path) {
  return SequenceReader(manifest_path);
}

inline std::string frame_file_name(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "frame_%05zu.png", index);
  return buf;
}

// Streams frames into out_dir as frame_NNNNN.png; finish() writes manifest.json.
class SequenceWriter {
 public:
  SequenceWriter(fs::path out_dir, double fps) : dir_(std::move(out_dir)) {
    ensure_directory(dir_);
    manifest_.fps = fps;
  }

  void append(const Frame& frame) {
    if (manifest_.frames.empty()) {
      manifest_.width = frame.width();
      manifest_.height = frame.height();
    } else if (frame.width() != manifest_.width || frame.height() != manifest_.height) {
      throw FormatError("frame " + std::to_string(manifest_.frames.size()) +
                        " does not match sequence dimensions");
    }
    const std::string name = frame_file_name(manifest_.frames.size());
    write_png(dir_ / name, frame);
    manifest_.frames.push_back(name);
  }

  fs::path finish() {
    manifest_.validate();
    const fs::path p = dir_ / "manifest.json";
    write_manifest(manifest_, p);
    return p;
  }

 private:
  fs::path dir_;
  SequenceManifest manifest_;
};

// Writes frames under the manifest's file names; returns the manifest path.
inline fs::path write_sequence(const SequenceManifest& manifest, std::span<const Frame> frames,
                               const fs::path& out_dir) {
  manifest.validate();
  if (frames.size() != manifest.frames.size())
    throw ArgumentError("frame count does not match manifest");
  ensure_directory(out_dir);
  for (std::size_t i = 0; i < frames.size(); ++i) {
    if (frames[i].width() != manifest.width || frames[i].height() != manifest.height)
      throw ArgumentError("frame " + std::to_string(i) + " does not match manifest dimensions");
    write_png(out_dir / manifest.frames[i], frames[i]);
  }
  const fs::path p = out_dir / "manifest.json";
  write_manifest(manifest, p);
  return p;
}

inline fs::path write_sequence(std::span<const Frame> frames, double fps, const fs::path& out_dir) {
  SequenceWriter w(out_dir, fps);
  for (const auto& f : frames) w.append(f);
  return w.finish();
}

// ---------------------------------------------------------------------------------------------
// Middlebury .flo: "PIEH" tag (202021.25f LE), int32 width, int32 height, then (u,v) float32
// pairs row-major. Everything little-endian.

inline constexpr float kFloTag = 202021.25f;

namespace detail {

inline void put_u32(std::vector<unsigned char>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<unsigned char>((v >> (8 * i)) & 0xFF));
}
inline std::uint32_t get_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

}  // namespace detail

inline std::vector<unsigned char> encode_flo(const FlowField& flow) {
  std::vector<unsigned char> out;
  out.reserve(12 + flow.vectors().size() * 4);
  detail::put_u32(out, std::bit_cast<std::uint32_t>(kFloTag));
  detail::put_u32(out, static_cast<std::uint32_t>(flow.width()));
  detail::put_u32(out, static_cast<std::uint32_t>(flow.height()));
  for (float f : flow.vectors()) detail::put_u32(out, std::bit_cast<std::uint32_t>(f));
  return out;
}

inline FlowField decode_flo(std::span<const unsigned char> bytes, const std::string& what) {
  if (bytes.size() < 12)
    throw FormatError(what + ": truncated .flo header (expected 12 bytes, got " +
                      std::to_string(bytes.size()) + ")");
  if (std::memcmp(bytes.data(), "PIEH", 4) != 0)
    throw FormatError(what + ": bad .flo magic (expected PIEH)");
  const auto w = static_cast<std::int32_t>(detail::get_u32(bytes.data() + 4));
  const auto h = static_cast<std::int32_t>(detail::get_u32(bytes.data() + 8));
  if (w <= 0 || h <= 0 || w > (1 << 20) || h > (1 << 20))
    throw FormatError(what + ": invalid .flo dimensions " + std::to_string(w) + "x" +
                      std::to_string(h));
  const std::size_t expected = 12 + static_cast<std::size_t>(w) * h * 8;
  if (bytes.size() != expected)
    throw FormatError(what + ": .flo payload size mismatch (expected " + std::to_string(expected) +
                      " bytes, got " + std::to_string(bytes.size()) + ")");
  std::vector<float> vec(static_cast<std::size_t>(w) * h * 2);
  for (std::size_t i = 0; i < vec.size(); ++i)
    vec[i] = std::bit_cast<float>(detail::get_u32(bytes.data() + 12 + 4 * i));
  try {
    return FlowField::from_vectors(w, h, std::move(vec));
  } catch (const ArgumentError& e) {
    throw FormatError(what + ": " + e.what());
  }
}

inline std::vector<unsigned char> read_bytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline FlowField read_flo(const fs::path& path) {
  const auto bytes = read_bytes(path);
  return decode_flo(bytes, path.string());
}

inline void write_flo(const FlowField& flow, const fs::path& path) {
  const auto bytes = encode_flo(flow);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed for " + path.string());
}

// Flow for the transition (index-1 -> index) inside a flow directory.
inline std::string flow_file_name(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "flow_%05zu.flo", index);
  return buf;
}

}  // namespace dwta::io
