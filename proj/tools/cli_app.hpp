#pragma once

// dwta command-line front end. Exit codes: 0 ok, 1 usage / argument error, 2 I/O or format error.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "dwta/dwta.hpp"

namespace dwta::cli {

namespace fs = std::filesystem;

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitIo = 2;

inline Roi parse_roi(const std::string& text) {
  Roi r;
  char tail = 0;
  if (std::sscanf(text.c_str(), "%d,%d,%d,%d%c", &r.x, &r.y, &r.width, &r.height, &tail) != 4)
    throw ArgumentError("roi must be x,y,w,h, got '" + text + "'");
  return r;
}

inline void emit_json(const nlohmann::json& j, const std::string& path, std::ostream& out) {
  const std::string text = j.dump(2) + "\n";
  if (path.empty())
    out << text;
  else
    io::write_text(path, text);
}

struct FlowFlags {
  FlowParams params;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--levels", params.levels, "Pyramid levels")->check(CLI::PositiveNumber);
    cmd->add_option("--block", params.block, "Block size in pixels")->check(CLI::Range(2, 1 << 16));
    cmd->add_option("--radius", params.radius, "Search radius per level")->check(CLI::PositiveNumber);
    cmd->add_flag("--subpixel,!--no-subpixel", params.subpixel, "Parabolic subpixel refinement");
  }
};

// ---------------------------------------------------------------------------------------------

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout,
               std::ostream& err = std::cerr) {
  CLI::App app{"Flow-guided recurrent temporal denoising for low-light video", "dwta"};
  app.option_defaults()->always_capture_default();
  app.require_subcommand(1);
  app.fallthrough(false);

  // gen-scene
  auto* gen = app.add_subcommand("gen-scene", "Generate a procedural clean test sequence");
  std::string gen_kind = "static";
  int gen_w = 64, gen_h = 64, gen_n = 30;
  std::uint64_t gen_seed = 0;
  double gen_fps = 30.0;
  std::string gen_out;
  gen->add_option("--kind", gen_kind, "static | square | pan")
      ->check(CLI::IsMember({"static", "square", "pan"}));
  gen->add_option("--width", gen_w, "Frame width")->check(CLI::Range(16, 1 << 15));
  gen->add_option("--height", gen_h, "Frame height")->check(CLI::Range(16, 1 << 15));
  gen->add_option("--frames", gen_n, "Number of frames")->check(CLI::PositiveNumber);
  gen->add_option("--fps", gen_fps, "Frame rate written to the manifest")->check(CLI::PositiveNumber);
  gen->add_option("--seed", gen_seed, "Texture seed")->required();
  gen->add_option("--out", gen_out, "Output directory")->required();

  // degrade
  auto* deg = app.add_subcommand("degrade", "Apply synthetic low-light degradation");
  DegradeParams deg_p;
  std::string deg_in, deg_out;
  deg->add_option("--in", deg_in, "Input manifest")->required();
  deg->add_option("--out", deg_out, "Output directory")->required();
  deg->add_option("--gain", deg_p.gain, "Linear darkening factor in (0,1]");
  deg->add_option("--gamma", deg_p.gamma, "Exponent applied after darkening (>= 1)");
  deg->add_option("--read-sigma", deg_p.read_sigma, "Signal-independent noise std");
  deg->add_option("--shot-k", deg_p.shot_k, "Signal-dependent variance coefficient");
  deg->add_option("--seed", deg_p.seed, "Noise seed")->required();

  // enhance
  auto* enh = app.add_subcommand("enhance", "Non-learned brightness enhancement baseline");
  std::string enh_in, enh_out, enh_method = "stretch";
  HistStretch enh_hs;
  GammaEnhance enh_g;
  enh->add_option("--in", enh_in, "Input manifest")->required();
  enh->add_option("--out", enh_out, "Output directory")->required();
  enh->add_option("--method", enh_method, "identity | stretch | gamma")
      ->check(CLI::IsMember({"identity", "stretch", "gamma"}));
  enh->add_option("--p-lo", enh_hs.p_lo, "Lower luma percentile for stretch");
  enh->add_option("--p-hi", enh_hs.p_hi, "Upper luma percentile for stretch");
  enh->add_option("--gamma", enh_g.gamma, "Gamma for the gamma method (x^(1/g))");

  // flow
  auto* flw = app.add_subcommand("flow", "Estimate backward flow between consecutive frames");
  std::string flw_in, flw_out;
  FlowFlags flw_flags;
  flw->add_option("--in", flw_in, "Input manifest")->required();
  flw->add_option("--out", flw_out, "Output directory for flow_NNNNN.flo")->required();
  flw_flags.add_to(flw);

  // refine
  auto* ref = app.add_subcommand("refine", "Recurrent temporal aggregation");
  std::string ref_in, ref_out, ref_mode = "dynamic", ref_flow = "builtin", ref_dump, ref_summary,
                               ref_residual = "mean";
  AggregationParams ref_p;
  double ref_lambda = 0.2;
  int ref_window = 5;
  bool ref_no_adjust = false;
  FlowFlags ref_flags;
  ref->add_option("--in", ref_in, "Input manifest")->required();
  ref->add_option("--out", ref_out, "Output directory")->required();
  ref->add_option("--mode", ref_mode, "dynamic | ema | window")
      ->check(CLI::IsMember({"dynamic", "ema", "window"}));
  ref->add_option("--a", ref_p.a, "Sigmoid steepness");
  ref->add_option("--b", ref_p.b, "Residual threshold");
  ref->add_option("--c", ref_p.c, "Minimum current-frame weight");
  ref->add_option("--lambda", ref_lambda, "Fixed weight for ema mode");
  ref->add_option("--window-n", ref_window, "Window length for window mode");
  ref->add_option("--flow", ref_flow, "builtin, or a directory of flow_NNNNN.flo files");
  ref->add_option("--dump-weights", ref_dump, "Write per-frame weight maps here")->default_str("off");
  ref->add_option("--residual", ref_residual, "mean | luma")->check(CLI::IsMember({"mean", "luma"}));
  ref->add_flag("--median-weights", ref_p.median_weights, "3x3 median on weight maps")->default_str("false");
  ref->add_flag("--no-adjust-history", ref_no_adjust,
                "Blend against the unadjusted history (brightness adjustment still feeds flow)")
      ->default_str("false");
  ref->add_option("--summary", ref_summary, "Summary JSON path")->default_str("<out>/summary.json");
  ref_flags.add_to(ref);

  // eval
  auto* ev = app.add_subcommand("eval", "Full-reference quality metrics");
  std::string ev_ref, ev_test, ev_metrics = "psnr,ssim", ev_json;
  double ev_alpha = 0.5;
  int ev_window = 8;
  ev->add_option("--ref", ev_ref, "Reference manifest")->required();
  ev->add_option("--test", ev_test, "Test manifest")->required();
  ev->add_option("--metrics", ev_metrics, "Comma-separated subset of psnr,ssim,composite");
  ev->add_option("--alpha", ev_alpha, "Weight of the texture-adaptive terms in composite");
  ev->add_option("--texture-window", ev_window, "Box window of the texture map")->check(CLI::PositiveNumber);
  ev->add_option("--json", ev_json, "Report path")->default_str("stdout");

  // pseudo-gt
  auto* pg = app.add_subcommand("pseudo-gt", "Temporal mean of a static region");
  std::string pg_in, pg_roi, pg_out;
  pg->add_option("--in", pg_in, "Input manifest")->required();
  pg->add_option("--roi", pg_roi, "Region x,y,w,h")->required();
  pg->add_option("--out", pg_out, "Output PNG")->required();

  // texture-map
  auto* tm = app.add_subcommand("texture-map", "Texture-complexity map of an image");
  std::string tm_in, tm_out, tm_reduction = "channel-std";
  TextureOptions tm_opt;
  tm->add_option("--in", tm_in, "Input PNG")->required();
  tm->add_option("--out", tm_out, "Output grayscale PNG")->required();
  tm->add_option("--window", tm_opt.window, "Box window at half resolution")->check(CLI::PositiveNumber);
  tm->add_option("--reduction", tm_reduction, "channel-std | spatial-std")
      ->check(CLI::IsMember({"channel-std", "spatial-std"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << (app.get_subcommands().empty() ? app.help() : app.get_subcommands().front()->help());
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    const auto subs = app.get_subcommands();
    err << (subs.empty() ? app.help() : subs.front()->help());
    return kExitUsage;
  }

  try {
    if (gen->parsed()) {
      const SceneKind kind = gen_kind == "static" ? SceneKind::StaticTexture
                             : gen_kind == "square" ? SceneKind::MovingSquare
                                                    : SceneKind::PanningTexture;
      const auto frames = gen_scene(kind, gen_w, gen_h, gen_n, gen_seed);
      out << io::write_sequence(frames, gen_fps, gen_out).string() << "\n";
    } else if (deg->parsed()) {
      deg_p.validate();
      io::SequenceReader reader(deg_in);
      io::SequenceWriter writer(deg_out, reader.manifest().fps);
      for (std::size_t t = 0; t < reader.size(); ++t)
        writer.append(degrade_frame(reader.frame(t), deg_p, static_cast<std::uint32_t>(t)));
      out << writer.finish().string() << "\n";
    } else if (enh->parsed()) {
      Enhancer method = IdentityEnhance{};
      if (enh_method == "stretch") method = enh_hs;
      if (enh_method == "gamma") method = enh_g;
      io::SequenceReader reader(enh_in);
      io::SequenceWriter writer(enh_out, reader.manifest().fps);
      for (std::size_t t = 0; t < reader.size(); ++t) {
        auto r = enhance_baseline(reader.frame(t), method);
        if (r.degenerate) err << "warning: frame " << t << " has a degenerate luma range; left unchanged\n";
        writer.append(r.frame);
      }
      out << writer.finish().string() << "\n";
    } else if (flw->parsed()) {
      flw_flags.params.validate();
      io::SequenceReader reader(flw_in);
      io::ensure_directory(flw_out);
      std::optional<Frame> prev;
      for (std::size_t t = 0; t < reader.size(); ++t) {
        Frame curr = reader.frame(t);
        if (prev) {
          const FlowField f = estimate_flow(brightness_adjust(*prev, curr), curr, flw_flags.params);
          io::write_flo(f, fs::path(flw_out) / io::flow_file_name(t));
        }
        prev = std::move(curr);
      }
      out << flw_out << "\n";
    } else if (ref->parsed()) {
      if (ref_mode == "ema") ref_p.mode = FixedEmaMode{ref_lambda};
      if (ref_mode == "window") ref_p.mode = SlidingWindowMode{ref_window};
      ref_p.residual = ref_residual == "luma" ? ResidualReduction::Luma : ResidualReduction::ChannelMean;
      ref_p.adjust_history = !ref_no_adjust;
      ref_p.validate();
      const FlowSource flow = ref_flow == "builtin" ? FlowSource::builtin(ref_flags.params)
                                                    : FlowSource::directory(ref_flow);
      io::SequenceReader reader(ref_in);
      io::SequenceWriter writer(ref_out, reader.manifest().fps);
      if (!ref_dump.empty()) io::ensure_directory(ref_dump);
      const auto summary = refine_sequence(
          [&] { return reader.next(); }, flow, ref_p, [&](std::size_t t, const StepResult& r) {
            writer.append(r.refined);
            if (!ref_dump.empty()) {
              const Plane w = r.weight ? r.weight->plane()
                                       : Plane(r.refined.width(), r.refined.height(),
                                               static_cast<Sample>(r.mean_weight));
              char name[32];
              std::snprintf(name, sizeof name, "weight_%05zu.png", t);
              io::write_map(w, fs::path(ref_dump) / name);
            }
          });
      writer.finish();
      const std::string path =
          ref_summary.empty() ? (fs::path(ref_out) / "summary.json").string() : ref_summary;
      const auto j = report::refine_summary(summary);
      emit_json(j, path, out);
      out << j.dump(2) << "\n";
    } else if (ev->parsed()) {
      report::EvalSelection sel{false, false, false, {}};
      sel.composite_options.alpha = ev_alpha;
      sel.composite_options.texture.window = ev_window;
      std::stringstream ss(ev_metrics);
      for (std::string m; std::getline(ss, m, ',');) {
        if (m == "psnr") sel.psnr = true;
        else if (m == "ssim") sel.ssim = true;
        else if (m == "composite") sel.composite = true;
        else throw ArgumentError("unknown metric '" + m + "'");
      }
      io::SequenceReader rr(ev_ref), tr(ev_test);
      if (rr.size() != tr.size())
        throw FormatError("reference has " + std::to_string(rr.size()) + " frames, test has " +
                          std::to_string(tr.size()));
      std::vector<report::FrameScores> scores;
      for (std::size_t t = 0; t < rr.size(); ++t) {
        const Frame test = tr.frame(t), refr = rr.frame(t);
        if (!test.same_shape(refr)) throw FormatError("frame " + std::to_string(t) + " shapes differ");
        scores.push_back(report::score_frame(t, test, refr, sel));
      }
      emit_json(report::eval_report(scores, sel), ev_json, out);
    } else if (pg->parsed()) {
      const Roi roi = parse_roi(pg_roi);
      const auto frames = io::SequenceReader(pg_in).read_all();
      io::write_png(pg_out, pseudo_gt(frames, roi));
      out << pg_out << "\n";
    } else if (tm->parsed()) {
      tm_opt.reduction = tm_reduction == "spatial-std" ? TextureReduction::SpatialStdThenChannelMean
                                                       : TextureReduction::ChannelStdThenSpatialMean;
      io::write_map(texture_map(io::read_png(tm_in), tm_opt), tm_out);
      out << tm_out << "\n";
    }
  } catch (const ArgumentError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const FormatError& e) {
    err << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitIo;
  }
  return kExitOk;
}

}  // namespace dwta::cli
