#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "cli_app.hpp"
#include "support.hpp"

using namespace dwta;
using dwta::testing::TempDir;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "dwta");
  std::vector<const char*> argv;
  for (auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

nlohmann::json load(const fs::path& p) { return nlohmann::json::parse(std::ifstream(p)); }

std::string s(const fs::path& p) { return p.string(); }

}  // namespace

TEST(Cli, PipelineHappyPath) {
  TempDir d("cli");
  ASSERT_EQ(run({"gen-scene", "--kind", "pan", "--frames", "5", "--seed", "3", "--out", s(d / "clean")}).code, 0);
  ASSERT_EQ(run({"degrade", "--in", s(d / "clean/manifest.json"), "--out", s(d / "dark"), "--seed", "1"}).code, 0);
  ASSERT_EQ(run({"enhance", "--in", s(d / "dark/manifest.json"), "--out", s(d / "enh")}).code, 0);
  const auto r = run({"refine", "--in", s(d / "enh/manifest.json"), "--out", s(d / "ref"), "--mode", "dynamic",
                      "--dump-weights", s(d / "w")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto summary = load(d / "ref/summary.json");
  EXPECT_EQ(summary.at("frame_count"), 5);
  EXPECT_EQ(summary.at("mode"), "dynamic");
  EXPECT_TRUE(summary.contains("mean_weight"));
  EXPECT_TRUE(summary.contains("mean_residual"));
  EXPECT_EQ(nlohmann::json::parse(r.out), summary);
  EXPECT_TRUE(fs::exists(d / "w/weight_00004.png"));
  EXPECT_EQ(io::SequenceReader(d / "ref/manifest.json").size(), 5u);

  const auto e = run({"eval", "--ref", s(d / "clean/manifest.json"), "--test", s(d / "ref/manifest.json"), "--metrics",
                      "psnr,ssim,composite", "--json", s(d / "eval.json")});
  ASSERT_EQ(e.code, 0) << e.err;
  const auto j = load(d / "eval.json");
  EXPECT_EQ(j.at("frame_count"), 5);
  for (const char* k : {"psnr", "ssim", "composite"}) EXPECT_TRUE(j.at("mean").contains(k)) << k;
  EXPECT_TRUE(j.at("frames")[0].at("composite").contains("perceptual_proxy"));
}

TEST(Cli, EvalSelfComparisonInf) {
  TempDir d("cli_eval");
  run({"gen-scene", "--frames", "3", "--seed", "1", "--out", s(d / "a")});
  const auto r = run({"eval", "--ref", s(d / "a/manifest.json"), "--test", s(d / "a/manifest.json"), "--metrics", "psnr"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  ASSERT_EQ(j.at("frames").size(), 3u);
  for (const auto& f : j.at("frames")) {
    EXPECT_EQ(f.at("psnr"), "inf");
    EXPECT_FALSE(f.contains("ssim"));
  }
}

TEST(Cli, MissingFlowNamesTransition) {
  TempDir d("cli_flow");
  run({"gen-scene", "--frames", "4", "--seed", "2", "--out", s(d / "a")});
  ASSERT_EQ(run({"flow", "--in", s(d / "a/manifest.json"), "--out", s(d / "flows")}).code, 0);
  EXPECT_TRUE(fs::exists(d / "flows/flow_00001.flo"));
  EXPECT_FALSE(fs::exists(d / "flows/flow_00000.flo"));
  ASSERT_EQ(run({"refine", "--in", s(d / "a/manifest.json"), "--out", s(d / "r"), "--flow", s(d / "flows")}).code, 0);
  fs::remove(d / "flows/flow_00002.flo");
  const auto r = run({"refine", "--in", s(d / "a/manifest.json"), "--out", s(d / "r2"), "--flow", s(d / "flows")});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("transition 2"), std::string::npos) << r.err;
}

TEST(Cli, UnknownFlagPrintsSubcommandHelp) {
  const auto r = run({"refine", "--in", "a", "--out", "b", "--bogus"});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("--window-n"), std::string::npos);
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(run({}).code, 1);
  EXPECT_EQ(run({"frobnicate"}).code, 1);
  EXPECT_EQ(run({"gen-scene", "--out", "x"}).code, 1);  // --seed is required
  EXPECT_EQ(run({"degrade", "--in", "a", "--out", "b"}).code, 1);
  EXPECT_EQ(run({"refine", "--in", "a", "--out", "b", "--mode", "median"}).code, 1);
  EXPECT_EQ(run({"pseudo-gt", "--in", "a", "--roi", "1,2,3", "--out", "x.png"}).code, 1);
}

TEST(Cli, ArgumentErrorsAreUsage) {
  TempDir d("cli_arg");
  run({"gen-scene", "--frames", "2", "--seed", "1", "--out", s(d / "a")});
  EXPECT_EQ(run({"refine", "--in", s(d / "a/manifest.json"), "--out", s(d / "r"), "--b", "1.5"}).code, 1);
  EXPECT_EQ(run({"pseudo-gt", "--in", s(d / "a/manifest.json"), "--roi", "60,60,10,10", "--out", s(d / "p.png")}).code, 1);
  EXPECT_EQ(run({"eval", "--ref", s(d / "a/manifest.json"), "--test", s(d / "a/manifest.json"), "--metrics", "lpips"}).code, 1);
}

TEST(Cli, IoErrorsExitTwo) {
  EXPECT_EQ(run({"refine", "--in", "/nonexistent/m.json", "--out", "/tmp/x"}).code, 2);
  EXPECT_EQ(run({"texture-map", "--in", "/nonexistent/a.png", "--out", "/tmp/x.png"}).code, 2);
}

TEST(Cli, HelpListsDefaults) {
  const auto r = run({"refine", "--help"});
  EXPECT_EQ(r.code, 0);
  for (const char* f : {"--mode", "--a", "--b", "--c", "--lambda", "--window-n", "--flow", "--dump-weights", "--residual",
                        "--median-weights", "--no-adjust-history", "--levels", "--block", "--radius", "--subpixel"})
    EXPECT_NE(r.out.find(f), std::string::npos) << f;
  EXPECT_NE(r.out.find("[10]"), std::string::npos);
  EXPECT_NE(r.out.find("[0.5]"), std::string::npos);
  EXPECT_NE(r.out.find("[0.1]"), std::string::npos);
  EXPECT_NE(r.out.find("[dynamic]"), std::string::npos);

  // Every non-required option of every subcommand shows a default.
  for (const char* sub : {"gen-scene", "degrade", "enhance", "flow", "refine", "eval", "pseudo-gt", "texture-map"}) {
    const auto h = run({sub, "--help"});
    EXPECT_EQ(h.code, 0) << sub;
    std::istringstream lines(h.out);
    std::string line, pending;
    for (std::string l; std::getline(lines, l);) {
      const auto pos = l.find("--");
      if (pos == std::string::npos || l.find("--help") != std::string::npos) continue;
      if (l.find("REQUIRED") != std::string::npos) continue;
      const bool has_default = l.find('[') != std::string::npos || l.find('{') != std::string::npos;
      EXPECT_TRUE(has_default) << sub << ": " << l;
    }
  }
}

TEST(Cli, TextureMapAndPseudoGt) {
  TempDir d("cli_tm");
  run({"gen-scene", "--kind", "static", "--frames", "3", "--seed", "4", "--out", s(d / "a")});
  ASSERT_EQ(run({"texture-map", "--in", s(d / "a/frame_00000.png"), "--out", s(d / "m.png")}).code, 0);
  const auto m = io::read_png(d / "m.png");
  EXPECT_EQ(m.channels(), 1);
  EXPECT_EQ(m.width(), 64);
  ASSERT_EQ(run({"pseudo-gt", "--in", s(d / "a/manifest.json"), "--roi", "4,4,16,8", "--out", s(d / "gt.png")}).code, 0);
  const auto g = io::read_png(d / "gt.png");
  EXPECT_EQ(g.width(), 16);
  EXPECT_EQ(g.height(), 8);
}

TEST(Cli, Reproducible) {
  TempDir d("cli_rep");
  for (const char* tag : {"x", "y"}) {
    const fs::path root = d / tag;
    run({"gen-scene", "--kind", "square", "--frames", "4", "--seed", "9", "--out", s(root / "clean")});
    run({"degrade", "--in", s(root / "clean/manifest.json"), "--out", s(root / "dark"), "--seed", "5"});
    run({"refine", "--in", s(root / "dark/manifest.json"), "--out", s(root / "ref")});
  }
  for (const char* f : {"ref/summary.json", "ref/frame_00003.png", "dark/frame_00002.png"})
    EXPECT_EQ(io::read_bytes(d / "x" / f), io::read_bytes(d / "y" / f)) << f;
}
