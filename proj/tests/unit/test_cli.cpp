#include <doctest.h>

#include <fstream>
#include <iterator>

#include <json.hpp>

#include "spadsr/cli.hpp"
#include "spadsr/image_io.hpp"
#include "spadsr/io.hpp"
#include "support/helpers.hpp"

using namespace spadsr;
using testing_support::TempDir;
using json = nlohmann::json;

namespace {

int run_cli(std::vector<std::string> args) { return cli::run(args); }

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

json read_json(const std::filesystem::path& p) { return json::parse(slurp(p)); }

std::vector<std::string> csv_lines(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::vector<std::string> lines;
  for (std::string l; std::getline(in, l);) lines.push_back(l);
  return lines;
}

}  // namespace

TEST_CASE("simulate writes the measurement files and calibration") {
  TempDir dir("cli_sim");
  const auto out = (dir / "sim").string();
  REQUIRE(run_cli({"simulate", "--preset", "high", "--bins", "16", "--factor", "4", "--height", "64", "--width", "32",
               "--seed", "3", "--out", out}) == 0);
  const HistogramCube cube = read_cube(dir / "sim/histogram.spdt");
  CHECK(cube.height() == 16);
  CHECK(cube.width() == 8);
  CHECK(cube.bins() == 16);
  CHECK(read_pgm(dir / "sim/intensity.pgm").height() == 64);
  CHECK(read_pfm(dir / "sim/depth_gt.pfm").width() == 32);
  const json j = read_json(dir / "sim/simulation.json");
  CHECK(j["noise"]["ppp"] == 1200.0);
  CHECK(j["noise"]["sbr"] == 2.0);
  CHECK(j["calibration"]["b"].get<double>() == doctest::Approx(200.0));
  CHECK(j["calibration"]["a"].get<double>() > 0.0);
  CHECK(j["config"]["seed"] == 3);
}

TEST_CASE("nearest-neighbour reconstruction of a 1x1 measurement is a 4x4 constant") {
  TempDir dir("cli_nn");
  HistogramCube cube(1, 1, 16);
  cube.at(0, 0, 3) = 5;
  cube.at(0, 0, 4) = 40;
  cube.at(0, 0, 5) = 5;
  write_cube(dir / "h.spdt", cube);
  write_pgm(dir / "i.pgm", IntensityMap(4, 4), 255);
  REQUIRE(run_cli({"reconstruct", "--method", "nn", "--histogram", (dir / "h.spdt").string(), "--intensity",
               (dir / "i.pgm").string(), "--out", (dir / "r").string()}) == 0);
  const DepthMap d = read_pfm(dir / "r/depth.pfm");
  REQUIRE(d.height() == 4);
  REQUIRE(d.width() == 4);
  for (double v : d.values.data) CHECK(v == doctest::Approx(5.0 / 16.0).epsilon(1e-6));
  CHECK(std::filesystem::exists(dir / "r/depth.pgm"));
  const json j = read_json(dir / "r/reconstruction.json");
  CHECK(j["method"] == "nn");
  CHECK(!j.contains("runtime_ms"));
}

TEST_CASE("eval of identical maps reports zero error") {
  TempDir dir("cli_eval");
  DepthMap d(8, 8);
  for (std::size_t k = 0; k < d.values.size(); ++k) d.values.data[k] = 0.01 * static_cast<double>(k);
  write_pfm(dir / "gt.pfm", d.values);
  write_pfm(dir / "pred.pfm", d.values);
  REQUIRE(run_cli({"eval", "--pred", (dir / "pred.pfm").string(), "--gt", (dir / "gt.pfm").string(), "--method", "nn",
               "--out", (dir / "e").string()}) == 0);
  const auto lines = csv_lines(dir / "e/eval.csv");
  REQUIRE(lines.size() == 2);
  CHECK(lines[0] == "scene,method,rmse,ade,sbr,ppp,runtime_ms");
  CHECK(lines[1].rfind("gt,nn,0,0,", 0) == 0);

  REQUIRE(run_cli({"eval", "--pred", (dir / "pred.pfm").string(), "--gt", (dir / "gt.pfm").string(), "--method", "x",
               "--append", "--out", (dir / "e").string()}) == 0);
  CHECK(csv_lines(dir / "e/eval.csv").size() == 3);
}

TEST_CASE("full pipeline through features, guided reconstruction and eval") {
  TempDir dir("cli_pipe");
  const auto d = [&](const char* s) { return (dir / s).string(); };
  REQUIRE(run_cli({"simulate", "--height", "48", "--width", "40", "--out", d("sim")}) == 0);
  REQUIRE(run_cli({"features", "--histogram", d("sim/histogram.spdt"), "--intensity", d("sim/intensity.pgm"), "--out",
               d("feat")}) == 0);
  CHECK(read_pfm(dir / "feat/first_depth.pfm").height() == 48);
  CHECK(read_pfm(dir / "feat/d4.pfm").height() == 3);  // 48 x 48 after padding, then / 16
  const json f = read_json(dir / "feat/features.json");
  CHECK(f["target_dims"] == json::array({48, 40}));
  REQUIRE(run_cli({"reconstruct", "--method", "guided", "--features", d("feat"), "--out", d("rec"), "--timing"}) == 0);
  CHECK(read_json(dir / "rec/reconstruction.json").contains("runtime_ms"));
  const DepthMap rec = read_pfm(dir / "rec/depth.pfm");
  CHECK(rec.height() == 48);
  CHECK(rec.width() == 40);
  REQUIRE(run_cli({"eval", "--pred", d("rec/depth.pfm"), "--gt", d("sim/depth_gt.pfm"), "--histogram",
               d("sim/histogram.spdt"), "--out", d("ev")}) == 0);
  CHECK(csv_lines(dir / "ev/eval.csv")[1].find(",guided,") != std::string::npos);
}

TEST_CASE("train, infer and sweep with a tiny network") {
  TempDir dir("cli_train");
  const auto d = [&](const char* s) { return (dir / s).string(); };
  REQUIRE(run_cli({"train", "--scenes", "1", "--scene-height", "32", "--scene-width", "32", "--patch", "16", "--stride",
               "16", "--no-augment", "--width-scale", "0.0625", "--batch", "2", "--steps", "3", "--lr", "0.01",
               "--out", d("t")}) == 0);
  const auto loss = csv_lines(dir / "t/loss.csv");
  REQUIRE(loss.size() == 4);
  CHECK(loss[0] == "step,loss");
  CHECK(read_json(dir / "t/checkpoint/manifest.json")["step"] == 3);
  REQUIRE(run_cli({"simulate", "--height", "32", "--width", "32", "--out", d("sim")}) == 0);
  REQUIRE(run_cli({"infer", "--checkpoint", d("t/checkpoint"), "--histogram", d("sim/histogram.spdt"), "--intensity",
               d("sim/intensity.pgm"), "--out", d("inf")}) == 0);
  CHECK(read_pfm(dir / "inf/depth.pfm").height() == 32);
  CHECK(read_json(dir / "inf/reconstruction.json")["method"] == "histnet");
  REQUIRE(run_cli({"sweep", "--checkpoint", d("t/checkpoint"), "--ppp", "1", "4", "--sbr", "0.01", "0.1", "--scenes",
               "1", "--height", "32", "--width", "32", "--out", d("sw")}) == 0);
  const auto sweep = csv_lines(dir / "sw/sweep.csv");
  REQUIRE(sweep.size() == 5);
  CHECK(sweep[0] == "ppp,sbr,rmse,ade,rmse_nn");
}

TEST_CASE("exit codes and argument errors") {
  TempDir dir("cli_err");
  const auto out = (dir / "x").string();
  CHECK(run_cli({}) == 2);
  CHECK(run_cli({"bogus"}) == 2);
  CHECK(run_cli({"simulate", "--no-such-flag", "--out", out}) == 2);
  CHECK(run_cli({"simulate", "--factor", "3", "--out", out}) == 2);
  CHECK(run_cli({"simulate", "--ppp", "-1", "--out", out}) == 2);
  CHECK(run_cli({"simulate", "--preset", "extreme", "--out", out}) == 2);
  CHECK(run_cli({"eval", "--gt", "nope.pfm", "--out", out}) == 2);
  CHECK(run_cli({"reconstruct", "--method", "histnet", "--histogram", "missing.spdt", "--out", out}) == 2);
  // A file that exists but is not an SPDT cube is a runtime failure.
  std::ofstream(dir / "junk.spdt") << "not a cube";
  std::ofstream(dir / "i.pgm") << "P5 4 4 255\n" << std::string(16, '\0');
  CHECK(run_cli({"reconstruct", "--method", "nn", "--histogram", (dir / "junk.spdt").string(), "--intensity",
             (dir / "i.pgm").string(), "--out", out}) == 1);
  CHECK(run_cli({"simulate", "--help"}) == 0);
  CHECK(run_cli({"--help"}) == 0);
}

TEST_CASE("json config file supplies flags and rejects unknown keys") {
  TempDir dir("cli_cfg");
  std::ofstream(dir / "c.json") << R"({"ppp": 40, "sbr": 0.5, "height": 32, "width": 32})";
  REQUIRE(run_cli({"simulate", "--config", (dir / "c.json").string(), "--sbr", "0.25", "--out", (dir / "s").string()}) ==
          0);
  const json j = read_json(dir / "s/simulation.json");
  CHECK(j["noise"]["ppp"] == 40.0);
  CHECK(j["noise"]["sbr"] == 0.25);
  CHECK(j["histogram_dims"] == json::array({8, 8, 16}));
  std::ofstream(dir / "bad.json") << R"({"ppp": 40, "colour": "red"})";
  CHECK(run_cli({"simulate", "--config", (dir / "bad.json").string(), "--out", (dir / "b").string()}) == 2);
}

TEST_CASE("subcommands are deterministic for a fixed seed") {
  TempDir dir("cli_det");
  const auto d = [&](const std::string& s) { return (dir / s).string(); };
  const char* files[] = {"sim/histogram.spdt", "sim/intensity.pgm",   "sim/depth_gt.pfm",  "sim/simulation.json",
                         "feat/first_depth.pfm", "feat/d3.pfm", "feat/features.json"};
  std::vector<std::string> first;
  for (int pass = 0; pass < 2; ++pass) {
    REQUIRE(run_cli({"simulate", "--height", "32", "--width", "32", "--seed", "9", "--out", d("sim")}) == 0);
    REQUIRE(run_cli({"features", "--histogram", d("sim/histogram.spdt"), "--intensity", d("sim/intensity.pgm"),
                     "--out", d("feat")}) == 0);
    for (std::size_t k = 0; k < std::size(files); ++k) {
      if (pass == 0)
        first.push_back(slurp(dir / files[k]));
      else
        CHECK(first[k] == slurp(dir / files[k]));
    }
  }
}
