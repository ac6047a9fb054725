#include "spadsr/cli.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "spadsr/baselines.hpp"
#include "spadsr/experiments.hpp"
#include "spadsr/features.hpp"
#include "spadsr/image_io.hpp"
#include "spadsr/image_ops.hpp"
#include "spadsr/io.hpp"
#include "spadsr/metrics.hpp"
#include "spadsr/nn/checkpoint.hpp"
#include "spadsr/nn/trainer.hpp"
#include "spadsr/scenes.hpp"
#include "spadsr/simulator.hpp"

namespace spadsr::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

// ---- flag registry ----------------------------------------------------------
// Every option is bound to a typed variable and registered with a getter so
// that the merged (file + flags) configuration can be echoed into manifests.

struct Registry {
  std::vector<std::pair<std::string, std::function<json()>>> entries;

  [[nodiscard]] json effective() const {
    json j = json::object();
    for (const auto& [name, get] : entries) j[name] = get();
    return j;
  }
};

template <typename T>
json to_json_value(const T& v) {
  if constexpr (std::is_same_v<T, fs::path>) {
    return v.string();
  } else {
    return v;
  }
}

template <typename T>
json to_json_value(const std::optional<T>& v) {
  return v ? to_json_value(*v) : json(nullptr);
}

template <typename T>
CLI::Option* opt(CLI::App* app, Registry& reg, const std::string& name, T& var, const std::string& help) {
  reg.entries.emplace_back(name, [&var] { return to_json_value(var); });
  return app->add_option("--" + name, var, help);
}

CLI::Option* flag(CLI::App* app, Registry& reg, const std::string& name, bool& var, const std::string& help) {
  reg.entries.emplace_back(name, [&var] { return json(var); });
  return app->add_flag("--" + name + ",!--no-" + name, var, help);
}

CLI::Option* flag(CLI::App* app, Registry& reg, const std::string& name, std::optional<bool>& var,
                  const std::string& help) {
  reg.entries.emplace_back(name, [&var] { return to_json_value(var); });
  return app->add_flag("--" + name + ",!--no-" + name, var, help);
}

// Flat JSON config: {"flag-name": value, ...}. Keys apply to the selected
// subcommand; unknown keys are rejected by the parser.
class JsonConfig : public CLI::Config {
 public:
  explicit JsonConfig(const CLI::App& root) : root_(root) {}

  std::string to_config(const CLI::App*, bool, bool, std::string) const override { return "{}"; }

  std::vector<CLI::ConfigItem> from_config(std::istream& in) const override {
    json j;
    try {
      j = json::parse(in);
    } catch (const json::exception& e) {
      throw CLI::ConversionError("config file is not valid JSON: " + std::string(e.what()));
    }
    if (!j.is_object()) throw CLI::ConversionError("config file must hold a JSON object");
    std::vector<std::string> parents;
    for (const auto* sub : root_.get_subcommands()) parents.push_back(sub->get_name());
    std::vector<CLI::ConfigItem> items;
    for (const auto& [key, value] : j.items()) {
      CLI::ConfigItem item;
      item.parents = parents;
      item.name = key;
      if (value.is_array()) {
        for (const auto& v : value) item.inputs.push_back(scalar(v));
      } else {
        item.inputs.push_back(scalar(value));
      }
      items.push_back(std::move(item));
    }
    return items;
  }

 private:
  static std::string scalar(const json& v) { return v.is_string() ? v.get<std::string>() : v.dump(); }

  const CLI::App& root_;
};

// ---- shared helpers ---------------------------------------------------------

void write_json(const fs::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << j.dump(2) << '\n';
  if (!out) throw Error("failed writing " + path.string());
}

json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

NoisePreset preset_by_name(const std::string& name) {
  for (const auto& p : {kPresetHigh, kPresetMedium, kPresetLow})
    if (name == p.name) return p;
  throw InvalidArgument("unknown preset '" + name + "'");
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  std::ostringstream os;
  os << std::setprecision(10) << v;
  return os.str();
}

struct NoiseFlags {
  std::string preset = "high";
  std::optional<double> ppp, sbr;
  double sigma = 0.5714;

  void add(CLI::App* app, Registry& reg) {
    opt(app, reg, "preset", preset, "Noise scenario: high (ppp 1200, SBR 2), medium (4, 0.02), low (4, 0.006)")
        ->check(CLI::IsMember({"high", "medium", "low"}));
    opt(app, reg, "ppp", ppp, "Signal photons per pixel (overrides the preset)");
    opt(app, reg, "sbr", sbr, "Signal-to-background ratio (overrides the preset)");
    opt(app, reg, "sigma", sigma, "Gaussian IRF standard deviation in bins");
  }

  [[nodiscard]] NoiseSpec resolve(std::uint64_t seed) const {
    const NoisePreset p = preset_by_name(preset);
    NoiseSpec spec;
    spec.ppp = ppp.value_or(p.ppp);
    spec.sbr = sbr.value_or(p.sbr);
    spec.sigma_bins = sigma;
    spec.seed = seed;
    spec.validate();
    return spec;
  }
};

struct PipelineFlags {
  std::size_t factor = 4;
  double level = 12.0;
  std::optional<std::string> peak_method;
  std::optional<bool> crop, second_depth;
  std::size_t median_window = 3;
  std::optional<double> irf_sigma;

  void add(CLI::App* app, Registry& reg) {
    opt(app, reg, "factor", factor, "Spatial up-sampling factor")->check(CLI::IsMember({4, 8}));
    opt(app, reg, "level", level, "Second-peak / crop detection level");
    opt(app, reg, "peak-method", peak_method, "argmax or matched-filter (default: argmax at x4, matched-filter at x8)")
        ->check(CLI::IsMember({"argmax", "matched-filter"}));
    flag(app, reg, "crop", crop, "Temporal crop before feature extraction (default: on at x8)");
    flag(app, reg, "second-depth", second_depth, "Second-peak depth map (default: on at x4)");
    opt(app, reg, "median-window", median_window, "Median filter width of the crop mask");
    opt(app, reg, "irf-sigma", irf_sigma, "IRF sigma of the matched filter in bins (default 0.5714)");
  }

  [[nodiscard]] PipelineConfig resolve() const {
    PipelineConfig cfg = PipelineConfig::for_factor(factor);
    cfg.level = level;
    if (peak_method) cfg.peak_method = *peak_method == "argmax" ? PeakMethod::argmax : PeakMethod::matched_filter;
    if (crop) cfg.crop_enabled = *crop;
    if (second_depth) cfg.second_depth_enabled = *second_depth;
    cfg.median_window = median_window;
    if (irf_sigma) cfg.irf_sigma = *irf_sigma;
    cfg.validate();
    return cfg;
  }
};

json pipeline_json(const PipelineConfig& c) {
  return {{"factor", c.upsample_factor},
          {"level", c.level},
          {"peak_method", c.peak_method == PeakMethod::argmax ? "argmax" : "matched-filter"},
          {"crop", c.crop_enabled},
          {"second_depth", c.second_depth_enabled},
          {"median_window", c.median_window},
          {"irf_sigma", c.irf_sigma}};
}

void save_depth(const fs::path& out, const DepthMap& d) {
  write_pfm(out / "depth.pfm", d);
  write_depth_preview(out / "depth.pgm", d);
}

// ---- subcommands ------------------------------------------------------------

struct Common {
  fs::path out = "out";
  std::uint64_t seed = 0;

  void add(CLI::App* app, Registry& reg) {
    opt(app, reg, "out", out, "Output directory");
    opt(app, reg, "seed", seed, "Random seed");
  }
};

struct Simulate {
  Common common;
  NoiseFlags noise;
  std::optional<fs::path> depth, intensity;
  std::size_t height = 256, width = 128;
  std::optional<std::uint64_t> scene_seed;
  std::size_t bins = 16, factor = 4;
  std::string mode = "auto";
  Registry reg;

  void add(CLI::App* app) {
    common.add(app, reg);
    noise.add(app, reg);
    auto* d = opt(app, reg, "depth", depth, "Ground-truth depth (PFM); synthetic scene if absent")
                  ->check(CLI::ExistingFile);
    auto* i = opt(app, reg, "intensity", intensity, "Ground-truth intensity (PGM)")->check(CLI::ExistingFile);
    d->needs(i);
    i->needs(d);
    opt(app, reg, "height", height, "Synthetic scene height (HR pixels)");
    opt(app, reg, "width", width, "Synthetic scene width (HR pixels)");
    opt(app, reg, "scene-seed", scene_seed, "Synthetic scene seed (default: --seed)");
    opt(app, reg, "bins", bins, "Time bins per histogram");
    opt(app, reg, "factor", factor, "Spatial down-sampling factor")->check(CLI::IsMember({4, 8}));
    opt(app, reg, "mode", mode, "block-sum, bicubic, or auto (bicubic at x8)")
        ->check(CLI::IsMember({"auto", "block-sum", "bicubic"}));
  }

  int exec() {
    const NoiseSpec spec = noise.resolve(common.seed);
    ScenePair scene;
    if (depth) {
      scene.depth_gt = read_pfm(*depth);
      scene.intensity_gt = read_pgm(*intensity);
    } else {
      scene = synthetic_scene(height, width, scene_seed.value_or(common.seed));
    }
    const SimulationMode m = mode == "block-sum"  ? SimulationMode::block_sum
                             : mode == "bicubic" ? SimulationMode::bicubic_lr
                             : factor == 8       ? SimulationMode::bicubic_lr
                                                 : SimulationMode::block_sum;
    const Measurement meas = simulate(scene, bins, spec, factor, m);

    fs::create_directories(common.out);
    write_cube(common.out / "histogram.spdt", meas.histogram);
    write_pgm(common.out / "intensity.pgm", meas.intensity, 65535);
    write_pfm(common.out / "depth_gt.pfm", scene.depth_gt);

    Grid<double> b(meas.histogram.height(), meas.histogram.width());
    b.data = meas.true_background;
    Grid<std::size_t> peaks(b.height, b.width);
    peaks.data = meas.true_peaks;
    const NoiseReport rep = measure_noise(meas.histogram, b, peaks);

    json j;
    j["config"] = reg.effective();
    j["noise"] = {{"ppp", spec.ppp}, {"sbr", spec.sbr}, {"sigma_bins", spec.sigma_bins}, {"seed", spec.seed}};
    j["calibration"] = {{"a", meas.signal_scale}, {"b", meas.true_background.empty() ? 0.0 : meas.true_background[0]}};
    j["measured"] = {{"ppp", rep.ppp}, {"sbr", rep.sbr}};
    j["histogram_dims"] = {meas.histogram.height(), meas.histogram.width(), meas.histogram.bins()};
    j["intensity_dims"] = {meas.intensity.height(), meas.intensity.width()};
    j["factor"] = factor;
    j["mode"] = m == SimulationMode::block_sum ? "block-sum" : "bicubic";
    write_json(common.out / "simulation.json", j);
    return 0;
  }
};

// Inputs shared by features / reconstruct / infer.
struct MeasurementInput {
  std::optional<fs::path> histogram, intensity, features;

  void add(CLI::App* app, Registry& reg, bool allow_features) {
    auto* h = opt(app, reg, "histogram", histogram, "LR histogram cube (SPDT u32)")->check(CLI::ExistingFile);
    opt(app, reg, "intensity", intensity, "HR intensity (PGM)")->check(CLI::ExistingFile);
    if (allow_features) {
      auto* f = opt(app, reg, "features", features, "Feature directory written by 'features'")
                    ->check(CLI::ExistingDirectory);
      f->excludes(h);
    }
  }
};

void write_features(const fs::path& out, const FeatureSet& f) {
  fs::create_directories(out);
  write_pfm(out / "first_depth.pfm", f.first_depth);
  write_pfm(out / "second_depth.pfm", f.second_depth);
  write_pfm(out / "d1.pfm", f.d1);
  write_pfm(out / "d2.pfm", f.d2);
  write_pfm(out / "d3.pfm", f.d3);
  write_pfm(out / "d4.pfm", f.d4);
  write_pgm(out / "intensity.pgm", f.intensity, 65535);
}

struct LoadedFeatures {
  FeatureSet features;
  std::size_t target_height = 0, target_width = 0;
};

LoadedFeatures read_features(const fs::path& dir) {
  const json m = read_json(dir / "features.json");
  LoadedFeatures lf;
  lf.target_height = m.at("target_dims").at(0).get<std::size_t>();
  lf.target_width = m.at("target_dims").at(1).get<std::size_t>();
  FeatureSet& f = lf.features;
  f.first_depth = read_pfm(dir / "first_depth.pfm");
  f.second_depth = read_pfm(dir / "second_depth.pfm");
  f.d1 = read_pfm(dir / "d1.pfm");
  f.d2 = read_pfm(dir / "d2.pfm");
  f.d3 = read_pfm(dir / "d3.pfm");
  f.d4 = read_pfm(dir / "d4.pfm");
  f.intensity = read_pgm(dir / "intensity.pgm");
  f.crop_range = {m.at("crop_range").at(0).get<std::size_t>(), m.at("crop_range").at(1).get<std::size_t>()};
  return lf;
}

struct Features {
  Common common;
  MeasurementInput input;
  PipelineFlags pipeline;
  Registry reg;

  void add(CLI::App* app) {
    common.add(app, reg);
    input.add(app, reg, false);
    pipeline.add(app, reg);
    app->get_option("--histogram")->required();
    app->get_option("--intensity")->required();
  }

  int exec() {
    const PipelineConfig cfg = pipeline.resolve();
    const HistogramCube cube = read_cube(*input.histogram);
    const IntensityMap intensity = read_pgm(*input.intensity);
    const PaddedInput padded = pad_for_features(cube, intensity, cfg.upsample_factor);
    const FeatureSet f = build_features(padded.cube, padded.intensity, cfg);
    write_features(common.out, f);

    json j;
    j["config"] = reg.effective();
    j["pipeline"] = pipeline_json(cfg);
    j["crop_range"] = {f.crop_range.first, f.crop_range.second};
    j["target_dims"] = {padded.target_height, padded.target_width};
    j["feature_dims"] = {f.first_depth.height(), f.first_depth.width()};
    j["scale_dims"] = json::array();
    for (int s = 1; s <= 4; ++s) j["scale_dims"].push_back({f.scale(s).height(), f.scale(s).width()});
    write_json(common.out / "features.json", j);
    return 0;
  }
};

struct Reconstruct {
  Common common;
  MeasurementInput input;
  PipelineFlags pipeline;
  std::string method = "nn";
  std::optional<fs::path> checkpoint;
  std::size_t radius = 8;
  double eps = 1e-4;
  bool timing = false;
  Registry reg;
  bool histnet_only = false;

  void add(CLI::App* app, bool infer_mode) {
    histnet_only = infer_mode;
    common.add(app, reg);
    input.add(app, reg, true);
    pipeline.add(app, reg);
    if (infer_mode) {
      method = "histnet";
      opt(app, reg, "checkpoint", checkpoint, "Checkpoint directory written by 'train'")
          ->check(CLI::ExistingDirectory)
          ->required();
    } else {
      opt(app, reg, "method", method, "nn, guided or histnet")->check(CLI::IsMember({"nn", "guided", "histnet"}));
      opt(app, reg, "checkpoint", checkpoint, "Checkpoint directory (histnet)")->check(CLI::ExistingDirectory);
      opt(app, reg, "radius", radius, "Guided filter radius")->check(CLI::PositiveNumber);
      opt(app, reg, "eps", eps, "Guided filter regularization")->check(CLI::NonNegativeNumber);
    }
    flag(app, reg, "timing", timing, "Record the reconstruction wall time in the manifest");
  }

  int exec() {
    if (!input.features && !input.histogram) throw InvalidArgument("need --histogram or --features");
    if (method == "histnet" && !checkpoint) throw InvalidArgument("--method histnet needs --checkpoint");
    if (method == "guided" && !input.features && !input.intensity)
      throw InvalidArgument("--method guided needs --intensity");
    if (method == "histnet" && !input.features && !input.intensity)
      throw InvalidArgument("--method histnet needs --intensity");
    const PipelineConfig cfg = pipeline.resolve();
    const GuidedFilterParams gf{radius, eps};
    gf.validate();

    std::optional<nn::HistNet<float>> net;
    if (checkpoint && method == "histnet") net.emplace(nn::load_checkpoint(*checkpoint).params);

    const auto start = std::chrono::steady_clock::now();
    DepthMap depth;
    if (input.features) {
      const LoadedFeatures lf = read_features(*input.features);
      const FeatureSet& f = lf.features;
      if (method == "nn") {
        depth = f.first_depth;
      } else if (method == "guided") {
        depth = guided_filter(f.first_depth, f.intensity, gf);
      } else {
        depth = nn::infer(*net, f);
      }
      depth = crop_top_left(depth, lf.target_height, lf.target_width);
    } else {
      const HistogramCube cube = read_cube(*input.histogram);
      if (method == "nn") {
        depth = reconstruct_nn(cube, cfg);
      } else {
        const IntensityMap intensity = read_pgm(*input.intensity);
        depth = method == "guided" ? reconstruct_guided(cube, intensity, cfg, gf)
                                   : reconstruct_histnet(*net, cube, intensity, cfg);
      }
    }
    const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();

    fs::create_directories(common.out);
    save_depth(common.out, depth);
    json j;
    j["config"] = reg.effective();
    j["method"] = method;
    j["pipeline"] = pipeline_json(cfg);
    j["dims"] = {depth.height(), depth.width()};
    if (timing) j["runtime_ms"] = ms;
    write_json(common.out / "reconstruction.json", j);
    return 0;
  }
};

struct Train {
  Common common;
  NoiseFlags noise;
  PipelineFlags pipeline;
  std::vector<fs::path> depths, intensities;
  DatasetConfig data;
  nn::TrainConfig train;
  double width_scale = 0.25;
  std::optional<fs::path> init;
  std::size_t progress = 0;
  Registry reg;

  void add(CLI::App* app) {
    common.add(app, reg);
    noise.add(app, reg);
    pipeline.add(app, reg);
    opt(app, reg, "depth", depths, "Ground-truth depth maps (PFM); synthetic scenes if absent")
        ->check(CLI::ExistingFile);
    opt(app, reg, "intensity", intensities, "Ground-truth intensity images (PGM), paired with --depth")
        ->check(CLI::ExistingFile);
    opt(app, reg, "scenes", data.scenes, "Number of synthetic scenes");
    opt(app, reg, "scene-height", data.scene_height, "Synthetic scene height");
    opt(app, reg, "scene-width", data.scene_width, "Synthetic scene width");
    opt(app, reg, "patch", data.patch, "Patch size (HR pixels, multiple of 16)");
    opt(app, reg, "stride", data.stride, "Patch stride");
    flag(app, reg, "augment", data.augment, "Add the 8 rotations/flips of every patch");
    opt(app, reg, "bins", data.bins, "Time bins per histogram");
    opt(app, reg, "width-scale", width_scale, "Filter count multiplier in (0, 1]");
    opt(app, reg, "batch", train.batch_size, "Batch size");
    opt(app, reg, "lr", train.learning_rate, "Learning rate");
    opt(app, reg, "epochs", train.epochs, "Training epochs");
    opt(app, reg, "steps", train.max_steps, "Optimizer steps (overrides --epochs when > 0)");
    opt(app, reg, "l1", train.l1_reg, "Proximal l1 regularization strength");
    opt(app, reg, "accumulator-init", train.accumulator_init, "Initial Adagrad accumulator");
    opt(app, reg, "jobs", train.jobs, "Worker threads")->check(CLI::PositiveNumber);
    opt(app, reg, "init", init, "Resume from this checkpoint")->check(CLI::ExistingDirectory);
    opt(app, reg, "progress", progress, "Print the loss every N steps (0 = quiet)");
  }

  int exec() {
    if (depths.size() != intensities.size()) throw InvalidArgument("--depth and --intensity must pair up");
    data.noise = noise.resolve(common.seed);
    data.pipeline = pipeline.resolve();
    train.seed = common.seed;
    if (!(width_scale > 0.0 && width_scale <= 1.0)) throw InvalidArgument("--width-scale must be in (0, 1]");

    std::vector<ScenePair> provided;
    for (std::size_t k = 0; k < depths.size(); ++k) provided.push_back({read_pfm(depths[k]), read_pgm(intensities[k])});
    const auto samples = build_training_set(training_scenes(data, provided), data);

    nn::HistNetParams<float> params;
    std::size_t start_step = 0;
    if (init) {
      nn::Checkpoint c = nn::load_checkpoint(*init);
      params = std::move(c.params);
      start_step = c.step;
    } else {
      params = nn::init_histnet<float>(width_scale, common.seed);
    }
    nn::ProgressFn report;
    if (progress > 0) {
      report = [this](std::size_t step, double loss) {
        if (step % progress == 0) std::cerr << "step " << step << " loss " << format_double(loss) << '\n';
      };
    }
    const nn::TrainResult res = nn::train(samples, train, std::move(params), report);

    fs::create_directories(common.out);
    std::ofstream csv(common.out / "loss.csv");
    csv << "step,loss\n";
    for (std::size_t k = 0; k < res.loss_curve.size(); ++k)
      csv << start_step + k << ',' << format_double(res.loss_curve[k]) << '\n';
    if (!csv) throw Error("failed writing loss.csv");

    json cfg = reg.effective();
    nn::save_checkpoint(common.out / "checkpoint", {res.params, start_step + res.loss_curve.size(), cfg.dump()});
    json j;
    j["config"] = cfg;
    j["samples"] = samples.size();
    j["steps"] = res.loss_curve.size();
    j["parameters"] = res.params.count();
    j["final_loss"] = res.loss_curve.empty() ? 0.0 : res.loss_curve.back();
    write_json(common.out / "train.json", j);
    return 0;
  }
};

struct Eval {
  fs::path out = "out";
  fs::path pred, gt;
  std::optional<fs::path> histogram;
  std::optional<std::string> scene, method;
  bool append = false;
  Registry reg;

  void add(CLI::App* app) {
    opt(app, reg, "out", out, "Output directory");
    opt(app, reg, "pred", pred, "Predicted depth (PFM)")->check(CLI::ExistingFile)->required();
    opt(app, reg, "gt", gt, "Ground-truth depth (PFM)")->check(CLI::ExistingFile)->required();
    opt(app, reg, "histogram", histogram, "Measurement cube, for the estimated SBR and ppp columns")
        ->check(CLI::ExistingFile);
    opt(app, reg, "scene", scene, "Scene label (default: ground-truth file stem)");
    opt(app, reg, "method", method, "Method label (default: from reconstruction.json next to --pred)");
    flag(app, reg, "append", append, "Append to an existing eval.csv instead of replacing it");
  }

  int exec() {
    const DepthMap p = read_pfm(pred);
    const DepthMap g = read_pfm(gt);
    if (!p.values.same_shape(g.values)) throw DimensionError("prediction and ground truth differ in size");

    std::string method_name = method.value_or("unknown");
    std::string runtime;
    const fs::path sidecar = pred.parent_path() / "reconstruction.json";
    if (fs::exists(sidecar)) {
      const json s = read_json(sidecar);
      if (!method) method_name = s.value("method", method_name);
      if (s.contains("runtime_ms")) runtime = format_double(s["runtime_ms"].get<double>());
    }
    std::string sbr, ppp;
    if (histogram) {
      const HistogramCube cube = read_cube(*histogram);
      const NoiseReport rep = measure_noise(cube, estimate_background(cube), find_peaks(cube, PeakMethod::argmax, 0.5714));
      sbr = format_double(rep.sbr);
      ppp = format_double(rep.ppp);
    }

    fs::create_directories(out);
    const fs::path path = out / "eval.csv";
    const bool header = !append || !fs::exists(path);
    std::ofstream csv(path, append ? std::ios::app : std::ios::trunc);
    if (!csv) throw Error("cannot write " + path.string());
    if (header) csv << "scene,method,rmse,ade,sbr,ppp,runtime_ms\n";
    csv << scene.value_or(gt.stem().string()) << ',' << method_name << ',' << format_double(rmse(p, g)) << ','
        << format_double(ade(p, g).mean) << ',' << sbr << ',' << ppp << ',' << runtime << '\n';
    if (!csv) throw Error("failed writing " + path.string());
    return 0;
  }
};

struct Sweep {
  Common common;
  PipelineFlags pipeline;
  fs::path checkpoint;
  SweepConfig cfg;
  Registry reg;

  void add(CLI::App* app) {
    common.add(app, reg);
    pipeline.add(app, reg);
    opt(app, reg, "checkpoint", checkpoint, "Checkpoint directory")->check(CLI::ExistingDirectory)->required();
    opt(app, reg, "ppp", cfg.ppp, "ppp levels (grid rows)")->expected(1, 64);
    opt(app, reg, "sbr", cfg.sbr, "SBR levels (grid columns)")->expected(1, 64);
    opt(app, reg, "scenes", cfg.scenes, "Synthetic test scenes per cell");
    opt(app, reg, "height", cfg.scene_height, "Test scene height");
    opt(app, reg, "width", cfg.scene_width, "Test scene width");
    opt(app, reg, "bins", cfg.bins, "Time bins");
    opt(app, reg, "jobs", cfg.jobs, "Worker threads")->check(CLI::PositiveNumber);
  }

  int exec() {
    cfg.pipeline = pipeline.resolve();
    cfg.seed = common.seed;
    const nn::HistNet<float> net(nn::load_checkpoint(checkpoint).params);
    const auto cells = run_sweep(net, cfg);

    fs::create_directories(common.out);
    std::ofstream csv(common.out / "sweep.csv");
    csv << "ppp,sbr,rmse,ade,rmse_nn\n";
    for (const auto& c : cells)
      csv << format_double(c.ppp) << ',' << format_double(c.sbr) << ',' << format_double(c.rmse) << ','
          << format_double(c.ade) << ',' << format_double(c.rmse_first) << '\n';
    // Heat map: one row per ppp, one column per SBR.
    std::ofstream grid(common.out / "sweep_grid.csv");
    grid << "ppp";
    for (double s : cfg.sbr) grid << ",sbr=" << format_double(s);
    grid << '\n';
    for (std::size_t a = 0; a < cfg.ppp.size(); ++a) {
      grid << format_double(cfg.ppp[a]);
      for (std::size_t b = 0; b < cfg.sbr.size(); ++b) grid << ',' << format_double(cells[a * cfg.sbr.size() + b].rmse);
      grid << '\n';
    }
    if (!csv || !grid) throw Error("failed writing sweep output");
    json j;
    j["config"] = reg.effective();
    j["pipeline"] = pipeline_json(cfg.pipeline);
    write_json(common.out / "sweep.json", j);
    return 0;
  }
};

}  // namespace

int run(const std::vector<std::string>& args) {
  CLI::App app{"Single-photon lidar depth toolkit: simulation, features, reconstruction, training"};
  app.name("spadsr");
  app.require_subcommand(1, 1);
  app.fallthrough();
  app.set_config("--config", "", "Flat JSON file of flag values; command-line flags take precedence");
  app.config_formatter(std::make_shared<JsonConfig>(app));
  app.allow_config_extras(CLI::config_extras_mode::error);

  Simulate simulate_cmd;
  Features features_cmd;
  Reconstruct reconstruct_cmd, infer_cmd;
  Train train_cmd;
  Eval eval_cmd;
  Sweep sweep_cmd;
  simulate_cmd.add(app.add_subcommand("simulate", "Simulate an LR histogram cube and HR intensity"));
  features_cmd.add(app.add_subcommand("features", "Extract the network input features"));
  reconstruct_cmd.add(app.add_subcommand("reconstruct", "Reconstruct an HR depth map"), false);
  train_cmd.add(app.add_subcommand("train", "Train HistNet on simulated data"));
  infer_cmd.add(app.add_subcommand("infer", "Reconstruct with a trained HistNet checkpoint"), true);
  eval_cmd.add(app.add_subcommand("eval", "Score a prediction against ground truth"));
  sweep_cmd.add(app.add_subcommand("sweep", "RMSE over a ppp x SBR grid"));

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    const auto* sub = app.get_subcommands().front();
    const std::string name = sub->get_name();
    if (name == "simulate") return simulate_cmd.exec();
    if (name == "features") return features_cmd.exec();
    if (name == "reconstruct") return reconstruct_cmd.exec();
    if (name == "infer") return infer_cmd.exec();
    if (name == "train") return train_cmd.exec();
    if (name == "eval") return eval_cmd.exec();
    if (name == "sweep") return sweep_cmd.exec();
    return 2;
  } catch (const InvalidArgument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}

int run(int argc, const char* const* argv) {
  std::vector<std::string> args;
  for (int k = 1; k < argc; ++k) args.emplace_back(argv[k]);
  return run(args);
}

}  // namespace spadsr::cli
