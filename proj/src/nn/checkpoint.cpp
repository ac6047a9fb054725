#include "spadsr/nn/checkpoint.hpp"

#include <fstream>

#include <json.hpp>

#include "spadsr/io.hpp"

namespace spadsr::nn {

using nlohmann::json;

void save_checkpoint(const std::filesystem::path& dir, const Checkpoint& ckpt) {
  std::filesystem::create_directories(dir);
  json manifest;
  manifest["format"] = "histnet-checkpoint";
  manifest["version"] = 1;
  manifest["width_scale"] = ckpt.params.width_scale;
  manifest["step"] = ckpt.step;
  manifest["config"] = ckpt.extra_json.empty() ? json::object() : json::parse(ckpt.extra_json);
  json tensors = json::array();
  for (const auto& t : ckpt.params.tensors) {
    const std::string file = t.name + ".spdt";
    std::vector<std::uint64_t> dims(t.dims.begin(), t.dims.end());
    write_tensor(dir / file, Tensor(dims, t.value));
    tensors.push_back({{"name", t.name}, {"file", file}, {"dims", t.dims}});
  }
  manifest["tensors"] = tensors;
  std::ofstream out(dir / "manifest.json");
  if (!out) throw Error("cannot write " + (dir / "manifest.json").string());
  out << manifest.dump(2) << '\n';
  if (!out) throw Error("failed writing " + (dir / "manifest.json").string());
}

Checkpoint load_checkpoint(const std::filesystem::path& dir) {
  std::ifstream in(dir / "manifest.json");
  if (!in) throw Error("no checkpoint manifest in " + dir.string());
  json manifest;
  try {
    manifest = json::parse(in);
  } catch (const json::exception& e) {
    throw FormatError("bad checkpoint manifest: " + std::string(e.what()));
  }
  if (manifest.value("format", "") != "histnet-checkpoint") throw FormatError("not a HistNet checkpoint");

  Checkpoint ckpt;
  ckpt.step = manifest.at("step").get<std::size_t>();
  ckpt.extra_json = manifest.value("config", json::object()).dump();
  const double scale = manifest.at("width_scale").get<double>();
  // The layout is fixed by width_scale; files must agree with it.
  ckpt.params = init_histnet<float>(scale, 0);
  const auto& entries = manifest.at("tensors");
  if (entries.size() != ckpt.params.tensors.size()) throw FormatError("checkpoint has the wrong number of tensors");
  for (std::size_t k = 0; k < entries.size(); ++k) {
    auto& p = ckpt.params.tensors[k];
    if (entries[k].at("name").get<std::string>() != p.name)
      throw FormatError("checkpoint tensor " + std::to_string(k) + " should be " + p.name);
    const Tensor t = read_tensor(dir / entries[k].at("file").get<std::string>(), Dtype::f32);
    const std::vector<std::uint64_t> want(p.dims.begin(), p.dims.end());
    if (t.dims() != want) throw DimensionError("checkpoint tensor " + p.name + " has the wrong dims");
    p.value = t.f32();
  }
  return ckpt;
}

}  // namespace spadsr::nn
