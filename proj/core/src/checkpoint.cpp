#include "gnireg/checkpoint.hpp"

#include <fstream>
#include <sstream>

#include "gnireg/errors.hpp"
#include "json.hpp"

namespace gnireg {

using nlohmann::json;

std::string checkpoint_to_json(const Checkpoint& ckpt) {
  json doc;
  doc["format"] = "gnireg-checkpoint";
  doc["version"] = 1;
  doc["seed"] = ckpt.seed;
  doc["step"] = ckpt.step;
  json layers = json::array();
  for (const auto& l : ckpt.network.layers()) {
    json jl;
    jl["in"] = l.in_dim();
    jl["out"] = l.out_dim();
    jl["activation"] = to_string(l.activation);
    jl["weights"] = std::vector<double>(l.weights.data(), l.weights.data() + l.weights.size());
    jl["bias"] = std::vector<double>(l.bias.data(), l.bias.data() + l.bias.size());
    layers.push_back(std::move(jl));
  }
  doc["layers"] = std::move(layers);
  return doc.dump(1);
}

Checkpoint checkpoint_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw FormatError(std::string("checkpoint: ") + e.what());
  }
  try {
    if (doc.value("format", "") != "gnireg-checkpoint") {
      throw FormatError("checkpoint: missing or wrong 'format' field");
    }
    std::vector<DenseLayer> layers;
    for (const auto& jl : doc.at("layers")) {
      const auto in = jl.at("in").get<Eigen::Index>();
      const auto out = jl.at("out").get<Eigen::Index>();
      const auto w = jl.at("weights").get<std::vector<double>>();
      const auto b = jl.at("bias").get<std::vector<double>>();
      if (static_cast<Eigen::Index>(w.size()) != in * out || static_cast<Eigen::Index>(b.size()) != out) {
        throw FormatError("checkpoint: layer " + std::to_string(layers.size()) +
                          " array sizes do not match its dims");
      }
      DenseLayer l;
      l.weights = Eigen::Map<const Matrix>(w.data(), out, in);
      l.bias = Eigen::Map<const Vector>(b.data(), out);
      l.activation = parse_activation(jl.at("activation").get<std::string>());
      layers.push_back(std::move(l));
    }
    Checkpoint c;
    c.network = Network(std::move(layers));
    c.seed = doc.value("seed", std::uint64_t{0});
    c.step = doc.value("step", std::size_t{0});
    return c;
  } catch (const json::exception& e) {
    throw FormatError(std::string("checkpoint: ") + e.what());
  } catch (const ArgumentError& e) {
    throw FormatError(std::string("checkpoint: ") + e.what());
  } catch (const ShapeError& e) {
    throw FormatError(std::string("checkpoint: ") + e.what());
  }
}

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << checkpoint_to_json(ckpt) << '\n';
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open checkpoint " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return checkpoint_from_json(ss.str());
}

}  // namespace gnireg
