#include "sheeppain/checkpoint.hpp"

#include <sstream>

#include <nlohmann/json.hpp>

#include "sheeppain/error.hpp"

namespace sheeppain {

namespace {

using nlohmann::ordered_json;

constexpr const char* kFormat = "sheeppain-checkpoint";

ordered_json tensor(const std::vector<double>& data, std::vector<std::size_t> shape) {
  ordered_json j;
  j["shape"] = std::move(shape);
  j["data"] = data;
  return j;
}

std::vector<double> read_tensor(const nlohmann::json& j, std::vector<std::size_t> shape,
                                const std::string& name) {
  const auto stored = j.at("shape").get<std::vector<std::size_t>>();
  if (stored != shape) fail(ErrorKind::validation, "checkpoint tensor '" + name + "' has wrong shape");
  auto data = j.at("data").get<std::vector<double>>();
  std::size_t expected = 1;
  for (auto s : shape) expected *= s;
  if (data.size() != expected) {
    fail(ErrorKind::validation, "checkpoint tensor '" + name + "' has wrong length");
  }
  return data;
}

ordered_json layer_json(const DenseLayer& l) {
  ordered_json j;
  j["weight"] = tensor(l.weight.data, {l.weight.rows, l.weight.cols});
  j["bias"] = tensor(l.bias, {l.bias.size()});
  return j;
}

void read_layer(const nlohmann::json& j, DenseLayer& l, const std::string& name) {
  l.weight.data = read_tensor(j.at("weight"), {l.weight.rows, l.weight.cols}, name + ".weight");
  l.bias = read_tensor(j.at("bias"), {l.bias.size()}, name + ".bias");
}

}  // namespace

void write_checkpoint(std::ostream& out, const Checkpoint& cp) {
  cp.params.validate();
  ordered_json j;
  j["format"] = kFormat;
  j["version"] = kCheckpointVersion;
  const ModelDims dims = cp.params.dims();
  j["dims"] = {{"feature_dim", dims.feature_dim}, {"layers", dims.layers},
               {"clusters", dims.clusters}};
  auto layers = ordered_json::array();
  for (const auto& l : cp.params.layers) layers.push_back(layer_json(l));
  j["layers"] = std::move(layers);
  j["head"] = layer_json(cp.params.head);
  j["edge_scorer"] = {{"weights", {cp.params.edge_scorer.weights[0], cp.params.edge_scorer.weights[1]}},
                      {"bias", cp.params.edge_scorer.bias}};
  const TrainConfig& c = cp.config;
  j["train_config"] = {{"learning_rate", c.learning_rate}, {"beta1", c.beta1},
                       {"beta2", c.beta2},                 {"epsilon", c.epsilon},
                       {"batch_size", c.batch_size},       {"epochs", c.epochs},
                       {"seed", c.seed}};
  out << j.dump() << '\n';
}

std::string checkpoint_to_string(const Checkpoint& checkpoint) {
  std::ostringstream out;
  write_checkpoint(out, checkpoint);
  return out.str();
}

Checkpoint read_checkpoint(std::istream& in) {
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::validation, std::string("malformed checkpoint: ") + e.what());
  }
  try {
    if (j.at("format").get<std::string>() != kFormat) {
      fail(ErrorKind::validation, "not a sheeppain checkpoint");
    }
    const int version = j.at("version").get<int>();
    if (version != kCheckpointVersion) {
      fail(ErrorKind::validation, "unsupported checkpoint version " + std::to_string(version));
    }
    const auto& d = j.at("dims");
    const ModelDims dims{d.at("feature_dim").get<std::size_t>(), d.at("layers").get<std::size_t>(),
                         d.at("clusters").get<std::size_t>()};
    if (j.at("layers").size() != dims.layers) {
      fail(ErrorKind::validation, "checkpoint layer count does not match dims");
    }
    Checkpoint cp{ModelParams::zeros(dims), {}};
    for (std::size_t k = 0; k < dims.layers; ++k) {
      read_layer(j.at("layers").at(k), cp.params.layers[k], "layers." + std::to_string(k));
    }
    read_layer(j.at("head"), cp.params.head, "head");
    const auto& es = j.at("edge_scorer");
    cp.params.edge_scorer.weights = {es.at("weights").at(0).get<double>(),
                                     es.at("weights").at(1).get<double>()};
    cp.params.edge_scorer.bias = es.at("bias").get<double>();
    const auto& c = j.at("train_config");
    cp.config.learning_rate = c.at("learning_rate").get<double>();
    cp.config.beta1 = c.at("beta1").get<double>();
    cp.config.beta2 = c.at("beta2").get<double>();
    cp.config.epsilon = c.at("epsilon").get<double>();
    cp.config.batch_size = c.at("batch_size").get<std::size_t>();
    cp.config.epochs = c.at("epochs").get<std::size_t>();
    cp.config.seed = c.at("seed").get<std::uint64_t>();
    cp.params.validate();
    return cp;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::validation, std::string("malformed checkpoint: ") + e.what());
  }
}

Checkpoint checkpoint_from_string(const std::string& text) {
  std::istringstream in(text);
  return read_checkpoint(in);
}

}  // namespace sheeppain
