#include "sheeppain/config.hpp"

#include <iterator>
#include <sstream>

#include <nlohmann/json.hpp>

#include "sheeppain/error.hpp"

namespace sheeppain {

namespace {

using nlohmann::json;

[[noreturn]] void bad_key(const std::string& key, const std::string& what) {
  throw Error(ErrorKind::validation, "config '" + key + "': " + what, std::nullopt, key);
}

template <class T>
void read_opt(const json& obj, const char* key, T& out, const std::string& scope) {
  auto it = obj.find(key);
  if (it == obj.end()) return;
  try {
    out = it->get<T>();
  } catch (const json::exception&) {
    bad_key(scope + "." + key, "wrong type");
  }
}

json parse_document(const std::string& text) {
  if (text.find_first_not_of(" \t\r\n") == std::string::npos) return json::object();
  try {
    json j = json::parse(text);
    if (!j.is_object()) bad_key("<root>", "expected an object");
    return j;
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::validation, std::string("malformed config: ") + e.what());
  }
}

void apply_weights(const json& j, WeightTable& w) {
  if (auto parts = j.find("parts"); parts != j.end()) {
    if (!parts->is_object()) bad_key("weights.parts", "expected an object");
    for (const auto& [name, value] : parts->items()) {
      const auto label = parse_label(name);
      if (!label) bad_key("weights.parts." + name, "unknown class label");
      if (!value.is_number()) bad_key("weights.parts." + name, "expected a number");
      w.set_part_weight(*label, value.get<double>());
    }
  }
  if (auto clusters = j.find("clusters"); clusters != j.end()) {
    if (!clusters->is_object()) bad_key("weights.clusters", "expected an object");
    for (const auto& [name, value] : clusters->items()) {
      int index = 0;
      try {
        std::size_t used = 0;
        index = std::stoi(name, &used);
        if (used != name.size()) throw std::invalid_argument(name);
      } catch (const std::exception&) {
        bad_key("weights.clusters." + name, "cluster keys are integers");
      }
      if (!value.is_number()) bad_key("weights.clusters." + name, "expected a number");
      w.set_cluster_weight(index, value.get<double>());
    }
  }
  w.validate();
}

}  // namespace

EngineConfig parse_config(const std::string& text) {
  const json doc = parse_document(text);
  EngineConfig cfg;

  if (auto t = doc.find("train"); t != doc.end()) {
    read_opt(*t, "learning_rate", cfg.train.learning_rate, "train");
    read_opt(*t, "beta1", cfg.train.beta1, "train");
    read_opt(*t, "beta2", cfg.train.beta2, "train");
    read_opt(*t, "epsilon", cfg.train.epsilon, "train");
    read_opt(*t, "batch_size", cfg.train.batch_size, "train");
    read_opt(*t, "epochs", cfg.train.epochs, "train");
    read_opt(*t, "seed", cfg.train.seed, "train");
  }
  cfg.train.validate();

  if (auto e = doc.find("edge_fit"); e != doc.end()) {
    read_opt(*e, "learning_rate", cfg.edge_fit.learning_rate, "edge_fit");
    read_opt(*e, "iterations", cfg.edge_fit.iterations, "edge_fit");
    read_opt(*e, "l2", cfg.edge_fit.l2, "edge_fit");
  }

  if (auto m = doc.find("model"); m != doc.end()) {
    read_opt(*m, "layers", cfg.dims.layers, "model");
    read_opt(*m, "clusters", cfg.dims.clusters, "model");
  }
  if (cfg.dims.layers < 1) bad_key("model.layers", "must be >= 1");
  if (cfg.dims.clusters < 2) bad_key("model.clusters", "must be >= 2");

  cfg.weights = WeightTable(cfg.dims.clusters);
  if (auto w = doc.find("weights"); w != doc.end()) apply_weights(*w, cfg.weights);

  if (auto p = doc.find("proximity"); p != doc.end()) {
    ProximityPrior::Table table{};
    try {
      const auto rows = p->get<std::vector<std::vector<double>>>();
      if (rows.size() != kNumParts) bad_key("proximity", "expected a 5x5 matrix");
      for (std::size_t a = 0; a < kNumParts; ++a) {
        if (rows[a].size() != kNumParts) bad_key("proximity", "expected a 5x5 matrix");
        for (std::size_t b = 0; b < kNumParts; ++b) table[a][b] = rows[a][b];
      }
    } catch (const json::exception&) {
      bad_key("proximity", "expected a 5x5 matrix of numbers");
    }
    cfg.prior = ProximityPrior(table);
  }

  if (auto cp = doc.find("class_pain"); cp != doc.end()) {
    if (!cp->is_object()) bad_key("class_pain", "expected an object");
    for (const auto& [name, value] : cp->items()) {
      const auto label = parse_label(name);
      if (!label) bad_key("class_pain." + name, "unknown class label");
      if (!value.is_number_integer()) bad_key("class_pain." + name, "expected 0, 1 or 2");
      cfg.pains.set(*label, value.get<int>());
    }
  }

  read_opt(doc, "confidence_threshold", cfg.confidence_threshold, "<root>");
  if (!(cfg.confidence_threshold >= 0 && cfg.confidence_threshold <= 1)) {
    bad_key("confidence_threshold", "must lie in [0,1]");
  }
  return cfg;
}

EngineConfig read_config(std::istream& in) {
  return parse_config(std::string(std::istreambuf_iterator<char>(in), {}));
}

WeightTable parse_weights(const std::string& text, std::size_t clusters) {
  const json doc = parse_document(text);
  WeightTable w(clusters);
  if (auto nested = doc.find("weights"); nested != doc.end()) {
    apply_weights(*nested, w);
  } else {
    apply_weights(doc, w);
  }
  return w;
}

}  // namespace sheeppain
