#pragma once

// Engine configuration: a single JSON document. Every key is optional; an
// empty object yields the defaults.
//
//   {
//     "train":      {"learning_rate":0.001,"beta1":0.9,"beta2":0.999,
//                    "epsilon":1e-8,"batch_size":4,"epochs":100,"seed":0},
//     "edge_fit":   {"learning_rate":0.05,"iterations":2000,"l2":1e-4},
//     "model":      {"layers":2,"clusters":3},
//     "weights":    {"parts":{"EF":1.0,...},"clusters":{"1":1.0,...}},
//     "proximity":  [[...5 rows of 5...]],   // ears, eyes, nose, cheeks, lips_jaw
//     "class_pain": {"EF":0,...},
//     "confidence_threshold": 0.45
//   }

#include <istream>
#include <string>

#include "sheeppain/graph.hpp"
#include "sheeppain/model.hpp"
#include "sheeppain/scoring.hpp"
#include "sheeppain/training.hpp"
#include "sheeppain/types.hpp"

namespace sheeppain {

struct EngineConfig {
  TrainConfig train;
  EdgeFitConfig edge_fit;
  ModelDims dims;
  WeightTable weights;
  ProximityPrior prior;
  PainTable pains;
  double confidence_threshold = 0.45;
};

/// Throws Error(validation) naming the offending key.
EngineConfig parse_config(const std::string& text);
EngineConfig read_config(std::istream& in);

/// Reads just a weight table: either a full config document or an object
/// with "parts"/"clusters" keys at top level.
WeightTable parse_weights(const std::string& text, std::size_t clusters);

}  // namespace sheeppain
