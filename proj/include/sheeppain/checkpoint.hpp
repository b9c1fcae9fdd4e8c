#pragma once

// Versioned JSON checkpoint:
//
//   {"format":"sheeppain-checkpoint","version":1,
//    "dims":{"feature_dim":D,"layers":K,"clusters":O},
//    "layers":[{"weight":{"shape":[D,D],"data":[...]},"bias":{"shape":[D],"data":[...]}},...],
//    "head":{...},"edge_scorer":{"weights":[w0,w1],"bias":b},
//    "train_config":{...}}
//
// Doubles are written in shortest round-trip form, so write-then-read
// reproduces every parameter bit for bit.

#include <istream>
#include <ostream>
#include <string>

#include "sheeppain/model.hpp"
#include "sheeppain/training.hpp"

namespace sheeppain {

inline constexpr int kCheckpointVersion = 1;

struct Checkpoint {
  ModelParams params;
  TrainConfig config;
};

void write_checkpoint(std::ostream& out, const Checkpoint& checkpoint);
std::string checkpoint_to_string(const Checkpoint& checkpoint);

/// Throws Error(validation) on an unknown format/version or shape mismatch.
Checkpoint read_checkpoint(std::istream& in);
Checkpoint checkpoint_from_string(const std::string& text);

}  // namespace sheeppain
