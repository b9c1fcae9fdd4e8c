#pragma once

// Seeded desk-scale datasets standing in for annotated sheep faces.
//
// A sample is a set of 3-10 distinct classes; each detection carries its
// class's default pain level and ground-truth clusters are the pain-level
// groups (cluster = pain + 1). Edges are labeled keep iff both endpoints share
// a cluster.
//
// Message passing only sees neighbors, so a singleton cluster has nothing to
// learn from. `separation` is the probability that a sample has no singleton
// cluster; the remaining samples carry exactly one singleton.

#include <cstddef>
#include <cstdint>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "sheeppain/scoring.hpp"
#include "sheeppain/training.hpp"

namespace sheeppain {

/// Throws Error(validation) when n_samples is 0 or separation lies outside [0,1].
std::vector<LabeledSample> generate_dataset(std::uint64_t seed, std::size_t n_samples,
                                            double separation);

enum class Trend { rising, falling, flat };

Trend parse_trend(const std::string& text);

struct ScenarioOptions {
  std::size_t days = 5;
  std::size_t frames_per_day = 10;
  Trend trend = Trend::rising;
  /// Std-dev of per-detection noise added to the latent pain before
  /// quantization.
  double noise = 0.0;
  std::int64_t start_timestamp = 1'700'000'000;
};

/// Latent pain moves linearly over the whole period (0 -> 2 rising,
/// 2 -> 0 falling, constant 1 flat). Each frame holds one detection per
/// ear/eye/nose part whose class is the one with the nearest default pain.
std::vector<Frame> generate_monitoring_scenario(std::uint64_t seed,
                                                const ScenarioOptions& options);

/// Detections of every sample, frame_id = sample index.
void write_dataset_detections(std::ostream& out, std::span<const LabeledSample> samples);

/// Sidecar label file: one JSON line per sample,
/// {"frame_id":k,"clusters":[...],"edges":[[i,j,keep],...]}.
void write_dataset_labels(std::ostream& out, std::span<const LabeledSample> samples);

/// Joins a detection stream with its sidecar labels by frame_id. Throws
/// Error(validation) on missing or inconsistent labels.
std::vector<LabeledSample> read_dataset(std::istream& detections, std::istream& labels);

}  // namespace sheeppain
