#pragma once

// Seeded randomized self-checks: analytic gradients against central
// differences, and threshold parse-graph inference against enumeration.

#include <cstddef>
#include <cstdint>
#include <vector>

#include "sheeppain/random.hpp"
#include "sheeppain/training.hpp"

namespace sheeppain {

/// n detections with random classes, pain levels, boxes and confidences.
std::vector<Detection> random_detections(Rng& rng, std::size_t n);

/// Random labeled graph with a random kept-edge mask.
LabeledGraph random_labeled_graph(Rng& rng, std::size_t nodes, std::size_t clusters);

/// Relative error with a floor on the denominator:
/// |a - b| / max(|a|, |b|, floor).
double relative_error(double a, double b, double floor = 1e-6);

struct GradCheckOptions {
  std::size_t trials = 20;
  std::uint64_t seed = 7;
  double step = 1e-5;
  double tolerance = 1e-4;
  std::size_t min_nodes = 3;
  std::size_t max_nodes = 10;
  std::size_t clusters = 3;
};

struct GradCheckReport {
  double max_relative_error = 0;
  std::size_t checked = 0;  // parameter entries compared
  std::size_t skipped = 0;  // entries within 10 steps of a ReLU kink
  std::size_t trials = 0;
  bool passed() const { return max_relative_error < tolerance; }
  double tolerance = 0;
};

/// Per trial: random graph (nodes in [min,max]), K drawn from {1,2,3},
/// random parameters; every trainable entry compared, except entries whose
/// perturbation by +-10 steps flips a ReLU activation.
GradCheckReport run_gradient_check(const GradCheckOptions& options);

struct OracleOptions {
  std::size_t trials = 100;
  std::uint64_t seed = 11;
  std::size_t max_nodes = 5;
  /// Edge logits closer to 0 than this are re-drawn so the argmax is unique.
  double min_margin = 1e-6;
};

struct OracleReport {
  std::size_t instances = 0;
  std::size_t mismatches = 0;
  bool passed() const { return mismatches == 0; }
};

OracleReport run_parse_graph_oracle(const OracleOptions& options);

}  // namespace sheeppain
