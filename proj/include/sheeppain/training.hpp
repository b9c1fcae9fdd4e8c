#pragma once

// Supervised training of the message-passing layers and cluster head with
// node-wise cross-entropy and Adam, plus the separate logistic fit of the
// edge scorer.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "sheeppain/gnn.hpp"
#include "sheeppain/graph.hpp"
#include "sheeppain/model.hpp"

namespace sheeppain {

struct TrainConfig {
  double learning_rate = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::size_t batch_size = 4;
  std::size_t epochs = 100;
  std::uint64_t seed = 0;

  /// Throws Error(validation) when a field is out of range.
  void validate() const;

  friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

struct EpochStats {
  double mean_loss = 0;
  double accuracy = 0;  // fraction of nodes whose predicted cluster matched
};

struct TrainHistory {
  std::vector<EpochStats> epochs;
};

/// A parse graph with one ground-truth cluster index (1..O) per node.
struct LabeledGraph {
  ParseGraph graph;
  std::vector<int> labels;
};

/// -sum actual_i * log(max(predicted_i, 1e-12)).
double cross_entropy(std::span<const double> actual, std::span<const double> predicted);

struct LossAndGrad {
  double loss = 0;  // mean node-wise cross-entropy
  ModelParams grad;  // edge scorer entries stay zero
  std::size_t nodes = 0;
  std::size_t correct = 0;
};

/// Reverse-mode gradient of the mean node-wise cross-entropy with respect to
/// every layer weight/bias and the head. ReLU'(0) is taken as 0.
LossAndGrad loss_and_grad(std::span<const LabeledGraph> batch, const ModelParams& params);

/// Loss only (same definition as loss_and_grad).
double batch_loss(std::span<const LabeledGraph> batch, const ModelParams& params);

using Objective = std::function<double(const ModelParams&)>;

/// Central differences (f(theta + h) - f(theta - h)) / 2h over the trainable
/// entries.
ModelParams finite_diff_grad(const Objective& objective, const ModelParams& params,
                             double h);
ModelParams finite_diff_grad(std::span<const LabeledGraph> batch,
                             const ModelParams& params, double h);

struct AdamState {
  ModelParams first_moment;
  ModelParams second_moment;

  static AdamState zeros_like(const ModelParams& params);
};

/// One bias-corrected Adam update of the trainable entries; t is 1-based.
void adam_step(ModelParams& params, const ModelParams& grads, AdamState& state,
               const TrainConfig& config, std::size_t t);

struct TrainResult {
  ModelParams params;
  TrainHistory history;
};

/// Seeded shuffle per epoch, Adam per mini-batch. Loss and accuracy in the
/// history are accumulated over the forward passes of each epoch.
TrainResult train(std::span<const LabeledGraph> dataset, const TrainConfig& config,
                  ModelParams init);

struct Evaluation {
  double accuracy = 0;
  std::size_t nodes = 0;
  std::vector<std::vector<std::size_t>> confusion;  // [true - 1][predicted - 1]
  std::vector<double> precision;  // per cluster; 0 when never predicted
  std::vector<double> recall;     // per cluster; 0 when never labeled
};

Evaluation evaluate(std::span<const LabeledGraph> dataset, const ModelParams& params);

// ---- edge scorer ---------------------------------------------------------

struct EdgeExample {
  EdgeFeature feature;
  bool keep = false;
};

struct EdgeFitConfig {
  double learning_rate = 0.05;
  std::size_t iterations = 2000;
  double l2 = 1e-4;

  friend bool operator==(const EdgeFitConfig&, const EdgeFitConfig&) = default;
};

/// Full-batch logistic regression with Adam, starting from zero.
EdgeScorer fit_edge_scorer(std::span<const EdgeExample> examples,
                           const EdgeFitConfig& config = {});

/// Fraction of examples where (logit > 0) == keep.
double edge_accuracy(std::span<const EdgeExample> examples, const EdgeScorer& scorer);

// ---- end-to-end fitting on labeled detection sets ------------------------

struct EdgeLabel {
  int i = 0;  // node ids, i < j
  int j = 0;
  bool keep = false;

  friend bool operator==(const EdgeLabel&, const EdgeLabel&) = default;
};

/// Detections of one face with per-node cluster labels and per-edge keep
/// labels.
struct LabeledSample {
  std::vector<Detection> detections;
  std::vector<int> cluster_labels;
  std::vector<EdgeLabel> edge_labels;

  friend bool operator==(const LabeledSample&, const LabeledSample&) = default;
};

std::vector<EdgeExample> edge_examples(std::span<const LabeledSample> samples,
                                       const ProximityPrior& prior);

/// Builds each complete graph and infers its parse graph with params.edge_scorer.
std::vector<LabeledGraph> prepare_graphs(std::span<const LabeledSample> samples,
                                         const ModelParams& params,
                                         const ProximityPrior& prior);

struct FitResult {
  ModelParams params;
  TrainHistory history;
  double edge_accuracy = 0;
};

/// Fits the edge scorer, infers parse graphs with it, then trains the layers
/// and head from init_params(dims, config.seed).
FitResult fit_model(std::span<const LabeledSample> samples, const TrainConfig& config,
                    const ModelDims& dims, const ProximityPrior& prior = {},
                    const EdgeFitConfig& edge_config = {});

}  // namespace sheeppain
