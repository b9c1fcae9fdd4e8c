#pragma once

// Sum-aggregation message passing over a parse graph followed by a softmax
// cluster head.
//
//   M_i^(k)   = sum_{j in N(i)} psi_j^(k-1)
//   psi_i^(k) = ReLU(W^(k) M_i^(k) + b^(k))
//
// Node state containers are indexed by node position (node id - 1).

#include <cstddef>
#include <span>
#include <vector>

#include "sheeppain/graph.hpp"
#include "sheeppain/model.hpp"

namespace sheeppain {

using Embeddings = std::vector<Feature>;

/// Layer-0 features of every node in the parse graph's parent.
Embeddings initial_features(const ParseGraph& g);

/// Neighbor sums over kept edges; isolated nodes get a zero vector. Neighbor
/// vectors are added in lexicographic order of their values so the result
/// does not depend on node numbering. Throws Error(validation) on mixed
/// dimensions or missing features.
Embeddings aggregate_messages(const ParseGraph& g, const Embeddings& features);

/// ReLU(W M_i + b) per node. Throws Error(numerical) on non-finite output.
Embeddings layer_update(const Embeddings& messages, const DenseLayer& layer);

/// Intermediate state of one forward pass, kept for backpropagation.
struct ForwardTrace {
  std::vector<Embeddings> states;       // psi^(0) .. psi^(K)
  std::vector<Embeddings> messages;     // M^(1) .. M^(K)
  std::vector<Embeddings> preactivations;  // W M + b, before ReLU
  std::vector<std::vector<std::size_t>> adjacency;
};

ForwardTrace forward_trace(const ParseGraph& g, const ModelParams& params);

/// psi^(K) after K rounds.
Embeddings forward(const ParseGraph& g, const ModelParams& params);

/// Max-subtracted softmax.
std::vector<double> softmax(std::span<const double> logits);

/// Index of the largest entry, lowest index on ties.
std::size_t argmax(std::span<const double> values);

struct ClusterAssignment {
  std::vector<int> assignments;  // cluster index in 1..O per node
  std::vector<std::vector<double>> distributions;
};

ClusterAssignment classify_clusters(const Embeddings& embeddings,
                                    const ModelParams& params);

}  // namespace sheeppain
