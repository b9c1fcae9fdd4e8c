#pragma once

// Relation graph over detected part expressions and parse-graph inference.
//
// The structure term of a parse graph factorizes over edges: every edge e of
// the complete graph gets an independent logistic score s_e from the edge
// scorer, and
//
//   log P(kept edges) = sum_{e kept} log sigma(s_e) + sum_{e dropped} log(1 - sigma(s_e)).
//
// Keeping exactly the edges with s_e > 0 therefore maximizes it.

#include <array>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "sheeppain/model.hpp"
#include "sheeppain/types.hpp"

namespace sheeppain {

/// Symmetric 5x5 proximity matrix over facial parts, unit diagonal.
class ProximityPrior {
 public:
  using Table = std::array<std::array<double, kNumParts>, kNumParts>;

  /// 1.0 within a part, 0.8 for cheeks-nose / lips_jaw-cheeks / eyes-cheeks,
  /// 0.5 for ears-eyes / nose-lips_jaw, 0.2 otherwise.
  ProximityPrior();
  /// Throws Error(validation) unless symmetric, unit-diagonal, within [0,1].
  explicit ProximityPrior(const Table& table);

  double between(FacialPart a, FacialPart b) const {
    return table_[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)];
  }
  const Table& table() const { return table_; }

 private:
  Table table_{};
};

struct GraphNode {
  int id = 0;  // 1-based, equals position + 1
  Detection detection;
  Feature feature;
};

struct GraphEdge {
  int i = 0;  // node ids, i < j
  int j = 0;
  EdgeFeature feature;
};

/// Complete graph: one node per detection, one edge per unordered pair,
/// edges ordered (1,2), (1,3), ..., (2,3), ...
struct SpfesGraph {
  std::vector<GraphNode> nodes;
  std::vector<GraphEdge> edges;

  std::size_t size() const { return nodes.size(); }
  /// Throws Error(validation) on self-edges, duplicates, dangling endpoints,
  /// or mixed feature dimensions.
  void validate() const;
};

/// [pain_level, one_hot(class)], dimension kFeatureDim.
Feature init_features(const Detection& detection);

EdgeFeature edge_feature(const Detection& a, const Detection& b,
                         const ProximityPrior& prior);

/// Throws Error(validation) when detections is empty.
SpfesGraph build_complete_graph(std::span<const Detection> detections,
                                const ProximityPrior& prior = {});

/// Subgraph of a complete graph. kept_edges is a 0/1 mask aligned with
/// parent->edges. Isolated nodes stay as singletons, so every parent node is
/// kept.
struct ParseGraph {
  std::shared_ptr<const SpfesGraph> parent;
  std::vector<std::uint8_t> kept_edges;
  std::vector<int> kept_nodes;
  double score = 0;

  std::size_t num_nodes() const { return parent->nodes.size(); }
  std::vector<std::size_t> kept_edge_indices() const;
  /// Neighbor positions (0-based) per node, over kept edges only.
  std::vector<std::vector<std::size_t>> adjacency() const;
  void validate() const;
};

/// Parse graph keeping the edges set in mask; score left at 0.
ParseGraph make_parse_graph(std::shared_ptr<const SpfesGraph> graph,
                            std::vector<std::uint8_t> mask);

/// Structure log-probability of the kept-edge set. Throws Error(numerical)
/// if the scorer is non-finite.
double parse_graph_score(const SpfesGraph& graph, std::span<const std::uint8_t> mask,
                         const EdgeScorer& scorer);
double parse_graph_score(const ParseGraph& g, const ModelParams& params);

/// Exact argmax by per-edge thresholding (s_e > 0).
ParseGraph infer_parse_graph(std::shared_ptr<const SpfesGraph> graph,
                             const ModelParams& params);

inline constexpr std::size_t kBruteForceMaxEdges = 20;

/// Enumerates all 2^|E| subsets; ties go to the smallest inclusion bitmask
/// (bit e = edge e). Throws Error(validation) above kBruteForceMaxEdges.
ParseGraph brute_force_parse_graph(std::shared_ptr<const SpfesGraph> graph,
                                   const ModelParams& params);

/// log(sigma(s)) and log(1 - sigma(s)) without overflow.
double log_sigmoid(double s);
double log_one_minus_sigmoid(double s);

}  // namespace sheeppain
