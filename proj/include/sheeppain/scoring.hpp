#pragma once

// Pain aggregation:
//
//   S_j = sum_{i in C_j} w_i p_i / sum_{i in C_j} w_i       (cluster score)
//   T_p = sum_j w_j S_j                                       (total pain)
//   NPS = 100 * T_p / T_max,  T_max = 2 * sum_j w_j           (normalized)
//
// Clusters with no members are left out of both T_p and T_max.

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "sheeppain/gnn.hpp"
#include "sheeppain/graph.hpp"
#include "sheeppain/model.hpp"
#include "sheeppain/types.hpp"

namespace sheeppain {

class WeightTable {
 public:
  /// Part weights 1 for every class, cluster weights 1 for clusters 1..clusters.
  explicit WeightTable(std::size_t clusters = 3);

  double part_weight(PartLabel label) const { return part_[slot_of(label)]; }
  void set_part_weight(PartLabel label, double w);

  /// Throws Error(validation) when the cluster has no weight.
  double cluster_weight(int cluster) const;
  void set_cluster_weight(int cluster, double w);
  const std::map<int, double>& cluster_weights() const { return cluster_; }

  /// Finite, non-negative, at least one positive part weight.
  void validate() const;

  friend bool operator==(const WeightTable&, const WeightTable&) = default;

 private:
  std::array<double, kNumLabels> part_{};
  std::map<int, double> cluster_;
};

struct ClusterMember {
  PartLabel label = PartLabel::EF;
  int pain = 0;
};

/// Weighted mean pain of one cluster. Throws Error(validation) when the
/// cluster is empty or its weights sum to zero.
double cluster_score(std::span<const ClusterMember> members, const WeightTable& weights);

double total_pain(const std::map<int, double>& cluster_scores, const WeightTable& weights);

/// 2 * sum of the cluster weights of the listed clusters.
double max_total_pain(const WeightTable& weights, std::span<const int> clusters);

/// NPS against an explicit T_max, clamped to [0, 100]. Throws
/// Error(validation) when t_max is zero.
double normalize_pain(double t_p, double t_max);

/// NPS with T_max taken over every cluster in the table.
double normalize_pain(double t_p, const WeightTable& weights);

struct PainReport {
  std::map<int, double> cluster_scores;        // S_j for non-empty clusters
  std::map<int, std::vector<int>> members;     // node ids per cluster
  double total_pain = 0;                       // T_p
  double max_pain = 0;                         // T_max
  double nps = 0;                              // 0..100
  std::vector<double> part_weights;            // w_i per node
  std::map<int, double> cluster_weights;       // w_j per non-empty cluster
  ClusterAssignment assignment;
  std::vector<std::uint8_t> kept_edges;
  double parse_score = 0;
};

/// Aggregates with a fixed clustering (assignments are 1-based, one per
/// detection).
PainReport score_assignment(std::span<const Detection> detections,
                            std::span<const int> assignments, const WeightTable& weights);

/// Complete graph -> parse graph -> message passing -> clusters -> NPS.
PainReport score_face(std::span<const Detection> detections, const ModelParams& params,
                      const WeightTable& weights, const ProximityPrior& prior = {});

struct Frame {
  std::int64_t timestamp = 0;
  std::vector<Detection> detections;
};

struct TpsEntry {
  std::int64_t timestamp = 0;
  double nps_normalized = 0;  // NPS / 100
  std::size_t expressions = 0;
};

struct TpsSeries {
  std::vector<TpsEntry> entries;
};

/// One entry per frame; a frame without detections scores 0. Throws
/// Error(validation) unless timestamps strictly increase.
TpsSeries track_tps(std::span<const Frame> frames, const ModelParams& params,
                    const WeightTable& weights, const ProximityPrior& prior = {});

/// One JSON object (single line) describing a scored frame.
std::string report_json(const PainReport& report, std::uint64_t frame_id,
                        std::int64_t timestamp);

/// Tab-separated "timestamp nps expressions" table with a header row.
std::string tps_table(const TpsSeries& series);

}  // namespace sheeppain
