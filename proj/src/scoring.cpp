#include "sheeppain/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <memory>
#include <sstream>
#include <utility>

#include <nlohmann/json.hpp>

#include "sheeppain/error.hpp"

namespace sheeppain {

WeightTable::WeightTable(std::size_t clusters) {
  part_.fill(1.0);
  for (std::size_t j = 1; j <= clusters; ++j) cluster_[static_cast<int>(j)] = 1.0;
}

namespace {

void check_weight(double w, const std::string& what) {
  if (!std::isfinite(w) || w < 0) {
    throw Error(ErrorKind::validation, what + " must be finite and >= 0", std::nullopt,
                "weights");
  }
}

}  // namespace

void WeightTable::set_part_weight(PartLabel label, double w) {
  check_weight(w, "part weight for " + std::string(label_name(label)));
  part_[slot_of(label)] = w;
}

double WeightTable::cluster_weight(int cluster) const {
  auto it = cluster_.find(cluster);
  if (it == cluster_.end()) {
    throw Error(ErrorKind::validation, "no weight for cluster " + std::to_string(cluster),
                std::nullopt, "weights");
  }
  return it->second;
}

void WeightTable::set_cluster_weight(int cluster, double w) {
  check_weight(w, "cluster weight for " + std::to_string(cluster));
  cluster_[cluster] = w;
}

void WeightTable::validate() const {
  bool any_positive = false;
  for (std::size_t s = 0; s < kNumLabels; ++s) {
    check_weight(part_[s], "part weight");
    any_positive = any_positive || part_[s] > 0;
  }
  if (!any_positive) fail(ErrorKind::validation, "at least one part weight must be > 0");
  for (const auto& [j, w] : cluster_) check_weight(w, "cluster weight " + std::to_string(j));
}

double cluster_score(std::span<const ClusterMember> members, const WeightTable& weights) {
  if (members.empty()) fail(ErrorKind::validation, "cluster has no members");
  // Sum in value order so the result is independent of member order.
  std::vector<std::pair<double, double>> terms;  // (w_i, w_i * p_i)
  terms.reserve(members.size());
  for (const auto& m : members) {
    if (m.pain < 0 || m.pain > kMaxPain) fail(ErrorKind::validation, "pain level not in {0,1,2}");
    const double w = weights.part_weight(m.label);
    terms.emplace_back(w, w * static_cast<double>(m.pain));
  }
  std::sort(terms.begin(), terms.end());
  double num = 0.0;
  double den = 0.0;
  for (const auto& [w, wp] : terms) {
    den += w;
    num += wp;
  }
  if (!(den > 0)) fail(ErrorKind::validation, "cluster weights sum to zero");
  return num / den;
}

double total_pain(const std::map<int, double>& cluster_scores, const WeightTable& weights) {
  double t = 0.0;
  for (const auto& [j, s] : cluster_scores) t += weights.cluster_weight(j) * s;
  return t;
}

double max_total_pain(const WeightTable& weights, std::span<const int> clusters) {
  double sum = 0.0;
  for (int j : clusters) sum += weights.cluster_weight(j);
  return static_cast<double>(kMaxPain) * sum;
}

double normalize_pain(double t_p, double t_max) {
  if (!(t_max > 0)) fail(ErrorKind::validation, "maximum total pain is zero");
  if (!(t_p >= 0)) fail(ErrorKind::validation, "total pain must be >= 0");
  return std::clamp(t_p / t_max * 100.0, 0.0, 100.0);
}

double normalize_pain(double t_p, const WeightTable& weights) {
  std::vector<int> all;
  for (const auto& [j, w] : weights.cluster_weights()) all.push_back(j);
  return normalize_pain(t_p, max_total_pain(weights, all));
}

PainReport score_assignment(std::span<const Detection> detections,
                            std::span<const int> assignments, const WeightTable& weights) {
  if (detections.empty()) fail(ErrorKind::validation, "no detections to score");
  if (assignments.size() != detections.size()) {
    fail(ErrorKind::validation, "one cluster assignment per detection required");
  }
  weights.validate();
  PainReport report;
  std::map<int, std::vector<ClusterMember>> clusters;
  for (std::size_t i = 0; i < detections.size(); ++i) {
    clusters[assignments[i]].push_back({detections[i].label, detections[i].pain_level});
    report.members[assignments[i]].push_back(static_cast<int>(i + 1));
    report.part_weights.push_back(weights.part_weight(detections[i].label));
  }
  std::vector<int> active;
  for (const auto& [j, members] : clusters) {
    report.cluster_scores[j] = cluster_score(members, weights);
    report.cluster_weights[j] = weights.cluster_weight(j);
    active.push_back(j);
  }
  report.total_pain = total_pain(report.cluster_scores, weights);
  report.max_pain = max_total_pain(weights, active);
  report.nps = normalize_pain(report.total_pain, report.max_pain);
  report.assignment.assignments.assign(assignments.begin(), assignments.end());
  return report;
}

PainReport score_face(std::span<const Detection> detections, const ModelParams& params,
                      const WeightTable& weights, const ProximityPrior& prior) {
  if (detections.empty()) fail(ErrorKind::validation, "no detections to score");
  auto graph = std::make_shared<const SpfesGraph>(build_complete_graph(detections, prior));
  const ParseGraph parse = infer_parse_graph(std::move(graph), params);
  ClusterAssignment assignment = classify_clusters(forward(parse, params), params);
  PainReport report = score_assignment(detections, assignment.assignments, weights);
  report.assignment = std::move(assignment);
  report.kept_edges = parse.kept_edges;
  report.parse_score = parse.score;
  return report;
}

TpsSeries track_tps(std::span<const Frame> frames, const ModelParams& params,
                    const WeightTable& weights, const ProximityPrior& prior) {
  TpsSeries series;
  for (std::size_t f = 0; f < frames.size(); ++f) {
    if (f > 0 && frames[f].timestamp <= frames[f - 1].timestamp) {
      fail(ErrorKind::validation, "frame timestamps must strictly increase (frame " +
                                      std::to_string(f + 1) + ")");
    }
    TpsEntry entry{frames[f].timestamp, 0.0, frames[f].detections.size()};
    if (!frames[f].detections.empty()) {
      entry.nps_normalized = score_face(frames[f].detections, params, weights, prior).nps / 100.0;
    }
    series.entries.push_back(entry);
  }
  return series;
}

std::string report_json(const PainReport& report, std::uint64_t frame_id,
                        std::int64_t timestamp) {
  nlohmann::ordered_json j;
  j["frame_id"] = frame_id;
  j["timestamp"] = timestamp;
  j["nps"] = report.nps;
  j["total_pain"] = report.total_pain;
  j["max_pain"] = report.max_pain;
  auto clusters = nlohmann::ordered_json::array();
  for (const auto& [c, score] : report.cluster_scores) {
    nlohmann::ordered_json entry;
    entry["cluster"] = c;
    entry["score"] = score;
    entry["weight"] = report.cluster_weights.at(c);
    entry["members"] = report.members.at(c);
    clusters.push_back(std::move(entry));
  }
  j["clusters"] = std::move(clusters);
  j["assignments"] = report.assignment.assignments;
  j["part_weights"] = report.part_weights;
  auto kept = nlohmann::ordered_json::array();
  for (auto k : report.kept_edges) kept.push_back(static_cast<int>(k));
  j["kept_edges"] = std::move(kept);
  return j.dump();
}

std::string tps_table(const TpsSeries& series) {
  std::ostringstream out;
  out << "timestamp\tnps\texpressions\n";
  out << std::fixed << std::setprecision(6);
  for (const auto& e : series.entries) {
    out << e.timestamp << '\t' << e.nps_normalized << '\t' << e.expressions << '\n';
  }
  return out.str();
}

}  // namespace sheeppain
