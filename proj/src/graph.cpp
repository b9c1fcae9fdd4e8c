#include "sheeppain/graph.hpp"

#include <cmath>
#include <set>
#include <string>
#include <utility>

#include "sheeppain/error.hpp"

namespace sheeppain {

namespace {

ProximityPrior::Table default_prior() {
  ProximityPrior::Table t;
  for (auto& row : t) row.fill(0.2);
  auto set = [&t](FacialPart a, FacialPart b, double v) {
    t[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] = v;
    t[static_cast<std::size_t>(b)][static_cast<std::size_t>(a)] = v;
  };
  for (std::size_t i = 0; i < kNumParts; ++i) t[i][i] = 1.0;
  set(FacialPart::cheeks, FacialPart::nose, 0.8);
  set(FacialPart::lips_jaw, FacialPart::cheeks, 0.8);
  set(FacialPart::eyes, FacialPart::cheeks, 0.8);
  set(FacialPart::ears, FacialPart::eyes, 0.5);
  set(FacialPart::nose, FacialPart::lips_jaw, 0.5);
  return t;
}

}  // namespace

ProximityPrior::ProximityPrior() : table_(default_prior()) {}

ProximityPrior::ProximityPrior(const Table& table) : table_(table) {
  for (std::size_t a = 0; a < kNumParts; ++a) {
    if (table_[a][a] != 1.0) fail(ErrorKind::validation, "proximity diagonal must be 1");
    for (std::size_t b = 0; b < kNumParts; ++b) {
      const double v = table_[a][b];
      if (!(v >= 0.0 && v <= 1.0)) {
        fail(ErrorKind::validation, "proximity entries must lie in [0,1]");
      }
      if (v != table_[b][a]) fail(ErrorKind::validation, "proximity matrix must be symmetric");
    }
  }
}

void SpfesGraph::validate() const {
  const std::size_t dim = nodes.empty() ? 0 : nodes.front().feature.size();
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    if (nodes[k].id != static_cast<int>(k + 1)) {
      fail(ErrorKind::validation, "node ids must be 1..N in order");
    }
    if (nodes[k].feature.size() != dim) {
      fail(ErrorKind::validation, "node features have mixed dimensions");
    }
  }
  std::set<std::pair<int, int>> seen;
  const int n = static_cast<int>(nodes.size());
  for (const auto& e : edges) {
    if (e.i == e.j) fail(ErrorKind::validation, "self-edge on node " + std::to_string(e.i));
    if (e.i > e.j) fail(ErrorKind::validation, "edge endpoints must satisfy i < j");
    if (e.i < 1 || e.j > n) fail(ErrorKind::validation, "edge references a missing node");
    if (!seen.emplace(e.i, e.j).second) fail(ErrorKind::validation, "duplicate edge");
  }
}

Feature init_features(const Detection& d) {
  Feature f(kFeatureDim, 0.0);
  f[0] = static_cast<double>(d.pain_level);
  f[1 + slot_of(d.label)] = 1.0;
  return f;
}

EdgeFeature edge_feature(const Detection& a, const Detection& b,
                         const ProximityPrior& prior) {
  return {prior.between(part_of(a.label), part_of(b.label)),
          std::fabs(static_cast<double>(a.pain_level - b.pain_level))};
}

SpfesGraph build_complete_graph(std::span<const Detection> detections,
                                const ProximityPrior& prior) {
  if (detections.empty()) fail(ErrorKind::validation, "no detections to build a graph from");
  SpfesGraph g;
  g.nodes.reserve(detections.size());
  for (std::size_t k = 0; k < detections.size(); ++k) {
    g.nodes.push_back({static_cast<int>(k + 1), detections[k], init_features(detections[k])});
  }
  const std::size_t n = detections.size();
  g.edges.reserve(n * (n - 1) / 2);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      g.edges.push_back({static_cast<int>(a + 1), static_cast<int>(b + 1),
                         edge_feature(detections[a], detections[b], prior)});
    }
  }
  return g;
}

std::vector<std::size_t> ParseGraph::kept_edge_indices() const {
  std::vector<std::size_t> out;
  for (std::size_t e = 0; e < kept_edges.size(); ++e) {
    if (kept_edges[e]) out.push_back(e);
  }
  return out;
}

std::vector<std::vector<std::size_t>> ParseGraph::adjacency() const {
  std::vector<std::vector<std::size_t>> adj(parent->nodes.size());
  for (std::size_t e = 0; e < kept_edges.size(); ++e) {
    if (!kept_edges[e]) continue;
    const auto& edge = parent->edges[e];
    adj[edge.i - 1].push_back(static_cast<std::size_t>(edge.j - 1));
    adj[edge.j - 1].push_back(static_cast<std::size_t>(edge.i - 1));
  }
  return adj;
}

void ParseGraph::validate() const {
  if (!parent) fail(ErrorKind::validation, "parse graph has no parent graph");
  if (kept_edges.size() != parent->edges.size()) {
    fail(ErrorKind::validation, "kept-edge mask does not match parent edges");
  }
  std::set<int> nodes(kept_nodes.begin(), kept_nodes.end());
  for (int id : kept_nodes) {
    if (id < 1 || id > static_cast<int>(parent->nodes.size())) {
      fail(ErrorKind::validation, "kept node outside parent graph");
    }
  }
  for (std::size_t e : kept_edge_indices()) {
    const auto& edge = parent->edges[e];
    if (!nodes.count(edge.i) || !nodes.count(edge.j)) {
      fail(ErrorKind::validation, "kept edge has an endpoint outside kept nodes");
    }
  }
}

ParseGraph make_parse_graph(std::shared_ptr<const SpfesGraph> graph,
                            std::vector<std::uint8_t> mask) {
  ParseGraph g;
  g.parent = std::move(graph);
  g.kept_edges = std::move(mask);
  g.kept_nodes.resize(g.parent->nodes.size());
  for (std::size_t k = 0; k < g.kept_nodes.size(); ++k) g.kept_nodes[k] = static_cast<int>(k + 1);
  g.validate();
  return g;
}

double log_sigmoid(double s) {
  // log sigma(s) = -log(1 + e^{-s})
  return s >= 0 ? -std::log1p(std::exp(-s)) : s - std::log1p(std::exp(s));
}

double log_one_minus_sigmoid(double s) { return log_sigmoid(-s); }

double parse_graph_score(const SpfesGraph& graph, std::span<const std::uint8_t> mask,
                         const EdgeScorer& scorer) {
  if (!std::isfinite(scorer.weights[0]) || !std::isfinite(scorer.weights[1]) ||
      !std::isfinite(scorer.bias)) {
    fail(ErrorKind::numerical, "non-finite edge scorer");
  }
  if (mask.size() != graph.edges.size()) {
    fail(ErrorKind::validation, "kept-edge mask does not match graph edges");
  }
  double total = 0.0;
  for (std::size_t e = 0; e < graph.edges.size(); ++e) {
    const double s = scorer.logit(graph.edges[e].feature);
    total += mask[e] ? log_sigmoid(s) : log_one_minus_sigmoid(s);
  }
  if (!std::isfinite(total)) fail(ErrorKind::numerical, "non-finite parse graph score");
  return total;
}

double parse_graph_score(const ParseGraph& g, const ModelParams& params) {
  return parse_graph_score(*g.parent, g.kept_edges, params.edge_scorer);
}

ParseGraph infer_parse_graph(std::shared_ptr<const SpfesGraph> graph,
                             const ModelParams& params) {
  if (!graph || graph->nodes.empty()) fail(ErrorKind::validation, "empty graph");
  std::vector<std::uint8_t> mask(graph->edges.size(), 0);
  for (std::size_t e = 0; e < mask.size(); ++e) {
    mask[e] = params.edge_scorer.logit(graph->edges[e].feature) > 0.0 ? 1 : 0;
  }
  ParseGraph g = make_parse_graph(std::move(graph), std::move(mask));
  g.score = parse_graph_score(g, params);
  return g;
}

ParseGraph brute_force_parse_graph(std::shared_ptr<const SpfesGraph> graph,
                                   const ModelParams& params) {
  if (!graph || graph->nodes.empty()) fail(ErrorKind::validation, "empty graph");
  const std::size_t m = graph->edges.size();
  if (m > kBruteForceMaxEdges) {
    fail(ErrorKind::validation, "too many edges for enumeration: " + std::to_string(m) +
                                    " > " + std::to_string(kBruteForceMaxEdges));
  }
  std::vector<std::uint8_t> mask(m, 0);
  std::vector<std::uint8_t> best_mask(m, 0);
  double best = -INFINITY;
  const std::uint64_t count = std::uint64_t{1} << m;
  for (std::uint64_t bits = 0; bits < count; ++bits) {
    for (std::size_t e = 0; e < m; ++e) mask[e] = (bits >> e) & 1U;
    const double s = parse_graph_score(*graph, mask, params.edge_scorer);
    if (s > best) {
      best = s;
      best_mask = mask;
    }
  }
  ParseGraph g = make_parse_graph(std::move(graph), std::move(best_mask));
  g.score = best;
  return g;
}

}  // namespace sheeppain
