#pragma once

// Test-only reference computations. Each one is written independently of the
// library code path it checks (no calls into the function under test).

#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <vector>

#include "sheeppain/sheeppain.hpp"

namespace oracle {

using namespace sheeppain;

/// Structure log-probability summed with the plain logistic function.
inline double naive_parse_score(const SpfesGraph& g, const std::vector<std::uint8_t>& mask,
                                const EdgeScorer& s) {
  double total = 0;
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    const auto& f = g.edges[e].feature;
    const double logit = s.weights[0] * f.proximity + s.weights[1] * f.pain_diff + s.bias;
    const double sigma = 1.0 / (1.0 + std::exp(-logit));
    total += mask[e] ? std::log(sigma) : std::log(1.0 - sigma);
  }
  return total;
}

/// ReLU(W m + b) with explicit loops.
inline std::vector<double> naive_layer(const Matrix& w, const std::vector<double>& b,
                                       const std::vector<double>& m) {
  std::vector<double> out(w.rows);
  for (std::size_t r = 0; r < w.rows; ++r) {
    double acc = b[r];
    for (std::size_t c = 0; c < w.cols; ++c) acc += w.data[r * w.cols + c] * m[c];
    out[r] = acc < 0 ? 0 : acc;
  }
  return out;
}

/// exp / sum without max-subtraction (safe for moderate logits).
inline std::vector<double> naive_softmax(const std::vector<double>& z) {
  double sum = 0;
  for (double v : z) sum += std::exp(v);
  std::vector<double> out;
  for (double v : z) out.push_back(std::exp(v) / sum);
  return out;
}

/// Full forward pass from an explicit adjacency list.
inline std::vector<std::vector<double>> naive_forward(const ParseGraph& g,
                                                      const ModelParams& p) {
  const std::size_t n = g.parent->nodes.size();
  std::vector<std::vector<std::size_t>> nbr(n);
  for (std::size_t e = 0; e < g.kept_edges.size(); ++e) {
    if (!g.kept_edges[e]) continue;
    const auto& edge = g.parent->edges[e];
    nbr[edge.i - 1].push_back(edge.j - 1);
    nbr[edge.j - 1].push_back(edge.i - 1);
  }
  std::vector<std::vector<double>> h;
  for (const auto& node : g.parent->nodes) h.push_back(node.feature);
  for (const auto& layer : p.layers) {
    std::vector<std::vector<double>> next;
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<double> m(h[i].size(), 0.0);
      for (std::size_t j : nbr[i]) {
        for (std::size_t c = 0; c < m.size(); ++c) m[c] += h[j][c];
      }
      next.push_back(naive_layer(layer.weight, layer.bias, m));
    }
    h = std::move(next);
  }
  return h;
}

/// Bias-corrected Adam on one scalar, n steps of a constant gradient.
inline double adam_scalar(double theta, double grad, int steps, double lr, double b1, double b2,
                          double eps) {
  double m = 0, v = 0;
  for (int t = 1; t <= steps; ++t) {
    m = b1 * m + (1 - b1) * grad;
    v = b2 * v + (1 - b2) * grad * grad;
    const double mh = m / (1 - std::pow(b1, t));
    const double vh = v / (1 - std::pow(b2, t));
    theta -= lr * mh / (std::sqrt(vh) + eps);
  }
  return theta;
}

/// NPS recomputed from a fixed clustering: weighted means, weighted sum,
/// T_max over non-empty clusters.
inline double naive_nps(const std::vector<Detection>& d, const std::vector<int>& assign,
                        const WeightTable& w) {
  std::map<int, std::pair<double, double>> acc;
  for (std::size_t i = 0; i < d.size(); ++i) {
    const double wi = w.part_weight(d[i].label);
    acc[assign[i]].first += wi * d[i].pain_level;
    acc[assign[i]].second += wi;
  }
  double tp = 0, tmax = 0;
  for (const auto& [j, nd] : acc) {
    tp += w.cluster_weight(j) * nd.first / nd.second;
    tmax += 2 * w.cluster_weight(j);
  }
  return 100 * tp / tmax;
}

inline std::shared_ptr<const SpfesGraph> share(SpfesGraph g) {
  return std::make_shared<const SpfesGraph>(std::move(g));
}

inline Detection det(PartLabel label, int pain, double confidence = 0.9) {
  Detection d;
  d.label = label;
  d.pain_level = pain;
  d.bbox = {10, 20, 30, 40};
  d.confidence = confidence;
  d.timestamp = 1'700'000'000;
  return d;
}

}  // namespace oracle
