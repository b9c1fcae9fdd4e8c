#include "sheeppain/verification.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

namespace sheeppain {

namespace {

// Layer weights shrink with node count so sums over neighbors stay O(1) and
// the softmax does not saturate.
ModelParams random_params(Rng& rng, const ModelDims& dims, std::size_t nodes) {
  ModelParams p = init_params(dims, rng.bits());
  const double shrink = 1.0 / std::sqrt(static_cast<double>(std::max<std::size_t>(1, nodes - 1)));
  for (auto& l : p.layers) {
    for (double& w : l.weight.data) w *= shrink;
    for (double& b : l.bias) b = rng.uniform(-0.5, 0.5);
  }
  for (double& c : p.head.bias) c = rng.uniform(-0.5, 0.5);
  return p;
}

// ReLU on/off pattern over every layer of every sample.
std::vector<std::uint8_t> activation_pattern(std::span<const LabeledGraph> batch,
                                             const ModelParams& params) {
  std::vector<std::uint8_t> pattern;
  for (const auto& sample : batch) {
    const auto trace = forward_trace(sample.graph, params);
    for (const auto& layer : trace.preactivations) {
      for (const auto& node : layer) {
        for (double z : node) pattern.push_back(z > 0.0 ? 1 : 0);
      }
    }
  }
  return pattern;
}

}  // namespace

std::vector<Detection> random_detections(Rng& rng, std::size_t n) {
  std::vector<Detection> out;
  out.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    Detection d;
    d.frame_id = 0;
    d.timestamp = 1'700'000'000;
    d.label = kAllLabels[rng.index(kNumLabels)];
    d.bbox = {rng.uniform(0, 600), rng.uniform(0, 400), rng.uniform(5, 120),
              rng.uniform(5, 120)};
    d.confidence = rng.uniform(0.45, 1.0);
    d.pain_level = rng.integer(0, kMaxPain);
    out.push_back(d);
  }
  return out;
}

LabeledGraph random_labeled_graph(Rng& rng, std::size_t nodes, std::size_t clusters) {
  auto detections = random_detections(rng, nodes);
  auto graph = std::make_shared<const SpfesGraph>(build_complete_graph(detections));
  std::vector<std::uint8_t> mask(graph->edges.size());
  for (auto& m : mask) m = rng.uniform() < 0.5 ? 1 : 0;
  LabeledGraph out{make_parse_graph(std::move(graph), std::move(mask)), {}};
  for (std::size_t i = 0; i < nodes; ++i) {
    out.labels.push_back(static_cast<int>(rng.index(clusters)) + 1);
  }
  return out;
}

double relative_error(double a, double b, double floor) {
  return std::fabs(a - b) / std::max({std::fabs(a), std::fabs(b), floor});
}

GradCheckReport run_gradient_check(const GradCheckOptions& options) {
  GradCheckReport report;
  report.tolerance = options.tolerance;
  Rng rng(options.seed);
  for (std::size_t trial = 0; trial < options.trials; ++trial) {
    const auto nodes = static_cast<std::size_t>(
        rng.integer(static_cast<int>(options.min_nodes), static_cast<int>(options.max_nodes)));
    const ModelDims dims{kFeatureDim, static_cast<std::size_t>(rng.integer(1, 3)),
                         options.clusters};
    std::vector<LabeledGraph> batch;
    batch.push_back(random_labeled_graph(rng, nodes, options.clusters));
    const ModelParams params = random_params(rng, dims, nodes);

    const auto analytic = loss_and_grad(batch, params).grad;
    const auto numeric = finite_diff_grad(batch, params, options.step);
    const auto base_pattern = activation_pattern(batch, params);

    ModelParams probe = params;
    auto probe_t = probe.trainable();
    const auto a_t = analytic.trainable();
    const auto n_t = numeric.trainable();
    const double reach = 10.0 * options.step;
    for (std::size_t t = 0; t < probe_t.size(); ++t) {
      for (std::size_t e = 0; e < probe_t[t].size(); ++e) {
        const double saved = probe_t[t][e];
        probe_t[t][e] = saved + reach;
        bool near_kink = activation_pattern(batch, probe) != base_pattern;
        probe_t[t][e] = saved - reach;
        near_kink = near_kink || activation_pattern(batch, probe) != base_pattern;
        probe_t[t][e] = saved;
        if (near_kink) {
          ++report.skipped;
          continue;
        }
        ++report.checked;
        report.max_relative_error =
            std::max(report.max_relative_error, relative_error(a_t[t][e], n_t[t][e]));
      }
    }
    ++report.trials;
  }
  return report;
}

OracleReport run_parse_graph_oracle(const OracleOptions& options) {
  OracleReport report;
  Rng rng(options.seed);
  for (std::size_t trial = 0; trial < options.trials; ++trial) {
    const auto nodes = static_cast<std::size_t>(
        rng.integer(1, static_cast<int>(options.max_nodes)));
    auto graph = std::make_shared<const SpfesGraph>(
        build_complete_graph(random_detections(rng, nodes)));
    ModelParams params = ModelParams::zeros({});
    bool unique = false;
    while (!unique) {
      params.edge_scorer = {{rng.uniform(-4, 4), rng.uniform(-4, 4)}, rng.uniform(-3, 3)};
      unique = std::all_of(graph->edges.begin(), graph->edges.end(), [&](const GraphEdge& e) {
        return std::fabs(params.edge_scorer.logit(e.feature)) > options.min_margin;
      });
    }
    const auto fast = infer_parse_graph(graph, params);
    const auto exhaustive = brute_force_parse_graph(graph, params);
    if (fast.kept_edges != exhaustive.kept_edges) ++report.mismatches;
    ++report.instances;
  }
  return report;
}

}  // namespace sheeppain
