#include "sheeppain/training.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <memory>
#include <numeric>
#include <string>

#include "sheeppain/error.hpp"
#include "sheeppain/random.hpp"

namespace sheeppain {

namespace {

constexpr double kProbabilityFloor = 1e-12;

void check_labels(const LabeledGraph& sample, std::size_t clusters) {
  if (sample.labels.size() != sample.graph.num_nodes()) {
    fail(ErrorKind::validation, "sample has " + std::to_string(sample.labels.size()) +
                                    " labels for " +
                                    std::to_string(sample.graph.num_nodes()) + " nodes");
  }
  for (int label : sample.labels) {
    if (label < 1 || static_cast<std::size_t>(label) > clusters) {
      fail(ErrorKind::validation, "cluster label " + std::to_string(label) +
                                      " outside 1.." + std::to_string(clusters));
    }
  }
}

std::vector<double> one_hot(std::size_t size, int label) {
  std::vector<double> v(size, 0.0);
  v[static_cast<std::size_t>(label - 1)] = 1.0;
  return v;
}

std::vector<double> head_logits(const DenseLayer& head, std::span<const double> psi) {
  auto logits = matvec(head.weight, psi);
  for (std::size_t q = 0; q < logits.size(); ++q) logits[q] += head.bias[q];
  return logits;
}

// Adds weight^T * v to out.
void add_transpose_product(const Matrix& weight, std::span<const double> v,
                           std::vector<double>& out) {
  for (std::size_t r = 0; r < weight.rows; ++r) {
    if (v[r] == 0.0) continue;
    const auto row = weight.row(r);
    for (std::size_t c = 0; c < weight.cols; ++c) out[c] += row[c] * v[r];
  }
}

void add_outer(Matrix& m, std::span<const double> left, std::span<const double> right) {
  for (std::size_t r = 0; r < m.rows; ++r) {
    if (left[r] == 0.0) continue;
    double* row = m.data.data() + r * m.cols;
    for (std::size_t c = 0; c < m.cols; ++c) row[c] += left[r] * right[c];
  }
}

std::size_t total_nodes(std::span<const LabeledGraph> batch) {
  std::size_t n = 0;
  for (const auto& s : batch) n += s.graph.num_nodes();
  return n;
}

}  // namespace

void TrainConfig::validate() const {
  auto bad = [](const std::string& what) {
    throw Error(ErrorKind::validation, "train config: " + what, std::nullopt, "train");
  };
  if (!(learning_rate > 0) || !std::isfinite(learning_rate)) bad("learning_rate must be > 0");
  if (!(beta1 >= 0 && beta1 < 1)) bad("beta1 must lie in [0,1)");
  if (!(beta2 >= 0 && beta2 < 1)) bad("beta2 must lie in [0,1)");
  if (!(epsilon > 0)) bad("epsilon must be > 0");
  if (batch_size < 1) bad("batch_size must be >= 1");
  if (epochs < 1) bad("epochs must be >= 1");
}

double cross_entropy(std::span<const double> actual, std::span<const double> predicted) {
  if (actual.size() != predicted.size()) {
    fail(ErrorKind::validation, "cross_entropy: length mismatch (" +
                                    std::to_string(actual.size()) + " vs " +
                                    std::to_string(predicted.size()) + ")");
  }
  double loss = 0.0;
  for (std::size_t i = 0; i < actual.size(); ++i) {
    if (actual[i] == 0.0) continue;
    loss -= actual[i] * std::log(std::max(predicted[i], kProbabilityFloor));
  }
  return loss;
}

LossAndGrad loss_and_grad(std::span<const LabeledGraph> batch, const ModelParams& params) {
  params.validate();
  const std::size_t clusters = params.num_clusters();
  const std::size_t dim = params.feature_dim();
  const std::size_t k_layers = params.num_layers();

  LossAndGrad out;
  out.grad = ModelParams::zeros(params.dims());
  out.nodes = total_nodes(batch);
  if (out.nodes == 0) fail(ErrorKind::validation, "empty training batch");
  const double scale = 1.0 / static_cast<double>(out.nodes);

  double loss_sum = 0.0;
  for (const auto& sample : batch) {
    check_labels(sample, clusters);
    const ForwardTrace trace = forward_trace(sample.graph, params);
    const Embeddings& top = trace.states.back();
    const std::size_t n = top.size();

    // Head: dL/dlogits = (softmax - onehot) / N.
    Embeddings upstream(n, Feature(dim, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
      const auto logits = head_logits(params.head, top[i]);
      const auto prob = softmax(logits);
      const auto target = one_hot(clusters, sample.labels[i]);
      loss_sum += cross_entropy(target, prob);
      if (static_cast<int>(argmax(prob)) + 1 == sample.labels[i]) ++out.correct;
      // Below the floor the clamped loss is constant in the parameters.
      if (prob[static_cast<std::size_t>(sample.labels[i] - 1)] < kProbabilityFloor) continue;

      std::vector<double> dlogits(clusters);
      for (std::size_t q = 0; q < clusters; ++q) dlogits[q] = (prob[q] - target[q]) * scale;
      add_outer(out.grad.head.weight, dlogits, top[i]);
      for (std::size_t q = 0; q < clusters; ++q) out.grad.head.bias[q] += dlogits[q];
      add_transpose_product(params.head.weight, dlogits, upstream[i]);
    }

    for (std::size_t k = k_layers; k-- > 0;) {
      const DenseLayer& layer = params.layers[k];
      DenseLayer& g = out.grad.layers[k];
      const Embeddings& z = trace.preactivations[k];
      const Embeddings& m = trace.messages[k];

      Embeddings dmessage(n, Feature(dim, 0.0));
      for (std::size_t i = 0; i < n; ++i) {
        Feature dz(dim);
        for (std::size_t r = 0; r < dim; ++r) dz[r] = z[i][r] > 0.0 ? upstream[i][r] : 0.0;
        add_outer(g.weight, dz, m[i]);
        for (std::size_t r = 0; r < dim; ++r) g.bias[r] += dz[r];
        add_transpose_product(layer.weight, dz, dmessage[i]);
      }
      if (k == 0) break;
      // M_i sums psi_j over neighbors, so psi_j collects dM_i from each
      // neighbor i (adjacency is symmetric).
      Embeddings below(n, Feature(dim, 0.0));
      for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t i : trace.adjacency[j]) {
          for (std::size_t c = 0; c < dim; ++c) below[j][c] += dmessage[i][c];
        }
      }
      upstream = std::move(below);
    }
  }

  out.loss = loss_sum * scale;
  if (!std::isfinite(out.loss)) fail(ErrorKind::numerical, "non-finite loss");
  for (auto t : out.grad.trainable()) {
    for (double v : t) {
      if (!std::isfinite(v)) fail(ErrorKind::numerical, "non-finite gradient");
    }
  }
  return out;
}

double batch_loss(std::span<const LabeledGraph> batch, const ModelParams& params) {
  const std::size_t clusters = params.num_clusters();
  const std::size_t nodes = total_nodes(batch);
  if (nodes == 0) fail(ErrorKind::validation, "empty training batch");
  double loss_sum = 0.0;
  for (const auto& sample : batch) {
    check_labels(sample, clusters);
    const auto top = forward(sample.graph, params);
    for (std::size_t i = 0; i < top.size(); ++i) {
      const auto prob = softmax(head_logits(params.head, top[i]));
      loss_sum += cross_entropy(one_hot(clusters, sample.labels[i]), prob);
    }
  }
  return loss_sum / static_cast<double>(nodes);
}

ModelParams finite_diff_grad(const Objective& objective, const ModelParams& params,
                             double h) {
  if (!(h > 0)) fail(ErrorKind::validation, "finite-difference step must be > 0");
  ModelParams grad = ModelParams::zeros(params.dims());
  ModelParams probe = params;
  auto probe_tensors = probe.trainable();
  auto grad_tensors = grad.trainable();
  for (std::size_t t = 0; t < probe_tensors.size(); ++t) {
    for (std::size_t e = 0; e < probe_tensors[t].size(); ++e) {
      double& entry = probe_tensors[t][e];
      const double saved = entry;
      entry = saved + h;
      const double up = objective(probe);
      entry = saved - h;
      const double down = objective(probe);
      entry = saved;
      grad_tensors[t][e] = (up - down) / (2.0 * h);
    }
  }
  return grad;
}

ModelParams finite_diff_grad(std::span<const LabeledGraph> batch,
                             const ModelParams& params, double h) {
  return finite_diff_grad(
      [batch](const ModelParams& p) { return batch_loss(batch, p); }, params, h);
}

AdamState AdamState::zeros_like(const ModelParams& params) {
  return {ModelParams::zeros(params.dims()), ModelParams::zeros(params.dims())};
}

void adam_step(ModelParams& params, const ModelParams& grads, AdamState& state,
               const TrainConfig& config, std::size_t t) {
  if (t < 1) fail(ErrorKind::validation, "adam step counter starts at 1");
  const double correction1 = 1.0 - std::pow(config.beta1, static_cast<double>(t));
  const double correction2 = 1.0 - std::pow(config.beta2, static_cast<double>(t));
  auto theta = params.trainable();
  auto g = grads.trainable();
  auto m = state.first_moment.trainable();
  auto v = state.second_moment.trainable();
  if (theta.size() != g.size() || theta.size() != m.size()) {
    fail(ErrorKind::validation, "adam: gradient shape does not match parameters");
  }
  for (std::size_t k = 0; k < theta.size(); ++k) {
    if (theta[k].size() != g[k].size()) {
      fail(ErrorKind::validation, "adam: gradient shape does not match parameters");
    }
    for (std::size_t e = 0; e < theta[k].size(); ++e) {
      m[k][e] = config.beta1 * m[k][e] + (1.0 - config.beta1) * g[k][e];
      v[k][e] = config.beta2 * v[k][e] + (1.0 - config.beta2) * g[k][e] * g[k][e];
      const double m_hat = m[k][e] / correction1;
      const double v_hat = v[k][e] / correction2;
      theta[k][e] -= config.learning_rate * m_hat / (std::sqrt(v_hat) + config.epsilon);
    }
  }
}

TrainResult train(std::span<const LabeledGraph> dataset, const TrainConfig& config,
                  ModelParams init) {
  config.validate();
  if (dataset.empty()) fail(ErrorKind::validation, "training dataset is empty");
  init.validate();

  TrainResult result{std::move(init), {}};
  AdamState state = AdamState::zeros_like(result.params);
  Rng rng(config.seed);
  std::vector<std::size_t> order(dataset.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  std::size_t step = 0;
  std::vector<LabeledGraph> batch;
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    rng.shuffle(order);
    double loss_sum = 0.0;
    std::size_t nodes = 0;
    std::size_t correct = 0;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t stop = std::min(order.size(), start + config.batch_size);
      batch.clear();
      for (std::size_t k = start; k < stop; ++k) batch.push_back(dataset[order[k]]);
      const LossAndGrad lg = loss_and_grad(batch, result.params);
      loss_sum += lg.loss * static_cast<double>(lg.nodes);
      nodes += lg.nodes;
      correct += lg.correct;
      adam_step(result.params, lg.grad, state, config, ++step);
    }
    result.history.epochs.push_back(
        {loss_sum / static_cast<double>(nodes),
         static_cast<double>(correct) / static_cast<double>(nodes)});
  }
  return result;
}

Evaluation evaluate(std::span<const LabeledGraph> dataset, const ModelParams& params) {
  if (dataset.empty()) fail(ErrorKind::validation, "evaluation dataset is empty");
  const std::size_t clusters = params.num_clusters();
  Evaluation ev;
  ev.confusion.assign(clusters, std::vector<std::size_t>(clusters, 0));
  std::size_t correct = 0;
  for (const auto& sample : dataset) {
    check_labels(sample, clusters);
    const auto assignment = classify_clusters(forward(sample.graph, params), params);
    for (std::size_t i = 0; i < sample.labels.size(); ++i) {
      const auto truth = static_cast<std::size_t>(sample.labels[i] - 1);
      const auto predicted = static_cast<std::size_t>(assignment.assignments[i] - 1);
      ++ev.confusion[truth][predicted];
      if (truth == predicted) ++correct;
      ++ev.nodes;
    }
  }
  if (ev.nodes == 0) fail(ErrorKind::validation, "evaluation dataset has no nodes");
  ev.accuracy = static_cast<double>(correct) / static_cast<double>(ev.nodes);
  ev.precision.assign(clusters, 0.0);
  ev.recall.assign(clusters, 0.0);
  for (std::size_t q = 0; q < clusters; ++q) {
    std::size_t predicted = 0;
    std::size_t labeled = 0;
    for (std::size_t r = 0; r < clusters; ++r) {
      predicted += ev.confusion[r][q];
      labeled += ev.confusion[q][r];
    }
    const double hits = static_cast<double>(ev.confusion[q][q]);
    if (predicted) ev.precision[q] = hits / static_cast<double>(predicted);
    if (labeled) ev.recall[q] = hits / static_cast<double>(labeled);
  }
  return ev;
}

EdgeScorer fit_edge_scorer(std::span<const EdgeExample> examples,
                           const EdgeFitConfig& config) {
  EdgeScorer scorer;
  if (examples.empty()) return scorer;
  std::array<double, 3> m{};
  std::array<double, 3> v{};
  constexpr double beta1 = 0.9;
  constexpr double beta2 = 0.999;
  const double inv_n = 1.0 / static_cast<double>(examples.size());
  for (std::size_t t = 1; t <= config.iterations; ++t) {
    std::array<double, 3> g{};
    for (const auto& ex : examples) {
      const double s = scorer.logit(ex.feature);
      const double p = 1.0 / (1.0 + std::exp(-s));
      const double r = (p - (ex.keep ? 1.0 : 0.0)) * inv_n;
      g[0] += r * ex.feature.proximity;
      g[1] += r * ex.feature.pain_diff;
      g[2] += r;
    }
    g[0] += config.l2 * scorer.weights[0];
    g[1] += config.l2 * scorer.weights[1];
    std::array<double*, 3> theta = {&scorer.weights[0], &scorer.weights[1], &scorer.bias};
    const double c1 = 1.0 - std::pow(beta1, static_cast<double>(t));
    const double c2 = 1.0 - std::pow(beta2, static_cast<double>(t));
    for (std::size_t k = 0; k < 3; ++k) {
      m[k] = beta1 * m[k] + (1 - beta1) * g[k];
      v[k] = beta2 * v[k] + (1 - beta2) * g[k] * g[k];
      *theta[k] -= config.learning_rate * (m[k] / c1) / (std::sqrt(v[k] / c2) + 1e-8);
    }
  }
  return scorer;
}

double edge_accuracy(std::span<const EdgeExample> examples, const EdgeScorer& scorer) {
  if (examples.empty()) return 1.0;
  std::size_t hits = 0;
  for (const auto& ex : examples) {
    if ((scorer.logit(ex.feature) > 0.0) == ex.keep) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(examples.size());
}

std::vector<EdgeExample> edge_examples(std::span<const LabeledSample> samples,
                                       const ProximityPrior& prior) {
  std::vector<EdgeExample> out;
  for (const auto& s : samples) {
    const int n = static_cast<int>(s.detections.size());
    for (const auto& label : s.edge_labels) {
      if (label.i < 1 || label.j > n || label.i >= label.j) {
        fail(ErrorKind::validation, "edge label references missing nodes");
      }
      out.push_back({edge_feature(s.detections[label.i - 1], s.detections[label.j - 1], prior),
                     label.keep});
    }
  }
  return out;
}

std::vector<LabeledGraph> prepare_graphs(std::span<const LabeledSample> samples,
                                         const ModelParams& params,
                                         const ProximityPrior& prior) {
  std::vector<LabeledGraph> out;
  out.reserve(samples.size());
  for (const auto& s : samples) {
    auto graph = std::make_shared<const SpfesGraph>(build_complete_graph(s.detections, prior));
    out.push_back({infer_parse_graph(std::move(graph), params), s.cluster_labels});
  }
  return out;
}

FitResult fit_model(std::span<const LabeledSample> samples, const TrainConfig& config,
                    const ModelDims& dims, const ProximityPrior& prior,
                    const EdgeFitConfig& edge_config) {
  config.validate();
  if (samples.empty()) fail(ErrorKind::validation, "training dataset is empty");
  const auto examples = edge_examples(samples, prior);
  ModelParams init = init_params(dims, config.seed);
  init.edge_scorer = fit_edge_scorer(examples, edge_config);
  const auto graphs = prepare_graphs(samples, init, prior);
  const double edge_fit = edge_accuracy(examples, init.edge_scorer);
  auto trained = train(graphs, config, std::move(init));
  return {std::move(trained.params), std::move(trained.history), edge_fit};
}

}  // namespace sheeppain
