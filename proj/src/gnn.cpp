#include "sheeppain/gnn.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sheeppain/error.hpp"

namespace sheeppain {

Embeddings initial_features(const ParseGraph& g) {
  Embeddings out;
  out.reserve(g.parent->nodes.size());
  for (const auto& node : g.parent->nodes) out.push_back(node.feature);
  return out;
}

Embeddings aggregate_messages(const ParseGraph& g, const Embeddings& features) {
  const std::size_t n = g.num_nodes();
  if (features.size() != n) {
    fail(ErrorKind::validation, "features cover " + std::to_string(features.size()) +
                                    " nodes, graph has " + std::to_string(n));
  }
  const std::size_t dim = n ? features.front().size() : 0;
  for (const auto& f : features) {
    if (f.size() != dim) fail(ErrorKind::validation, "dimension mismatch between node features");
  }
  const auto adj = g.adjacency();
  Embeddings out(n, Feature(dim, 0.0));
  std::vector<const Feature*> incoming;
  for (std::size_t i = 0; i < n; ++i) {
    incoming.clear();
    for (std::size_t j : adj[i]) incoming.push_back(&features[j]);
    std::sort(incoming.begin(), incoming.end(),
              [](const Feature* a, const Feature* b) { return *a < *b; });
    for (const Feature* f : incoming) {
      for (std::size_t c = 0; c < dim; ++c) out[i][c] += (*f)[c];
    }
  }
  return out;
}

namespace {

Embeddings preactivate(const Embeddings& messages, const DenseLayer& layer) {
  if (layer.bias.size() != layer.weight.rows) {
    fail(ErrorKind::validation, "layer bias does not match weight rows");
  }
  Embeddings out;
  out.reserve(messages.size());
  for (const auto& m : messages) {
    Feature z = matvec(layer.weight, m);
    for (std::size_t r = 0; r < z.size(); ++r) z[r] += layer.bias[r];
    out.push_back(std::move(z));
  }
  return out;
}

Embeddings relu(Embeddings z) {
  for (auto& v : z) {
    for (double& x : v) {
      if (!std::isfinite(x)) fail(ErrorKind::numerical, "non-finite layer output");
      x = x > 0.0 ? x : 0.0;
    }
  }
  return z;
}

}  // namespace

Embeddings layer_update(const Embeddings& messages, const DenseLayer& layer) {
  return relu(preactivate(messages, layer));
}

ForwardTrace forward_trace(const ParseGraph& g, const ModelParams& params) {
  params.validate();
  ForwardTrace t;
  t.adjacency = g.adjacency();
  t.states.push_back(initial_features(g));
  for (const auto& layer : params.layers) {
    t.messages.push_back(aggregate_messages(g, t.states.back()));
    t.preactivations.push_back(preactivate(t.messages.back(), layer));
    t.states.push_back(relu(t.preactivations.back()));
  }
  return t;
}

Embeddings forward(const ParseGraph& g, const ModelParams& params) {
  params.validate();
  Embeddings state = initial_features(g);
  for (const auto& layer : params.layers) {
    state = layer_update(aggregate_messages(g, state), layer);
  }
  return state;
}

std::vector<double> softmax(std::span<const double> logits) {
  std::vector<double> out(logits.begin(), logits.end());
  if (out.empty()) return out;
  const double top = *std::max_element(out.begin(), out.end());
  double sum = 0.0;
  for (double& v : out) {
    v = std::exp(v - top);
    sum += v;
  }
  for (double& v : out) v /= sum;
  return out;
}

std::size_t argmax(std::span<const double> values) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] > values[best]) best = i;
  }
  return best;
}

ClusterAssignment classify_clusters(const Embeddings& embeddings,
                                    const ModelParams& params) {
  ClusterAssignment out;
  out.assignments.reserve(embeddings.size());
  out.distributions.reserve(embeddings.size());
  for (const auto& psi : embeddings) {
    auto logits = matvec(params.head.weight, psi);
    for (std::size_t q = 0; q < logits.size(); ++q) logits[q] += params.head.bias[q];
    auto dist = softmax(logits);
    out.assignments.push_back(static_cast<int>(argmax(dist)) + 1);
    out.distributions.push_back(std::move(dist));
  }
  return out;
}

}  // namespace sheeppain
