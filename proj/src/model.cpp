#include "sheeppain/model.hpp"

#include <cmath>
#include <string>

#include "sheeppain/error.hpp"
#include "sheeppain/random.hpp"

namespace sheeppain {

std::vector<double> matvec(const Matrix& a, std::span<const double> x) {
  if (x.size() != a.cols) {
    fail(ErrorKind::validation, "dimension mismatch: matrix has " +
                                    std::to_string(a.cols) + " columns, vector has " +
                                    std::to_string(x.size()) + " entries");
  }
  std::vector<double> out(a.rows, 0.0);
  for (std::size_t i = 0; i < a.rows; ++i) {
    double acc = 0.0;
    const double* r = a.data.data() + i * a.cols;
    for (std::size_t j = 0; j < a.cols; ++j) acc += r[j] * x[j];
    out[i] = acc;
  }
  return out;
}

ModelParams ModelParams::zeros(const ModelDims& dims) {
  ModelParams p;
  p.layers.resize(dims.layers);
  for (auto& layer : p.layers) {
    layer.weight = Matrix(dims.feature_dim, dims.feature_dim);
    layer.bias.assign(dims.feature_dim, 0.0);
  }
  p.head.weight = Matrix(dims.clusters, dims.feature_dim);
  p.head.bias.assign(dims.clusters, 0.0);
  return p;
}

ModelDims ModelParams::dims() const {
  return {feature_dim(), num_layers(), num_clusters()};
}

void ModelParams::validate() const {
  if (layers.empty()) fail(ErrorKind::validation, "model needs at least one layer");
  if (num_clusters() < 2) fail(ErrorKind::validation, "model needs at least two clusters");
  const std::size_t d = feature_dim();
  if (d == 0 || head.bias.size() != num_clusters() ||
      head.weight.data.size() != head.weight.rows * head.weight.cols) {
    fail(ErrorKind::validation, "malformed cluster head");
  }
  for (std::size_t k = 0; k < layers.size(); ++k) {
    const auto& l = layers[k];
    if (l.weight.rows != d || l.weight.cols != d || l.bias.size() != d ||
        l.weight.data.size() != d * d) {
      fail(ErrorKind::validation,
           "layer " + std::to_string(k + 1) + " is not " + std::to_string(d) + "x" +
               std::to_string(d));
    }
  }
  for (auto t : trainable()) {
    for (double v : t) {
      if (!std::isfinite(v)) fail(ErrorKind::numerical, "non-finite model parameter");
    }
  }
  for (double v : {edge_scorer.weights[0], edge_scorer.weights[1], edge_scorer.bias}) {
    if (!std::isfinite(v)) fail(ErrorKind::numerical, "non-finite edge scorer parameter");
  }
}

std::vector<std::span<double>> ModelParams::trainable() {
  std::vector<std::span<double>> out;
  out.reserve(2 * layers.size() + 2);
  for (auto& l : layers) {
    out.emplace_back(l.weight.data);
    out.emplace_back(l.bias);
  }
  out.emplace_back(head.weight.data);
  out.emplace_back(head.bias);
  return out;
}

std::vector<std::span<const double>> ModelParams::trainable() const {
  std::vector<std::span<const double>> out;
  out.reserve(2 * layers.size() + 2);
  for (const auto& l : layers) {
    out.emplace_back(l.weight.data);
    out.emplace_back(l.bias);
  }
  out.emplace_back(head.weight.data);
  out.emplace_back(head.bias);
  return out;
}

std::size_t ModelParams::trainable_size() const {
  std::size_t n = 0;
  for (auto t : trainable()) n += t.size();
  return n;
}

ModelParams init_params(const ModelDims& dims, std::uint64_t seed) {
  ModelParams p = ModelParams::zeros(dims);
  Rng rng(seed);
  auto fill = [&rng](Matrix& m) {
    const double a = std::sqrt(6.0 / static_cast<double>(m.rows + m.cols));
    for (double& v : m.data) v = rng.uniform(-a, a);
  };
  for (auto& l : p.layers) fill(l.weight);
  fill(p.head.weight);
  return p;
}

}  // namespace sheeppain
