#pragma once

// Trainable parameters: K message-passing layers, the cluster head and the
// edge scorer used for parse-graph inference.

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "sheeppain/types.hpp"

namespace sheeppain {

/// Dense row-major matrix.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c, double fill = 0.0)
      : rows(r), cols(c), data(r * c, fill) {}

  double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }

  std::span<const double> row(std::size_t i) const {
    return {data.data() + i * cols, cols};
  }

  friend bool operator==(const Matrix&, const Matrix&) = default;
};

/// out = A * x, summed in column order.
std::vector<double> matvec(const Matrix& a, std::span<const double> x);

/// Affine map (weight, bias); used for message-passing layers and the head.
struct DenseLayer {
  Matrix weight;
  std::vector<double> bias;

  friend bool operator==(const DenseLayer&, const DenseLayer&) = default;
};

/// Logistic scorer over EdgeFeature: s = w0 * proximity + w1 * pain_diff + bias.
struct EdgeScorer {
  std::array<double, 2> weights{};
  double bias = 0;

  double logit(const EdgeFeature& f) const {
    return weights[0] * f.proximity + weights[1] * f.pain_diff + bias;
  }

  friend bool operator==(const EdgeScorer&, const EdgeScorer&) = default;
};

struct ModelDims {
  std::size_t feature_dim = kFeatureDim;
  std::size_t layers = 2;
  std::size_t clusters = 3;

  friend bool operator==(const ModelDims&, const ModelDims&) = default;
};

struct ModelParams {
  std::vector<DenseLayer> layers;  // each D x D
  DenseLayer head;                 // O x D
  EdgeScorer edge_scorer;

  /// All-zero parameters of the given shape.
  static ModelParams zeros(const ModelDims& dims);

  ModelDims dims() const;
  std::size_t feature_dim() const { return head.weight.cols; }
  std::size_t num_layers() const { return layers.size(); }
  std::size_t num_clusters() const { return head.weight.rows; }

  /// Shape checks (K >= 1, O >= 2, consistent D) and finiteness of every
  /// entry. Throws Error(validation) or Error(numerical).
  void validate() const;

  /// Gradient-trained tensors in fixed order: W1, b1, ..., WK, bK, H, c.
  /// The edge scorer is not included.
  std::vector<std::span<double>> trainable();
  std::vector<std::span<const double>> trainable() const;
  std::size_t trainable_size() const;

  friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

/// Weights uniform in [-a, a], a = sqrt(6 / (fan_in + fan_out)); biases and
/// edge scorer zero.
ModelParams init_params(const ModelDims& dims, std::uint64_t seed);

}  // namespace sheeppain
