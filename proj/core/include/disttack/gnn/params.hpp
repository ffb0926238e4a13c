#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "disttack/graph/sparse.hpp"
#include "disttack/types.hpp"

namespace disttack {

enum class ModelKind { gcn, sgc };

ModelKind parse_model_kind(std::string_view name);
std::string_view to_string(ModelKind kind);

struct ModelSpec {
  ModelKind kind = ModelKind::gcn;
  std::size_t hidden = 16;  // GCN only
  int sgc_steps = 2;        // SGC propagation depth k

  friend bool operator==(const ModelSpec&, const ModelSpec&) = default;
};

/// Model weights plus the (stateless) plain-SGD step size.
///
/// GCN: weights = {W0 (feature_dim x hidden), W1 (hidden x classes)}.
/// SGC: weights = {W (feature_dim x classes)}.
struct ParamSet {
  ModelSpec spec;
  double learning_rate = 0.1;
  std::vector<Matrix> weights;

  std::vector<std::string> names() const;
  bool all_finite() const;
  // Euclidean norm of all weights flattened.
  double l2_norm() const;
};

ParamSet init_params(const ModelSpec& spec, std::size_t feature_dim, std::size_t num_classes,
                     double learning_rate, std::uint64_t seed);

void check_shapes(const ParamSet& params, std::size_t feature_dim, std::size_t num_classes);

struct GradientBundle {
  std::vector<Matrix> weights;
  // d loss / d A_ij for every live edge (symmetric, same pattern as A).
  std::optional<CsrMatrix> d_adjacency;
  std::optional<Matrix> d_features;
  // Norm of the flattened weight gradients.
  double l2_norm = 0.0;
  double loss = 0.0;

  void refresh_norm();
};

// W <- W - learning_rate * dW for each weight tensor.
ParamSet sgd_step(const ParamSet& params, const GradientBundle& grad);

}  // namespace disttack
