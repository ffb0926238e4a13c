#include "disttack/gnn/params.hpp"

#include <cmath>
#include <string>

#include "disttack/rng.hpp"

namespace disttack {

ModelKind parse_model_kind(std::string_view name) {
  if (name == "gcn") return ModelKind::gcn;
  if (name == "sgc") return ModelKind::sgc;
  throw InvalidArgument("unknown model '" + std::string(name) + "' (expected gcn or sgc)");
}

std::string_view to_string(ModelKind kind) { return kind == ModelKind::gcn ? "gcn" : "sgc"; }

std::vector<std::string> ParamSet::names() const {
  if (spec.kind == ModelKind::sgc) return {"W"};
  return {"W0", "W1"};
}

bool ParamSet::all_finite() const {
  for (const Matrix& w : weights) {
    if (!w.allFinite()) return false;
  }
  return true;
}

double ParamSet::l2_norm() const {
  double sq = 0.0;
  for (const Matrix& w : weights) sq += w.squaredNorm();
  return std::sqrt(sq);
}

namespace {

Matrix glorot(std::size_t fan_in, std::size_t fan_out, Rng& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  std::uniform_real_distribution<double> u(-limit, limit);
  Matrix w(static_cast<Eigen::Index>(fan_in), static_cast<Eigen::Index>(fan_out));
  for (Eigen::Index i = 0; i < w.size(); ++i) w.data()[i] = u(rng);
  return w;
}

}  // namespace

ParamSet init_params(const ModelSpec& spec, std::size_t feature_dim, std::size_t num_classes,
                     double learning_rate, std::uint64_t seed) {
  if (feature_dim == 0 || num_classes == 0) throw InvalidArgument("init_params: zero dimension");
  if (!(learning_rate > 0.0)) throw InvalidArgument("learning_rate must be positive");
  if (spec.kind == ModelKind::gcn && spec.hidden == 0) throw InvalidArgument("GCN hidden size must be >= 1");
  if (spec.kind == ModelKind::sgc && spec.sgc_steps < 1) throw InvalidArgument("SGC steps must be >= 1");

  Rng rng(derive_seed(seed, stream::init));
  ParamSet p;
  p.spec = spec;
  p.learning_rate = learning_rate;
  if (spec.kind == ModelKind::gcn) {
    p.weights.push_back(glorot(feature_dim, spec.hidden, rng));
    p.weights.push_back(glorot(spec.hidden, num_classes, rng));
  } else {
    p.weights.push_back(glorot(feature_dim, num_classes, rng));
  }
  return p;
}

void check_shapes(const ParamSet& params, std::size_t feature_dim, std::size_t num_classes) {
  const auto f = static_cast<Eigen::Index>(feature_dim);
  const auto c = static_cast<Eigen::Index>(num_classes);
  if (params.spec.kind == ModelKind::gcn) {
    if (params.weights.size() != 2) throw InvalidArgument("GCN expects two weight matrices");
    const Matrix& w0 = params.weights[0];
    const Matrix& w1 = params.weights[1];
    if (w0.rows() != f || w1.cols() != c || w0.cols() != w1.rows()) {
      throw InvalidArgument("GCN weight shapes do not match feature_dim=" + std::to_string(feature_dim) +
                            ", classes=" + std::to_string(num_classes));
    }
  } else {
    if (params.weights.size() != 1) throw InvalidArgument("SGC expects one weight matrix");
    if (params.weights[0].rows() != f || params.weights[0].cols() != c) {
      throw InvalidArgument("SGC weight shape does not match feature_dim x classes");
    }
  }
}

void GradientBundle::refresh_norm() {
  double sq = 0.0;
  for (const Matrix& w : weights) sq += w.squaredNorm();
  l2_norm = std::sqrt(sq);
}

ParamSet sgd_step(const ParamSet& params, const GradientBundle& grad) {
  if (grad.weights.size() != params.weights.size()) throw InvalidArgument("sgd_step: tensor count mismatch");
  ParamSet out = params;
  for (std::size_t k = 0; k < out.weights.size(); ++k) {
    if (grad.weights[k].rows() != out.weights[k].rows() || grad.weights[k].cols() != out.weights[k].cols()) {
      throw InvalidArgument("sgd_step: shape mismatch for tensor " + std::to_string(k));
    }
    out.weights[k].noalias() -= params.learning_rate * grad.weights[k];
  }
  return out;
}

}  // namespace disttack
