#pragma once

#include <cstdint>
#include <string>

#include <Eigen/Core>

#include "rnr/errors.hpp"
#include "rnr/types.hpp"

namespace rnr {

struct Hyperparams {
  double alpha = 0.9;    // ranking-task weight in [0, 1]
  double lambda = 0.001;  // L2 regularization
  double lr = 0.001;
  int dim = 50;
  int k = 10;
  int epochs_max = 200;
  int patience = 10;
  std::uint64_t seed = 42;
  double cdae_corruption = 0.5;   // input dropout ratio in [0, 1)
  int cdae_negatives = 5;         // sampled negatives per positive
  int bpr_negatives_per_pos = 1;
};

void validate(const Hyperparams& hp);

/// Single projection layer shared by the user and item paths. One storage
/// location is what ties the two applications together.
struct FcLayer {
  Matrix weight;  // dim x dim
  Vector bias;    // dim
};

struct FcOutput {
  Vector value;  // tanh(pre)
  Vector pre;    // weight * x + bias, kept for the backward pass
};

struct FcGrad {
  Matrix weight;
  Vector bias;
};

/// Every learnable array plus its AdaGrad accumulator. Owned by exactly one
/// training run; no internal locking.
struct ParamStore {
  Matrix user_factors;    // N x d
  Matrix item_factors;    // M x d
  Matrix item_deviation;  // M x d, post-consumption offset per item
  FcLayer fc;

  double global_mean = 0.0;  // set by the trainer from train ratings
  Vector user_bias;          // N, rating task
  Vector item_bias;          // M, rating task
  Vector rank_item_bias;     // M, pairwise ranking task only

  Matrix cdae_encoder;      // M x d, private input weights
  Vector cdae_hidden_bias;  // d
  Vector cdae_output_bias;  // M

  struct Accumulators {
    Matrix user_factors;
    Matrix item_factors;
    Matrix item_deviation;
    Matrix fc_weight;
    Vector fc_bias;
    Vector user_bias;
    Vector item_bias;
    Vector rank_item_bias;
    Matrix cdae_encoder;
    Vector cdae_hidden_bias;
    Vector cdae_output_bias;
  };
  Accumulators acc;

  int num_users() const { return static_cast<int>(user_factors.rows()); }
  int num_items() const { return static_cast<int>(item_factors.rows()); }
  int dim() const { return static_cast<int>(user_factors.cols()); }
};

/// All arrays allocated and zeroed for the given shapes.
ParamStore zero_params(int num_users, int num_items, int dim);

/// Zero biases and deviation, Xavier-uniform factor matrices, zero
/// accumulators. Draw order is fixed so equal seeds give bitwise-equal
/// stores.
ParamStore init_params(int num_users, int num_items, const Hyperparams& hp);

namespace detail {
inline void require_same_size(Eigen::Index a, Eigen::Index b, const char* where) {
  if (a != b) {
    throw ShapeError(std::string(where) + ": size mismatch " + std::to_string(a) +
                     " vs " + std::to_string(b));
  }
}
}  // namespace detail

/// q + q_dev, the post-consumption item vector.
template <typename DA, typename DB>
Vector post_item(const Eigen::MatrixBase<DA>& q, const Eigen::MatrixBase<DB>& q_dev) {
  detail::require_same_size(q.size(), q_dev.size(), "post_item");
  return q + q_dev;
}

/// dot(p, q) + bias, the shared latent-factor score.
template <typename DA, typename DB>
Scalar score_dot(const Eigen::MatrixBase<DA>& p, const Eigen::MatrixBase<DB>& q,
                 Scalar bias) {
  detail::require_same_size(p.size(), q.size(), "score_dot");
  return p.dot(q) + bias;
}

/// tanh(W x + b). The returned pre-activation feeds fc_backward.
template <typename D>
FcOutput fc_forward(const FcLayer& fc, const Eigen::MatrixBase<D>& x) {
  detail::require_same_size(fc.weight.cols(), x.size(), "fc_forward");
  FcOutput out;
  out.pre = fc.weight * x + fc.bias;
  out.value = out.pre.array().tanh();
  return out;
}

/// Exact gradients of a scalar loss through fc_forward. `upstream` is
/// dLoss/dvalue; returns dLoss/dx and fills dLoss/d(weight, bias).
template <typename DU, typename DX>
Vector fc_backward(const FcLayer& fc, const Eigen::MatrixBase<DX>& x,
                   const FcOutput& cache, const Eigen::MatrixBase<DU>& upstream,
                   FcGrad& grad) {
  detail::require_same_size(upstream.size(), cache.value.size(), "fc_backward");
  detail::require_same_size(fc.weight.cols(), x.size(), "fc_backward");
  const Vector delta =
      upstream.cwiseProduct((1.0 - cache.value.array().square()).matrix());
  grad.weight.noalias() = delta * x.transpose();
  grad.bias = delta;
  return fc.weight.transpose() * delta;
}

}  // namespace rnr
