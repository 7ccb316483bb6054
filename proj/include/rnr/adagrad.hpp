#pragma once

#include <cmath>
#include <utility>

#include <Eigen/Core>

#include "rnr/errors.hpp"
#include "rnr/types.hpp"

namespace rnr {

struct AdaGradStep {
  double lr = 0.001;
  double eps = 1e-8;
};

/// acc += grad^2; param -= lr * grad / (sqrt(acc) + eps), elementwise.
/// Accepts any writable Eigen expression (rows, blocks, whole matrices).
template <typename Param, typename Acc, typename Grad>
void adagrad_apply(Param&& param, Acc&& acc, const Grad& grad, const AdaGradStep& step) {
  if (param.size() != acc.size() || param.size() != grad.size()) {
    throw ShapeError("adagrad_apply: param/acc/grad sizes differ");
  }
  acc.array() += grad.array().square();
  param.array() -= step.lr * grad.array() / (acc.array().sqrt() + step.eps);
}

inline void adagrad_apply(double& param, double& acc, double grad, const AdaGradStep& step) {
  acc += grad * grad;
  param -= step.lr * grad / (std::sqrt(acc) + step.eps);
}

}  // namespace rnr
