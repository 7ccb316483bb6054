#pragma once

#include <cmath>

namespace rnr {

inline double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

/// log(1 + exp(x)) without overflow.
inline double softplus(double x) {
  if (x > 0.0) return x + std::log1p(std::exp(-x));
  return std::log1p(std::exp(x));
}

/// -[y log s(z) + (1-y) log(1 - s(z))] for label y in {0, 1}.
inline double logistic_loss(double logit, double label) {
  return label * softplus(-logit) + (1.0 - label) * softplus(logit);
}

}  // namespace rnr
