#pragma once

#include "rnr/params.hpp"
#include "rnr/types.hpp"

namespace rnr {

struct RatingExample {
  int u = -1;
  int i = -1;
  double rating = 0.0;
};

/// mean + user bias + item bias + dot(p_u, q_i). Unclamped.
double svd_predict(int u, int i, const ParamStore& store);

struct SvdTerms {
  double loss = 0.0;
  double prediction = 0.0;
  Vector grad_user;
  Vector grad_item;
  double grad_user_bias = 0.0;
  double grad_item_bias = 0.0;
};

/// Squared rating error and exact gradients. The global mean is fixed, not a
/// gradient parameter.
SvdTerms svd_terms(const RatingExample& ex, const ParamStore& store);

struct RnrRatingTerms {
  double loss = 0.0;
  double prediction = 0.0;
  Vector grad_user;
  Vector grad_item;
  Vector grad_item_deviation;
  FcGrad grad_fc;  // user-path and item-path contributions summed
  double grad_user_bias = 0.0;
  double grad_item_bias = 0.0;
};

/// Rating branch routed through the post-consumption item vector and the tied
/// projection: prediction = mean + b_u + b_i + dot(fc(p_u), fc(q_i + q_i_dev)).
RnrRatingTerms rnr_rating_terms(const RatingExample& ex, const ParamStore& store);

}  // namespace rnr
