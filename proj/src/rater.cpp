#include "rnr/rater.hpp"

namespace rnr {

double svd_predict(int u, int i, const ParamStore& store) {
  return store.global_mean + store.user_bias(u) + store.item_bias(i) +
         store.user_factors.row(u).dot(store.item_factors.row(i));
}

SvdTerms svd_terms(const RatingExample& ex, const ParamStore& store) {
  SvdTerms terms;
  terms.prediction = svd_predict(ex.u, ex.i, store);
  const double residual = ex.rating - terms.prediction;
  terms.loss = residual * residual;

  const double dpred = -2.0 * residual;
  terms.grad_user = dpred * store.item_factors.row(ex.i).transpose();
  terms.grad_item = dpred * store.user_factors.row(ex.u).transpose();
  terms.grad_user_bias = dpred;
  terms.grad_item_bias = dpred;
  return terms;
}

RnrRatingTerms rnr_rating_terms(const RatingExample& ex, const ParamStore& store) {
  const Vector user_vec = store.user_factors.row(ex.u).transpose();
  const Vector item_post = post_item(store.item_factors.row(ex.i).transpose(),
                                     store.item_deviation.row(ex.i).transpose());
  const FcOutput user_proj = fc_forward(store.fc, user_vec);
  const FcOutput item_proj = fc_forward(store.fc, item_post);

  RnrRatingTerms terms;
  terms.prediction = store.global_mean + store.user_bias(ex.u) + store.item_bias(ex.i) +
                     user_proj.value.dot(item_proj.value);
  const double residual = ex.rating - terms.prediction;
  terms.loss = residual * residual;
  const double dpred = -2.0 * residual;

  FcGrad user_path, item_path;
  terms.grad_user =
      fc_backward(store.fc, user_vec, user_proj, (dpred * item_proj.value).eval(), user_path);
  const Vector dpost =
      fc_backward(store.fc, item_post, item_proj, (dpred * user_proj.value).eval(), item_path);
  // The unweighted sum q + q_dev has a unit Jacobian on both inputs.
  terms.grad_item = dpost;
  terms.grad_item_deviation = dpost;
  terms.grad_fc.weight = user_path.weight + item_path.weight;
  terms.grad_fc.bias = user_path.bias + item_path.bias;
  terms.grad_user_bias = dpred;
  terms.grad_item_bias = dpred;
  return terms;
}

}  // namespace rnr
