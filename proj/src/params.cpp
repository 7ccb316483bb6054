#include "rnr/params.hpp"

#include <cmath>
#include <random>

#include "rnr/rng.hpp"

namespace rnr {
namespace {

// Uniform on [-a, a] with a = sqrt(6 / (fan_in + fan_out)).
void xavier_fill(Matrix& m, std::mt19937_64& rng) {
  const double bound = std::sqrt(6.0 / static_cast<double>(m.rows() + m.cols()));
  std::uniform_real_distribution<double> dist(-bound, bound);
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = dist(rng);
  }
}

}  // namespace

void validate(const Hyperparams& hp) {
  if (hp.alpha < 0.0 || hp.alpha > 1.0) throw ConfigError("alpha must be in [0, 1]");
  if (hp.lambda < 0.0) throw ConfigError("lambda must be >= 0");
  if (!(hp.lr > 0.0)) throw ConfigError("lr must be > 0");
  if (hp.dim < 1) throw ConfigError("dim must be >= 1");
  if (hp.k < 1) throw ConfigError("k must be >= 1");
  if (hp.epochs_max < 1) throw ConfigError("epochs_max must be >= 1");
  if (hp.patience < 1) throw ConfigError("patience must be >= 1");
  if (hp.cdae_corruption < 0.0 || hp.cdae_corruption >= 1.0) {
    throw ConfigError("cdae_corruption must be in [0, 1)");
  }
  if (hp.cdae_negatives < 0) throw ConfigError("cdae_negatives must be >= 0");
  if (hp.bpr_negatives_per_pos < 1) throw ConfigError("bpr_negatives_per_pos must be >= 1");
}

ParamStore zero_params(int num_users, int num_items, int dim) {
  if (num_users < 1 || num_items < 1 || dim < 1) {
    throw ConfigError("zero_params: shapes must be positive");
  }
  ParamStore store;
  store.user_factors = Matrix::Zero(num_users, dim);
  store.item_factors = Matrix::Zero(num_items, dim);
  store.item_deviation = Matrix::Zero(num_items, dim);
  store.fc.weight = Matrix::Zero(dim, dim);
  store.fc.bias = Vector::Zero(dim);
  store.user_bias = Vector::Zero(num_users);
  store.item_bias = Vector::Zero(num_items);
  store.rank_item_bias = Vector::Zero(num_items);
  store.cdae_encoder = Matrix::Zero(num_items, dim);
  store.cdae_hidden_bias = Vector::Zero(dim);
  store.cdae_output_bias = Vector::Zero(num_items);

  store.acc.user_factors = Matrix::Zero(num_users, dim);
  store.acc.item_factors = Matrix::Zero(num_items, dim);
  store.acc.item_deviation = Matrix::Zero(num_items, dim);
  store.acc.fc_weight = Matrix::Zero(dim, dim);
  store.acc.fc_bias = Vector::Zero(dim);
  store.acc.user_bias = Vector::Zero(num_users);
  store.acc.item_bias = Vector::Zero(num_items);
  store.acc.rank_item_bias = Vector::Zero(num_items);
  store.acc.cdae_encoder = Matrix::Zero(num_items, dim);
  store.acc.cdae_hidden_bias = Vector::Zero(dim);
  store.acc.cdae_output_bias = Vector::Zero(num_items);
  return store;
}

ParamStore init_params(int num_users, int num_items, const Hyperparams& hp) {
  validate(hp);
  if (num_users < 1 || num_items < 1) {
    throw ConfigError("init_params: need at least one user and one item");
  }
  ParamStore store = zero_params(num_users, num_items, hp.dim);
  auto rng = make_rng(hp.seed, /*stream=*/0x1217ULL);
  xavier_fill(store.user_factors, rng);
  xavier_fill(store.item_factors, rng);
  xavier_fill(store.fc.weight, rng);
  xavier_fill(store.cdae_encoder, rng);
  return store;
}

}  // namespace rnr
