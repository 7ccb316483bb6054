#include "rnr/rankers.hpp"

#include <algorithm>

#include "rnr/errors.hpp"
#include "rnr/numerics.hpp"
#include "rnr/rng.hpp"

namespace rnr {

int sample_negative(const std::vector<int>& train_items, int num_items,
                    std::mt19937_64& rng) {
  if (train_items.size() >= static_cast<std::size_t>(num_items)) {
    throw SamplingError("sample_negative: user has interacted with every item");
  }
  while (true) {
    const int candidate = static_cast<int>(bounded(rng, num_items));
    if (!std::binary_search(train_items.begin(), train_items.end(), candidate)) {
      return candidate;
    }
  }
}

BprTerms bpr_terms(const BprTriple& triple, const ParamStore& store) {
  const auto p = store.user_factors.row(triple.u);
  const auto qi = store.item_factors.row(triple.pos);
  const auto qj = store.item_factors.row(triple.neg);

  BprTerms terms;
  terms.margin = score_dot(p, qi, store.rank_item_bias(triple.pos)) -
                 score_dot(p, qj, store.rank_item_bias(triple.neg));
  terms.loss = softplus(-terms.margin);

  const double dmargin = -sigmoid(-terms.margin);
  terms.grad_user = dmargin * (qi - qj).transpose();
  terms.grad_pos = dmargin * p.transpose();
  terms.grad_neg = -dmargin * p.transpose();
  terms.grad_pos_bias = dmargin;
  terms.grad_neg_bias = -dmargin;
  return terms;
}

CdaeExample sample_cdae_example(int u, const std::vector<int>& observed,
                                const Hyperparams& hp, int num_items,
                                std::mt19937_64& rng) {
  CdaeExample ex;
  ex.u = u;
  ex.observed = observed;
  if (observed.empty()) return ex;

  if (hp.cdae_corruption == 0.0) {
    ex.corrupted = observed;
  } else {
    // Keep each input with probability 1 - corruption. A 53-bit draw mapped
    // to [0, 1) keeps the schedule independent of distribution internals.
    for (const int item : observed) {
      const double coin =
          static_cast<double>(rng() >> 11) * (1.0 / 9007199254740992.0);
      if (coin >= hp.cdae_corruption) ex.corrupted.push_back(item);
    }
  }
  const std::size_t n_neg = observed.size() * static_cast<std::size_t>(hp.cdae_negatives);
  ex.negatives.reserve(n_neg);
  for (std::size_t n = 0; n < n_neg; ++n) {
    ex.negatives.push_back(sample_negative(observed, num_items, rng));
  }
  return ex;
}

std::optional<CdaeTerms> cdae_terms(const CdaeExample& example, const ParamStore& store,
                                    const Hyperparams& hp) {
  if (example.observed.empty()) return std::nullopt;
  const int d = store.dim();
  const double scale = 1.0 / (1.0 - hp.cdae_corruption);

  Vector pre = store.user_factors.row(example.u).transpose() + store.cdae_hidden_bias;
  for (const int item : example.corrupted) {
    pre += scale * store.cdae_encoder.row(item).transpose();
  }
  const Vector hidden = pre.unaryExpr([](double v) { return sigmoid(v); });

  // Unique targets with multiplicity and label; negatives may repeat.
  std::vector<std::pair<int, int>> counted;  // (item, multiplicity), negatives
  {
    std::vector<int> negs = example.negatives;
    std::sort(negs.begin(), negs.end());
    for (std::size_t i = 0; i < negs.size();) {
      std::size_t j = i;
      while (j < negs.size() && negs[j] == negs[i]) ++j;
      counted.emplace_back(negs[i], static_cast<int>(j - i));
      i = j;
    }
  }

  CdaeTerms terms;
  const std::size_t n_targets = example.observed.size() + counted.size();
  terms.targets.reserve(n_targets);
  terms.grad_targets.resize(static_cast<Eigen::Index>(n_targets), d);
  terms.grad_output_bias.resize(static_cast<Eigen::Index>(n_targets));

  Vector dhidden = Vector::Zero(d);
  Eigen::Index row = 0;
  auto add_target = [&](int item, double label, double multiplicity) {
    const double logit = score_dot(hidden, store.item_factors.row(item).transpose(),
                                   store.cdae_output_bias(item));
    terms.loss += multiplicity * logistic_loss(logit, label);
    const double dlogit = multiplicity * (sigmoid(logit) - label);
    terms.targets.push_back(item);
    terms.grad_targets.row(row) = dlogit * hidden.transpose();
    terms.grad_output_bias(row) = dlogit;
    dhidden += dlogit * store.item_factors.row(item).transpose();
    ++row;
  };
  for (const int item : example.observed) add_target(item, 1.0, 1.0);
  for (const auto& [item, mult] : counted) add_target(item, 0.0, mult);

  const Vector dpre =
      dhidden.cwiseProduct(hidden.cwiseProduct((1.0 - hidden.array()).matrix()));
  terms.grad_user = dpre;
  terms.grad_hidden_bias = dpre;
  terms.grad_encoder_row = scale * dpre;
  return terms;
}

std::vector<std::int64_t> popularity_counts(const std::vector<DenseInteraction>& train,
                                            int num_items) {
  std::vector<std::int64_t> counts(num_items, 0);
  for (const auto& inter : train) ++counts[inter.item];
  return counts;
}

std::vector<int> popularity_rank(const std::vector<DenseInteraction>& train, int k) {
  if (k < 1) throw ConfigError("popularity_rank: k must be >= 1");
  int num_items = 0;
  for (const auto& inter : train) num_items = std::max(num_items, inter.item + 1);
  const auto counts = popularity_counts(train, num_items);

  std::vector<int> order(num_items);
  for (int i = 0; i < num_items; ++i) order[i] = i;
  const auto by_count_then_id = [&](int a, int b) {
    if (counts[a] != counts[b]) return counts[a] > counts[b];
    return a < b;
  };
  const std::size_t cut = std::min<std::size_t>(k, order.size());
  std::partial_sort(order.begin(), order.begin() + cut, order.end(), by_count_then_id);
  order.resize(cut);
  return order;
}

}  // namespace rnr
