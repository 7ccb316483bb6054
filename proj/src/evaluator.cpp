#include "rnr/evaluator.hpp"

#include <algorithm>

#include "rnr/errors.hpp"
#include "rnr/numerics.hpp"
#include "rnr/rankers.hpp"

namespace rnr {

std::vector<int> rank_candidates(const Vector& scores, const std::vector<int>& exclude,
                                 int k) {
  if (k < 1) throw ConfigError("rank_candidates: k must be >= 1");
  std::vector<int> candidates;
  candidates.reserve(scores.size());
  for (int i = 0; i < static_cast<int>(scores.size()); ++i) {
    if (!std::binary_search(exclude.begin(), exclude.end(), i)) candidates.push_back(i);
  }
  const std::size_t cut = std::min<std::size_t>(k, candidates.size());
  std::partial_sort(candidates.begin(), candidates.begin() + cut, candidates.end(),
                    [&](int a, int b) {
                      if (scores(a) != scores(b)) return scores(a) > scores(b);
                      return a < b;
                    });
  candidates.resize(cut);
  return candidates;
}

std::pair<double, double> metrics_for_user(const std::vector<int>& topk, int hidden,
                                           int k) {
  if (topk.size() > static_cast<std::size_t>(k)) {
    throw ConfigError("metrics_for_user: list longer than k");
  }
  for (std::size_t rank = 0; rank < topk.size(); ++rank) {
    if (topk[rank] == hidden) return {1.0, 1.0 / static_cast<double>(rank + 1)};
  }
  return {0.0, 0.0};
}

EvalReport evaluate(const ScoreFn& scorer, const SplitDataset& split,
                    const std::vector<std::vector<int>>& user_items, Half half, int k,
                    const std::string& label) {
  const auto& entries = half == Half::validation ? split.validation : split.test;
  if (entries.empty()) throw ConfigError("evaluate: chosen half is empty");

  EvalReport report;
  report.model = label;
  report.k = k;
  double recall_sum = 0.0;
  double rr_sum = 0.0;
  for (const auto& entry : entries) {
    if (entry.item == kInvalidId) {
      // Hidden item never seen in train: unrankable, counts as a miss.
      ++report.users_skipped;
      continue;
    }
    const Vector scores = scorer(entry.user);
    const auto topk = rank_candidates(scores, user_items[entry.user], k);
    const auto [recall, rr] = metrics_for_user(topk, entry.item, k);
    recall_sum += recall;
    rr_sum += rr;
    ++report.users_evaluated;
  }
  const double denom = static_cast<double>(entries.size());
  report.recall_at_k = recall_sum / denom;
  report.mrr_at_k = rr_sum / denom;
  return report;
}

EvalReport evaluate(const ScoreFn& scorer, const SplitDataset& split, Half half, int k,
                    const std::string& label) {
  return evaluate(scorer, split, items_by_user(split), half, k, label);
}

ScoreFn make_scorer(const TrainRun& run, const std::vector<std::vector<int>>& user_items) {
  const ParamStore& store = run.store;
  if (run.mode == Mode::single_rate) {
    return [&store](int u) -> Vector {
      return (store.item_factors * store.user_factors.row(u).transpose() +
              store.item_bias).array() +
             (store.global_mean + store.user_bias(u));
    };
  }
  if (run.ranker == Ranker::bpr) {
    return [&store](int u) -> Vector {
      return store.item_factors * store.user_factors.row(u).transpose() +
             store.rank_item_bias;
    };
  }
  return [&store, &user_items](int u) -> Vector {
    Vector pre = store.user_factors.row(u).transpose() + store.cdae_hidden_bias;
    for (const int item : user_items[u]) {
      pre += store.cdae_encoder.row(item).transpose();
    }
    const Vector hidden = pre.unaryExpr([](double v) { return sigmoid(v); });
    Vector logits = store.item_factors * hidden + store.cdae_output_bias;
    return logits.unaryExpr([](double v) { return sigmoid(v); });
  };
}

ScoreFn make_popularity_scorer(const SplitDataset& split) {
  const auto counts = popularity_counts(split.train, split.id_maps.num_items());
  Vector scores(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i) {
    scores(static_cast<Eigen::Index>(i)) = static_cast<double>(counts[i]);
  }
  return [scores](int) -> Vector { return scores; };
}

std::string model_label(Mode mode, Ranker ranker) {
  const std::string rank_name = ranker == Ranker::bpr ? "BPR" : "CDAE";
  switch (mode) {
    case Mode::single_rank: return rank_name;
    case Mode::single_rate: return "SVD";
    case Mode::vanilla: return "Vanilla(" + rank_name + ",SVD)";
    case Mode::rnr: return "RnR(" + rank_name + ",SVD)";
  }
  return "?";
}

}  // namespace rnr
