#pragma once

#include <functional>
#include <string>
#include <vector>

#include "rnr/data.hpp"
#include "rnr/trainer.hpp"
#include "rnr/types.hpp"

namespace rnr {

enum class Half { validation, test };

struct EvalReport {
  std::string model;
  int k = 0;
  double recall_at_k = 0.0;
  double mrr_at_k = 0.0;
  std::size_t users_evaluated = 0;  // hidden item was rankable
  std::size_t users_skipped = 0;    // hidden item absent from train, scored 0
};

/// Scores every item for one user; index = dense item id.
using ScoreFn = std::function<Vector(int)>;

/// The k highest-scoring items outside `exclude` (sorted ids), descending
/// score, ties by ascending id. Shorter when fewer candidates exist.
std::vector<int> rank_candidates(const Vector& scores, const std::vector<int>& exclude,
                                 int k);

/// recall is 1 iff the hidden item is present; rr is 1/rank (1-based) or 0.
std::pair<double, double> metrics_for_user(const std::vector<int>& topk, int hidden,
                                           int k);

EvalReport evaluate(const ScoreFn& scorer, const SplitDataset& split,
                    const std::vector<std::vector<int>>& user_items, Half half, int k,
                    const std::string& label = "");

EvalReport evaluate(const ScoreFn& scorer, const SplitDataset& split, Half half, int k,
                    const std::string& label = "");

/// Ranking head for the run's configuration: pairwise models score by
/// dot(p_u, q_i) + ranking item bias, CDAE by its uncorrupted forward pass,
/// rating-only models by the predicted rating.
ScoreFn make_scorer(const TrainRun& run, const std::vector<std::vector<int>>& user_items);

ScoreFn make_popularity_scorer(const SplitDataset& split);

/// Baseline row label: Popularity, BPR, CDAE, SVD, Vanilla(BPR,SVD), ...
std::string model_label(Mode mode, Ranker ranker);

}  // namespace rnr
