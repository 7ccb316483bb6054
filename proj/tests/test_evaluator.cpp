#include <doctest.h>

#include <cmath>

#include "rnr/evaluator.hpp"
#include "rnr/numerics.hpp"
#include "rnr/rng.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace rnr;

namespace {

Vector scores_of(std::initializer_list<double> values) {
  Vector v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (const double value : values) v(i++) = value;
  return v;
}

/// Six hand-enumerated users over five items, k = 3. Expected per user:
///   u0 (1, 1), u1 (1, 1/3), u2 (1, 1/3), u3 (0, 0), u4 skipped, u5 (1, 1).
struct MetricFixture {
  SplitDataset split;
  Matrix score_table{6, 5};

  MetricFixture() {
    for (int u = 0; u < 6; ++u) split.id_maps.user_map["u" + std::to_string(u)] = u;
    for (int i = 0; i < 5; ++i) split.id_maps.item_map["i" + std::to_string(i)] = i;
    split.train = {{0, 4, 4.0, 1}, {1, 0, 4.0, 1}, {2, 4, 4.0, 1}, {3, 1, 4.0, 1},
                   {4, 0, 4.0, 1}, {5, 3, 4.0, 1}, {5, 4, 4.0, 2}};
    split.validation = {{0, 0, 4.0, 9}, {1, 3, 4.0, 9}, {2, 2, 4.0, 9},
                        {3, 0, 4.0, 9}, {4, kInvalidId, 4.0, 9}, {5, 2, 4.0, 9}};
    split.n_holdout = 6;
    score_table << 0.9, 0.5, 0.4, 0.3, 0.2,
                   0.9, 0.5, 0.4, 0.3, 0.2,
                   1.0, 1.0, 1.0, 1.0, 1.0,
                   0.1, 0.2, 0.3, 0.9, 0.8,
                   0.5, 0.5, 0.5, 0.5, 0.5,
                   0.5, 0.6, 0.7, 0.8, 0.9;
  }

  ScoreFn scorer() const {
    return [this](int u) -> Vector { return score_table.row(u).transpose(); };
  }
};

}  // namespace

TEST_CASE("rank_candidates excludes, sorts, and truncates") {
  const Vector scores = scores_of({0.9, 0.8, 0.7});
  CHECK(rank_candidates(scores, {0}, 2) == std::vector<int>{1, 2});

  const Vector flat = scores_of({1.0, 1.0, 1.0, 1.0});
  CHECK(rank_candidates(flat, {}, 3) == std::vector<int>{0, 1, 2});

  CHECK(rank_candidates(scores, {0, 2}, 5) == std::vector<int>{1});  // shorter than k
}

TEST_CASE("rank_candidates agrees with a full-sort oracle") {
  auto rng = make_rng(12, 12);
  for (int trial = 0; trial < 20; ++trial) {
    Vector scores(1000);
    for (int i = 0; i < 1000; ++i) {
      scores(i) = static_cast<double>(bounded(rng, 97));  // many ties
    }
    std::vector<int> exclude;
    for (int i = 0; i < 50; ++i) exclude.push_back(static_cast<int>(bounded(rng, 1000)));
    std::sort(exclude.begin(), exclude.end());
    exclude.erase(std::unique(exclude.begin(), exclude.end()), exclude.end());
    CHECK(rank_candidates(scores, exclude, 10) == test::full_sort_topk(scores, exclude, 10));
  }
}

TEST_CASE("metrics_for_user positions") {
  CHECK(metrics_for_user({7, 3, 9}, 7, 10) == std::pair{1.0, 1.0});
  CHECK(metrics_for_user({7, 3, 9}, 4, 10) == std::pair{0.0, 0.0});
  CHECK(metrics_for_user({1, 2, 3, 4, 5}, 4, 10) == std::pair{1.0, 0.25});
}

TEST_CASE("evaluate on the hand-enumerated fixture") {
  const MetricFixture fx;
  const auto report = evaluate(fx.scorer(), fx.split, Half::validation, 3, "fixture");
  CHECK(report.users_evaluated == 5);
  CHECK(report.users_skipped == 1);
  CHECK(report.recall_at_k == doctest::Approx(4.0 / 6.0).epsilon(1e-12));
  CHECK(report.mrr_at_k == doctest::Approx(4.0 / 9.0).epsilon(1e-12));
  CHECK(report.mrr_at_k <= report.recall_at_k);

  // Cross-check every user against the brute-force oracle.
  const auto user_items = items_by_user(fx.split);
  double recall_sum = 0.0, rr_sum = 0.0;
  for (const auto& held : fx.split.validation) {
    if (held.item == kInvalidId) continue;
    const auto [recall, rr] = test::full_sort_metrics(
        fx.score_table.row(held.user).transpose(), user_items[held.user], held.item, 3);
    recall_sum += recall;
    rr_sum += rr;
  }
  CHECK(report.recall_at_k == recall_sum / 6.0);
  CHECK(report.mrr_at_k == rr_sum / 6.0);
}

TEST_CASE("evaluate rejects an empty half") {
  MetricFixture fx;
  fx.split.test.clear();
  CHECK_THROWS_AS(evaluate(fx.scorer(), fx.split, Half::test, 3), ConfigError);
}

TEST_CASE("an oracle model achieves perfect metrics") {
  const auto split = split_all_but_last(test::cluster_fixture(6), 12, 5);
  std::vector<int> hidden(split.id_maps.num_users(), kInvalidId);
  for (const auto& held : split.validation) hidden[held.user] = held.item;
  const ScoreFn oracle = [&](int u) {
    Vector scores = Vector::Zero(split.id_maps.num_items());
    if (hidden[u] != kInvalidId) scores(hidden[u]) = 1.0;
    return scores;
  };
  const auto report = evaluate(oracle, split, Half::validation, 10);
  CHECK(report.users_skipped == 0);
  CHECK(report.recall_at_k == 1.0);
  CHECK(report.mrr_at_k == 1.0);
}

TEST_CASE("top-k lists are invariant to increasing score transforms") {
  auto rng = make_rng(13, 13);
  for (int trial = 0; trial < 10; ++trial) {
    Vector scores(40);
    for (int i = 0; i < 40; ++i) {
      scores(i) = static_cast<double>(bounded(rng, 1000)) / 100.0 - 5.0;
    }
    const std::vector<int> exclude = {3, 7, 21};
    const auto base = rank_candidates(scores, exclude, 10);
    const Vector affine = (2.0 * scores.array() + 1.0).matrix();
    const Vector cubed = scores.array().cube().matrix();
    CHECK(rank_candidates(affine, exclude, 10) == base);
    CHECK(rank_candidates(cubed, exclude, 10) == base);
    for (const int item : base) {
      CHECK_FALSE(std::binary_search(exclude.begin(), exclude.end(), item));
    }
  }
}

TEST_CASE("scoring heads match their model contracts") {
  const auto split = split_all_but_last(test::cluster_fixture(6), 12, 5);
  const auto user_items = items_by_user(split);
  Hyperparams hp;
  hp.dim = 4;
  hp.seed = 3;

  SUBCASE("pairwise head: dot plus ranking item bias") {
    TrainRun run = make_run(Mode::single_rank, Ranker::bpr, hp, split);
    run.store.rank_item_bias.setLinSpaced(split.id_maps.num_items(), 0.0, 1.0);
    const auto scorer = make_scorer(run, user_items);
    const Vector scores = scorer(2);
    for (int i = 0; i < split.id_maps.num_items(); ++i) {
      const double expected = run.store.user_factors.row(2).dot(run.store.item_factors.row(i)) +
                              run.store.rank_item_bias(i);
      CHECK(scores(i) == doctest::Approx(expected).epsilon(1e-12));
    }
  }

  SUBCASE("rating head: predicted rating") {
    TrainRun run = make_run(Mode::single_rate, Ranker::bpr, hp, split);
    run.store.global_mean = 3.4;
    run.store.user_bias(1) = 0.2;
    const auto scorer = make_scorer(run, user_items);
    const Vector scores = scorer(1);
    for (int i = 0; i < split.id_maps.num_items(); ++i) {
      CHECK(scores(i) == doctest::Approx(svd_predict(1, i, run.store)).epsilon(1e-12));
    }
  }

  SUBCASE("autoencoder head: uncorrupted forward pass") {
    TrainRun run = make_run(Mode::single_rank, Ranker::cdae, hp, split);
    const auto scorer = make_scorer(run, user_items);
    const int u = 4;
    const Vector scores = scorer(u);
    Vector pre = run.store.user_factors.row(u).transpose() + run.store.cdae_hidden_bias;
    for (const int item : user_items[u]) {
      pre += run.store.cdae_encoder.row(item).transpose();
    }
    for (int i = 0; i < split.id_maps.num_items(); ++i) {
      double logit = run.store.cdae_output_bias(i);
      for (int c = 0; c < hp.dim; ++c) {
        logit += sigmoid(pre(c)) * run.store.item_factors(i, c);
      }
      CHECK(scores(i) == doctest::Approx(sigmoid(logit)).epsilon(1e-12));
    }
  }

  SUBCASE("popularity head: train frequency") {
    const auto scorer = make_popularity_scorer(split);
    const Vector scores = scorer(0);
    const auto counts = test::count_items(split.train);
    for (int i = 0; i < split.id_maps.num_items(); ++i) {
      const auto it = counts.find(i);
      CHECK(scores(i) == (it == counts.end() ? 0.0 : static_cast<double>(it->second)));
    }
  }
}

TEST_CASE("model labels") {
  CHECK(model_label(Mode::single_rank, Ranker::bpr) == "BPR");
  CHECK(model_label(Mode::single_rank, Ranker::cdae) == "CDAE");
  CHECK(model_label(Mode::single_rate, Ranker::bpr) == "SVD");
  CHECK(model_label(Mode::vanilla, Ranker::cdae) == "Vanilla(CDAE,SVD)");
  CHECK(model_label(Mode::rnr, Ranker::bpr) == "RnR(BPR,SVD)");
}
