#include <doctest.h>

#include <cmath>
#include <cstring>

#include "rnr/evaluator.hpp"
#include "rnr/trainer.hpp"
#include "support/fixtures.hpp"

using namespace rnr;

namespace {

bool bitwise_equal(const Matrix& a, const Matrix& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() &&
         std::memcmp(a.data(), b.data(), sizeof(double) * a.size()) == 0;
}

Hyperparams toy_hp() {
  Hyperparams hp;
  hp.dim = 8;
  hp.lr = 0.1;
  hp.lambda = 0.001;
  hp.alpha = 0.5;
  hp.k = 1;
  hp.seed = 21;
  hp.cdae_corruption = 0.2;
  hp.cdae_negatives = 2;
  return hp;
}

}  // namespace

TEST_CASE("adagrad first step moves by roughly lr times the gradient sign") {
  AdaGradStep step{0.001, 1e-8};
  double param = 1.0, acc = 0.0;
  adagrad_apply(param, acc, 0.3, step);
  CHECK(acc == doctest::Approx(0.09).epsilon(1e-15));
  CHECK(param == doctest::Approx(1.0 - 0.001).epsilon(1e-6));
}

TEST_CASE("adagrad ignores zero gradients") {
  AdaGradStep step{0.001, 1e-8};
  double param = 0.7, acc = 0.25;
  adagrad_apply(param, acc, 0.0, step);
  CHECK(param == 0.7);
  CHECK(acc == 0.25);
}

TEST_CASE("adagrad two-step trace") {
  // g = 0.3 then 0.4: second update is lr * 0.4 / sqrt(0.09 + 0.16) = 0.0008.
  AdaGradStep step{0.001, 1e-8};
  double param = 0.0, acc = 0.0;
  adagrad_apply(param, acc, 0.3, step);
  const double after_first = param;
  adagrad_apply(param, acc, 0.4, step);
  CHECK(acc == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(after_first - param == doctest::Approx(0.0008).epsilon(1e-6));
}

TEST_CASE("adagrad vector form matches the scalar form") {
  AdaGradStep step{0.01, 1e-8};
  Vector param = Vector::Constant(3, 2.0), acc = Vector::Zero(3), grad(3);
  grad << 0.5, -0.25, 0.0;
  double p0 = 2.0, a0 = 0.0;
  adagrad_apply(p0, a0, 0.5, step);
  adagrad_apply(param, acc, grad, step);
  CHECK(param(0) == p0);
  CHECK(param(2) == 2.0);
  CHECK(acc(1) == 0.0625);
}

TEST_CASE("adagrad rejects mismatched shapes") {
  AdaGradStep step{0.01, 1e-8};
  Vector param = Vector::Zero(3), acc = Vector::Zero(3), grad = Vector::Zero(4);
  CHECK_THROWS_AS(adagrad_apply(param, acc, grad, step), ShapeError);
}

TEST_CASE("early stopper patience arithmetic") {
  // Validation scores .1 .2 .2 .2 .2 with patience 3: stop after epoch 5,
  // best snapshot is epoch 2.
  EarlyStopper stopper(3);
  CHECK_FALSE(stopper.update(1, 0.1));
  CHECK_FALSE(stopper.update(2, 0.2));
  CHECK_FALSE(stopper.update(3, 0.2));
  CHECK_FALSE(stopper.update(4, 0.2));
  CHECK(stopper.update(5, 0.2));
  CHECK(stopper.best_epoch() == 2);
  CHECK(stopper.best() == 0.2);
}

TEST_CASE("epochs_max caps training") {
  const auto split = split_all_but_last(test::cluster_fixture(6), 12, 5);
  auto hp = toy_hp();
  hp.epochs_max = 1;
  TrainRun run = make_run(Mode::vanilla, Ranker::bpr, hp, split);
  fit(run, split);
  CHECK(run.epoch_log.size() == 1);
  CHECK(run.best_epoch == 1);
}

TEST_CASE("zero-weight branches leave shared factors on the single-task trajectory") {
  const auto split = split_all_but_last(test::cluster_fixture(6), 12, 5);
  const TrainContext ctx = make_train_context(split);
  auto hp = toy_hp();
  hp.lambda = 0.01;

  for (const Ranker ranker : {Ranker::bpr, Ranker::cdae}) {
    auto hp_rank = hp;
    TrainRun rank_run = make_run(Mode::single_rank, ranker, hp_rank, split);
    auto hp_rnr = hp;
    hp_rnr.alpha = 1.0;
    TrainRun rnr_run = make_run(Mode::rnr, ranker, hp_rnr, split);
    rank_run.store.global_mean = ctx.train_mean;
    rnr_run.store.global_mean = ctx.train_mean;

    for (int epoch = 1; epoch <= 3; ++epoch) {
      train_epoch(rank_run, split, ctx, epoch);
      train_epoch(rnr_run, split, ctx, epoch);
      CHECK(bitwise_equal(rank_run.store.user_factors, rnr_run.store.user_factors));
      CHECK(bitwise_equal(rank_run.store.item_factors, rnr_run.store.item_factors));
    }
  }

  auto hp_rate = hp;
  TrainRun rate_run = make_run(Mode::single_rate, Ranker::bpr, hp_rate, split);
  auto hp_van = hp;
  hp_van.alpha = 0.0;
  TrainRun van_run = make_run(Mode::vanilla, Ranker::bpr, hp_van, split);
  const TrainContext ctx2 = make_train_context(split);
  rate_run.store.global_mean = ctx2.train_mean;
  van_run.store.global_mean = ctx2.train_mean;
  for (int epoch = 1; epoch <= 3; ++epoch) {
    train_epoch(rate_run, split, ctx2, epoch);
    train_epoch(van_run, split, ctx2, epoch);
    CHECK(bitwise_equal(rate_run.store.user_factors, van_run.store.user_factors));
    CHECK(bitwise_equal(rate_run.store.item_factors, van_run.store.item_factors));
  }
}

TEST_CASE("pure decay contracts touched parameters monotonically") {
  // One interaction whose rating equals the prediction: every branch gradient
  // is zero and only the weight decay acts.
  SplitDataset split;
  split.train = {{0, 0, 3.0, 1}};
  split.id_maps.user_map["u"] = 0;
  split.id_maps.item_map["i"] = 0;
  const TrainContext ctx = make_train_context(split);

  Hyperparams hp;
  hp.dim = 4;
  hp.lr = 0.01;
  hp.lambda = 0.1;
  TrainRun run = make_run(Mode::single_rate, Ranker::bpr, hp, split);
  run.store.global_mean = 3.0;
  run.store.user_factors.row(0) << 0.5, -0.5, 0.3, -0.3;
  run.store.item_factors.row(0).setZero();
  run.store.user_bias(0) = 0.5;
  run.store.item_bias(0) = -0.5;

  Vector prev = run.store.user_factors.row(0).transpose();
  double prev_bias = run.store.user_bias(0);
  for (int epoch = 1; epoch <= 20; ++epoch) {
    const double objective = train_epoch(run, split, ctx, epoch);
    CHECK(objective > 0.0);  // pure penalty, loss itself is zero
    const Vector current = run.store.user_factors.row(0).transpose();
    for (int c = 0; c < 4; ++c) {
      CHECK(std::abs(current(c)) < std::abs(prev(c)));
      CHECK(current(c) * prev(c) > 0.0);  // no overshoot past zero
    }
    CHECK(std::abs(run.store.user_bias(0)) < std::abs(prev_bias));
    CHECK(run.store.item_factors.row(0).isZero(0.0));
    prev = current;
    prev_bias = run.store.user_bias(0);
  }
}

TEST_CASE("adagrad accumulators never decrease during training") {
  const auto split = split_all_but_last(test::cluster_fixture(6), 12, 5);
  const TrainContext ctx = make_train_context(split);
  auto hp = toy_hp();
  TrainRun run = make_run(Mode::rnr, Ranker::cdae, hp, split);
  run.store.global_mean = ctx.train_mean;

  Matrix prev_user = run.store.acc.user_factors;
  Matrix prev_item = run.store.acc.item_factors;
  Matrix prev_fc = run.store.acc.fc_weight;
  for (int epoch = 1; epoch <= 4; ++epoch) {
    train_epoch(run, split, ctx, epoch);
    CHECK((run.store.acc.user_factors - prev_user).minCoeff() >= 0.0);
    CHECK((run.store.acc.item_factors - prev_item).minCoeff() >= 0.0);
    CHECK((run.store.acc.fc_weight - prev_fc).minCoeff() >= 0.0);
    prev_user = run.store.acc.user_factors;
    prev_item = run.store.acc.item_factors;
    prev_fc = run.store.acc.fc_weight;
  }
}

TEST_CASE("training is deterministic given seed and config") {
  const auto split = split_all_but_last(test::cluster_fixture(6), 12, 5);
  auto hp = toy_hp();
  hp.epochs_max = 6;

  TrainRun a = make_run(Mode::vanilla, Ranker::cdae, hp, split);
  TrainRun b = make_run(Mode::vanilla, Ranker::cdae, hp, split);
  fit(a, split);
  fit(b, split);
  REQUIRE(a.epoch_log.size() == b.epoch_log.size());
  for (std::size_t e = 0; e < a.epoch_log.size(); ++e) {
    CHECK(a.epoch_log[e].objective == b.epoch_log[e].objective);
    CHECK(a.epoch_log[e].val_recall == b.epoch_log[e].val_recall);
  }
  CHECK(bitwise_equal(a.store.user_factors, b.store.user_factors));
}

TEST_CASE("objective decreases on the toy fixture") {
  const auto split = split_all_but_last(test::cluster_fixture(6), 12, 5);
  const TrainContext ctx = make_train_context(split);
  for (const Mode mode : {Mode::single_rank, Mode::single_rate, Mode::vanilla, Mode::rnr}) {
    auto hp = toy_hp();
    TrainRun run = make_run(mode, Ranker::bpr, hp, split);
    run.store.global_mean = ctx.train_mean;
    double first = 0.0, last = 0.0;
    for (int epoch = 1; epoch <= 50; ++epoch) {
      const double objective = train_epoch(run, split, ctx, epoch);
      if (epoch == 1) first = objective;
      last = objective;
    }
    CHECK(last < first);
  }
}

TEST_CASE("a learnable pattern reaches perfect validation recall") {
  const auto split = split_all_but_last(test::cluster_fixture(6), 12, 5);
  auto hp = toy_hp();
  hp.epochs_max = 300;
  hp.patience = 300;
  hp.k = 1;
  TrainRun run = make_run(Mode::single_rank, Ranker::bpr, hp, split);
  fit(run, split);
  double best = 0.0;
  for (const auto& stat : run.epoch_log) best = std::max(best, stat.val_recall);
  CHECK(best == 1.0);
}

TEST_CASE("divergence is reported with its location") {
  const auto split = split_all_but_last(test::cluster_fixture(6), 12, 5);
  const TrainContext ctx = make_train_context(split);
  auto hp = toy_hp();
  TrainRun run = make_run(Mode::single_rate, Ranker::bpr, hp, split);
  run.store.user_factors.row(0).setConstant(1e308);
  run.store.item_factors.row(0).setConstant(1e308);
  try {
    for (int epoch = 1; epoch <= 3; ++epoch) train_epoch(run, split, ctx, epoch);
    FAIL("expected DivergenceError");
  } catch (const DivergenceError& e) {
    CHECK(std::string(e.what()).find("epoch") != std::string::npos);
  }
}

TEST_CASE("grid search covers the full product and picks the best cell") {
  const auto split = split_all_but_last(test::cluster_fixture(6), 12, 5);
  auto hp = toy_hp();
  hp.epochs_max = 3;
  const std::vector<double> alphas = {0.9, 0.95, 1.0};
  const std::vector<double> lambdas = {0.01, 0.001};

  const auto grid = grid_search(hp, alphas, lambdas, split, Mode::vanilla, Ranker::bpr, 1);
  CHECK(grid.cells.size() == 6);
  double best = -1.0;
  for (const auto& cell : grid.cells) best = std::max(best, cell.val_recall);
  CHECK(grid.best_val_recall == best);

  const auto rerun = grid_search(hp, alphas, lambdas, split, Mode::vanilla, Ranker::bpr, 1);
  CHECK(rerun.best_run.hp.alpha == grid.best_run.hp.alpha);
  CHECK(rerun.best_run.hp.lambda == grid.best_run.hp.lambda);
  CHECK(rerun.best_val_recall == grid.best_val_recall);

  const auto single = grid_search(hp, {0.9}, {0.01}, split, Mode::vanilla, Ranker::bpr, 1);
  CHECK(single.cells.size() == 1);
  CHECK(single.best_run.hp.alpha == 0.9);
  CHECK(single.best_run.hp.lambda == 0.01);

  CHECK_THROWS_AS(grid_search(hp, {}, lambdas, split, Mode::vanilla, Ranker::bpr, 1),
                  ConfigError);
}
