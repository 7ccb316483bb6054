#pragma once

#include <functional>
#include <string>
#include <vector>

#include "rnr/adagrad.hpp"
#include "rnr/data.hpp"
#include "rnr/params.hpp"
#include "rnr/rankers.hpp"
#include "rnr/rater.hpp"

namespace rnr {

enum class Mode { single_rank, single_rate, vanilla, rnr };
enum class Ranker { bpr, cdae };

Mode parse_mode(const std::string& name);
Ranker parse_ranker(const std::string& name);
std::string to_string(Mode mode);
std::string to_string(Ranker ranker);

struct EpochStat {
  int epoch = 0;
  double objective = 0.0;
  double val_recall = 0.0;
};

struct TrainRun {
  Mode mode = Mode::single_rank;
  Ranker ranker = Ranker::bpr;
  Hyperparams hp;
  ParamStore store;
  std::vector<EpochStat> epoch_log;
  int best_epoch = 0;
};

/// Split-derived state that stays fixed across epochs.
struct TrainContext {
  std::vector<std::vector<int>> user_items;  // sorted unique train items per user
  double train_mean = 0.0;
};

TrainContext make_train_context(const SplitDataset& split);

TrainRun make_run(Mode mode, Ranker ranker, const Hyperparams& hp,
                  const SplitDataset& split);

/// One pass over the interleaved ranking and rating streams. Returns the
/// accumulated weighted objective including the regularization penalty on
/// the parameters each sample touches. Zero-weight streams are skipped so a
/// degenerate task weight reproduces the single-task run exactly.
double train_epoch(TrainRun& run, const SplitDataset& split, const TrainContext& ctx,
                   int epoch);

/// Tracks the best validation score; update() returns true when training
/// should stop after the given epoch.
struct EarlyStopper {
  explicit EarlyStopper(int patience) : patience_(patience) {}

  bool update(int epoch, double score) {
    if (score > best_) {
      best_ = score;
      best_epoch_ = epoch;
      since_best_ = 0;
      return false;
    }
    return ++since_best_ >= patience_;
  }

  double best() const { return best_; }
  int best_epoch() const { return best_epoch_; }

 private:
  int patience_;
  double best_ = -1.0;
  int best_epoch_ = 0;
  int since_best_ = 0;
};

using EpochCallback = std::function<void(const EpochStat&)>;

/// Trains up to hp.epochs_max epochs with early stopping on validation
/// recall@k; leaves the best-epoch parameter snapshot in run.store.
void fit(TrainRun& run, const SplitDataset& split, const EpochCallback& on_epoch = {});

struct GridCellResult {
  double alpha = 0.0;
  double lambda = 0.0;
  double val_recall = 0.0;
  int best_epoch = 0;
  bool diverged = false;
};

struct GridResult {
  TrainRun best_run;
  double best_val_recall = 0.0;
  std::vector<GridCellResult> cells;
};

using CellCallback = std::function<void(const GridCellResult&)>;

/// Trains every (alpha, lambda) combination and returns the configuration
/// with the highest validation recall@k; ties prefer smaller lambda, then
/// larger alpha. Cells run independently on up to `workers` threads;
/// on_cell fires as each one finishes (serialized).
GridResult grid_search(const Hyperparams& base, const std::vector<double>& alphas,
                       const std::vector<double>& lambdas, const SplitDataset& split,
                       Mode mode, Ranker ranker, std::size_t workers = 1,
                       const CellCallback& on_cell = {});

}  // namespace rnr
