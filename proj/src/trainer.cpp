#include "rnr/trainer.hpp"

#include <atomic>
#include <cmath>
#include <mutex>
#include <thread>

#include "rnr/evaluator.hpp"
#include "rnr/rng.hpp"

namespace rnr {
namespace {

constexpr std::uint64_t kRankStream = 0x01;
constexpr std::uint64_t kRateStream = 0x02;

std::uint64_t stream_id(std::uint64_t tag, int epoch) {
  return (tag << 32) | static_cast<std::uint64_t>(epoch);
}

[[noreturn]] void report_divergence(int epoch, std::size_t sample, const char* branch) {
  throw DivergenceError("non-finite loss in epoch " + std::to_string(epoch) +
                        ", sample " + std::to_string(sample) + " (" + branch + ")");
}

/// Applies one branch sample: parameter updates use
///   weight * branch_gradient + weight * lambda * parameter
/// so the shared embeddings collect one full lambda per interaction across
/// both tasks and a zero-weight branch leaves every trajectory untouched.
class SampleApplier {
 public:
  SampleApplier(ParamStore& store, const Hyperparams& hp)
      : store_(store), step_{hp.lr, 1e-8}, lambda_(hp.lambda) {}

  void set_weight(double w) {
    weight_ = w;
    decay_ = w * lambda_;
  }

  double weight() const { return weight_; }

  template <typename Param, typename Acc, typename Grad>
  void apply(Param&& param, Acc&& acc, const Grad& grad) {
    penalty_ += param.squaredNorm();
    adagrad_apply(param, acc, (weight_ * grad + decay_ * param).eval(), step_);
  }

  void apply(double& param, double& acc, double grad) {
    penalty_ += param * param;
    adagrad_apply(param, acc, weight_ * grad + decay_ * param, step_);
  }

  /// Weighted sample objective: weight * (loss + lambda * ||touched params||^2).
  /// Penalties are collected at pre-update values as apply() runs.
  double finish_sample(double loss) {
    const double value = weight_ * (loss + lambda_ * penalty_);
    penalty_ = 0.0;
    return value;
  }

 private:
  ParamStore& store_;
  AdaGradStep step_;
  double lambda_;
  double weight_ = 1.0;
  double decay_ = 0.0;
  double penalty_ = 0.0;
};

class EpochRunner {
 public:
  EpochRunner(TrainRun& run, const SplitDataset& split, const TrainContext& ctx,
              int epoch)
      : run_(run),
        split_(split),
        ctx_(ctx),
        epoch_(epoch),
        applier_(run.store, run.hp) {}

  double operator()() {
    const double rank_w = run_.mode == Mode::single_rank   ? 1.0
                          : run_.mode == Mode::single_rate ? 0.0
                                                           : run_.hp.alpha;
    const double rate_w = run_.mode == Mode::single_rate   ? 1.0
                          : run_.mode == Mode::single_rank ? 0.0
                                                           : 1.0 - run_.hp.alpha;

    std::vector<std::size_t> rank_order;
    std::mt19937_64 rank_rng = make_rng(run_.hp.seed, stream_id(kRankStream, epoch_));
    if (rank_w > 0.0) {
      const std::size_t n = run_.ranker == Ranker::bpr
                                ? split_.train.size()
                                : static_cast<std::size_t>(run_.store.num_users());
      rank_order = shuffled_indices(n, rank_rng);
    }
    std::vector<std::size_t> rate_order;
    std::mt19937_64 rate_rng = make_rng(run_.hp.seed, stream_id(kRateStream, epoch_));
    if (rate_w > 0.0) {
      rate_order = shuffled_indices(split_.train.size(), rate_rng);
    }

    // Proportional round-robin merge keeps both tasks spread over the epoch.
    const std::size_t nr = rank_order.size();
    const std::size_t np = rate_order.size();
    std::size_t ir = 0, ip = 0;
    while (ir < nr || ip < np) {
      const bool take_rank =
          ip == np || (ir < nr && (ir + 1) * np <= (ip + 1) * nr);
      if (take_rank) {
        applier_.set_weight(rank_w);
        process_rank_sample(rank_order[ir], rank_rng);
        ++ir;
      } else {
        applier_.set_weight(rate_w);
        process_rate_sample(rate_order[ip]);
        ++ip;
      }
    }
    return objective_;
  }

 private:
  void process_rank_sample(std::size_t index, std::mt19937_64& rng) {
    if (run_.ranker == Ranker::bpr) {
      const auto& inter = split_.train[index];
      for (int n = 0; n < run_.hp.bpr_negatives_per_pos; ++n) {
        BprTriple triple{inter.user, inter.item,
                         sample_negative(ctx_.user_items[inter.user],
                                         run_.store.num_items(), rng)};
        apply_bpr(triple, index);
      }
    } else {
      const int u = static_cast<int>(index);
      const CdaeExample example = sample_cdae_example(
          u, ctx_.user_items[u], run_.hp, run_.store.num_items(), rng);
      apply_cdae(example, index);
    }
  }

  void apply_bpr(const BprTriple& triple, std::size_t index) {
    auto& s = run_.store;
    const BprTerms terms = bpr_terms(triple, s);
    if (!std::isfinite(terms.loss)) report_divergence(epoch_, index, "ranking");
    applier_.apply(s.user_factors.row(triple.u), s.acc.user_factors.row(triple.u),
                   terms.grad_user.transpose());
    applier_.apply(s.item_factors.row(triple.pos), s.acc.item_factors.row(triple.pos),
                   terms.grad_pos.transpose());
    applier_.apply(s.item_factors.row(triple.neg), s.acc.item_factors.row(triple.neg),
                   terms.grad_neg.transpose());
    applier_.apply(s.rank_item_bias(triple.pos), s.acc.rank_item_bias(triple.pos),
                   terms.grad_pos_bias);
    applier_.apply(s.rank_item_bias(triple.neg), s.acc.rank_item_bias(triple.neg),
                   terms.grad_neg_bias);
    objective_ += applier_.finish_sample(terms.loss);
  }

  void apply_cdae(const CdaeExample& example, std::size_t index) {
    auto& s = run_.store;
    const auto terms = cdae_terms(example, s, run_.hp);
    if (!terms) return;
    if (!std::isfinite(terms->loss)) report_divergence(epoch_, index, "ranking");
    for (const int item : example.corrupted) {
      applier_.apply(s.cdae_encoder.row(item), s.acc.cdae_encoder.row(item),
                     terms->grad_encoder_row.transpose());
    }
    applier_.apply(s.user_factors.row(example.u), s.acc.user_factors.row(example.u),
                   terms->grad_user.transpose());
    applier_.apply(s.cdae_hidden_bias, s.acc.cdae_hidden_bias, terms->grad_hidden_bias);
    for (std::size_t t = 0; t < terms->targets.size(); ++t) {
      const int item = terms->targets[t];
      applier_.apply(s.item_factors.row(item), s.acc.item_factors.row(item),
                     terms->grad_targets.row(t));
      applier_.apply(s.cdae_output_bias(item), s.acc.cdae_output_bias(item),
                     terms->grad_output_bias(t));
    }
    objective_ += applier_.finish_sample(terms->loss);
  }

  void process_rate_sample(std::size_t index) {
    const auto& inter = split_.train[index];
    const RatingExample ex{inter.user, inter.item, inter.rating};
    auto& s = run_.store;
    if (run_.mode == Mode::rnr) {
      const RnrRatingTerms terms = rnr_rating_terms(ex, s);
      if (!std::isfinite(terms.loss)) report_divergence(epoch_, index, "rating");
      applier_.apply(s.user_factors.row(ex.u), s.acc.user_factors.row(ex.u),
                     terms.grad_user.transpose());
      applier_.apply(s.item_factors.row(ex.i), s.acc.item_factors.row(ex.i),
                     terms.grad_item.transpose());
      applier_.apply(s.item_deviation.row(ex.i), s.acc.item_deviation.row(ex.i),
                     terms.grad_item_deviation.transpose());
      applier_.apply(s.fc.weight, s.acc.fc_weight, terms.grad_fc.weight);
      applier_.apply(s.fc.bias, s.acc.fc_bias, terms.grad_fc.bias);
      applier_.apply(s.user_bias(ex.u), s.acc.user_bias(ex.u), terms.grad_user_bias);
      applier_.apply(s.item_bias(ex.i), s.acc.item_bias(ex.i), terms.grad_item_bias);
      objective_ += applier_.finish_sample(terms.loss);
    } else {
      const SvdTerms terms = svd_terms(ex, s);
      if (!std::isfinite(terms.loss)) report_divergence(epoch_, index, "rating");
      applier_.apply(s.user_factors.row(ex.u), s.acc.user_factors.row(ex.u),
                     terms.grad_user.transpose());
      applier_.apply(s.item_factors.row(ex.i), s.acc.item_factors.row(ex.i),
                     terms.grad_item.transpose());
      applier_.apply(s.user_bias(ex.u), s.acc.user_bias(ex.u), terms.grad_user_bias);
      applier_.apply(s.item_bias(ex.i), s.acc.item_bias(ex.i), terms.grad_item_bias);
      objective_ += applier_.finish_sample(terms.loss);
    }
  }

  TrainRun& run_;
  const SplitDataset& split_;
  const TrainContext& ctx_;
  int epoch_;
  SampleApplier applier_;
  double objective_ = 0.0;
};

}  // namespace

Mode parse_mode(const std::string& name) {
  if (name == "single-rank") return Mode::single_rank;
  if (name == "single-rate") return Mode::single_rate;
  if (name == "vanilla") return Mode::vanilla;
  if (name == "rnr") return Mode::rnr;
  throw ConfigError("unknown mode '" + name + "'");
}

Ranker parse_ranker(const std::string& name) {
  if (name == "bpr") return Ranker::bpr;
  if (name == "cdae") return Ranker::cdae;
  throw ConfigError("unknown ranker '" + name + "'");
}

std::string to_string(Mode mode) {
  switch (mode) {
    case Mode::single_rank: return "single-rank";
    case Mode::single_rate: return "single-rate";
    case Mode::vanilla: return "vanilla";
    case Mode::rnr: return "rnr";
  }
  return "?";
}

std::string to_string(Ranker ranker) {
  return ranker == Ranker::bpr ? "bpr" : "cdae";
}

TrainContext make_train_context(const SplitDataset& split) {
  TrainContext ctx;
  ctx.user_items = items_by_user(split);
  double sum = 0.0;
  for (const auto& inter : split.train) sum += inter.rating;
  ctx.train_mean = split.train.empty() ? 0.0 : sum / static_cast<double>(split.train.size());
  return ctx;
}

TrainRun make_run(Mode mode, Ranker ranker, const Hyperparams& hp,
                  const SplitDataset& split) {
  TrainRun run;
  run.mode = mode;
  run.ranker = ranker;
  run.hp = hp;
  run.store = init_params(split.id_maps.num_users(), split.id_maps.num_items(), hp);
  return run;
}

double train_epoch(TrainRun& run, const SplitDataset& split, const TrainContext& ctx,
                   int epoch) {
  return EpochRunner(run, split, ctx, epoch)();
}

void fit(TrainRun& run, const SplitDataset& split, const EpochCallback& on_epoch) {
  validate(run.hp);
  if (split.train.empty()) throw ConfigError("fit: empty train set");
  if (split.validation.empty()) throw ConfigError("fit: empty validation set");

  const TrainContext ctx = make_train_context(split);
  run.store.global_mean = ctx.train_mean;
  const ScoreFn scorer = make_scorer(run, ctx.user_items);

  ParamStore best_store = run.store;
  EarlyStopper stopper(run.hp.patience);
  for (int epoch = 1; epoch <= run.hp.epochs_max; ++epoch) {
    const double objective = train_epoch(run, split, ctx, epoch);
    const double recall =
        evaluate(scorer, split, ctx.user_items, Half::validation, run.hp.k).recall_at_k;
    run.epoch_log.push_back({epoch, objective, recall});
    if (on_epoch) on_epoch(run.epoch_log.back());
    const bool improved = recall > stopper.best();
    const bool stop = stopper.update(epoch, recall);
    if (improved) best_store = run.store;
    if (stop) break;
  }
  run.store = std::move(best_store);
  run.best_epoch = stopper.best_epoch();
}

GridResult grid_search(const Hyperparams& base, const std::vector<double>& alphas,
                       const std::vector<double>& lambdas, const SplitDataset& split,
                       Mode mode, Ranker ranker, std::size_t workers,
                       const CellCallback& on_cell) {
  if (alphas.empty() || lambdas.empty()) {
    throw ConfigError("grid_search: empty alpha or lambda grid");
  }
  struct Cell {
    Hyperparams hp;
    TrainRun run;
    bool diverged = false;
    std::exception_ptr error;
  };
  std::vector<Cell> cells;
  for (const double alpha : alphas) {
    for (const double lambda : lambdas) {
      Hyperparams hp = base;
      hp.alpha = alpha;
      hp.lambda = lambda;
      cells.push_back({hp, {}, false, nullptr});
    }
  }

  std::mutex report_mutex;
  std::atomic<std::size_t> next{0};
  auto work = [&]() {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= cells.size()) return;
      Cell& cell = cells[i];
      try {
        cell.run = make_run(mode, ranker, cell.hp, split);
        fit(cell.run, split);
      } catch (const DivergenceError&) {
        cell.diverged = true;
      } catch (...) {
        cell.error = std::current_exception();
      }
      if (on_cell && !cell.error) {
        GridCellResult done{cell.hp.alpha, cell.hp.lambda, 0.0, cell.run.best_epoch,
                            cell.diverged};
        if (!cell.diverged && !cell.run.epoch_log.empty()) {
          done.val_recall = cell.run.epoch_log[cell.run.best_epoch - 1].val_recall;
        }
        const std::lock_guard<std::mutex> lock(report_mutex);
        on_cell(done);
      }
    }
  };
  const std::size_t n_workers = std::min<std::size_t>(std::max<std::size_t>(workers, 1),
                                                      cells.size());
  if (n_workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < n_workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  for (const Cell& cell : cells) {
    if (cell.error) std::rethrow_exception(cell.error);
  }

  GridResult result;
  const Cell* best = nullptr;
  double best_recall = 0.0;
  for (const Cell& cell : cells) {
    GridCellResult record{cell.hp.alpha, cell.hp.lambda, 0.0, 0, cell.diverged};
    if (!cell.diverged) {
      record.val_recall = cell.run.epoch_log.empty()
                              ? 0.0
                              : cell.run.epoch_log[cell.run.best_epoch - 1].val_recall;
      record.best_epoch = cell.run.best_epoch;
      const bool better =
          best == nullptr || record.val_recall > best_recall ||
          (record.val_recall == best_recall &&
           (cell.hp.lambda < best->hp.lambda ||
            (cell.hp.lambda == best->hp.lambda && cell.hp.alpha > best->hp.alpha)));
      if (better) {
        best = &cell;
        best_recall = record.val_recall;
      }
    }
    result.cells.push_back(record);
  }
  if (best == nullptr) throw DivergenceError("grid_search: every cell diverged");
  result.best_run = best->run;
  result.best_val_recall = best_recall;
  return result;
}

}  // namespace rnr
