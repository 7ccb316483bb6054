#include "rnr/experiment.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>

#include <json.hpp>

#include "rnr/checkpoint.hpp"
#include "rnr/data.hpp"
#include "rnr/errors.hpp"
#include "rnr/trainer.hpp"

namespace rnr {
namespace {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

struct ExperimentResult {
  EvalReport report;
  std::string label;
  std::optional<TrainRun> run;  // absent for popularity
  std::vector<GridCellResult> grid_cells;
  std::size_t malformed_lines = 0;
  int num_users = 0;
  int num_items = 0;
  std::size_t train_size = 0;
  std::size_t validation_size = 0;
  std::size_t test_size = 0;
  double wall_seconds = 0.0;
};

void validate_config(const ExperimentConfig& cfg) {
  if (cfg.data.empty()) throw ConfigError("missing data path");
  if (cfg.format != "movielens-dat" && cfg.format != "delimited") {
    throw ConfigError("unknown format '" + cfg.format + "'");
  }
  if (cfg.format == "delimited" && cfg.delimiter.size() != 1) {
    throw ConfigError("delimiter must be a single character");
  }
  if (cfg.min_interactions < 1) throw ConfigError("min-interactions must be >= 1");
  if (cfg.n_holdout < 1) throw ConfigError("holdout must be >= 1");
  if (cfg.mode != "popularity") {
    parse_mode(cfg.mode);  // throws on anything unknown
    parse_ranker(cfg.ranker);
  }
  validate(cfg.hp);
  if (cfg.out.empty()) throw ConfigError("missing output directory");
}

ExperimentResult execute(const ExperimentConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  ExperimentResult result;

  std::ifstream stream(cfg.data);
  if (!stream) throw DataError("cannot open data file '" + cfg.data + "'");
  const LogFormat format = cfg.format == "movielens-dat" ? LogFormat::movielens_dat
                                                         : LogFormat::delimited;
  ParseResult parsed = parse_interactions(stream, format, cfg.delimiter);
  result.malformed_lines = parsed.malformed_count;
  if (!cfg.quiet && parsed.malformed_count > 0) {
    std::fprintf(stderr, "warning: %zu malformed lines skipped\n", parsed.malformed_count);
  }

  const auto filtered = filter_min_interactions(parsed.interactions, cfg.min_interactions);
  const SplitDataset split =
      split_all_but_last(filtered, static_cast<std::size_t>(cfg.n_holdout), cfg.hp.seed);
  result.num_users = split.id_maps.num_users();
  result.num_items = split.id_maps.num_items();
  result.train_size = split.train.size();
  result.validation_size = split.validation.size();
  result.test_size = split.test.size();

  const auto user_items = items_by_user(split);
  if (cfg.mode == "popularity") {
    result.label = "Popularity";
    result.report = evaluate(make_popularity_scorer(split), split, user_items, Half::test,
                             cfg.hp.k, result.label);
  } else {
    const Mode mode = parse_mode(cfg.mode);
    const Ranker ranker = parse_ranker(cfg.ranker);
    result.label = model_label(mode, ranker);

    const bool single_task = mode == Mode::single_rank || mode == Mode::single_rate;
    std::vector<double> alphas = cfg.grid_alpha;
    std::vector<double> lambdas = cfg.grid_lambda;
    if (alphas.empty()) alphas = {cfg.hp.alpha};
    if (lambdas.empty()) lambdas = {cfg.hp.lambda};
    if (single_task && alphas.size() > 1) alphas = {cfg.hp.alpha};  // alpha has no effect

    if (alphas.size() * lambdas.size() > 1) {
      const CellCallback on_cell = cfg.quiet ? CellCallback{} : [](const GridCellResult& cell) {
        std::fprintf(stderr, "[grid] alpha=%.3g lambda=%.3g -> val recall %.4f (best epoch %d%s)\n",
                     cell.alpha, cell.lambda, cell.val_recall, cell.best_epoch,
                     cell.diverged ? ", diverged" : "");
      };
      GridResult grid =
          grid_search(cfg.hp, alphas, lambdas, split, mode, ranker, cfg.threads, on_cell);
      result.grid_cells = grid.cells;
      result.run = std::move(grid.best_run);
    } else {
      Hyperparams hp = cfg.hp;
      hp.alpha = alphas.front();
      hp.lambda = lambdas.front();
      TrainRun run = make_run(mode, ranker, hp, split);
      const EpochCallback on_epoch = cfg.quiet ? EpochCallback{} : [](const EpochStat& stat) {
        std::fprintf(stderr, "[epoch %d] objective %.6g, val recall %.4f\n", stat.epoch,
                     stat.objective, stat.val_recall);
      };
      fit(run, split, on_epoch);
      result.run = std::move(run);
    }
    result.report = evaluate(make_scorer(*result.run, user_items), split, user_items,
                             Half::test, cfg.hp.k, result.label);
  }

  result.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

ordered_json report_json(const ExperimentConfig& cfg, const ExperimentResult& result) {
  ordered_json doc;
  doc["model"] = result.label;
  doc["dataset"] = cfg.data;
  doc["format"] = cfg.format;
  doc["mode"] = cfg.mode;
  if (cfg.mode != "popularity" && cfg.mode != "single-rate") doc["ranker"] = cfg.ranker;
  doc["min_interactions"] = cfg.min_interactions;
  doc["n_holdout"] = cfg.n_holdout;
  doc["seed"] = cfg.hp.seed;
  doc["data_stats"] = {{"users", result.num_users},
                       {"items", result.num_items},
                       {"train", result.train_size},
                       {"validation", result.validation_size},
                       {"test", result.test_size},
                       {"malformed_lines", result.malformed_lines}};
  if (result.run) {
    const TrainRun& run = *result.run;
    doc["hyperparams"] = {{"alpha", run.hp.alpha},
                          {"lambda", run.hp.lambda},
                          {"lr", run.hp.lr},
                          {"dim", run.hp.dim},
                          {"k", run.hp.k},
                          {"epochs_max", run.hp.epochs_max},
                          {"patience", run.hp.patience},
                          {"cdae_corruption", run.hp.cdae_corruption},
                          {"cdae_negatives", run.hp.cdae_negatives},
                          {"bpr_negatives_per_pos", run.hp.bpr_negatives_per_pos}};
    doc["training"] = {{"epochs_trained", run.epoch_log.size()},
                       {"best_epoch", run.best_epoch},
                       {"val_recall_at_best",
                        run.best_epoch > 0 ? run.epoch_log[run.best_epoch - 1].val_recall
                                           : 0.0}};
    if (!result.grid_cells.empty()) {
      ordered_json cells = ordered_json::array();
      for (const auto& cell : result.grid_cells) {
        cells.push_back({{"alpha", cell.alpha},
                         {"lambda", cell.lambda},
                         {"val_recall", cell.val_recall},
                         {"best_epoch", cell.best_epoch},
                         {"diverged", cell.diverged}});
      }
      doc["grid"] = std::move(cells);
    }
  }
  doc["metrics"] = {{"k", result.report.k},
                    {"recall_at_k", result.report.recall_at_k},
                    {"mrr_at_k", result.report.mrr_at_k},
                    {"users_evaluated", result.report.users_evaluated},
                    {"users_skipped", result.report.users_skipped}};
  return doc;
}

void write_artifacts(const ExperimentConfig& cfg, const ExperimentResult& result) {
  const fs::path out_dir(cfg.out);
  fs::create_directories(out_dir);

  {
    std::ofstream out(out_dir / "report.json", std::ios::trunc);
    if (!out) throw DataError("cannot write report.json under '" + cfg.out + "'");
    out << report_json(cfg, result).dump(2) << '\n';
  }

  if (result.run) {
    const TrainRun& run = *result.run;
    {
      std::ofstream out(out_dir / "epoch_log.csv", std::ios::trunc);
      out << "epoch,objective,val_recall\n";
      char line[96];
      for (const auto& stat : run.epoch_log) {
        std::snprintf(line, sizeof(line), "%d,%.17g,%.17g\n", stat.epoch, stat.objective,
                      stat.val_recall);
        out << line;
      }
    }
    save_checkpoint(run.store, run.mode, run.ranker, (out_dir / "model.rnr").string());
  }

  const fs::path summary = out_dir / "summary.csv";
  const bool fresh = !fs::exists(summary);
  std::ofstream out(summary, std::ios::app);
  if (fresh) out << "model,dataset,alpha,lambda,seed,recall_at_k,mrr_at_k,epochs,wall_s\n";
  const double alpha = result.run ? result.run->hp.alpha : 0.0;
  const double lambda = result.run ? result.run->hp.lambda : 0.0;
  const std::size_t epochs = result.run ? result.run->epoch_log.size() : 0;
  char line[256];
  std::snprintf(line, sizeof(line), "%s,%s,%g,%g,%llu,%.6f,%.6f,%zu,%.1f\n",
                result.label.c_str(), cfg.data.c_str(), alpha, lambda,
                static_cast<unsigned long long>(cfg.hp.seed), result.report.recall_at_k,
                result.report.mrr_at_k, epochs, result.wall_seconds);
  out << line;
}

}  // namespace

EvalReport run_experiment(const ExperimentConfig& cfg) {
  validate_config(cfg);
  const ExperimentResult result = execute(cfg);
  write_artifacts(cfg, result);
  if (!cfg.quiet) {
    std::printf("%-18s Recall@%d %.4f  MRR@%d %.4f  (evaluated %zu, skipped %zu)\n",
                result.label.c_str(), result.report.k, result.report.recall_at_k,
                result.report.k, result.report.mrr_at_k, result.report.users_evaluated,
                result.report.users_skipped);
  }
  return result.report;
}

}  // namespace rnr
