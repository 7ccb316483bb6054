#include <cstdio>
#include <exception>

#include <CLI11.hpp>

#include "rnr/errors.hpp"
#include "rnr/experiment.hpp"

namespace {

// Exit codes: 0 success, 2 configuration error, 3 data error, 4 divergence.
constexpr int kConfigExit = 2;
constexpr int kDataExit = 3;
constexpr int kDivergenceExit = 4;

}  // namespace

int main(int argc, char** argv) {
  rnr::ExperimentConfig cfg;

  CLI::App app{"Multi-task recommender training and evaluation"};
  app.set_config("--config", "", "flat key=value experiment file; flags override it");
  app.add_option("--data", cfg.data, "path to the rating log")->required();
  app.add_option("--format", cfg.format, "movielens-dat | delimited")
      ->check(CLI::IsMember({"movielens-dat", "delimited"}));
  app.add_option("--delimiter", cfg.delimiter, "single-character field separator");
  app.add_option("--min-interactions", cfg.min_interactions,
                 "drop users with fewer interactions (default 4)");
  app.add_option("--holdout", cfg.n_holdout, "number of hold-out users")->required();
  app.add_option("--mode", cfg.mode,
                 "popularity | single-rank | single-rate | vanilla | rnr")
      ->required()
      ->check(CLI::IsMember({"popularity", "single-rank", "single-rate", "vanilla", "rnr"}));
  app.add_option("--ranker", cfg.ranker, "bpr | cdae")
      ->check(CLI::IsMember({"bpr", "cdae"}));
  app.add_option("--alpha", cfg.hp.alpha, "ranking-task weight");
  app.add_option("--lambda", cfg.hp.lambda, "L2 regularization");
  app.add_option("--lr", cfg.hp.lr, "AdaGrad learning rate");
  app.add_option("--dim", cfg.hp.dim, "embedding size");
  app.add_option("--k", cfg.hp.k, "metric cutoff");
  app.add_option("--epochs-max", cfg.hp.epochs_max, "epoch cap");
  app.add_option("--patience", cfg.hp.patience, "early-stopping patience");
  app.add_option("--seed", cfg.hp.seed, "RNG seed");
  app.add_option("--cdae-corruption", cfg.hp.cdae_corruption, "input dropout ratio");
  app.add_option("--cdae-negatives", cfg.hp.cdae_negatives, "negatives per positive");
  app.add_option("--bpr-negatives-per-pos", cfg.hp.bpr_negatives_per_pos,
                 "negatives per interaction");
  app.add_option("--grid-alpha", cfg.grid_alpha, "comma-separated alpha grid")
      ->delimiter(',');
  app.add_option("--grid-lambda", cfg.grid_lambda, "comma-separated lambda grid")
      ->delimiter(',');
  app.add_option("--out", cfg.out, "output directory");
  app.add_option("--threads", cfg.threads, "worker threads for grid cells");
  app.add_flag("--quiet", cfg.quiet, "suppress progress output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfigExit;
  }

  try {
    rnr::run_experiment(cfg);
    return 0;
  } catch (const rnr::ConfigError& e) {
    std::fprintf(stderr, "configuration error: %s\n", e.what());
    return kConfigExit;
  } catch (const rnr::DivergenceError& e) {
    std::fprintf(stderr, "divergence: %s\n", e.what());
    return kDivergenceExit;
  } catch (const rnr::DataError& e) {
    std::fprintf(stderr, "data error: %s\n", e.what());
    return kDataExit;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
