#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rnr/evaluator.hpp"
#include "rnr/params.hpp"

namespace rnr {

/// Everything one experiment needs. Loadable from a flat key=value file with
/// same-named command-line flags taking precedence (wiring lives in the CLI).
struct ExperimentConfig {
  std::string data;
  std::string format = "movielens-dat";  // movielens-dat | delimited
  std::string delimiter = ",";
  int min_interactions = 4;
  std::int64_t n_holdout = 0;
  std::string mode;            // popularity | single-rank | single-rate | vanilla | rnr
  std::string ranker = "bpr";  // bpr | cdae
  Hyperparams hp;
  std::vector<double> grid_alpha;   // empty: no grid, use hp.alpha
  std::vector<double> grid_lambda;  // empty: no grid, use hp.lambda
  std::string out = "rnr-out";
  std::size_t threads = 1;
  bool quiet = false;
};

/// Validates, then: parse -> filter -> split -> (grid) train -> evaluate the
/// validation-selected model on test. Writes report.json, epoch_log.csv, a
/// checkpoint, and appends a summary.csv row under config.out; prints one
/// result row. No file is written before all stages succeed.
EvalReport run_experiment(const ExperimentConfig& config);

}  // namespace rnr
