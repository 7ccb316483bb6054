#pragma once

#include <optional>
#include <random>
#include <vector>

#include "rnr/data.hpp"
#include "rnr/params.hpp"
#include "rnr/types.hpp"

namespace rnr {

/// Observed item i preferred over unobserved item j for user u.
struct BprTriple {
  int u = -1;
  int pos = -1;
  int neg = -1;
};

/// One denoising-autoencoder training example. `corrupted` is the subset of
/// observed items that survived input dropout; targets are the observed items
/// (label 1) plus sampled negatives (label 0).
struct CdaeExample {
  int u = -1;
  std::vector<int> observed;   // sorted unique train items of u
  std::vector<int> corrupted;  // subset of observed kept as input
  std::vector<int> negatives;  // sampled outside observed, repeats possible
};

/// Uniform over the items u has not interacted with. `train_items` must be
/// sorted. Throws SamplingError when no candidate exists.
int sample_negative(const std::vector<int>& train_items, int num_items,
                    std::mt19937_64& rng);

struct BprTerms {
  double loss = 0.0;
  double margin = 0.0;  // score(u, pos) - score(u, neg)
  Vector grad_user;
  Vector grad_pos;
  Vector grad_neg;
  double grad_pos_bias = 0.0;
  double grad_neg_bias = 0.0;
};

/// -log sigmoid(margin) and its exact gradients.
BprTerms bpr_terms(const BprTriple& triple, const ParamStore& store);

struct CdaeTerms {
  double loss = 0.0;
  Vector grad_user;
  Vector grad_hidden_bias;
  Vector grad_encoder_row;    // identical for every corrupted input row
  std::vector<int> targets;   // unique target items
  Matrix grad_targets;        // one row per unique target (shared item factors)
  Vector grad_output_bias;    // aligned with `targets`
};

/// Corrupted forward pass plus per-target logistic losses. Duplicate sampled
/// negatives are folded into a single accumulated gradient row. Returns
/// nullopt when the example has no observed items.
std::optional<CdaeTerms> cdae_terms(const CdaeExample& example, const ParamStore& store,
                                    const Hyperparams& hp);

/// Builds the per-epoch example for one user: inverted-dropout corruption of
/// the observed set and hp.cdae_negatives sampled negatives per positive.
CdaeExample sample_cdae_example(int u, const std::vector<int>& observed,
                                const Hyperparams& hp, int num_items,
                                std::mt19937_64& rng);

/// Items sorted by train frequency descending, ties by ascending id,
/// truncated to k.
std::vector<int> popularity_rank(const std::vector<DenseInteraction>& train, int k);

/// Raw train frequency per dense item id.
std::vector<std::int64_t> popularity_counts(const std::vector<DenseInteraction>& train,
                                            int num_items);

}  // namespace rnr
