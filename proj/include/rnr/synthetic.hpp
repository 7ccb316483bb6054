#pragma once

#include <cstdint>
#include <vector>

#include "rnr/data.hpp"

namespace rnr {

/// Deterministic clustered rating log for demos and integration tests.
/// Users and items split into `clusters` groups; users mostly consume (and
/// rate highly) items of their own group, with a popularity-skewed head.
struct SynthConfig {
  int users = 100;
  int items = 40;
  int events_per_user = 30;
  int clusters = 2;
  double in_cluster_prob = 0.8;
  std::uint64_t seed = 7;
};

std::vector<Interaction> synthetic_log(const SynthConfig& config);

}  // namespace rnr
