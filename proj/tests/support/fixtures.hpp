#pragma once

#include <string>
#include <vector>

#include "rnr/data.hpp"
#include "rnr/synthetic.hpp"

namespace rnr::test {

inline rnr::Interaction event(int user, int item, double rating, long long ts) {
  return {std::to_string(user), std::to_string(item), rating, ts};
}

/// Two disjoint item clusters {0,1,2} and {3,4,5}; each user consumes their
/// cluster's three items in a rotated order. Holding out every user's last
/// interaction leaves a hidden item that is absent from that user's train
/// rows but present in the train rows of peers, so a model that learns the
/// cluster structure can reach Recall@1 = 1.
inline std::vector<rnr::Interaction> cluster_fixture(int users_per_cluster = 6) {
  std::vector<rnr::Interaction> log;
  for (int u = 0; u < 2 * users_per_cluster; ++u) {
    const int base = (u % 2) * 3;
    const int rotation = (u / 2) % 3;
    for (int step = 0; step < 3; ++step) {
      const int item = base + (rotation + step) % 3;
      const double rating = ((u + item) % 2 == 0) ? 4.0 : 5.0;
      log.push_back(event(u, item, rating, 10 * (step + 1)));
    }
  }
  return log;
}

/// 100-user clustered split used by the integration and acceptance suites.
inline rnr::SplitDataset fixture_split_100(std::size_t n_holdout = 40,
                                           std::uint64_t seed = 7) {
  rnr::SynthConfig config;
  config.users = 100;
  config.items = 40;
  config.events_per_user = 30;
  config.clusters = 2;
  config.seed = 7;
  return rnr::split_all_but_last(rnr::synthetic_log(config), n_holdout, seed);
}

}  // namespace rnr::test
