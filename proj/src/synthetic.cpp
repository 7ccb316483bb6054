#include "rnr/synthetic.hpp"

#include <cmath>
#include <unordered_set>

#include "rnr/errors.hpp"
#include "rnr/rng.hpp"

namespace rnr {

std::vector<Interaction> synthetic_log(const SynthConfig& config) {
  if (config.users < 1 || config.items < config.clusters || config.clusters < 1 ||
      config.events_per_user < 1) {
    throw ConfigError("synthetic_log: invalid shape");
  }
  auto rng = make_rng(config.seed, /*stream=*/0x5f17ULL);
  const auto unit = [&rng] {
    return static_cast<double>(rng() >> 11) * (1.0 / 9007199254740992.0);
  };

  std::vector<Interaction> log;
  log.reserve(static_cast<std::size_t>(config.users) * config.events_per_user);
  for (int u = 0; u < config.users; ++u) {
    const int cluster = u % config.clusters;
    std::unordered_set<int> seen;
    std::int64_t timestamp = static_cast<std::int64_t>(u) * 100000;
    for (int e = 0; e < config.events_per_user; ++e) {
      const bool in_cluster = unit() < config.in_cluster_prob;
      const int group = in_cluster ? cluster : static_cast<int>(bounded(rng, config.clusters));
      const int group_size = (config.items - group + config.clusters - 1) / config.clusters;
      int item = 0;
      for (int attempt = 0; attempt < 16; ++attempt) {
        // Quadratic skew gives every group a popular head.
        const int slot = static_cast<int>(std::floor(unit() * unit() * group_size));
        item = group + std::min(slot, group_size - 1) * config.clusters;
        if (!seen.count(item)) break;
      }
      if (seen.count(item)) continue;
      seen.insert(item);
      const double rating =
          (group == cluster) ? (unit() < 0.5 ? 4.0 : 5.0) : 1.0 + std::floor(unit() * 3.0);
      timestamp += 1 + static_cast<std::int64_t>(bounded(rng, 50));
      log.push_back({std::to_string(u), std::to_string(item), rating, timestamp});
    }
  }
  return log;
}

}  // namespace rnr
