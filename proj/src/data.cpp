#include "rnr/data.hpp"

#include <algorithm>
#include <cstdlib>
#include <string_view>

#include "rnr/errors.hpp"
#include "rnr/rng.hpp"

namespace rnr {
namespace {

bool parse_double(std::string_view token, double& out) {
  if (token.empty()) return false;
  char* end = nullptr;
  const std::string buf(token);
  out = std::strtod(buf.c_str(), &end);
  return end == buf.c_str() + buf.size();
}

bool parse_i64(std::string_view token, std::int64_t& out) {
  if (token.empty()) return false;
  char* end = nullptr;
  const std::string buf(token);
  out = std::strtoll(buf.c_str(), &end, 10);
  return end == buf.c_str() + buf.size();
}

std::vector<std::string_view> split_fields(std::string_view line, std::string_view sep) {
  std::vector<std::string_view> fields;
  std::size_t pos = 0;
  while (true) {
    const std::size_t next = line.find(sep, pos);
    if (next == std::string_view::npos) {
      fields.push_back(line.substr(pos));
      break;
    }
    fields.push_back(line.substr(pos, next - pos));
    pos = next + sep.size();
  }
  return fields;
}

bool parse_line(std::string_view line, std::string_view sep, Interaction& out) {
  const auto fields = split_fields(line, sep);
  if (fields.size() != 4) return false;
  double rating = 0.0;
  std::int64_t ts = 0;
  if (!parse_double(fields[2], rating) || !parse_i64(fields[3], ts)) return false;
  if (rating < 1.0 || rating > 5.0 || ts < 0) return false;
  if (fields[0].empty() || fields[1].empty()) return false;
  out.user = std::string(fields[0]);
  out.item = std::string(fields[1]);
  out.rating = rating;
  out.timestamp = ts;
  return true;
}

}  // namespace

ParseResult parse_interactions(std::istream& source, LogFormat format,
                               const std::string& delimiter) {
  if (source.fail()) throw DataError("parse_interactions: unreadable source stream");
  const std::string sep = format == LogFormat::movielens_dat ? "::" : delimiter;
  if (sep.empty()) throw ConfigError("parse_interactions: empty delimiter");

  ParseResult result;
  std::string line;
  bool first_line = true;
  while (std::getline(source, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const bool is_first = first_line;
    first_line = false;
    Interaction inter;
    if (parse_line(line, sep, inter)) {
      result.interactions.push_back(std::move(inter));
      continue;
    }
    if (is_first && format == LogFormat::delimited) {
      // Optional header row: skipped when its first field is non-numeric.
      const auto fields = split_fields(line, sep);
      double probe = 0.0;
      if (!fields.empty() && !parse_double(fields[0], probe)) continue;
    }
    ++result.malformed_count;
  }
  if (result.interactions.empty()) {
    throw DataError("parse_interactions: no well-formed lines in input");
  }
  return result;
}

std::vector<Interaction> filter_min_interactions(const std::vector<Interaction>& log,
                                                 int min_count) {
  if (min_count < 1) throw ConfigError("filter_min_interactions: min_count must be >= 1");
  std::unordered_map<std::string, std::size_t> counts;
  counts.reserve(log.size());
  for (const auto& inter : log) ++counts[inter.user];

  std::vector<Interaction> kept;
  kept.reserve(log.size());
  for (const auto& inter : log) {
    if (counts[inter.user] >= static_cast<std::size_t>(min_count)) kept.push_back(inter);
  }
  return kept;
}

SplitDataset split_all_but_last(const std::vector<Interaction>& log,
                                std::size_t n_holdout, std::uint64_t seed) {
  // Group positions per user in first-appearance order.
  std::unordered_map<std::string, std::size_t> user_slot;
  std::vector<std::vector<std::size_t>> positions;  // file-order indices per user
  std::vector<std::string> users;
  for (std::size_t i = 0; i < log.size(); ++i) {
    auto [it, inserted] = user_slot.try_emplace(log[i].user, positions.size());
    if (inserted) {
      positions.emplace_back();
      users.push_back(log[i].user);
    }
    positions[it->second].push_back(i);
  }

  std::vector<std::size_t> eligible;
  for (std::size_t u = 0; u < positions.size(); ++u) {
    if (positions[u].size() >= 2) eligible.push_back(u);
  }
  if (n_holdout > eligible.size()) {
    throw ConfigError("split_all_but_last: n_holdout " + std::to_string(n_holdout) +
                      " exceeds " + std::to_string(eligible.size()) +
                      " users with >= 2 interactions");
  }

  // Partial Fisher-Yates; the prefix order is the selection order.
  auto rng = make_rng(seed, /*stream=*/0x5eedULL);
  for (std::size_t t = 0; t < n_holdout; ++t) {
    std::swap(eligible[t], eligible[t + bounded(rng, eligible.size() - t)]);
  }

  // Chronologically last interaction per selected user; on timestamp ties the
  // later line wins.
  std::vector<char> held_out(log.size(), 0);
  std::vector<std::size_t> held_positions(n_holdout);
  for (std::size_t t = 0; t < n_holdout; ++t) {
    const auto& pos = positions[eligible[t]];
    std::size_t best = pos.front();
    for (const std::size_t p : pos) {
      if (log[p].timestamp >= log[best].timestamp) best = p;
    }
    held_out[best] = 1;
    held_positions[t] = best;
  }

  SplitDataset split;
  split.n_holdout = n_holdout;
  auto& maps = split.id_maps;
  for (std::size_t i = 0; i < log.size(); ++i) {
    if (held_out[i]) continue;
    const auto& inter = log[i];
    const int u = maps.user_map.try_emplace(inter.user, maps.num_users()).first->second;
    const int m = maps.item_map.try_emplace(inter.item, maps.num_items()).first->second;
    split.train.push_back({u, m, inter.rating, inter.timestamp});
  }

  for (std::size_t t = 0; t < n_holdout; ++t) {
    const auto& inter = log[held_positions[t]];
    DenseInteraction dense;
    dense.user = maps.user_map.at(inter.user);  // >= 1 interaction always remains
    const auto item_it = maps.item_map.find(inter.item);
    dense.item = item_it == maps.item_map.end() ? kInvalidId : item_it->second;
    dense.rating = inter.rating;
    dense.timestamp = inter.timestamp;
    (t % 2 == 0 ? split.validation : split.test).push_back(dense);
  }
  return split;
}

std::vector<std::vector<int>> items_by_user(const SplitDataset& split) {
  std::vector<std::vector<int>> items(split.id_maps.num_users());
  for (const auto& inter : split.train) items[inter.user].push_back(inter.item);
  for (auto& list : items) {
    std::sort(list.begin(), list.end());
    list.erase(std::unique(list.begin(), list.end()), list.end());
  }
  return items;
}

}  // namespace rnr
