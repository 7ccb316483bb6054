#pragma once

#include <cstdint>
#include <istream>
#include <string>
#include <unordered_map>
#include <vector>

namespace rnr {

/// One (user, item, rating, timestamp) event with external (raw) ids.
struct Interaction {
  std::string user;
  std::string item;
  double rating = 0.0;       // explicit rating, 1-5 scale
  std::int64_t timestamp = 0;  // seconds since epoch
};

/// Same event after dense remapping. `item` is kInvalidId when the held-out
/// item never appears in train and therefore has no dense id.
struct DenseInteraction {
  int user = -1;
  int item = -1;
  double rating = 0.0;
  std::int64_t timestamp = 0;
};

inline constexpr int kInvalidId = -1;

struct IdMaps {
  std::unordered_map<std::string, int> user_map;  // external -> 0..N-1
  std::unordered_map<std::string, int> item_map;  // external -> 0..M-1

  int num_users() const { return static_cast<int>(user_map.size()); }
  int num_items() const { return static_cast<int>(item_map.size()); }
};

/// Train/validation/test partition over densely remapped ids. Validation and
/// test hold exactly one interaction per selected user; dense ids are built
/// from the train set only.
struct SplitDataset {
  std::vector<DenseInteraction> train;
  std::vector<DenseInteraction> validation;
  std::vector<DenseInteraction> test;
  IdMaps id_maps;
  std::size_t n_holdout = 0;
};

enum class LogFormat { movielens_dat, delimited };

struct ParseResult {
  std::vector<Interaction> interactions;
  std::size_t malformed_count = 0;
};

/// Reads a line-oriented rating log. movielens_dat lines look like
/// `user::item::rating::timestamp`; delimited uses a single-character
/// separator with the same four columns and skips one leading header row
/// when its first field is non-numeric. Malformed lines are counted, not
/// fatal. Throws DataError when the stream is unreadable or yields zero
/// well-formed lines.
ParseResult parse_interactions(std::istream& source, LogFormat format,
                               const std::string& delimiter = ",");

/// Keeps exactly the interactions of users with at least `min_count` events.
/// Single pass over users; relative order preserved.
std::vector<Interaction> filter_min_interactions(const std::vector<Interaction>& log,
                                                 int min_count);

/// All-But-Last-One protocol: picks `n_holdout` users with >= 2 interactions
/// uniformly at random, removes each one's chronologically last interaction
/// (timestamp ties broken by file order, later line wins), and alternates the
/// removed items between validation and test in selection order.
SplitDataset split_all_but_last(const std::vector<Interaction>& log,
                                std::size_t n_holdout, std::uint64_t seed);

/// Sorted, deduplicated train items per dense user id.
std::vector<std::vector<int>> items_by_user(const SplitDataset& split);

}  // namespace rnr
