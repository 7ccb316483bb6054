#include "rnr/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include "rnr/errors.hpp"

static_assert(std::endian::native == std::endian::little,
              "checkpoint format is little-endian");

namespace rnr {
namespace {

constexpr char kMagic[4] = {'R', 'N', 'R', '1'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void write_pod(std::ostream& out, const T& value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
void read_pod(std::istream& in, T& value, const char* what) {
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (!in) throw FormatError(std::string("checkpoint: truncated reading ") + what);
}

void write_array(std::ostream& out, const double* data, std::size_t count) {
  out.write(reinterpret_cast<const char*>(data),
            static_cast<std::streamsize>(count * sizeof(double)));
}

void read_array(std::istream& in, double* data, std::size_t count, const char* what) {
  in.read(reinterpret_cast<char*>(data),
          static_cast<std::streamsize>(count * sizeof(double)));
  if (!in) throw FormatError(std::string("checkpoint: truncated reading ") + what);
}

// Fixed serialization order for parameters and accumulators.
template <typename Store, typename Fn>
void for_each_array(Store& s, Fn&& fn) {
  fn(s.user_factors, "user_factors");
  fn(s.item_factors, "item_factors");
  fn(s.item_deviation, "item_deviation");
  fn(s.fc.weight, "fc_weight");
  fn(s.fc.bias, "fc_bias");
  fn(s.user_bias, "user_bias");
  fn(s.item_bias, "item_bias");
  fn(s.rank_item_bias, "rank_item_bias");
  fn(s.cdae_encoder, "cdae_encoder");
  fn(s.cdae_hidden_bias, "cdae_hidden_bias");
  fn(s.cdae_output_bias, "cdae_output_bias");
  fn(s.acc.user_factors, "acc.user_factors");
  fn(s.acc.item_factors, "acc.item_factors");
  fn(s.acc.item_deviation, "acc.item_deviation");
  fn(s.acc.fc_weight, "acc.fc_weight");
  fn(s.acc.fc_bias, "acc.fc_bias");
  fn(s.acc.user_bias, "acc.user_bias");
  fn(s.acc.item_bias, "acc.item_bias");
  fn(s.acc.rank_item_bias, "acc.rank_item_bias");
  fn(s.acc.cdae_encoder, "acc.cdae_encoder");
  fn(s.acc.cdae_hidden_bias, "acc.cdae_hidden_bias");
  fn(s.acc.cdae_output_bias, "acc.cdae_output_bias");
}

}  // namespace

void save_checkpoint(const ParamStore& store, Mode mode, Ranker ranker,
                     const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("checkpoint: cannot open '" + path + "' for writing");

  out.write(kMagic, sizeof(kMagic));
  write_pod(out, kVersion);
  write_pod(out, static_cast<std::uint64_t>(store.num_users()));
  write_pod(out, static_cast<std::uint64_t>(store.num_items()));
  write_pod(out, static_cast<std::uint32_t>(store.dim()));
  write_pod(out, static_cast<std::uint8_t>(mode));
  write_pod(out, static_cast<std::uint8_t>(ranker));
  write_pod(out, store.global_mean);
  for_each_array(store, [&](const auto& array, const char*) {
    write_array(out, array.data(), static_cast<std::size_t>(array.size()));
  });
  out.flush();
  if (!out) throw DataError("checkpoint: write to '" + path + "' failed");
}

std::pair<CheckpointMeta, ParamStore> load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("checkpoint: cannot open '" + path + "'");

  char magic[4];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw FormatError("checkpoint: bad magic in '" + path + "'");
  }
  CheckpointMeta meta;
  read_pod(in, meta.version, "version");
  if (meta.version != kVersion) {
    throw FormatError("checkpoint: unsupported version " + std::to_string(meta.version));
  }
  std::uint64_t n = 0, m = 0;
  std::uint32_t d = 0;
  std::uint8_t mode = 0, ranker = 0;
  read_pod(in, n, "num_users");
  read_pod(in, m, "num_items");
  read_pod(in, d, "dim");
  read_pod(in, mode, "mode");
  read_pod(in, ranker, "ranker");
  if (n == 0 || m == 0 || d == 0 || mode > 3 || ranker > 1) {
    throw FormatError("checkpoint: invalid header fields");
  }
  meta.num_users = static_cast<int>(n);
  meta.num_items = static_cast<int>(m);
  meta.dim = static_cast<int>(d);
  meta.mode = static_cast<Mode>(mode);
  meta.ranker = static_cast<Ranker>(ranker);

  ParamStore store = zero_params(meta.num_users, meta.num_items, meta.dim);
  read_pod(in, store.global_mean, "global_mean");
  for_each_array(store, [&](auto& array, const char* name) {
    read_array(in, array.data(), static_cast<std::size_t>(array.size()), name);
  });
  if (in.peek() != std::char_traits<char>::eof()) {
    throw FormatError("checkpoint: trailing bytes in '" + path + "'");
  }
  return {meta, std::move(store)};
}

void require_shape(const CheckpointMeta& meta, int num_users, int num_items, int dim) {
  const auto mismatch = [](const char* what, int file, int config) {
    throw ShapeError(std::string("checkpoint ") + what + "=" + std::to_string(file) +
                     " does not match configured " + what + "=" + std::to_string(config));
  };
  if (meta.num_users != num_users) mismatch("users", meta.num_users, num_users);
  if (meta.num_items != num_items) mismatch("items", meta.num_items, num_items);
  if (meta.dim != dim) mismatch("dim", meta.dim, dim);
}

}  // namespace rnr
