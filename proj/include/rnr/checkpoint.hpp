#pragma once

#include <cstdint>
#include <string>
#include <utility>

#include "rnr/params.hpp"
#include "rnr/trainer.hpp"

namespace rnr {

/// Binary model file: magic "RNR1", version, shapes, mode/ranker tags, then
/// every parameter array and its AdaGrad accumulator as little-endian 64-bit
/// floats in row-major order.
struct CheckpointMeta {
  std::uint32_t version = 1;
  int num_users = 0;
  int num_items = 0;
  int dim = 0;
  Mode mode = Mode::single_rank;
  Ranker ranker = Ranker::bpr;
};

void save_checkpoint(const ParamStore& store, Mode mode, Ranker ranker,
                     const std::string& path);

/// Loads the full store, or throws FormatError without returning a partial
/// one. A truncated or trailing-garbage file is a format error.
std::pair<CheckpointMeta, ParamStore> load_checkpoint(const std::string& path);

/// Throws ShapeError naming both sides when the checkpoint dimensions do not
/// match the current configuration.
void require_shape(const CheckpointMeta& meta, int num_users, int num_items, int dim);

}  // namespace rnr
