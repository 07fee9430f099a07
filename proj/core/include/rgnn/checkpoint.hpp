#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "rgnn/electrodes.hpp"
#include "rgnn/model.hpp"
#include "rgnn/optim.hpp"
#include "rgnn/params.hpp"

namespace rgnn {

/// Binary layout, all integers and floats little-endian:
///   "RGNNCKPT" | u32 version | u32 header length | header JSON (UTF-8)
///   adjacency block (u32 n, n(n+1)/2 f64)
///   W, W^O, W^D blocks (u32 rows, u32 cols, row-major f64)
///   u8 optimizer flag, then u64 step and first/second moments for adjacency (as 1 x len), W, W^O, W^D.
/// The header carries the model config, channel names and the global pair set.
struct Checkpoint {
  ModelConfig model;
  ParamSet params;
  std::optional<AdamState> optimizer;
  std::vector<std::string> channel_names;
  GlobalPairSet global_pairs;
};

inline constexpr std::uint32_t kCheckpointVersion = 1;

void write_checkpoint(std::ostream& out, const Checkpoint& checkpoint);
Checkpoint read_checkpoint(std::istream& in);

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace rgnn
