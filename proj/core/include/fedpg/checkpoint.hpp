#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>

#include "fedpg/federated.hpp"

namespace fedpg {

class CheckpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr char kCheckpointMagic[8] = {'F', 'E', 'D', 'P', 'G', 'C', 'K', 'P'};
inline constexpr std::uint32_t kCheckpointVersion = 1;

/// Binary layout, all integers and floats little-endian:
///   magic[8] u32 version u32 algorithm
///   architecture: u32 input, u32 n_hidden, u32 hidden..., u32 M, u32 C, f64 beta_scale
///   u64 epoch u64 traces_consumed u64 seed
///   params(global)
///   u32 n_nodes, then per node: i32 e0 i32 delta_e params
/// where params is u32 n_layers followed by each layer's u32 rows, u32 cols,
/// rows*cols f64 weights (row-major) and rows f64 biases.
std::string serialize_checkpoint(const TrainerState& state);
TrainerState deserialize_checkpoint(const std::string& bytes);

void save_checkpoint(const TrainerState& state, const std::filesystem::path& path);
TrainerState load_checkpoint(const std::filesystem::path& path);

}  // namespace fedpg
