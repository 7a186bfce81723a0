#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "pixelrl/config.hpp"
#include "pixelrl/learn.hpp"
#include "pixelrl/network.hpp"
#include "pixelrl/reward_kernel.hpp"

namespace pixelrl {

/// Everything needed to resume training bit-exactly.
struct Checkpoint {
  Network network;
  RewardKernel kernel;
  AdamState network_adam;
  AdamState kernel_adam;
  int episode = 0;  ///< episodes completed in the current phase
  Phase phase = Phase::RmcOff;
  std::string config_text;

  friend bool operator==(const Checkpoint&, const Checkpoint&) = default;
};

/// Layout: "PXRLCKPT", uint32 version, uint64 header length, JSON header,
/// then little-endian float64 arrays in header order.
void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::filesystem::path& path);

inline constexpr std::uint32_t kCheckpointVersion = 1;

}  // namespace pixelrl
