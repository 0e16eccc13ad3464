#pragma once

#include <cstdint>
#include <functional>

namespace rlgogar {

// Per-episode training stats, delivered to an optional observer so the
// harness can log metrics without the trainers knowing about files.
struct EpisodeStats {
  long long episode = 0;
  double episode_return = 0.0;  // undiscounted reward sum
  long long length = 0;
  double td_abs_mean = 0.0;  // 0 when the algorithm has no TD error
};

using EpisodeHook = std::function<void(const EpisodeStats&)>;

}  // namespace rlgogar
