#pragma once

#include <fstream>
#include <mutex>
#include <optional>
#include <string>

namespace rlgogar {

// One CSV metrics file per run. All writers funnel through this object's
// mutex, and the iteration column is assigned here so indices are strictly
// increasing no matter which thread reports first.
class MetricsLogger {
 public:
  MetricsLogger(const std::string& path, std::string run_id);

  void log(double episode_return, long long length, double td_abs_mean,
           std::optional<std::uint64_t> update_count = std::nullopt);

  long long rows_written() const;

 private:
  std::mutex mu_;
  std::ofstream out_;
  std::string run_id_;
  long long next_iteration_ = 0;
};

}  // namespace rlgogar
