#include "rlgogar/metrics.hpp"

#include <chrono>
#include <stdexcept>

#include "rlgogar/mdp_io.hpp"

namespace rlgogar {

MetricsLogger::MetricsLogger(const std::string& path, std::string run_id)
    : out_(path, std::ios::binary), run_id_(std::move(run_id)) {
  if (!out_) throw std::runtime_error("[harness] cannot open metrics file '" + path + "'");
  out_ << "run_id,stamp_ms,iteration,episode_return,episode_length,td_abs_mean,update_count\n";
}

void MetricsLogger::log(double episode_return, long long length, double td_abs_mean,
                        std::optional<std::uint64_t> update_count) {
  const auto now = std::chrono::duration_cast<std::chrono::milliseconds>(
                       std::chrono::system_clock::now().time_since_epoch())
                       .count();
  std::lock_guard lk(mu_);
  out_ << run_id_ << ',' << now << ',' << next_iteration_++ << ',' << format_g17(episode_return)
       << ',' << length << ',' << format_g17(td_abs_mean) << ',';
  if (update_count) out_ << *update_count;
  out_ << '\n';
}

long long MetricsLogger::rows_written() const { return next_iteration_; }

}  // namespace rlgogar
