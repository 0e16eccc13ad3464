#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <mutex>
#include <vector>

#include "rlgogar/approx.hpp"
#include "rlgogar/linalg.hpp"
#include "rlgogar/mdp.hpp"
#include "rlgogar/policy_gradient.hpp"

namespace rlgogar {

// Internally consistent copy of the shared parameters, taken between applies.
struct ParamSnapshot {
  Matrix theta;
  std::vector<double> w;
  std::uint64_t version = 0;  // update_count at the time of the snapshot
};

// One applied accumulation, as recorded by the optional ledger.
struct ParamDelta {
  Matrix d_theta;
  std::vector<double> d_w;
};

// Per-segment gradient buffer. Shapes mirror the store; reset zeroes
// everything.
struct GradientAccumulator {
  Matrix d_theta;
  std::vector<double> d_w;
  long long n_steps = 0;

  GradientAccumulator() = default;
  GradientAccumulator(int n_actions, int dim) : d_theta(n_actions, dim, 0.0), d_w(dim, 0.0) {}
  void reset();
};

// The only shared mutable object in the asynchronous trainer. Snapshot reads
// and accumulator applies are serialized on one mutex, so every snapshot is
// internally consistent and update_count advances by exactly 1 per apply.
class GlobalParams {
 public:
  GlobalParams(int n_actions, int dim);

  int n_actions() const { return theta_.rows; }
  int dim() const { return theta_.cols; }

  ParamSnapshot snapshot() const;
  std::uint64_t update_count() const;

  // Adds both parameter blocks as one atomic accumulation and resets acc.
  // Returns false (leaving everything untouched) when acc is empty.
  bool apply(GradientAccumulator& acc);

  void enable_ledger();
  std::vector<ParamDelta> ledger() const;

 private:
  mutable std::mutex mu_;
  Matrix theta_;
  std::vector<double> w_;
  std::uint64_t updates_ = 0;
  bool ledger_on_ = false;
  std::vector<ParamDelta> ledger_;
};

// dw += beta*delta*v_grad, dtheta += alpha*I*delta*lp_grad, n_steps += 1.
// The coefficient expressions match actor_critic_step exactly so a t_max=1
// worker reproduces the single-unit trajectory bit for bit.
void accumulate(GradientAccumulator& acc, double delta, std::span<const double> v_grad,
                const Matrix& lp_grad, double importance, double alpha, double beta);

// Applies acc to the store. Empty accumulator: warning no-op, returns false.
bool async_apply(GlobalParams& store, GradientAccumulator& acc);

// Shared shutdown/budget signal. Workers claim one ticket per segment; the
// token flips to stopped when the budget runs out or on request_stop().
class StopToken {
 public:
  explicit StopToken(long long segment_budget = -1) : remaining_(segment_budget) {}

  bool claim_segment() {
    if (stopped_.load(std::memory_order_acquire)) return false;
    if (remaining_.load(std::memory_order_relaxed) < 0) return true;  // unlimited
    if (remaining_.fetch_sub(1, std::memory_order_acq_rel) > 0) return true;
    stopped_.store(true, std::memory_order_release);
    return false;
  }

  void request_stop() { stopped_.store(true, std::memory_order_release); }
  bool stop_requested() const { return stopped_.load(std::memory_order_acquire); }

 private:
  std::atomic<long long> remaining_;
  std::atomic<bool> stopped_{false};
};

struct SegmentStats {
  int worker = 0;
  long long steps = 0;
  double segment_return = 0.0;
  double td_abs_mean = 0.0;
  std::uint64_t snapshot_version = 0;  // update_count when the segment's snapshot was taken
  std::uint64_t update_count = 0;      // update_count right after the apply
  ParamSnapshot params_after;
};

using SegmentHook = std::function<void(const SegmentStats&)>;

// Per-thread body: snapshot the store, act up to t_max steps under the
// snapshot policy (crossing episode boundaries as needed, I reset to 1 per
// episode), accumulate, apply, repeat until the stop token says otherwise.
void worker_loop(GlobalParams& store, const Mdp& mdp, const AcHyper& hyper, int t_max,
                 std::uint64_t seed, StopToken& stop, int worker_index = 0,
                 const SegmentHook& hook = {});

struct A3cResult {
  ParamSnapshot params;
  std::uint64_t update_count = 0;
  std::vector<ParamDelta> ledger;  // populated when record_ledger is set
};

// Launches n_threads workers (worker i is seeded with derive_seed(seed, i)),
// stops after total_segments claimed segments, returns the final store state.
A3cResult train_a3c(const Mdp& mdp, int n_threads, const AcHyper& hyper, int t_max,
                    long long total_segments, std::uint64_t seed, const SegmentHook& hook = {},
                    bool record_ledger = false);

}  // namespace rlgogar
