#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <vector>

#include "rlgogar/a3c.hpp"
#include "rlgogar/gogar.hpp"
#include "rlgogar/mdp.hpp"
#include "rlgogar/policy_gradient.hpp"

namespace rlgogar {

// One member of the training population. A unit owns both a policy (its
// actor role) and a value function (its critic role). Units can be shared by
// several concurrently running interactions, so parameter reads and writes go
// through the unit's mutex; updates are additive and applied one step at a
// time.
struct ParticipantUnit {
  std::string pid;
  SoftmaxPolicy policy;
  LinearValueFn value;
  long long interaction_count = 0;
  mutable std::mutex mu;

  ParticipantUnit(std::string id, int n_actions, int dim)
      : pid(std::move(id)), policy(n_actions, dim), value(dim) {}

  ParticipantUnit(const ParticipantUnit&) = delete;
  ParticipantUnit& operator=(const ParticipantUnit&) = delete;

  // Consistent copy of (theta, w) under the unit's lock.
  std::pair<Matrix, std::vector<double>> snapshot_params() const {
    std::lock_guard lk(mu);
    return {policy.theta, value.w};
  }
};

using Population = std::vector<std::unique_ptr<ParticipantUnit>>;

// size units named pu0..pu{size-1}, zero-initialized parameters.
Population make_population(int size, int n_actions, int dim);

struct InteractionPlan {
  struct Pair {
    int actor = 0;
    int critic = 0;
  };
  std::vector<Pair> pairs;
  int t_max = 1;
};

// Draws n_interac uniformly from [0, C(|P|,2)] inclusive, then for each
// interaction an actor uniform over the population and a critic uniform over
// the rest. Population must have at least 2 units.
InteractionPlan sample_interactions(const Population& population, Rng& rng, int t_max);

// One environment step as seen by an interaction, with the TD error that the
// critic assigned to it.
struct StepEvent {
  int step = 0;
  int s = 0;
  int a = 0;
  double r = 0.0;
  int s2 = 0;
  double delta = 0.0;
};

struct InteractionStats {
  long long steps = 0;
  double total_return = 0.0;
  double td_abs_mean = 0.0;
};

// One interaction: a single episode segment of up to t_max steps where the
// actor's policy chooses actions and the critic's value function scores them.
// Updates land in place on the two units through actor_critic_step, so the
// order and arithmetic match the single-unit algorithm exactly. With
// accumulate_updates set, gradients are instead collected against the
// interaction-start snapshot and applied once at the end. Both units'
// interaction_count increments once at completion.
InteractionStats interaction_thread(ParticipantUnit& actor, ParticipantUnit& critic,
                                    const Mdp& mdp, const AcHyper& hyper, int t_max,
                                    std::uint64_t seed, std::vector<StepEvent>* events = nullptr,
                                    bool accumulate_updates = false);

// Scorekeeping over one interaction's step events: the actor commits and
// entitles the counter x_<s>_<a> for each step; a negative TD error makes the
// critic challenge the claim, resolved by the engine's defense rule.
// Counters outside the universe (off-policy actions) are registered lazily
// with empty cc and reported in lazy_registered.
struct ScorekeepingTrace {
  GameState game;
  std::vector<CounterId> lazy_registered;
};

ScorekeepingTrace scorekeeping_trace(std::span<const StepEvent> events,
                                     const CounterUniverse& universe,
                                     const ParticipantId& actor_id,
                                     const ParticipantId& critic_id);

// Full per-interaction trace record as written to disk.
struct InteractionTrace {
  long long round = 0;
  int pair_index = 0;
  std::string actor;
  std::string critic;
  std::vector<StepEvent> events;
  ScorekeepingTrace score;
};

// Move-log text plus `# meta` comment lines carrying round, pair, per-step
// delta, lazy registrations, and an optional universe file hint.
std::string serialize_trace(const InteractionTrace& trace, const std::string& universe_hint = "");

struct ParsedTrace {
  std::string universe_hint;
  std::vector<CounterId> lazy_registered;
  std::vector<MoveRecord> log;
};
ParsedTrace parse_trace(std::string_view text);

struct GogarA3cConfig {
  int population_size = 2;
  int t_max = 10;
  long long rounds = 0;
  std::uint64_t seed = 0;
  bool trace_enabled = false;
  bool parallel = true;  // false: sequential pairs, fully deterministic
  bool accumulate_updates = false;
  const CounterUniverse* trace_universe = nullptr;  // required when tracing
};

struct RoundStats {
  long long round = 0;
  int n_pairs = 0;
  long long steps = 0;
  double return_sum = 0.0;
  double td_abs_mean = 0.0;
  long long pairs_total = 0;  // cumulative interactions executed
};

using RoundHook = std::function<void(const RoundStats&)>;

struct GogarA3cResult {
  Population population;
  std::vector<InteractionTrace> traces;
  long long pairs_executed = 0;
};

// Rounds of sampled pairwise interactions. Pairs within a round run
// concurrently (unless cfg.parallel is off); rounds are barriers. Interaction
// k of round r is seeded with derive_seed(derive_seed(seed, r), k).
GogarA3cResult train_gogar_a3c(const Mdp& mdp, const AcHyper& hyper, const GogarA3cConfig& cfg,
                               const RoundHook& hook = {});

}  // namespace rlgogar
