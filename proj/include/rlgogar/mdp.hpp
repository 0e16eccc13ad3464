#pragma once

#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rlgogar/rng.hpp"

namespace rlgogar {

// Finite MDP: index sets S = {0..n_states-1}, A = {0..n_actions-1}, dense
// transition and reward tensors, discount factor, terminal mask, start
// distribution. Immutable after construction and safe to share across threads.
struct Mdp {
  int n_states = 0;
  int n_actions = 0;
  double gamma = 0.9;
  std::vector<double> transition;  // [s][a][s'] row-major, size S*A*S
  std::vector<double> reward;      // [s][a][s']
  std::vector<bool> terminal;      // size S
  std::vector<double> start_dist;  // size S
  std::string name;                // provenance tag, e.g. the file stem

  std::span<const double> trans_row(int s, int a) const {
    return {transition.data() + (static_cast<std::size_t>(s) * n_actions + a) * n_states,
            static_cast<std::size_t>(n_states)};
  }
  double trans_prob(int s, int a, int s2) const {
    return transition[(static_cast<std::size_t>(s) * n_actions + a) * n_states + s2];
  }
  double reward_at(int s, int a, int s2) const {
    return reward[(static_cast<std::size_t>(s) * n_actions + a) * n_states + s2];
  }
  bool is_terminal(int s) const { return terminal[static_cast<std::size_t>(s)]; }
  std::vector<int> terminal_states() const;

  void check_state(int s) const;
  void check_action(int a) const;

  // Enforces: rows sum to 1 +/- 1e-9 with no negative entries, start_dist
  // sums to 1, terminals self-loop with probability 1 and reward 0.
  void validate() const;
};

// One environment trajectory. steps[t] holds (state, action, reward received
// on the transition out of that state); final_state closes the chain.
struct EpisodeStep {
  int state = 0;
  int action = 0;
  double reward = 0.0;
  friend bool operator==(const EpisodeStep&, const EpisodeStep&) = default;
};

struct Episode {
  std::vector<EpisodeStep> steps;
  int final_state = -1;
  friend bool operator==(const Episode&, const Episode&) = default;
};

using ActionSelector = std::function<int(int state, Rng& rng)>;

// Draws the initial state from the start distribution.
int sample_start(const Mdp& mdp, Rng& rng);

// One environment transition: samples s' from transition(s,a), returns
// (s', reward(s,a,s')). Throws if s is terminal or an index is out of range.
std::pair<int, double> step(const Mdp& mdp, int s, int a, Rng& rng);

// Rolls out one episode from a start-distribution draw until a terminal state
// or max_len steps. Deterministic for a fixed rng seed.
Episode generate_episode(const Mdp& mdp, const ActionSelector& policy, Rng& rng, int max_len);

// Discounted suffix sum: sum_k gamma^k * rewards[t+k]. Implemented as the
// backward recurrence g = r + gamma*g, so
//   discounted_return(r, g, t) == r[t] + gamma * discounted_return(r, g, t+1)
// holds exactly.
double discounted_return(std::span<const double> rewards, double gamma, int t);

// Backward pass producing the return at every step of a reward sequence.
std::vector<double> returns_from_rewards(std::span<const double> rewards, double gamma);

struct ValueIterationResult {
  std::vector<double> values;  // V*, fixed at 0 on terminals
  std::vector<int> policy;     // greedy wrt V*, ties to the lowest action; -1 on terminals
  int sweeps = 0;
};

// Synchronous Bellman sweeps until the sup-norm iterate change drops below
// tol, which bounds the Bellman residual of the result by gamma*tol < tol.
ValueIterationResult value_iteration(const Mdp& mdp, double tol = 1e-10);

// One-step action values from a state-value vector.
std::vector<double> action_values_from(const Mdp& mdp, const std::vector<double>& values, int s);

// Per-state set of actions within tie_tol of the best one-step value.
// Useful for "optimal action is unique" checks against learned policies.
std::vector<std::vector<int>> optimal_action_sets(const Mdp& mdp, const std::vector<double>& values,
                                                  double tie_tol = 1e-9);

// argmax with ties broken toward the lowest index.
int argmax_lowest(std::span<const double> xs);

}  // namespace rlgogar
