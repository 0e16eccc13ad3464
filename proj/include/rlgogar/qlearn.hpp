#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "rlgogar/hooks.hpp"
#include "rlgogar/linalg.hpp"
#include "rlgogar/mdp.hpp"

namespace rlgogar {

// Tabular action-value estimates, one row per state. Zero-initialized;
// terminal rows are never written because training never updates from a
// terminal source state.
struct QTable {
  Matrix values;  // n_states x n_actions

  QTable() = default;
  QTable(int n_states, int n_actions) : values(n_states, n_actions, 0.0) {}
  int n_states() const { return values.rows; }
  int n_actions() const { return values.cols; }
};

// Greedy action with probability 1-epsilon (ties to the lowest index),
// uniform random action otherwise.
int epsilon_greedy(const QTable& q, int s, double epsilon, Rng& rng);

// One-step update: Q(s,a) += alpha * (r + gamma * max_a' Q(s',a') - Q(s,a)).
// The bootstrap term is 0 when s' is terminal. Returns the TD error.
double q_update(QTable& q, int s, int a, double r, int s2, double alpha, double gamma,
                bool s2_terminal);

struct QLearnConfig {
  double alpha = 0.1;
  double epsilon = 0.1;
  std::optional<double> gamma_override;  // defaults to the MDP's gamma
  int step_cap = 0;                      // 0 means 10 * n_states
};

QTable train_q(const Mdp& mdp, long long episodes, const QLearnConfig& cfg, std::uint64_t seed,
               const EpisodeHook& hook = {});

// Deterministic policy pi(s) = argmax_a Q(s,a), ties to the lowest index.
std::vector<int> greedy_policy(const QTable& q);

}  // namespace rlgogar
