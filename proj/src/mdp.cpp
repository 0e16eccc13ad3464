#include "rlgogar/mdp.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace rlgogar {

namespace {
constexpr double kRowSumTol = 1e-9;
}

std::vector<int> Mdp::terminal_states() const {
  std::vector<int> out;
  for (int s = 0; s < n_states; ++s)
    if (terminal[s]) out.push_back(s);
  return out;
}

void Mdp::check_state(int s) const {
  if (s < 0 || s >= n_states)
    throw std::out_of_range("[mdp] state index " + std::to_string(s) + " out of range");
}

void Mdp::check_action(int a) const {
  if (a < 0 || a >= n_actions)
    throw std::out_of_range("[mdp] action index " + std::to_string(a) + " out of range");
}

void Mdp::validate() const {
  if (n_states <= 0 || n_actions <= 0)
    throw std::invalid_argument("[mdp] n_states and n_actions must be positive");
  if (!(gamma >= 0.0 && gamma < 1.0))
    throw std::invalid_argument("[mdp] gamma must lie in [0, 1)");
  const auto expect = static_cast<std::size_t>(n_states) * n_actions * n_states;
  if (transition.size() != expect || reward.size() != expect)
    throw std::invalid_argument("[mdp] tensor sizes do not match n_states/n_actions");
  if (terminal.size() != static_cast<std::size_t>(n_states) ||
      start_dist.size() != static_cast<std::size_t>(n_states))
    throw std::invalid_argument("[mdp] terminal/start_dist size mismatch");

  for (int s = 0; s < n_states; ++s) {
    for (int a = 0; a < n_actions; ++a) {
      double sum = 0.0;
      for (int s2 = 0; s2 < n_states; ++s2) {
        const double p = trans_prob(s, a, s2);
        if (p < 0.0)
          throw std::invalid_argument("[mdp] negative transition probability at s=" +
                                      std::to_string(s) + " a=" + std::to_string(a));
        sum += p;
      }
      if (std::fabs(sum - 1.0) > kRowSumTol)
        throw std::invalid_argument("[mdp] transition row sum " + std::to_string(sum) +
                                    " at s=" + std::to_string(s) + " a=" + std::to_string(a));
      if (terminal[s]) {
        if (trans_prob(s, a, s) < 1.0 - kRowSumTol)
          throw std::invalid_argument("[mdp] terminal state " + std::to_string(s) +
                                      " must self-loop under every action");
        if (reward_at(s, a, s) != 0.0)
          throw std::invalid_argument("[mdp] terminal state " + std::to_string(s) +
                                      " must have zero self-loop reward");
      }
    }
  }

  double start_sum = 0.0;
  for (double p : start_dist) {
    if (p < 0.0) throw std::invalid_argument("[mdp] negative start probability");
    start_sum += p;
  }
  if (std::fabs(start_sum - 1.0) > kRowSumTol)
    throw std::invalid_argument("[mdp] start distribution sums to " + std::to_string(start_sum));
}

int sample_start(const Mdp& mdp, Rng& rng) { return rng.categorical(mdp.start_dist); }

std::pair<int, double> step(const Mdp& mdp, int s, int a, Rng& rng) {
  mdp.check_state(s);
  mdp.check_action(a);
  if (mdp.is_terminal(s))
    throw std::runtime_error("[mdp] step from terminal state " + std::to_string(s));
  const int s2 = rng.categorical(mdp.trans_row(s, a));
  return {s2, mdp.reward_at(s, a, s2)};
}

Episode generate_episode(const Mdp& mdp, const ActionSelector& policy, Rng& rng, int max_len) {
  if (max_len < 1) throw std::invalid_argument("[mdp] max_len must be >= 1");
  Episode ep;
  int s = sample_start(mdp, rng);
  while (!mdp.is_terminal(s) && static_cast<int>(ep.steps.size()) < max_len) {
    const int a = policy(s, rng);
    auto [s2, r] = step(mdp, s, a, rng);
    ep.steps.push_back({s, a, r});
    s = s2;
  }
  ep.final_state = s;
  return ep;
}

double discounted_return(std::span<const double> rewards, double gamma, int t) {
  if (t < 0 || t >= static_cast<int>(rewards.size()))
    throw std::out_of_range("[mdp] return index out of range");
  double g = 0.0;
  for (int k = static_cast<int>(rewards.size()) - 1; k >= t; --k) g = rewards[k] + gamma * g;
  return g;
}

std::vector<double> returns_from_rewards(std::span<const double> rewards, double gamma) {
  std::vector<double> out(rewards.size());
  double g = 0.0;
  for (int k = static_cast<int>(rewards.size()) - 1; k >= 0; --k) {
    g = rewards[k] + gamma * g;
    out[k] = g;
  }
  return out;
}

int argmax_lowest(std::span<const double> xs) {
  int best = 0;
  for (int i = 1; i < static_cast<int>(xs.size()); ++i)
    if (xs[i] > xs[best]) best = i;
  return best;
}

std::vector<double> action_values_from(const Mdp& mdp, const std::vector<double>& values, int s) {
  std::vector<double> q(mdp.n_actions, 0.0);
  for (int a = 0; a < mdp.n_actions; ++a) {
    double acc = 0.0;
    const auto row = mdp.trans_row(s, a);
    for (int s2 = 0; s2 < mdp.n_states; ++s2) {
      if (row[s2] == 0.0) continue;
      acc += row[s2] * (mdp.reward_at(s, a, s2) + mdp.gamma * values[s2]);
    }
    q[a] = acc;
  }
  return q;
}

ValueIterationResult value_iteration(const Mdp& mdp, double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("[mdp] value_iteration tol must be > 0");
  mdp.validate();

  ValueIterationResult res;
  res.values.assign(mdp.n_states, 0.0);
  std::vector<double> next(mdp.n_states, 0.0);

  double diff = tol;
  while (diff >= tol) {
    diff = 0.0;
    for (int s = 0; s < mdp.n_states; ++s) {
      if (mdp.is_terminal(s)) {
        next[s] = 0.0;
        continue;
      }
      const auto q = action_values_from(mdp, res.values, s);
      next[s] = q[argmax_lowest(q)];
      diff = std::max(diff, std::fabs(next[s] - res.values[s]));
    }
    res.values.swap(next);
    ++res.sweeps;
  }

  res.policy.assign(mdp.n_states, -1);
  for (int s = 0; s < mdp.n_states; ++s) {
    if (mdp.is_terminal(s)) continue;
    res.policy[s] = argmax_lowest(action_values_from(mdp, res.values, s));
  }
  return res;
}

std::vector<std::vector<int>> optimal_action_sets(const Mdp& mdp, const std::vector<double>& values,
                                                  double tie_tol) {
  std::vector<std::vector<int>> out(mdp.n_states);
  for (int s = 0; s < mdp.n_states; ++s) {
    if (mdp.is_terminal(s)) continue;
    const auto q = action_values_from(mdp, values, s);
    const double best = q[argmax_lowest(q)];
    for (int a = 0; a < mdp.n_actions; ++a)
      if (q[a] >= best - tie_tol) out[s].push_back(a);
  }
  return out;
}

}  // namespace rlgogar
