#include "rlgogar/qlearn.hpp"

#include <cmath>
#include <stdexcept>

namespace rlgogar {

int epsilon_greedy(const QTable& q, int s, double epsilon, Rng& rng) {
  if (!(epsilon >= 0.0 && epsilon <= 1.0))
    throw std::invalid_argument("[qlearn] epsilon must lie in [0, 1]");
  if (s < 0 || s >= q.n_states()) throw std::out_of_range("[qlearn] state index out of range");
  if (rng.uniform() < epsilon) return rng.below(q.n_actions());
  return argmax_lowest(q.values.row_span(s));
}

double q_update(QTable& q, int s, int a, double r, int s2, double alpha, double gamma,
                bool s2_terminal) {
  if (!(alpha > 0.0 && alpha <= 1.0))
    throw std::invalid_argument("[qlearn] alpha must lie in (0, 1]");
  if (s < 0 || s >= q.n_states() || s2 < 0 || s2 >= q.n_states())
    throw std::out_of_range("[qlearn] state index out of range");
  if (a < 0 || a >= q.n_actions()) throw std::out_of_range("[qlearn] action index out of range");
  if (!std::isfinite(r)) throw std::runtime_error("[qlearn] non-finite reward");

  double bootstrap = 0.0;
  if (!s2_terminal) {
    const auto row = q.values.row_span(s2);
    bootstrap = row[argmax_lowest(row)];
  }
  const double td = r + gamma * bootstrap - q.values.at(s, a);
  q.values.at(s, a) += alpha * td;
  return td;
}

QTable train_q(const Mdp& mdp, long long episodes, const QLearnConfig& cfg, std::uint64_t seed,
               const EpisodeHook& hook) {
  if (episodes < 0) throw std::invalid_argument("[qlearn] episodes must be >= 0");
  const double gamma = cfg.gamma_override.value_or(mdp.gamma);
  const int cap = cfg.step_cap > 0 ? cfg.step_cap : 10 * mdp.n_states;

  QTable q(mdp.n_states, mdp.n_actions);
  Rng rng(seed);
  for (long long ep = 0; ep < episodes; ++ep) {
    int s = sample_start(mdp, rng);
    EpisodeStats stats;
    stats.episode = ep;
    double td_abs_sum = 0.0;
    while (!mdp.is_terminal(s) && stats.length < cap) {
      const int a = epsilon_greedy(q, s, cfg.epsilon, rng);
      auto [s2, r] = step(mdp, s, a, rng);
      const double td = q_update(q, s, a, r, s2, cfg.alpha, gamma, mdp.is_terminal(s2));
      td_abs_sum += std::fabs(td);
      stats.episode_return += r;
      ++stats.length;
      s = s2;
    }
    if (hook) {
      if (stats.length > 0) stats.td_abs_mean = td_abs_sum / static_cast<double>(stats.length);
      hook(stats);
    }
  }
  return q;
}

std::vector<int> greedy_policy(const QTable& q) {
  std::vector<int> pi(q.n_states());
  for (int s = 0; s < q.n_states(); ++s) pi[s] = argmax_lowest(q.values.row_span(s));
  return pi;
}

}  // namespace rlgogar
