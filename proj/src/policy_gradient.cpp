#include "rlgogar/policy_gradient.hpp"

#include <cmath>
#include <stdexcept>

namespace rlgogar {

void AcHyper::validate() const {
  if (!(alpha > 0.0) || !std::isfinite(alpha))
    throw std::invalid_argument("[pg] alpha must be positive and finite");
  if (!(beta > 0.0) || !std::isfinite(beta))
    throw std::invalid_argument("[pg] beta must be positive and finite");
  if (!(gamma >= 0.0 && gamma < 1.0)) throw std::invalid_argument("[pg] gamma must lie in [0, 1)");
  if (t_cap < 1) throw std::invalid_argument("[pg] t_cap must be >= 1");
}

double td_error(double r, double gamma, const LinearValueFn& v, const FeatureMap& fm, int s,
                int s2, bool s2_terminal) {
  if (!std::isfinite(r)) throw std::runtime_error("[pg] non-finite reward");
  const double bootstrap = s2_terminal ? 0.0 : value(v, fm, s2);
  return r + gamma * bootstrap - value(v, fm, s);
}

void reinforce_update(SoftmaxPolicy& p, const FeatureMap& fm, const Episode& episode, double alpha,
                      double gamma) {
  if (episode.steps.empty()) throw std::invalid_argument("[pg] empty episode");

  std::vector<double> rewards(episode.steps.size());
  for (std::size_t t = 0; t < episode.steps.size(); ++t) rewards[t] = episode.steps[t].reward;
  const auto returns = returns_from_rewards(rewards, gamma);

  // All gradients are evaluated at the entry parameters (the ones the episode
  // was generated under); the increments are summed and applied once.
  Matrix total(p.n_actions(), p.dim());
  double discount = 1.0;
  for (std::size_t t = 0; t < episode.steps.size(); ++t) {
    const auto& st = episode.steps[t];
    const Matrix g = log_policy_grad(p, fm, st.state, st.action);
    const double coeff = alpha * discount * returns[t];
    for (std::size_t i = 0; i < total.data.size(); ++i) total.data[i] += coeff * g.data[i];
    discount *= gamma;
  }
  for (std::size_t i = 0; i < p.theta.data.size(); ++i) p.theta.data[i] += total.data[i];
}

double actor_critic_step(SoftmaxPolicy& p, LinearValueFn& v, const FeatureMap& fm, int s, int a,
                         double r, int s2, bool s2_terminal, double& importance,
                         const AcHyper& hyper) {
  if (!(importance > 0.0)) throw std::invalid_argument("[pg] importance factor must be > 0");
  const double delta = td_error(r, hyper.gamma, v, fm, s, s2, s2_terminal);

  const auto vg = value_grad(v, fm, s);
  const double wc = hyper.beta * delta;
  for (int i = 0; i < v.dim(); ++i) v.w[i] += wc * vg[i];

  const Matrix lg = log_policy_grad(p, fm, s, a);
  const double tc = hyper.alpha * importance * delta;
  for (std::size_t i = 0; i < p.theta.data.size(); ++i) p.theta.data[i] += tc * lg.data[i];

  importance *= hyper.gamma;
  return delta;
}

namespace {

// Shared per-episode loop: one start draw, then (action draw, transition
// draw, update) per step until terminal or the cap.
void run_ac_episode(SoftmaxPolicy& p, LinearValueFn& v, const FeatureMap& fm, const Mdp& mdp,
                    const AcHyper& hyper, Rng& rng, long long episode_index,
                    const EpisodeHook& hook, const StepHook& step_hook) {
  int s = sample_start(mdp, rng);
  double importance = 1.0;
  EpisodeStats stats;
  stats.episode = episode_index;
  double td_abs_sum = 0.0;
  while (!mdp.is_terminal(s) && stats.length < hyper.t_cap) {
    const auto probs = policy_probs(p, fm, s);
    const int a = rng.categorical(probs);
    auto [s2, r] = step(mdp, s, a, rng);
    const double delta =
        actor_critic_step(p, v, fm, s, a, r, s2, mdp.is_terminal(s2), importance, hyper);
    if (step_hook) step_hook(p, v, delta);
    td_abs_sum += std::fabs(delta);
    stats.episode_return += r;
    ++stats.length;
    s = s2;
  }
  if (hook) {
    if (stats.length > 0) stats.td_abs_mean = td_abs_sum / static_cast<double>(stats.length);
    hook(stats);
  }
}

}  // namespace

void train_actor_critic_from(SoftmaxPolicy& p, LinearValueFn& v, const Mdp& mdp,
                             const AcHyper& hyper, long long episodes, std::uint64_t seed,
                             const EpisodeHook& hook, const StepHook& step_hook) {
  hyper.validate();
  if (episodes < 0) throw std::invalid_argument("[pg] episodes must be >= 0");
  const FeatureMap fm = FeatureMap::one_hot(mdp.n_states);
  if (p.dim() != fm.dim() || v.dim() != fm.dim() || p.n_actions() != mdp.n_actions)
    throw std::invalid_argument("[pg] parameter shapes do not match the MDP");
  Rng rng(seed);
  for (long long ep = 0; ep < episodes; ++ep)
    run_ac_episode(p, v, fm, mdp, hyper, rng, ep, hook, step_hook);
}

AcResult train_actor_critic(const Mdp& mdp, const AcHyper& hyper, long long episodes,
                            std::uint64_t seed, const EpisodeHook& hook,
                            const StepHook& step_hook) {
  AcResult res{SoftmaxPolicy(mdp.n_actions, mdp.n_states), LinearValueFn(mdp.n_states)};
  train_actor_critic_from(res.policy, res.value, mdp, hyper, episodes, seed, hook, step_hook);
  return res;
}

SoftmaxPolicy train_reinforce(const Mdp& mdp, double alpha, double gamma, long long episodes,
                              int step_cap, std::uint64_t seed, const EpisodeHook& hook) {
  if (!(alpha > 0.0) || !std::isfinite(alpha))
    throw std::invalid_argument("[pg] alpha must be positive and finite");
  if (!(gamma >= 0.0 && gamma < 1.0)) throw std::invalid_argument("[pg] gamma must lie in [0, 1)");
  if (episodes < 0) throw std::invalid_argument("[pg] episodes must be >= 0");
  const int cap = step_cap > 0 ? step_cap : 10 * mdp.n_states;

  const FeatureMap fm = FeatureMap::one_hot(mdp.n_states);
  SoftmaxPolicy p(mdp.n_actions, mdp.n_states);
  Rng rng(seed);
  const ActionSelector select = [&p, &fm](int s, Rng& r) {
    return r.categorical(policy_probs(p, fm, s));
  };
  for (long long ep = 0; ep < episodes; ++ep) {
    const Episode episode = generate_episode(mdp, select, rng, cap);
    if (!episode.steps.empty()) reinforce_update(p, fm, episode, alpha, gamma);
    if (hook) {
      EpisodeStats stats;
      stats.episode = ep;
      stats.length = static_cast<long long>(episode.steps.size());
      for (const auto& st : episode.steps) stats.episode_return += st.reward;
      hook(stats);
    }
  }
  return p;
}

}  // namespace rlgogar
