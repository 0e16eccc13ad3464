#pragma once

#include <cstdint>
#include <functional>

#include "rlgogar/approx.hpp"
#include "rlgogar/hooks.hpp"
#include "rlgogar/mdp.hpp"

namespace rlgogar {

// Shared actor-critic hyperparameters: actor step size alpha, critic step
// size beta, discount gamma, and the per-episode step cap.
struct AcHyper {
  double alpha = 0.1;
  double beta = 0.1;
  double gamma = 0.9;
  int t_cap = 1000;

  void validate() const;
};

// One-step TD error: delta = r + gamma * v(s') * [s' not terminal] - v(s).
double td_error(double r, double gamma, const LinearValueFn& v, const FeatureMap& fm, int s,
                int s2, bool s2_terminal);

// Whole-episode policy-gradient update:
//   theta += sum_t alpha * gamma^t * G_t * grad log pi(A_t | S_t, theta_in)
// Returns and gradients are both taken from the parameters the episode was
// generated under, so scaling every reward by c scales every increment by
// exactly c.
void reinforce_update(SoftmaxPolicy& p, const FeatureMap& fm, const Episode& episode, double alpha,
                      double gamma);

// One actor-critic transition, applied in this exact order: delta from the
// pre-update critic, then w += beta*delta*grad_w v(s), then
// theta += alpha*I*delta*grad_theta log pi(a|s), then I *= gamma.
// Returns delta. The policy and value function may live in different owners
// (see the population trainer); the update only assumes the references are
// valid for the duration of the call.
double actor_critic_step(SoftmaxPolicy& p, LinearValueFn& v, const FeatureMap& fm, int s, int a,
                         double r, int s2, bool s2_terminal, double& importance,
                         const AcHyper& hyper);

// Observer invoked after every applied actor-critic step; used by trajectory
// equivalence tests.
using StepHook = std::function<void(const SoftmaxPolicy&, const LinearValueFn&, double delta)>;

struct AcResult {
  SoftmaxPolicy policy;
  LinearValueFn value;
};

// Online actor-critic over whole episodes, I reset to 1 at each episode
// start. Deterministic under a fixed seed.
AcResult train_actor_critic(const Mdp& mdp, const AcHyper& hyper, long long episodes,
                            std::uint64_t seed, const EpisodeHook& hook = {},
                            const StepHook& step_hook = {});

// Same loop, continuing from caller-owned parameters. rng draws per episode:
// one start-state draw, then one action draw and one transition draw per step.
void train_actor_critic_from(SoftmaxPolicy& p, LinearValueFn& v, const Mdp& mdp,
                             const AcHyper& hyper, long long episodes, std::uint64_t seed,
                             const EpisodeHook& hook = {}, const StepHook& step_hook = {});

// Episode-generation + update loop for the direct policy-search algorithm.
SoftmaxPolicy train_reinforce(const Mdp& mdp, double alpha, double gamma, long long episodes,
                              int step_cap, std::uint64_t seed, const EpisodeHook& hook = {});

}  // namespace rlgogar
