#include <doctest.h>

#include <cmath>

#include "rlgogar/envs.hpp"
#include "rlgogar/policy_gradient.hpp"
#include "test_util.hpp"

using namespace rlgogar;

TEST_CASE("td_error: direct substitution and zero fixed point") {
  const FeatureMap fm = FeatureMap::one_hot(2);
  LinearValueFn v(std::vector<double>{0.5, 1.0});
  CHECK(td_error(2.0, 0.9, v, fm, 0, 1, false) == doctest::Approx(2.4));

  LinearValueFn zero(2);
  CHECK(td_error(0.0, 0.9, zero, fm, 0, 1, false) == 0.0);
  CHECK_THROWS_AS(td_error(std::nan(""), 0.9, v, fm, 0, 1, false), std::runtime_error);
}

TEST_CASE("td_error: expected error vanishes under the exact policy value") {
  Mdp m = make_chain(3, 0.9);
  const std::vector<int> pi = {0, 0, -1};  // always advance
  const auto v_exact = test_util::policy_evaluation_exact(m, pi);

  const FeatureMap fm = FeatureMap::one_hot(3);
  LinearValueFn v(3);
  for (int s = 0; s < 3; ++s) v.w[s] = m.is_terminal(s) ? 0.0 : v_exact[s];

  for (int s = 0; s < 3; ++s) {
    if (m.is_terminal(s)) continue;
    double expected_delta = 0.0;
    const auto row = m.trans_row(s, pi[s]);
    for (int s2 = 0; s2 < 3; ++s2) {
      if (row[s2] == 0.0) continue;
      expected_delta +=
          row[s2] * td_error(m.reward_at(s, pi[s], s2), m.gamma, v, fm, s, s2, m.is_terminal(s2));
    }
    CHECK(std::fabs(expected_delta) < 1e-6);
  }
}

TEST_CASE("td_error: baseline shift moves delta by k(gamma - 1) on non-terminal targets") {
  const FeatureMap fm = FeatureMap::one_hot(3);
  Rng rng(40);
  for (int trial = 0; trial < 20; ++trial) {
    LinearValueFn v(3);
    for (auto& x : v.w) x = 2.0 * rng.uniform() - 1.0;
    const double k = 4.0 * rng.uniform() - 2.0;
    LinearValueFn shifted = v;
    for (auto& x : shifted.w) x += k;
    const double r = rng.uniform();
    const double gamma = 0.8;
    const double base = td_error(r, gamma, v, fm, 0, 1, false);
    const double moved = td_error(r, gamma, shifted, fm, 0, 1, false);
    CHECK(moved - base == doctest::Approx(k * (gamma - 1.0)).epsilon(1e-12));
    // terminal target: only the -v(s) side shifts
    const double base_t = td_error(r, gamma, v, fm, 0, 1, true);
    const double moved_t = td_error(r, gamma, shifted, fm, 0, 1, true);
    CHECK(moved_t - base_t == doctest::Approx(-k).epsilon(1e-12));
  }
}

TEST_CASE("reinforce_update: zero returns are a no-op, single-step form") {
  const FeatureMap fm = FeatureMap::one_hot(2);
  SoftmaxPolicy p(2, 2);
  Episode zero;
  zero.steps = {{0, 0, 0.0}, {0, 1, 0.0}};
  zero.final_state = 1;
  SoftmaxPolicy before = p;
  reinforce_update(p, fm, zero, 0.1, 0.9);
  CHECK(p.theta == before.theta);

  Episode one;
  one.steps = {{0, 0, 1.0}};
  one.final_state = 1;
  SoftmaxPolicy q(2, 2);
  reinforce_update(q, fm, one, 0.1, 0.9);
  const Matrix g = log_policy_grad(before, fm, 0, 0);  // entry parameters are zero
  for (std::size_t i = 0; i < q.theta.data.size(); ++i)
    CHECK(q.theta.data[i] == doctest::Approx(0.1 * g.data[i]));

  Episode empty;
  CHECK_THROWS_AS(reinforce_update(q, fm, empty, 0.1, 0.9), std::invalid_argument);
}

TEST_CASE("reinforce_update: scaling rewards scales every increment exactly") {
  const FeatureMap fm = FeatureMap::one_hot(3);
  Rng rng(41);
  for (int trial = 0; trial < 10; ++trial) {
    SoftmaxPolicy base(2, 3);
    for (auto& v : base.theta.data) v = rng.uniform() - 0.5;

    Episode ep;
    const int len = 1 + rng.below(6);
    for (int t = 0; t < len; ++t)
      ep.steps.push_back({rng.below(2), rng.below(2), rng.uniform()});
    ep.final_state = 2;

    const double c = 3.0;
    Episode scaled = ep;
    for (auto& st : scaled.steps) st.reward *= c;

    SoftmaxPolicy p1 = base, p2 = base;
    reinforce_update(p1, fm, ep, 0.05, 0.9);
    reinforce_update(p2, fm, scaled, 0.05, 0.9);
    for (std::size_t i = 0; i < base.theta.data.size(); ++i) {
      const double inc1 = p1.theta.data[i] - base.theta.data[i];
      const double inc2 = p2.theta.data[i] - base.theta.data[i];
      CHECK(inc2 == doctest::Approx(c * inc1).epsilon(1e-12));
    }
  }
}

TEST_CASE("train_reinforce: optimal action dominates on the chain") {
  Mdp m = make_chain(3, 0.9);
  const auto vi = value_iteration(m);
  const SoftmaxPolicy p = train_reinforce(m, 0.05, m.gamma, 2000, 30, 7);
  const FeatureMap fm = FeatureMap::one_hot(3);
  const auto probs = policy_probs(p, fm, 0);
  CHECK(probs[vi.policy[0]] > 0.9);
}

TEST_CASE("actor_critic_step: zero delta is the identity, I decays") {
  const FeatureMap fm = FeatureMap::one_hot(2);
  SoftmaxPolicy p(2, 2);
  LinearValueFn v(2);
  double importance = 1.0;
  const double delta = actor_critic_step(p, v, fm, 0, 0, 0.0, 1, false, importance, AcHyper{});
  CHECK(delta == 0.0);
  for (double x : p.theta.data) CHECK(x == 0.0);
  for (double x : v.w) CHECK(x == 0.0);
  CHECK(importance == doctest::Approx(0.9));
}

TEST_CASE("actor_critic_step: substitution from zero initialization") {
  const FeatureMap fm = FeatureMap::one_hot(3);
  SoftmaxPolicy p(2, 3);
  LinearValueFn v(3);
  AcHyper h;
  h.alpha = 0.1;
  h.beta = 0.5;
  h.gamma = 0.9;
  double importance = 1.0;
  const SoftmaxPolicy before = p;
  const double delta = actor_critic_step(p, v, fm, 0, 1, 1.0, 1, false, importance, h);
  CHECK(delta == doctest::Approx(1.0));
  CHECK(v.w[0] == doctest::Approx(0.5));
  CHECK(v.w[1] == 0.0);
  const Matrix g = log_policy_grad(before, fm, 0, 1);
  for (std::size_t i = 0; i < p.theta.data.size(); ++i)
    CHECK(p.theta.data[i] == doctest::Approx(0.1 * g.data[i]));
  CHECK_THROWS_AS(actor_critic_step(p, v, fm, 0, 1, 1.0, 1, false, importance = 0.0, h),
                  std::invalid_argument);
}

TEST_CASE("actor_critic_step: delta uses the pre-update critic") {
  // with v(s) = v(s') = 1 and r = 0, delta = gamma - 1 regardless of beta;
  // a post-update read would change delta when beta is large.
  const FeatureMap fm = FeatureMap::one_hot(2);
  SoftmaxPolicy p(2, 2);
  LinearValueFn v(std::vector<double>{1.0, 1.0});
  AcHyper h;
  h.beta = 10.0;
  h.gamma = 0.9;
  double importance = 1.0;
  const double delta = actor_critic_step(p, v, fm, 0, 0, 0.0, 1, false, importance, h);
  CHECK(delta == doctest::Approx(0.9 - 1.0));
}

TEST_CASE("importance factor equals gamma^n within an episode") {
  Mdp m = make_chain(6, 0.9);
  AcHyper h;
  h.gamma = 0.9;
  h.t_cap = 50;
  long long steps_seen = 0;
  double last_importance = 1.0;
  // reconstruct I from the step count: I starts at 1 per episode
  SoftmaxPolicy p(m.n_actions, m.n_states);
  LinearValueFn v(m.n_states);
  const FeatureMap fm = FeatureMap::one_hot(m.n_states);
  Rng rng(3);
  int s = sample_start(m, rng);
  double importance = 1.0;
  while (!m.is_terminal(s) && steps_seen < 20) {
    const int a = rng.categorical(policy_probs(p, fm, s));
    auto [s2, r] = step(m, s, a, rng);
    actor_critic_step(p, v, fm, s, a, r, s2, m.is_terminal(s2), importance, h);
    ++steps_seen;
    last_importance = importance;
    s = s2;
  }
  CHECK(std::fabs(last_importance - std::pow(0.9, static_cast<double>(steps_seen))) <= 1e-12);
}

TEST_CASE("train_actor_critic: empty training, determinism") {
  Mdp m = make_chain(3, 0.9);
  AcHyper h;
  const AcResult none = train_actor_critic(m, h, 0, 11);
  for (double x : none.policy.theta.data) CHECK(x == 0.0);
  for (double x : none.value.w) CHECK(x == 0.0);

  const AcResult a = train_actor_critic(m, h, 400, 11);
  const AcResult b = train_actor_critic(m, h, 400, 11);
  CHECK(a.policy.theta == b.policy.theta);
  CHECK(a.value.w == b.value.w);
}

TEST_CASE("train_actor_critic: chain convergence with accurate critic") {
  Mdp m = make_chain(3, 0.9);
  AcHyper h;
  h.alpha = 0.1;
  h.beta = 0.2;
  h.gamma = m.gamma;
  h.t_cap = 30;
  const AcResult res = train_actor_critic(m, h, 5000, 13);
  const auto vi = value_iteration(m);
  const FeatureMap fm = FeatureMap::one_hot(3);
  for (int s = 0; s < 3; ++s) {
    if (m.is_terminal(s)) continue;
    const auto probs = policy_probs(res.policy, fm, s);
    CHECK(argmax_lowest(probs) == vi.policy[s]);
    CHECK(std::fabs(value(res.value, fm, s) - vi.values[s]) < 0.05);
  }
}

TEST_CASE("train_actor_critic: gridworld greedy policy matches the oracle where unique") {
  Mdp m = make_gridworld(4, 4, 0.9);
  AcHyper h;
  h.alpha = 0.1;
  h.beta = 0.2;
  h.gamma = m.gamma;
  h.t_cap = 160;
  const AcResult res = train_actor_critic(m, h, 20000, 29);
  const auto vi = value_iteration(m);
  const auto optimal = optimal_action_sets(m, vi.values);
  const FeatureMap fm = FeatureMap::one_hot(m.n_states);
  for (int s = 0; s < m.n_states; ++s) {
    if (m.is_terminal(s) || optimal[s].size() != 1) continue;
    const auto probs = policy_probs(res.policy, fm, s);
    CHECK(argmax_lowest(probs) == optimal[s][0]);
  }
}
