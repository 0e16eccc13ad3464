#include <doctest.h>

#include <cmath>
#include <mutex>

#include "rlgogar/a3c.hpp"
#include "rlgogar/envs.hpp"
#include "test_util.hpp"

using namespace rlgogar;

TEST_CASE("accumulate: additivity, zero delta, shape checks") {
  GradientAccumulator acc(2, 3);
  const std::vector<double> vg = {1.0, 0.0, 0.0};
  Matrix lg(2, 3);
  lg.at(0, 0) = 1.0;

  accumulate(acc, 1.0, vg, lg, 1.0, 0.2, 0.1);
  accumulate(acc, 1.0, vg, lg, 1.0, 0.2, 0.1);
  CHECK(acc.d_w[0] == doctest::Approx(0.2));
  CHECK(acc.d_theta.at(0, 0) == doctest::Approx(0.4));
  CHECK(acc.n_steps == 2);

  GradientAccumulator zero(2, 3);
  accumulate(zero, 0.0, vg, lg, 1.0, 0.2, 0.1);
  for (double x : zero.d_w) CHECK(x == 0.0);
  for (double x : zero.d_theta.data) CHECK(x == 0.0);
  CHECK(zero.n_steps == 1);

  const std::vector<double> bad = {1.0};
  CHECK_THROWS_AS(accumulate(acc, 1.0, bad, lg, 1.0, 0.2, 0.1), std::invalid_argument);
}

TEST_CASE("accumulate: a segment equals the sum of frozen single-step increments") {
  Mdp m = make_chain(4, 0.9);
  AcHyper h;
  h.alpha = 0.1;
  h.beta = 0.3;
  h.gamma = m.gamma;
  const FeatureMap fm = FeatureMap::one_hot(m.n_states);

  Rng param_rng(50);
  SoftmaxPolicy snap_p(m.n_actions, m.n_states);
  LinearValueFn snap_v(m.n_states);
  for (auto& x : snap_p.theta.data) x = param_rng.uniform() - 0.5;
  for (auto& x : snap_v.w) x = param_rng.uniform() - 0.5;

  Rng rng(51);
  GradientAccumulator acc(m.n_actions, m.n_states);
  Matrix oracle_dtheta(m.n_actions, m.n_states);
  std::vector<double> oracle_dw(m.n_states, 0.0);

  int s = sample_start(m, rng);
  double importance = 1.0;
  int steps = 0;
  while (!m.is_terminal(s) && steps < 6) {
    const int a = rng.categorical(policy_probs(snap_p, fm, s));
    auto [s2, r] = step(m, s, a, rng);
    const double delta = td_error(r, h.gamma, snap_v, fm, s, s2, m.is_terminal(s2));
    accumulate(acc, delta, value_grad(snap_v, fm, s), log_policy_grad(snap_p, fm, s, a),
               importance, h.alpha, h.beta);

    // oracle: one actor-critic step from the frozen snapshot, recorded as an
    // increment against that snapshot
    SoftmaxPolicy p_copy = snap_p;
    LinearValueFn v_copy = snap_v;
    double imp_copy = importance;
    actor_critic_step(p_copy, v_copy, fm, s, a, r, s2, m.is_terminal(s2), imp_copy, h);
    for (std::size_t i = 0; i < oracle_dtheta.data.size(); ++i)
      oracle_dtheta.data[i] += p_copy.theta.data[i] - snap_p.theta.data[i];
    for (std::size_t i = 0; i < oracle_dw.size(); ++i) oracle_dw[i] += v_copy.w[i] - snap_v.w[i];

    importance *= h.gamma;
    ++steps;
    s = s2;
  }
  REQUIRE(acc.n_steps == steps);
  for (std::size_t i = 0; i < oracle_dtheta.data.size(); ++i)
    CHECK(acc.d_theta.data[i] == doctest::Approx(oracle_dtheta.data[i]).epsilon(1e-12));
  for (std::size_t i = 0; i < oracle_dw.size(); ++i)
    CHECK(acc.d_w[i] == doctest::Approx(oracle_dw[i]).epsilon(1e-12));
}

TEST_CASE("async_apply: exact single application, commutativity, empty no-op") {
  GlobalParams store(2, 2);
  GradientAccumulator acc(2, 2);
  const std::vector<double> vg = {0.0, 1.0};
  Matrix lg(2, 2);
  lg.at(1, 1) = 2.0;
  accumulate(acc, 0.5, vg, lg, 1.0, 0.1, 0.4);
  const Matrix d_theta = acc.d_theta;
  const std::vector<double> d_w = acc.d_w;

  CHECK(async_apply(store, acc));
  const auto snap = store.snapshot();
  CHECK(snap.theta == d_theta);
  CHECK(snap.w == d_w);
  CHECK(snap.version == 1);
  CHECK(acc.n_steps == 0);  // reset after apply

  GradientAccumulator empty(2, 2);
  CHECK_FALSE(async_apply(store, empty));
  CHECK(store.update_count() == 1);

  // d1 then d2 in either order gives the same store
  GlobalParams s1(2, 2), s2(2, 2);
  GradientAccumulator a1(2, 2), a2(2, 2);
  accumulate(a1, 0.7, vg, lg, 1.0, 0.1, 0.4);
  accumulate(a2, -0.3, vg, lg, 0.9, 0.1, 0.4);
  GradientAccumulator b1 = a1, b2 = a2;
  async_apply(s1, a1);
  async_apply(s1, a2);
  async_apply(s2, b2);
  async_apply(s2, b1);
  const auto v1 = s1.snapshot(), v2 = s2.snapshot();
  for (std::size_t i = 0; i < v1.theta.data.size(); ++i)
    CHECK(v1.theta.data[i] == doctest::Approx(v2.theta.data[i]).epsilon(1e-15));
  for (std::size_t i = 0; i < v1.w.size(); ++i)
    CHECK(v1.w[i] == doctest::Approx(v2.w[i]).epsilon(1e-15));
}

TEST_CASE("train_a3c: ledger replay equals the final store (4 workers x 50 segments)") {
  Mdp m = make_chain(3, 0.9);
  AcHyper h;
  h.alpha = 0.1;
  h.beta = 0.2;
  h.gamma = m.gamma;
  h.t_cap = 30;
  const A3cResult res = train_a3c(m, 4, h, 5, 200, 77, {}, true);
  REQUIRE(res.ledger.size() == res.update_count);

  Matrix theta_sum(m.n_actions, m.n_states);
  std::vector<double> w_sum(m.n_states, 0.0);
  for (const auto& d : res.ledger) {
    for (std::size_t i = 0; i < theta_sum.data.size(); ++i) theta_sum.data[i] += d.d_theta.data[i];
    for (std::size_t i = 0; i < w_sum.size(); ++i) w_sum[i] += d.d_w[i];
  }
  CHECK(sup_norm_diff(theta_sum.data, res.params.theta.data) <= 1e-9);
  CHECK(sup_norm_diff(w_sum, res.params.w) <= 1e-9);
}

TEST_CASE("worker_loop: stop before the first segment leaves the store untouched") {
  Mdp m = make_chain(3, 0.9);
  GlobalParams store(m.n_actions, m.n_states);
  StopToken stop(0);  // no budget at all
  AcHyper h;
  h.gamma = m.gamma;
  worker_loop(store, m, h, 5, 1, stop);
  CHECK(store.update_count() == 0);
  const auto snap = store.snapshot();
  for (double x : snap.theta.data) CHECK(x == 0.0);
  for (double x : snap.w) CHECK(x == 0.0);
}

TEST_CASE("worker_loop: t_max beyond episode length gives one whole-episode apply") {
  Mdp m = make_chain(3, 0.9);  // episodes are at most 2 steps under any policy cap
  GlobalParams store(m.n_actions, m.n_states);
  StopToken stop(1);
  AcHyper h;
  h.gamma = m.gamma;
  h.t_cap = 30;
  std::vector<SegmentStats> segs;
  worker_loop(store, m, h, 50, 2, stop, 0, [&](const SegmentStats& st) { segs.push_back(st); });
  REQUIRE(segs.size() == 1);
  CHECK(store.update_count() == 1);
  CHECK(segs[0].steps >= 1);
  CHECK(segs[0].steps <= 30);  // ended at the terminal, not at t_max
}

TEST_CASE("train_a3c: single worker with t_max=1 matches actor-critic step for step") {
  Mdp m = make_chain(3, 0.9);
  AcHyper h;
  h.alpha = 0.1;
  h.beta = 0.2;
  h.gamma = m.gamma;
  h.t_cap = 30;
  const std::uint64_t master = 4242;

  // reference trajectory: plain actor-critic, one entry per step
  std::vector<Matrix> thetas;
  std::vector<std::vector<double>> ws;
  train_actor_critic(m, h, 60, derive_seed(master, 0), {},
                     [&](const SoftmaxPolicy& p, const LinearValueFn& v, double) {
                       thetas.push_back(p.theta);
                       ws.push_back(v.w);
                     });

  std::vector<Matrix> a3c_thetas;
  std::vector<std::vector<double>> a3c_ws;
  const A3cResult res =
      train_a3c(m, 1, h, 1, static_cast<long long>(thetas.size()), master,
                [&](const SegmentStats& st) {
                  a3c_thetas.push_back(st.params_after.theta);
                  a3c_ws.push_back(st.params_after.w);
                });

  REQUIRE(a3c_thetas.size() == thetas.size());
  for (std::size_t i = 0; i < thetas.size(); ++i) {
    CHECK(a3c_thetas[i] == thetas[i]);
    CHECK(a3c_ws[i] == ws[i]);
  }
  CHECK(res.params.theta == thetas.back());
  CHECK(res.params.w == ws.back());
}

TEST_CASE("train_a3c: update counting and staleness bound") {
  Mdp m = make_chain(3, 0.9);
  AcHyper h;
  h.gamma = m.gamma;
  h.t_cap = 30;
  std::vector<SegmentStats> segs;
  std::mutex seg_mu;
  const long long total = 100;
  const A3cResult res = train_a3c(m, 4, h, 5, total, 5, [&](const SegmentStats& st) {
    std::lock_guard lk(seg_mu);
    segs.push_back(st);
  });
  CHECK(res.update_count >= total - 4);
  CHECK(res.update_count <= total + 4);
  for (const auto& st : segs) CHECK(st.snapshot_version < st.update_count);
}

TEST_CASE("train_a3c: single thread is deterministic") {
  Mdp m = make_chain(3, 0.9);
  AcHyper h;
  h.gamma = m.gamma;
  const A3cResult a = train_a3c(m, 1, h, 5, 50, 9);
  const A3cResult b = train_a3c(m, 1, h, 5, 50, 9);
  CHECK(a.params.theta == b.params.theta);
  CHECK(a.params.w == b.params.w);
  CHECK(a.update_count == b.update_count);
}

TEST_CASE("train_a3c: greedy policy reaches the oracle on the chain") {
  Mdp m = make_chain(3, 0.9);
  AcHyper h;
  h.alpha = 0.1;
  h.beta = 0.2;
  h.gamma = m.gamma;
  h.t_cap = 30;
  const A3cResult res = train_a3c(m, 2, h, 5, 3000, 21);
  const auto vi = value_iteration(m);
  const FeatureMap fm = FeatureMap::one_hot(m.n_states);
  const SoftmaxPolicy p{res.params.theta};
  for (int s = 0; s < m.n_states; ++s) {
    if (m.is_terminal(s)) continue;
    CHECK(argmax_lowest(policy_probs(p, fm, s)) == vi.policy[s]);
  }
}
