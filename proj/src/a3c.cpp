#include "rlgogar/a3c.hpp"

#include <cmath>
#include <stdexcept>
#include <thread>

namespace rlgogar {

void GradientAccumulator::reset() {
  d_theta.fill(0.0);
  std::fill(d_w.begin(), d_w.end(), 0.0);
  n_steps = 0;
}

GlobalParams::GlobalParams(int n_actions, int dim) : theta_(n_actions, dim, 0.0), w_(dim, 0.0) {
  if (n_actions <= 0 || dim <= 0)
    throw std::invalid_argument("[a3c] parameter shapes must be positive");
}

ParamSnapshot GlobalParams::snapshot() const {
  std::lock_guard lk(mu_);
  return {theta_, w_, updates_};
}

std::uint64_t GlobalParams::update_count() const {
  std::lock_guard lk(mu_);
  return updates_;
}

bool GlobalParams::apply(GradientAccumulator& acc) {
  if (acc.n_steps < 1) return false;
  if (!acc.d_theta.same_shape(theta_) || acc.d_w.size() != w_.size())
    throw std::invalid_argument("[a3c] accumulator shape mismatch");
  {
    std::lock_guard lk(mu_);
    for (std::size_t i = 0; i < theta_.data.size(); ++i) theta_.data[i] += acc.d_theta.data[i];
    for (std::size_t i = 0; i < w_.size(); ++i) w_[i] += acc.d_w[i];
    ++updates_;
    if (ledger_on_) ledger_.push_back({acc.d_theta, acc.d_w});
  }
  acc.reset();
  return true;
}

void GlobalParams::enable_ledger() {
  std::lock_guard lk(mu_);
  ledger_on_ = true;
}

std::vector<ParamDelta> GlobalParams::ledger() const {
  std::lock_guard lk(mu_);
  return ledger_;
}

void accumulate(GradientAccumulator& acc, double delta, std::span<const double> v_grad,
                const Matrix& lp_grad, double importance, double alpha, double beta) {
  if (acc.d_w.size() != v_grad.size() || !acc.d_theta.same_shape(lp_grad))
    throw std::invalid_argument("[a3c] gradient shape mismatch");
  const double wc = beta * delta;
  for (std::size_t i = 0; i < acc.d_w.size(); ++i) acc.d_w[i] += wc * v_grad[i];
  const double tc = alpha * importance * delta;
  for (std::size_t i = 0; i < acc.d_theta.data.size(); ++i)
    acc.d_theta.data[i] += tc * lp_grad.data[i];
  ++acc.n_steps;
}

bool async_apply(GlobalParams& store, GradientAccumulator& acc) { return store.apply(acc); }

void worker_loop(GlobalParams& store, const Mdp& mdp, const AcHyper& hyper, int t_max,
                 std::uint64_t seed, StopToken& stop, int worker_index, const SegmentHook& hook) {
  hyper.validate();
  if (t_max < 1) throw std::invalid_argument("[a3c] t_max must be >= 1");

  const FeatureMap fm = FeatureMap::one_hot(mdp.n_states);
  Rng rng(seed);
  GradientAccumulator acc(store.n_actions(), store.dim());

  int s = -1;  // -1: a fresh episode starts on the next step
  double importance = 1.0;
  int episode_steps = 0;

  while (stop.claim_segment()) {
    const ParamSnapshot snap = store.snapshot();
    const SoftmaxPolicy pol{snap.theta};
    const LinearValueFn val{snap.w};
    acc.reset();

    SegmentStats stats;
    stats.worker = worker_index;
    stats.snapshot_version = snap.version;
    double td_abs_sum = 0.0;

    // A segment covers at most t_max steps of one episode; an early terminal
    // ends the segment and the partial accumulation is applied immediately.
    // Episodes longer than t_max continue in the next segment under a fresh
    // snapshot, with the importance factor carried across.
    if (s < 0 || mdp.is_terminal(s) || episode_steps >= hyper.t_cap) {
      s = sample_start(mdp, rng);
      importance = 1.0;
      episode_steps = 0;
    }
    while (stats.steps < t_max && !mdp.is_terminal(s) && episode_steps < hyper.t_cap) {
      const auto probs = policy_probs(pol, fm, s);
      const int a = rng.categorical(probs);
      auto [s2, r] = step(mdp, s, a, rng);
      const double delta = td_error(r, hyper.gamma, val, fm, s, s2, mdp.is_terminal(s2));
      accumulate(acc, delta, value_grad(val, fm, s), log_policy_grad(pol, fm, s, a), importance,
                 hyper.alpha, hyper.beta);
      importance *= hyper.gamma;
      td_abs_sum += std::fabs(delta);
      stats.segment_return += r;
      ++stats.steps;
      ++episode_steps;
      s = s2;
    }

    async_apply(store, acc);

    if (hook) {
      if (stats.steps > 0) stats.td_abs_mean = td_abs_sum / static_cast<double>(stats.steps);
      stats.params_after = store.snapshot();
      stats.update_count = stats.params_after.version;
      hook(stats);
    }
  }
}

A3cResult train_a3c(const Mdp& mdp, int n_threads, const AcHyper& hyper, int t_max,
                    long long total_segments, std::uint64_t seed, const SegmentHook& hook,
                    bool record_ledger) {
  hyper.validate();
  if (n_threads < 1) throw std::invalid_argument("[a3c] n_threads must be >= 1");
  if (t_max < 1) throw std::invalid_argument("[a3c] t_max must be >= 1");
  if (total_segments < 0) throw std::invalid_argument("[a3c] total_segments must be >= 0");
  mdp.validate();

  GlobalParams store(mdp.n_actions, mdp.n_states);
  if (record_ledger) store.enable_ledger();
  StopToken stop(total_segments);

  if (n_threads == 1) {
    worker_loop(store, mdp, hyper, t_max, derive_seed(seed, 0), stop, 0, hook);
  } else {
    std::vector<std::thread> threads;
    threads.reserve(n_threads);
    for (int i = 0; i < n_threads; ++i)
      threads.emplace_back([&, i] {
        worker_loop(store, mdp, hyper, t_max, derive_seed(seed, static_cast<std::uint64_t>(i)),
                    stop, i, hook);
      });
    for (auto& t : threads) t.join();
  }

  A3cResult res;
  res.params = store.snapshot();
  res.update_count = res.params.version;
  res.ledger = store.ledger();
  return res;
}

}  // namespace rlgogar
