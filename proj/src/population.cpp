#include "rlgogar/population.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "rlgogar/bridge.hpp"

namespace rlgogar {

Population make_population(int size, int n_actions, int dim) {
  if (size < 2) throw std::invalid_argument("[population] population must have at least 2 units");
  Population pop;
  pop.reserve(size);
  for (int i = 0; i < size; ++i)
    pop.push_back(std::make_unique<ParticipantUnit>("pu" + std::to_string(i), n_actions, dim));
  return pop;
}

InteractionPlan sample_interactions(const Population& population, Rng& rng, int t_max) {
  const int n = static_cast<int>(population.size());
  if (n < 2) throw std::invalid_argument("[population] population must have at least 2 units");
  if (t_max < 1) throw std::invalid_argument("[population] t_max must be >= 1");

  InteractionPlan plan;
  plan.t_max = t_max;
  const int max_pairs = n * (n - 1) / 2;
  const int n_interac = rng.below(max_pairs + 1);  // inclusive upper bound
  plan.pairs.reserve(n_interac);
  for (int i = 0; i < n_interac; ++i) {
    const int actor = rng.below(n);
    const int offset = rng.below(n - 1);
    const int critic = offset >= actor ? offset + 1 : offset;
    plan.pairs.push_back({actor, critic});
  }
  return plan;
}

InteractionStats interaction_thread(ParticipantUnit& actor, ParticipantUnit& critic,
                                    const Mdp& mdp, const AcHyper& hyper, int t_max,
                                    std::uint64_t seed, std::vector<StepEvent>* events,
                                    bool accumulate_updates) {
  hyper.validate();
  if (&actor == &critic || actor.pid == critic.pid)
    throw std::invalid_argument("[population] a unit cannot play actor and critic in one interaction");
  if (t_max < 1) throw std::invalid_argument("[population] t_max must be >= 1");

  const FeatureMap fm = FeatureMap::one_hot(mdp.n_states);
  Rng rng(seed);
  InteractionStats stats;
  double td_abs_sum = 0.0;

  int s = sample_start(mdp, rng);
  double importance = 1.0;

  if (!accumulate_updates) {
    // Algorithm order per step: action from the actor's current policy, TD
    // error and critic update from the critic's current value function, then
    // the actor update; exactly actor_critic_step under both unit locks.
    while (!mdp.is_terminal(s) && stats.steps < t_max) {
      int a;
      {
        std::lock_guard lk(actor.mu);
        a = rng.categorical(policy_probs(actor.policy, fm, s));
      }
      auto [s2, r] = step(mdp, s, a, rng);
      double delta;
      {
        std::scoped_lock lk(actor.mu, critic.mu);
        delta = actor_critic_step(actor.policy, critic.value, fm, s, a, r, s2,
                                  mdp.is_terminal(s2), importance, hyper);
      }
      if (events)
        events->push_back({static_cast<int>(stats.steps), s, a, r, s2, delta});
      td_abs_sum += std::fabs(delta);
      stats.total_return += r;
      ++stats.steps;
      s = s2;
    }
  } else {
    // Comparison variant: gradients are taken against the interaction-start
    // snapshot and applied to both units once at the end.
    Matrix theta_snap;
    std::vector<double> w_snap;
    {
      std::lock_guard lk(actor.mu);
      theta_snap = actor.policy.theta;
    }
    {
      std::lock_guard lk(critic.mu);
      w_snap = critic.value.w;
    }
    const SoftmaxPolicy pol{theta_snap};
    const LinearValueFn val{w_snap};
    GradientAccumulator acc(pol.n_actions(), pol.dim());
    while (!mdp.is_terminal(s) && stats.steps < t_max) {
      const int a = rng.categorical(policy_probs(pol, fm, s));
      auto [s2, r] = step(mdp, s, a, rng);
      const double delta = td_error(r, hyper.gamma, val, fm, s, s2, mdp.is_terminal(s2));
      accumulate(acc, delta, value_grad(val, fm, s), log_policy_grad(pol, fm, s, a), importance,
                 hyper.alpha, hyper.beta);
      importance *= hyper.gamma;
      if (events)
        events->push_back({static_cast<int>(stats.steps), s, a, r, s2, delta});
      td_abs_sum += std::fabs(delta);
      stats.total_return += r;
      ++stats.steps;
      s = s2;
    }
    if (acc.n_steps > 0) {
      std::scoped_lock lk(actor.mu, critic.mu);
      for (std::size_t i = 0; i < acc.d_theta.data.size(); ++i)
        actor.policy.theta.data[i] += acc.d_theta.data[i];
      for (std::size_t i = 0; i < acc.d_w.size(); ++i) critic.value.w[i] += acc.d_w[i];
    }
  }

  {
    std::lock_guard lk(actor.mu);
    ++actor.interaction_count;
  }
  {
    std::lock_guard lk(critic.mu);
    ++critic.interaction_count;
  }
  if (stats.steps > 0) stats.td_abs_mean = td_abs_sum / static_cast<double>(stats.steps);
  return stats;
}

ScorekeepingTrace scorekeeping_trace(std::span<const StepEvent> events,
                                     const CounterUniverse& universe,
                                     const ParticipantId& actor_id,
                                     const ParticipantId& critic_id) {
  if (actor_id == critic_id)
    throw std::invalid_argument("[population] trace roles must be distinct participants");
  GameState game(universe);
  std::vector<CounterId> lazy;
  for (const StepEvent& ev : events) {
    const CounterId c = token_counter_id({ev.s, ev.a});
    if (!game.universe().has(c)) {
      game.register_counter(c);
      lazy.push_back(c);
    }
    game.commit(actor_id, c);
    game.entitle(actor_id, c);
    if (ev.delta < 0.0) game.challenge(critic_id, actor_id, c);
  }
  return {std::move(game), std::move(lazy)};
}

namespace {

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

std::string serialize_trace(const InteractionTrace& trace, const std::string& universe_hint) {
  std::ostringstream os;
  os << "# meta round " << trace.round << " pair " << trace.pair_index << " actor " << trace.actor
     << " critic " << trace.critic << '\n';
  if (!universe_hint.empty()) os << "# meta universe " << universe_hint << '\n';
  for (const CounterId& c : trace.score.lazy_registered) os << "# meta lazy " << c << '\n';

  const auto& log = trace.score.game.move_log();
  std::size_t next = 0;
  for (const StepEvent& ev : trace.events) {
    os << "# meta step " << ev.step << " s " << ev.s << " a " << ev.a << " delta " << g17(ev.delta)
       << '\n';
    // each step produced commit + entitle, plus a challenge on negative delta
    std::size_t moves = ev.delta < 0.0 ? 3 : 2;
    for (std::size_t k = 0; k < moves && next < log.size(); ++k, ++next)
      os << move_to_line(log[next]) << '\n';
  }
  for (; next < log.size(); ++next) os << move_to_line(log[next]) << '\n';
  return os.str();
}

ParsedTrace parse_trace(std::string_view text) {
  ParsedTrace out;
  std::istringstream is{std::string(text)};
  std::string line;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream ls(line);
      std::string hash, meta, key;
      ls >> hash >> meta >> key;
      if (meta != "meta") continue;
      if (key == "universe") ls >> out.universe_hint;
      if (key == "lazy") {
        std::string c;
        if (ls >> c) out.lazy_registered.push_back(c);
      }
      continue;
    }
    out.log.push_back(parse_move_line(line));
  }
  return out;
}

GogarA3cResult train_gogar_a3c(const Mdp& mdp, const AcHyper& hyper, const GogarA3cConfig& cfg,
                               const RoundHook& hook) {
  hyper.validate();
  mdp.validate();
  if (cfg.population_size < 2)
    throw std::invalid_argument("[population] population must have at least 2 units");
  if (cfg.t_max < 1) throw std::invalid_argument("[population] t_max must be >= 1");
  if (cfg.rounds < 0) throw std::invalid_argument("[population] rounds must be >= 0");
  if (cfg.trace_enabled && cfg.trace_universe == nullptr)
    throw std::invalid_argument("[population] tracing requires a counter universe");

  GogarA3cResult res;
  res.population = make_population(cfg.population_size, mdp.n_actions, mdp.n_states);
  Rng plan_rng(cfg.seed);

  for (long long round = 0; round < cfg.rounds; ++round) {
    const InteractionPlan plan = sample_interactions(res.population, plan_rng, cfg.t_max);
    const int n_pairs = static_cast<int>(plan.pairs.size());
    std::vector<InteractionStats> stats(n_pairs);
    std::vector<std::vector<StepEvent>> events(n_pairs);
    const std::uint64_t round_seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(round));

    auto run_pair = [&](int k) {
      const auto& pr = plan.pairs[k];
      stats[k] = interaction_thread(*res.population[pr.actor], *res.population[pr.critic], mdp,
                                    hyper, plan.t_max, derive_seed(round_seed, k),
                                    cfg.trace_enabled ? &events[k] : nullptr,
                                    cfg.accumulate_updates);
    };

    if (cfg.parallel && n_pairs > 1) {
      std::vector<std::thread> threads;
      threads.reserve(n_pairs);
      for (int k = 0; k < n_pairs; ++k) threads.emplace_back(run_pair, k);
      for (auto& t : threads) t.join();
    } else {
      for (int k = 0; k < n_pairs; ++k) run_pair(k);
    }

    if (cfg.trace_enabled) {
      for (int k = 0; k < n_pairs; ++k) {
        const auto& pr = plan.pairs[k];
        InteractionTrace tr;
        tr.round = round;
        tr.pair_index = k;
        tr.actor = res.population[pr.actor]->pid;
        tr.critic = res.population[pr.critic]->pid;
        tr.events = std::move(events[k]);
        tr.score = scorekeeping_trace(tr.events, *cfg.trace_universe, tr.actor, tr.critic);
        res.traces.push_back(std::move(tr));
      }
    }

    res.pairs_executed += n_pairs;
    if (hook) {
      RoundStats rs;
      rs.round = round;
      rs.n_pairs = n_pairs;
      rs.pairs_total = res.pairs_executed;
      double td_sum = 0.0;
      long long td_steps = 0;
      for (const auto& st : stats) {
        rs.steps += st.steps;
        rs.return_sum += st.total_return;
        td_sum += st.td_abs_mean * static_cast<double>(st.steps);
        td_steps += st.steps;
      }
      if (td_steps > 0) rs.td_abs_mean = td_sum / static_cast<double>(td_steps);
      hook(rs);
    }
  }
  return res;
}

}  // namespace rlgogar
