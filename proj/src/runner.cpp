#include "rlgogar/runner.hpp"

#include <filesystem>
#include <sstream>
#include <stdexcept>

#include "rlgogar/a3c.hpp"
#include "rlgogar/checkpoint.hpp"
#include "rlgogar/envs.hpp"
#include "rlgogar/mdp_io.hpp"
#include "rlgogar/metrics.hpp"
#include "rlgogar/policy_gradient.hpp"
#include "rlgogar/population.hpp"
#include "rlgogar/qlearn.hpp"
#include "rlgogar/version.hpp"

namespace fs = std::filesystem;

namespace rlgogar {

namespace {

AcHyper hyper_from(const ExperimentConfig& cfg, const Mdp& mdp) {
  AcHyper h;
  h.alpha = cfg.alpha;
  h.beta = cfg.beta;
  h.gamma = cfg.gamma_override.value_or(mdp.gamma);
  h.t_cap = cfg.step_cap > 0 ? cfg.step_cap : 10 * mdp.n_states;
  return h;
}

std::vector<int> greedy_from_softmax(const SoftmaxPolicy& p, const Mdp& mdp) {
  if (p.dim() != mdp.n_states || p.n_actions() != mdp.n_actions)
    throw std::invalid_argument("[harness] checkpoint shape does not match the MDP");
  const FeatureMap fm = FeatureMap::one_hot(mdp.n_states);
  std::vector<int> pi(mdp.n_states, -1);
  for (int s = 0; s < mdp.n_states; ++s) {
    if (mdp.is_terminal(s)) continue;
    const auto probs = policy_probs(p, fm, s);
    pi[s] = argmax_lowest(probs);
  }
  return pi;
}

}  // namespace

RunArtifacts run_experiment(const ExperimentConfig& cfg) {
  // everything that can be rejected is rejected before any artifact exists
  const Mdp mdp = load_mdp(cfg.mdp_path);
  const AcHyper hyper = hyper_from(cfg, mdp);
  hyper.validate();

  // the population run builds its trace universe from the oracle policy
  CounterUniverse trace_universe;
  if (cfg.algorithm == Algorithm::GogarA3c && cfg.trace_enabled) {
    const auto vi = value_iteration(mdp);
    trace_universe = to_gogar_universe(build_token_graph(mdp, vi.policy));
  }

  RunArtifacts art;
  art.output_dir = cfg.output_dir;
  fs::create_directories(cfg.output_dir);
  const auto path_in = [&](const std::string& leaf) {
    return (fs::path(cfg.output_dir) / leaf).string();
  };

  std::string run_id = fs::path(cfg.output_dir).filename().string();
  if (run_id.empty()) run_id = to_string(cfg.algorithm);
  art.metrics_path = path_in("metrics.csv");
  MetricsLogger metrics(art.metrics_path, run_id);

  const std::uint64_t train_seed = derive_seed(cfg.seed, 0);
  std::ostringstream seed_notes;
  seed_notes << "# derived_seed train " << train_seed << '\n';

  switch (cfg.algorithm) {
    case Algorithm::QLearning: {
      QLearnConfig qc;
      qc.alpha = cfg.alpha;
      qc.epsilon = cfg.epsilon;
      qc.gamma_override = cfg.gamma_override;
      qc.step_cap = cfg.step_cap;
      const QTable q = train_q(mdp, cfg.episodes, qc, train_seed, [&](const EpisodeStats& st) {
        metrics.log(st.episode_return, st.length, st.td_abs_mean);
      });
      art.checkpoint_path = path_in("qtable.txt");
      write_text_file(art.checkpoint_path, write_qtable(q));
      break;
    }
    case Algorithm::Reinforce: {
      const SoftmaxPolicy p =
          train_reinforce(mdp, cfg.alpha, hyper.gamma, cfg.episodes, hyper.t_cap, train_seed,
                          [&](const EpisodeStats& st) {
                            metrics.log(st.episode_return, st.length, st.td_abs_mean);
                          });
      art.checkpoint_path = path_in("params.txt");
      write_text_file(art.checkpoint_path, write_actor_critic(p));
      break;
    }
    case Algorithm::ActorCritic: {
      const AcResult res =
          train_actor_critic(mdp, hyper, cfg.episodes, train_seed, [&](const EpisodeStats& st) {
            metrics.log(st.episode_return, st.length, st.td_abs_mean);
          });
      art.checkpoint_path = path_in("params.txt");
      write_text_file(art.checkpoint_path, write_actor_critic(res.policy, &res.value));
      break;
    }
    case Algorithm::A3c: {
      for (int i = 0; i < cfg.n_threads; ++i)
        seed_notes << "# derived_seed worker" << i << ' '
                   << derive_seed(train_seed, static_cast<std::uint64_t>(i)) << '\n';
      const A3cResult res = train_a3c(mdp, cfg.n_threads, hyper, cfg.t_max, cfg.segments,
                                      train_seed, [&](const SegmentStats& st) {
                                        metrics.log(st.segment_return, st.steps, st.td_abs_mean,
                                                    st.update_count);
                                      });
      art.checkpoint_path = path_in("params.txt");
      const SoftmaxPolicy p{res.params.theta};
      const LinearValueFn v{res.params.w};
      write_text_file(art.checkpoint_path, write_actor_critic(p, &v));
      break;
    }
    case Algorithm::GogarA3c: {
      GogarA3cConfig gc;
      gc.population_size = cfg.population_size;
      gc.t_max = cfg.t_max;
      gc.rounds = cfg.rounds;
      gc.seed = train_seed;
      gc.trace_enabled = cfg.trace_enabled;
      gc.trace_universe = cfg.trace_enabled ? &trace_universe : nullptr;
      const GogarA3cResult res =
          train_gogar_a3c(mdp, hyper, gc, [&](const RoundStats& st) {
            metrics.log(st.return_sum, st.steps, st.td_abs_mean,
                        static_cast<std::uint64_t>(st.pairs_total));
          });
      art.checkpoint_path = path_in("population.txt");
      write_text_file(art.checkpoint_path, write_population(res.population));
      if (cfg.trace_enabled) {
        write_text_file(path_in("universe.txt"), write_universe(trace_universe));
        for (const auto& tr : res.traces) {
          std::ostringstream leaf;
          leaf << "trace_r" << tr.round << "_p" << tr.pair_index << ".txt";
          const std::string p = path_in(leaf.str());
          write_text_file(p, serialize_trace(tr, "universe.txt"));
          art.trace_paths.push_back(p);
        }
      }
      break;
    }
  }

  art.manifest_path = path_in("manifest.txt");
  std::ostringstream manifest;
  manifest << "# rlgogar run manifest; re-runnable as a config file\n";
  manifest << "# version " << kVersion << '\n';
  manifest << seed_notes.str();
  manifest << cfg.canonical_text();
  write_text_file(art.manifest_path, manifest.str());

  art.metrics_rows = metrics.rows_written();
  return art;
}

std::string oracle_report(const Mdp& mdp, const ValueIterationResult& vi) {
  std::ostringstream os;
  os << "mdp " << mdp.name << ": " << mdp.n_states << " states, " << mdp.n_actions
     << " actions, gamma " << format_g17(mdp.gamma) << '\n';
  for (int s = 0; s < mdp.n_states; ++s) {
    os << "state " << s << ": ";
    if (mdp.is_terminal(s)) {
      os << "terminal\n";
    } else {
      os << "V* " << format_g17(vi.values[s]) << " pi* " << vi.policy[s] << '\n';
    }
  }
  os << "sweeps " << vi.sweeps << '\n';
  return os.str();
}

BridgeReport bridge_from_files(const std::string& mdp_path, const std::string& policy_path,
                               bool greedy_extract, const std::string& unit_id) {
  const Mdp mdp = load_mdp(mdp_path);
  const PolicySource src = parse_policy_source(read_text_file(policy_path));

  std::vector<int> pi;
  switch (src.kind) {
    case PolicySourceKind::QTable: {
      if (src.qtable.n_states() != mdp.n_states || src.qtable.n_actions() != mdp.n_actions)
        throw std::invalid_argument("[harness] qtable shape does not match the MDP");
      pi = greedy_policy(src.qtable);
      for (int s = 0; s < mdp.n_states; ++s)
        if (mdp.is_terminal(s)) pi[s] = -1;
      break;
    }
    case PolicySourceKind::Softmax: {
      if (!greedy_extract)
        throw std::invalid_argument(
            "[harness] deterministic policy required; pass --greedy to extract the argmax policy");
      pi = greedy_from_softmax(src.actor_critic.policy, mdp);
      break;
    }
    case PolicySourceKind::Population: {
      if (unit_id.empty())
        throw std::invalid_argument(
            "[harness] population checkpoint: pick a unit with --unit <id>");
      if (!greedy_extract)
        throw std::invalid_argument(
            "[harness] deterministic policy required; pass --greedy to extract the argmax policy");
      const PopulationCheckpoint::Unit* found = nullptr;
      for (const auto& u : src.population.units)
        if (u.pid == unit_id) found = &u;
      if (found == nullptr)
        throw std::invalid_argument("[harness] unit '" + unit_id + "' not in checkpoint");
      pi = greedy_from_softmax(found->policy, mdp);
      break;
    }
    case PolicySourceKind::Explicit: {
      pi = src.explicit_policy;
      if (static_cast<int>(pi.size()) != mdp.n_states)
        throw std::invalid_argument("[harness] policy length does not match the MDP");
      break;
    }
  }

  BridgeReport rep;
  rep.graph = build_token_graph(mdp, pi);
  rep.universe = to_gogar_universe(rep.graph);
  rep.equivalence = check_structural_equivalence(rep.graph, rep.universe);
  rep.graph_text = serialize_token_graph(rep.graph);
  std::ostringstream os;
  os << "provenance " << rep.graph.provenance << '\n';
  os << "tokens " << rep.graph.tokens.size() << '\n';
  os << "edges " << rep.graph.edges.size() << '\n';
  os << "absorbing_exits " << rep.graph.absorbing_exits.size() << '\n';
  os << "counters " << rep.universe.counters.size() << '\n';
  os << "equivalence " << (rep.equivalence ? "true" : "false") << '\n';
  rep.summary = os.str();
  return rep;
}

CounterUniverse parse_universe(std::string_view text) {
  CounterUniverse u;
  std::istringstream is{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string key;
    if (!(ls >> key)) continue;
    try {
      if (key == "provenance") {
        if (!(ls >> u.provenance)) throw std::invalid_argument("provenance tag missing");
      } else if (key == "counter") {
        std::string c;
        if (!(ls >> c)) throw std::invalid_argument("counter id missing");
        u.add_counter(c);
      } else if (key == "cc") {
        std::string from, to;
        if (!(ls >> from >> to)) throw std::invalid_argument("cc needs: from to");
        u.add_cc(from, to);
      } else if (key == "incompat") {
        std::string a, b;
        if (!(ls >> a >> b)) throw std::invalid_argument("incompat needs: a b");
        u.add_incompatible(a, b);
      } else {
        throw std::invalid_argument("unknown key '" + key + "'");
      }
    } catch (const std::exception& e) {
      throw std::invalid_argument("[harness] universe line " + std::to_string(lineno) + ": " +
                                  e.what());
    }
  }
  return u;
}

std::string write_universe(const CounterUniverse& u) {
  std::ostringstream os;
  if (!u.provenance.empty()) os << "provenance " << u.provenance << '\n';
  for (const auto& c : u.counters) os << "counter " << c << '\n';
  for (const auto& [from, targets] : u.cc)
    for (const auto& to : targets) os << "cc " << from << ' ' << to << '\n';
  for (const auto& [a, b] : u.incompatible) os << "incompat " << a << ' ' << b << '\n';
  return os.str();
}

std::string run_gogar_script(const CounterUniverse& universe, std::string_view script,
                             GogarOptions options) {
  GameState game(universe, options);
  std::ostringstream os;
  std::istringstream is{std::string(script)};
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string kind;
    if (!(ls >> kind)) continue;
    try {
      if (kind == "commit") {
        std::string who, c;
        if (!(ls >> who >> c)) throw std::invalid_argument("commit needs: player counter");
        game.commit(who, c);
      } else if (kind == "entitle") {
        std::string who, c;
        if (!(ls >> who >> c)) throw std::invalid_argument("entitle needs: player counter");
        game.entitle(who, c);
      } else if (kind == "challenge") {
        std::string keeper, who, c;
        if (!(ls >> keeper >> who >> c))
          throw std::invalid_argument("challenge needs: scorekeeper player counter");
        game.challenge(keeper, who, c);
      } else if (kind == "assert") {
        std::string who, c;
        if (!(ls >> who >> c)) throw std::invalid_argument("assert needs: player counter");
        game.assert_move(who, c);
      } else {
        throw std::invalid_argument("unknown move kind '" + kind + "'");
      }
    } catch (const std::exception& e) {
      throw std::invalid_argument("[harness] script line " + std::to_string(lineno) + ": " +
                                  e.what());
    }
    os << move_to_line(game.move_log().back()) << '\n';
  }

  os << "-- final score --\n";
  for (const auto& [pid, ps] : game.participants()) {
    os << "participant " << pid << '\n';
    os << "  commitments:";
    for (const auto& c : ps.commitment_box) os << ' ' << c;
    os << '\n';
    os << "  entitlements:";
    for (const auto& c : ps.entitlement_box) os << ' ' << c;
    os << '\n';
    os << "  assertions:";
    for (const auto& c : ps.entitlement_box)
      if (game.is_assertion(pid, c)) os << ' ' << c;
    os << '\n';
  }
  return os.str();
}

std::string replay_report(const std::string& trace_path, const std::string& universe_path,
                          GogarOptions options) {
  const ParsedTrace trace = parse_trace(read_text_file(trace_path));

  CounterUniverse universe;
  std::string universe_src = "(empty)";
  if (!universe_path.empty()) {
    universe = parse_universe(read_text_file(universe_path));
    universe_src = universe_path;
  } else if (!trace.universe_hint.empty()) {
    const auto hinted = fs::path(trace_path).parent_path() / trace.universe_hint;
    universe = parse_universe(read_text_file(hinted.string()));
    universe_src = hinted.string();
  }
  for (const auto& c : trace.lazy_registered)
    if (!universe.has(c)) universe.add_counter(c);

  const GameState game = replay(universe, trace.log, options);

  std::ostringstream os;
  os << "replayed " << game.move_log().size() << " moves against " << universe_src << '\n';
  for (const auto& [pid, ps] : game.participants()) {
    os << "participant " << pid << ": " << ps.commitment_box.size() << " committed, "
       << ps.entitlement_box.size() << " entitled\n";
  }
  os << "replay ok\n";
  return os.str();
}

}  // namespace rlgogar
