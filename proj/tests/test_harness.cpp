#include <doctest.h>

#include <filesystem>

#include "rlgogar/checkpoint.hpp"
#include "rlgogar/config.hpp"
#include "rlgogar/envs.hpp"
#include "rlgogar/mdp_io.hpp"
#include "rlgogar/population.hpp"
#include "rlgogar/runner.hpp"
#include "test_util.hpp"

using namespace rlgogar;
namespace fs = std::filesystem;

#ifndef RLGOGAR_FIXTURE_DIR
#define RLGOGAR_FIXTURE_DIR "fixtures"
#endif

namespace {

std::string fixture(const std::string& leaf) {
  return (fs::path(RLGOGAR_FIXTURE_DIR) / leaf).string();
}

std::string temp_dir(const std::string& leaf) {
  const auto dir = fs::temp_directory_path() / "rlgogar_tests" / leaf;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir.string();
}

}  // namespace

TEST_CASE("mdp files: fixtures load and round-trip byte-exact") {
  for (const char* name : {"chain3.mdp", "walk5.mdp", "grid4x4.mdp"}) {
    const std::string path = fixture(name);
    const std::string original = read_text_file(path);
    const Mdp m = load_mdp(path);
    CHECK(write_mdp(m) == original);
  }
  const Mdp chain = load_mdp(fixture("chain3.mdp"));
  CHECK(chain.n_states == 3);
  CHECK(chain.name == "chain3");
  const auto vi = value_iteration(chain);
  CHECK(vi.values[0] == doctest::Approx(0.9));
  CHECK(vi.values[1] == doctest::Approx(1.0));
}

TEST_CASE("mdp files: parse errors carry line numbers and invariant names") {
  const char* bad_sum =
      "states 2\nactions 1\ngamma 0.9\nstart 0 1\nt 0 0 1 0.9\n";
  CHECK_THROWS_WITH_AS(parse_mdp(bad_sum), doctest::Contains("row sum"), std::invalid_argument);

  const char* unknown = "states 2\nactions 1\nbogus 3\n";
  CHECK_THROWS_WITH_AS(parse_mdp(unknown), doctest::Contains("line 3"), std::invalid_argument);
  CHECK_THROWS_WITH_AS(parse_mdp(unknown), doctest::Contains("unknown key"),
                       std::invalid_argument);

  const char* early = "t 0 0 1 1\n";
  CHECK_THROWS_WITH_AS(parse_mdp(early), doctest::Contains("declared before"),
                       std::invalid_argument);

  const char* dup = "states 2\nactions 1\ngamma 0.9\nstart 0 1\nt 0 0 1 1\nt 0 0 1 1\n";
  CHECK_THROWS_WITH_AS(parse_mdp(dup), doctest::Contains("duplicate"), std::invalid_argument);

  const char* term_row =
      "states 2\nactions 1\ngamma 0.9\nterminal 1\nstart 0 1\nt 0 0 1 1\nt 1 0 1 1\n";
  CHECK_THROWS_WITH_AS(parse_mdp(term_row), doctest::Contains("terminal"), std::invalid_argument);

  const char* no_start = "states 2\nactions 1\ngamma 0.9\nt 0 0 1 1\n";
  CHECK_THROWS_WITH_AS(parse_mdp(no_start), doctest::Contains("start"), std::invalid_argument);

  // terminal declared after its t line is still rejected, with the t line's number
  const char* late_term =
      "states 2\nactions 1\ngamma 0.9\nstart 0 1\nt 0 0 1 1\nt 1 0 0 1\nterminal 1\n";
  CHECK_THROWS_WITH_AS(parse_mdp(late_term), doctest::Contains("line 6"), std::invalid_argument);
}

TEST_CASE("mdp files: random models survive write/load exactly") {
  Rng rng(90);
  for (int trial = 0; trial < 20; ++trial) {
    const Mdp m = test_util::random_mdp(rng);
    const Mdp back = parse_mdp(write_mdp(m), m.name);
    CHECK(back.transition == m.transition);
    CHECK(back.reward == m.reward);
    CHECK(back.start_dist == m.start_dist);
    CHECK(back.terminal == m.terminal);
    CHECK(back.gamma == m.gamma);
  }
}

TEST_CASE("config: happy path, defaults, rejection") {
  const ExperimentConfig cfg = parse_config(
      "algorithm q_learning\nmdp chain.mdp\noutput_dir out\nseed 4\nalpha 0.2\nepsilon 0.3\n"
      "episodes 100\n");
  CHECK(cfg.algorithm == Algorithm::QLearning);
  CHECK(cfg.alpha == doctest::Approx(0.2));
  CHECK(cfg.episodes == 100);

  CHECK_THROWS_WITH_AS(parse_config("algorithm q_learning\nmdp m\noutput_dir o\nepisodes 1\nwat 1\n"),
                       doctest::Contains("not accepted"), std::invalid_argument);
  // a key from another algorithm's schema is rejected too
  CHECK_THROWS_AS(
      parse_config("algorithm q_learning\nmdp m\noutput_dir o\nepisodes 1\nn_threads 2\n"),
      std::invalid_argument);
  CHECK_THROWS_WITH_AS(parse_config("mdp m\noutput_dir o\n"), doctest::Contains("algorithm"),
                       std::invalid_argument);
  CHECK_THROWS_AS(parse_config("algorithm q_learning\nmdp m\noutput_dir o\n"),
                  std::invalid_argument);  // missing episodes
  CHECK_THROWS_WITH_AS(
      parse_config("algorithm gogar_a3c\nmdp m\noutput_dir o\nrounds 1\npopulation_size 1\n"),
      doctest::Contains("population_size"), std::invalid_argument);
  CHECK_THROWS_AS(
      parse_config("algorithm q_learning\nmdp m\noutput_dir o\nepisodes 1\nepsilon 1.5\n"),
      std::invalid_argument);
  CHECK_THROWS_AS(
      parse_config("algorithm q_learning\nmdp m\noutput_dir o\nepisodes 1\nalpha 1.5\n"),
      std::invalid_argument);
  CHECK_THROWS_AS(parse_config("algorithm a3c\nmdp m\noutput_dir o\nsegments 1\ngamma 1.0\n"),
                  std::invalid_argument);
}

TEST_CASE("checkpoints: 17-digit round trips") {
  Rng rng(91);
  QTable q(4, 3);
  for (auto& v : q.values.data) v = 1e3 * (rng.uniform() - 0.5) / 3.0;
  const QTable q2 = parse_qtable(write_qtable(q));
  CHECK(q2.values == q.values);

  SoftmaxPolicy p(3, 5);
  LinearValueFn v(5);
  for (auto& x : p.theta.data) x = rng.uniform() * 1e-3;
  for (auto& x : v.w) x = -rng.uniform() * 17.0;
  const auto ck = parse_actor_critic(write_actor_critic(p, &v));
  CHECK(ck.policy.theta == p.theta);
  REQUIRE(ck.value.has_value());
  CHECK(ck.value->w == v.w);
  const auto theta_only = parse_actor_critic(write_actor_critic(p));
  CHECK_FALSE(theta_only.value.has_value());

  Population pop = make_population(3, 2, 4);
  for (auto& u : pop) {
    for (auto& x : u->policy.theta.data) x = rng.uniform() - 0.5;
    for (auto& x : u->value.w) x = rng.uniform() - 0.5;
  }
  const auto pk = parse_population(write_population(pop));
  REQUIRE(pk.units.size() == 3);
  for (int i = 0; i < 3; ++i) {
    CHECK(pk.units[i].pid == pop[i]->pid);
    CHECK(pk.units[i].policy.theta == pop[i]->policy.theta);
    CHECK(pk.units[i].value.w == pop[i]->value.w);
  }

  const std::vector<int> pi = {1, 0, -1};
  CHECK(parse_policy_file(write_policy_file(pi)) == pi);

  CHECK_THROWS_AS(parse_policy_source("gibberish 1 2\n"), std::invalid_argument);
}

TEST_CASE("run_experiment: metrics rows, artifacts, determinism") {
  ExperimentConfig cfg;
  cfg.algorithm = Algorithm::QLearning;
  cfg.mdp_path = fixture("chain3.mdp");
  cfg.output_dir = temp_dir("q_run_a");
  cfg.seed = 12;
  cfg.alpha = 0.1;
  cfg.epsilon = 0.1;
  cfg.episodes = 400;

  const RunArtifacts art = run_experiment(cfg);
  CHECK(art.metrics_rows == 400);
  CHECK(fs::exists(art.metrics_path));
  CHECK(fs::exists(art.checkpoint_path));
  CHECK(fs::exists(art.manifest_path));

  // identical config + seed gives a byte-identical checkpoint
  ExperimentConfig cfg2 = cfg;
  cfg2.output_dir = temp_dir("q_run_b");
  const RunArtifacts art2 = run_experiment(cfg2);
  CHECK(read_text_file(art.checkpoint_path) == read_text_file(art2.checkpoint_path));

  // the manifest is itself a loadable config equal to the original
  const ExperimentConfig from_manifest = load_config(art.manifest_path);
  CHECK(from_manifest.algorithm == cfg.algorithm);
  CHECK(from_manifest.seed == cfg.seed);
  CHECK(from_manifest.episodes == cfg.episodes);

  // header + strictly increasing iterations
  const std::string metrics = read_text_file(art.metrics_path);
  CHECK(metrics.rfind("run_id,stamp_ms,iteration,", 0) == 0);
}

TEST_CASE("run_experiment: validation failures leave no artifacts") {
  ExperimentConfig cfg;
  cfg.algorithm = Algorithm::QLearning;
  cfg.mdp_path = fixture("does_not_exist.mdp");
  cfg.output_dir = (fs::temp_directory_path() / "rlgogar_tests" / "never_created").string();
  cfg.episodes = 10;
  fs::remove_all(cfg.output_dir);
  CHECK_THROWS(run_experiment(cfg));
  CHECK_FALSE(fs::exists(cfg.output_dir));
}

TEST_CASE("run_experiment: population error diagnostic names the module") {
  ExperimentConfig cfg;
  cfg.algorithm = Algorithm::GogarA3c;
  cfg.mdp_path = fixture("chain3.mdp");
  cfg.output_dir = (fs::temp_directory_path() / "rlgogar_tests" / "popfail").string();
  cfg.rounds = 1;
  cfg.population_size = 1;  // bypass parse_config to hit the trainer's guard
  fs::remove_all(cfg.output_dir);
  CHECK_THROWS_WITH_AS(run_experiment(cfg), doctest::Contains("population"),
                       std::invalid_argument);
}

TEST_CASE("run_experiment: traced population run replays from disk") {
  ExperimentConfig cfg;
  cfg.algorithm = Algorithm::GogarA3c;
  cfg.mdp_path = fixture("chain3.mdp");
  cfg.output_dir = temp_dir("gogar_run");
  cfg.seed = 5;
  cfg.alpha = 0.1;
  cfg.beta = 0.2;
  cfg.t_max = 10;
  cfg.population_size = 3;
  cfg.rounds = 8;
  cfg.trace_enabled = true;

  const RunArtifacts art = run_experiment(cfg);
  CHECK(fs::exists(fs::path(cfg.output_dir) / "universe.txt"));
  CHECK(fs::exists(fs::path(cfg.output_dir) / "population.txt"));
  for (const auto& trace_path : art.trace_paths) {
    const std::string report = replay_report(trace_path);
    CHECK(report.find("replay ok") != std::string::npos);
  }
}

TEST_CASE("run_experiment: re-running from the manifest reproduces the checkpoint") {
  ExperimentConfig cfg;
  cfg.algorithm = Algorithm::ActorCritic;
  cfg.mdp_path = fixture("walk5.mdp");
  cfg.output_dir = temp_dir("manifest_rerun");
  cfg.seed = 31;
  cfg.alpha = 0.1;
  cfg.beta = 0.2;
  cfg.episodes = 250;
  const RunArtifacts first = run_experiment(cfg);
  const std::string checkpoint = read_text_file(first.checkpoint_path);

  const ExperimentConfig again = load_config(first.manifest_path);
  const RunArtifacts second = run_experiment(again);
  CHECK(read_text_file(second.checkpoint_path) == checkpoint);
}

TEST_CASE("bridge command: policy sources and greedy extraction") {
  const std::string dir = temp_dir("bridge_cmd");
  const Mdp chain = load_mdp(fixture("chain3.mdp"));
  const auto vi = value_iteration(chain);

  // explicit policy file
  const std::string pi_path = dir + "/pi.txt";
  write_text_file(pi_path, write_policy_file(vi.policy));
  const BridgeReport rep = bridge_from_files(fixture("chain3.mdp"), pi_path, false);
  CHECK(rep.equivalence);
  CHECK(rep.graph.tokens.size() == 2);
  CHECK(rep.summary.find("equivalence true") != std::string::npos);

  // stochastic checkpoint is rejected without greedy extraction
  SoftmaxPolicy p(chain.n_actions, chain.n_states);
  p.theta.at(0, 0) = 2.0;  // prefers the advance action at s0
  p.theta.at(0, 1) = 2.0;
  const std::string soft_path = dir + "/params.txt";
  write_text_file(soft_path, write_actor_critic(p));
  CHECK_THROWS_WITH_AS(bridge_from_files(fixture("chain3.mdp"), soft_path, false),
                       doctest::Contains("deterministic policy required"), std::invalid_argument);

  // --greedy extracts the argmax policy
  const BridgeReport greedy = bridge_from_files(fixture("chain3.mdp"), soft_path, true);
  CHECK(greedy.equivalence);
  CHECK(greedy.graph.tokens == std::set<Token>{{0, 0}, {1, 0}});

  // qtable checkpoints are deterministic already
  QTable q(chain.n_states, chain.n_actions);
  q.values.at(0, 1) = 1.0;
  q.values.at(1, 0) = 1.0;
  const std::string q_path = dir + "/qtable.txt";
  write_text_file(q_path, write_qtable(q));
  const BridgeReport from_q = bridge_from_files(fixture("chain3.mdp"), q_path, false);
  CHECK(from_q.graph.tokens == std::set<Token>{{0, 1}, {1, 0}});

  // an explicit policy missing a non-terminal state is a partial policy
  const std::string partial_path = dir + "/partial.txt";
  write_text_file(partial_path, "policy 3\npi 0 0\n");
  CHECK_THROWS_WITH_AS(bridge_from_files(fixture("chain3.mdp"), partial_path, false),
                       doctest::Contains("partial policy"), std::invalid_argument);
}

TEST_CASE("walk5 fixture: q-learning finds the rightward policy") {
  const Mdp walk = load_mdp(fixture("walk5.mdp"));
  const auto vi = value_iteration(walk);
  QLearnConfig cfg;
  const QTable q = train_q(walk, 4000, cfg, 23);
  const auto pi = greedy_policy(q);
  for (int s = 0; s < walk.n_states; ++s) {
    if (walk.is_terminal(s)) continue;
    CHECK(vi.policy[s] == 1);  // always drift right
    CHECK(pi[s] == vi.policy[s]);
  }
}

TEST_CASE("universe files: round trip and validation") {
  CounterUniverse u;
  u.provenance = "office";
  u.add_counter("offer");
  u.add_counter("work9am");
  u.add_counter("bowtie");
  u.add_cc("offer", "work9am");
  u.add_cc("offer", "bowtie");
  u.add_incompatible("work9am", "bowtie");
  const CounterUniverse back = parse_universe(write_universe(u));
  CHECK(back == u);
  CHECK(write_universe(back) == write_universe(u));

  CHECK_THROWS_WITH_AS(parse_universe("cc a b\n"), doctest::Contains("line 1"),
                       std::invalid_argument);
  CHECK_THROWS_AS(parse_universe("counter a\nwhatever\n"), std::invalid_argument);
}

TEST_CASE("gogar script runner produces a transcript and final boxes") {
  CounterUniverse u;
  u.add_counter("offer");
  u.add_counter("allowance");
  u.add_counter("work9am");
  u.add_cc("offer", "work9am");
  const std::string script =
      "commit alice offer\nentitle alice offer\ncommit alice allowance\nentitle alice allowance\n"
      "challenge hr alice allowance\nassert alice offer\n";
  const std::string out = run_gogar_script(u, script);
  CHECK(out.find("4 challenge hr alice allowance retracted") != std::string::npos);
  CHECK(out.find("5 assert alice offer true") != std::string::npos);
  CHECK(out.find("participant alice") != std::string::npos);
  CHECK(out.find("assertions: offer") != std::string::npos);

  CHECK_THROWS_WITH_AS(run_gogar_script(u, "commit alice nosuch\n"),
                       doctest::Contains("script line 1"), std::invalid_argument);
}
