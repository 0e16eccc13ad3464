#include <CLI11.hpp>

#include <iostream>
#include <string>

#include "rlgogar/checkpoint.hpp"
#include "rlgogar/config.hpp"
#include "rlgogar/mdp_io.hpp"
#include "rlgogar/runner.hpp"
#include "rlgogar/version.hpp"

using namespace rlgogar;

int main(int argc, char** argv) {
  CLI::App app{"rlgogar: tabular reinforcement learning with a commitment-game bridge"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  // run <config>
  std::string config_path;
  auto* run_cmd = app.add_subcommand("run", "run an experiment described by a config file");
  run_cmd->add_option("config", config_path, "config file (key value lines)")->required();

  // oracle <mdp>
  std::string oracle_mdp, oracle_policy_out;
  double oracle_tol = 1e-10;
  auto* oracle_cmd = app.add_subcommand("oracle", "value-iteration dump for an MDP file");
  oracle_cmd->add_option("mdp", oracle_mdp, "MDP file")->required();
  oracle_cmd->add_option("--tol", oracle_tol, "sup-norm convergence tolerance");
  oracle_cmd->add_option("--policy-out", oracle_policy_out, "write pi* as a policy file");

  // bridge <mdp> <policy>
  std::string bridge_mdp, bridge_policy, bridge_out, bridge_unit;
  bool bridge_greedy = false;
  auto* bridge_cmd = app.add_subcommand(
      "bridge", "map a deterministic policy to a token graph and counter universe");
  bridge_cmd->add_option("mdp", bridge_mdp, "MDP file")->required();
  bridge_cmd->add_option("policy", bridge_policy, "policy source: qtable/softmax/population/policy file")
      ->required();
  bridge_cmd->add_flag("--greedy", bridge_greedy, "extract the argmax policy from a softmax source");
  bridge_cmd->add_option("--unit", bridge_unit, "unit id, for population checkpoints");
  bridge_cmd->add_option("-o,--out", bridge_out, "write the token graph here (default: stdout)");

  // gogar-sim <universe> <script>
  std::string sim_universe, sim_script;
  bool sim_direct = false;
  auto* sim_cmd = app.add_subcommand("gogar-sim", "apply a scripted move sequence to a universe");
  sim_cmd->add_option("universe", sim_universe, "universe file")->required();
  sim_cmd->add_option("script", sim_script, "move script file")->required();
  sim_cmd->add_flag("--direct-commit", sim_direct, "commit only direct consequences");

  // replay <trace>
  std::string replay_trace, replay_universe;
  bool replay_direct = false;
  auto* replay_cmd = app.add_subcommand("replay", "reconstruct a game from a trace or move log");
  replay_cmd->add_option("trace", replay_trace, "trace / move-log file")->required();
  replay_cmd->add_option("universe", replay_universe, "universe file (default: trace hint)");
  replay_cmd->add_flag("--direct-commit", replay_direct, "commit only direct consequences");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run_cmd) {
      const ExperimentConfig cfg = load_config(config_path);
      const RunArtifacts art = run_experiment(cfg);
      std::cout << "run complete: " << art.output_dir << " (" << art.metrics_rows
                << " metrics rows)\n";
    } else if (*oracle_cmd) {
      const Mdp mdp = load_mdp(oracle_mdp);
      const auto vi = value_iteration(mdp, oracle_tol);
      std::cout << oracle_report(mdp, vi);
      if (!oracle_policy_out.empty())
        write_text_file(oracle_policy_out, write_policy_file(vi.policy));
    } else if (*bridge_cmd) {
      const BridgeReport rep =
          bridge_from_files(bridge_mdp, bridge_policy, bridge_greedy, bridge_unit);
      if (bridge_out.empty())
        std::cout << rep.graph_text;
      else
        write_text_file(bridge_out, rep.graph_text);
      std::cout << rep.summary;
      if (!rep.equivalence) {
        std::cerr << "[bridge] structural equivalence check failed\n";
        return 1;
      }
    } else if (*sim_cmd) {
      const CounterUniverse u = parse_universe(read_text_file(sim_universe));
      GogarOptions opt;
      opt.transitive_commit = !sim_direct;
      std::cout << run_gogar_script(u, read_text_file(sim_script), opt);
    } else if (*replay_cmd) {
      GogarOptions opt;
      opt.transitive_commit = !replay_direct;
      std::cout << replay_report(replay_trace, replay_universe, opt);
    }
  } catch (const std::exception& e) {
    std::cerr << e.what() << '\n';
    return 1;
  }
  return 0;
}
