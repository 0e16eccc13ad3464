#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "rlgogar/bridge.hpp"
#include "rlgogar/config.hpp"
#include "rlgogar/gogar.hpp"
#include "rlgogar/mdp.hpp"

namespace rlgogar {

struct RunArtifacts {
  std::string output_dir;
  std::string metrics_path;
  std::string checkpoint_path;
  std::string manifest_path;
  std::vector<std::string> trace_paths;
  long long metrics_rows = 0;
};

// Executes the configured algorithm and writes metrics, a checkpoint, a
// re-runnable manifest, and (for traced population runs) trace files plus the
// counter universe they replay against. The config and the MDP are fully
// validated before anything is created on disk.
RunArtifacts run_experiment(const ExperimentConfig& cfg);

// Value-iteration dump used by the `oracle` subcommand.
std::string oracle_report(const Mdp& mdp, const ValueIterationResult& vi);

struct BridgeReport {
  TokenGraph graph;
  CounterUniverse universe;
  bool equivalence = false;
  std::string graph_text;
  std::string summary;
};

// Loads an MDP and a policy source (qtable / softmax / population / explicit
// policy file), builds the token graph and its counter universe, and runs the
// structural equivalence check. Stochastic sources require greedy extraction.
BridgeReport bridge_from_files(const std::string& mdp_path, const std::string& policy_path,
                               bool greedy_extract, const std::string& unit_id = "");

// Universe text format: `provenance <tag>`, `counter <id>`, `cc <from> <to>`,
// `incompat <a> <b>`. Counters must be declared before the relations that use
// them; the writer emits the canonical sorted form.
CounterUniverse parse_universe(std::string_view text);
std::string write_universe(const CounterUniverse& u);

// Applies a scripted move sequence (commit/entitle/challenge/assert lines) to
// a universe and returns the transcript plus the final boxes.
std::string run_gogar_script(const CounterUniverse& universe, std::string_view script,
                             GogarOptions options = {});

// Reconstructs a game from a trace or raw move-log file. The universe comes
// from `universe_path` when given, otherwise from the trace's `# meta
// universe` hint (resolved next to the trace file). Lazily registered
// counters recorded in the trace are restored before replaying.
std::string replay_report(const std::string& trace_path, const std::string& universe_path = "",
                          GogarOptions options = {});

}  // namespace rlgogar
