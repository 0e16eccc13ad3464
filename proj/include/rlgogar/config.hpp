#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>

namespace rlgogar {

enum class Algorithm { QLearning, Reinforce, ActorCritic, A3c, GogarA3c };

std::string to_string(Algorithm a);
Algorithm algorithm_from_string(const std::string& s);

// Parsed and validated experiment description. Unknown keys and keys that do
// not apply to the chosen algorithm are rejected outright; ranges follow the
// modules they feed.
struct ExperimentConfig {
  Algorithm algorithm = Algorithm::QLearning;
  std::string mdp_path;
  std::string output_dir;
  std::uint64_t seed = 0;

  double alpha = 0.1;
  double beta = 0.1;
  double epsilon = 0.1;
  std::optional<double> gamma_override;
  int step_cap = 0;  // 0: 10 * n_states

  long long episodes = 0;   // q_learning / reinforce / actor_critic
  long long segments = 0;   // a3c
  long long rounds = 0;     // gogar_a3c
  int t_max = 5;            // a3c / gogar_a3c
  int n_threads = 1;        // a3c
  int population_size = 2;  // gogar_a3c
  bool trace_enabled = false;

  // canonical `key value` lines, suitable for the manifest
  std::string canonical_text() const;
};

// `key value` per line, '#' comments. Throws on unknown keys, keys foreign to
// the algorithm, bad values, or out-of-range hyperparameters.
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::string& path);

}  // namespace rlgogar
