#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rlgogar/approx.hpp"
#include "rlgogar/population.hpp"
#include "rlgogar/qlearn.hpp"

namespace rlgogar {

// Text checkpoints, %.17g numbers throughout so parameters round-trip
// exactly.
//
//   qtable <S> <A>        q <s> v...            (one line per state)
//   softmax <A> <D>       theta <a> v...        w v...   (w optional)
//   population <P> <A> <D>  unit <id> / theta <a> v... / w v...
//   policy <S>            pi <s> <a>            (a = -1: unspecified)

std::string write_qtable(const QTable& q);
QTable parse_qtable(std::string_view text);

struct ActorCriticCheckpoint {
  SoftmaxPolicy policy;
  std::optional<LinearValueFn> value;
};
std::string write_actor_critic(const SoftmaxPolicy& p, const LinearValueFn* v = nullptr);
ActorCriticCheckpoint parse_actor_critic(std::string_view text);

struct PopulationCheckpoint {
  struct Unit {
    std::string pid;
    SoftmaxPolicy policy;
    LinearValueFn value;
  };
  std::vector<Unit> units;
};
std::string write_population(const Population& pop);
PopulationCheckpoint parse_population(std::string_view text);

std::string write_policy_file(const std::vector<int>& pi);
std::vector<int> parse_policy_file(std::string_view text);

// Sniffs the first key of a checkpoint/policy file so the bridge command can
// accept any of them.
enum class PolicySourceKind { QTable, Softmax, Population, Explicit };
struct PolicySource {
  PolicySourceKind kind;
  QTable qtable;
  ActorCriticCheckpoint actor_critic;
  PopulationCheckpoint population;
  std::vector<int> explicit_policy;
};
PolicySource parse_policy_source(std::string_view text);

}  // namespace rlgogar
