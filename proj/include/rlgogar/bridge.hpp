#pragma once

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "rlgogar/gogar.hpp"
#include "rlgogar/mdp.hpp"

namespace rlgogar {

// A state-action pair under a deterministic policy: the token exists only
// when the policy actually selects that action in that state.
struct Token {
  int s = 0;
  int a = 0;
  auto operator<=>(const Token&) const = default;
};

using TokenEdge = std::pair<Token, Token>;

// Policy restructured as tokens plus directed support edges, tagged with the
// transition function it came from. The tag is mandatory: a relation with no
// practice behind it is rejected at construction.
struct TokenGraph {
  std::set<Token> tokens;
  std::set<TokenEdge> edges;
  std::string provenance;
  // Positive-probability successors that are terminal carry no token and thus
  // no edge; they are kept as metadata instead.
  std::vector<std::pair<Token, int>> absorbing_exits;
};

// One token per non-terminal state: (s, pi[s]). pi must be defined (>= 0) at
// every non-terminal state; terminal entries are ignored.
std::set<Token> tokens_from_policy(const Mdp& mdp, const std::vector<int>& pi);

// Edge (s,a) -> (s',a') present iff transition(s,a)[s'] > 0 and both tokens
// are in the set.
std::set<TokenEdge> token_edges(const Mdp& mdp, const std::set<Token>& tokens);

// tokens_from_policy + token_edges + provenance + absorbing-exit metadata.
// The tag defaults to the MDP's name.
TokenGraph build_token_graph(const Mdp& mdp, const std::vector<int>& pi,
                             const std::string& provenance = "");

// Counter ids encode tokens as x_<s>_<a>.
std::string token_counter_id(const Token& t);
std::optional<Token> parse_counter_id(const std::string& id);

// One counter per token, cc edges mirroring the graph edges, provenance
// carried over.
CounterUniverse to_gogar_universe(const TokenGraph& g);

// True iff the token->counter map is a bijection and the edge sets map onto
// each other exactly, in both directions.
bool check_structural_equivalence(const TokenGraph& g, const CounterUniverse& u);

// Text format: `provenance <tag>`, then `tok <s> <a>` lines, then
// `edge <s> <a> <s'> <a'>` lines.
std::string serialize_token_graph(const TokenGraph& g);
TokenGraph parse_token_graph(std::string_view text);

}  // namespace rlgogar
