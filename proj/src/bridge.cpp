#include "rlgogar/bridge.hpp"

#include <map>
#include <sstream>
#include <stdexcept>

namespace rlgogar {

std::set<Token> tokens_from_policy(const Mdp& mdp, const std::vector<int>& pi) {
  if (pi.size() != static_cast<std::size_t>(mdp.n_states))
    throw std::invalid_argument("[bridge] policy length does not match n_states");
  std::set<Token> tokens;
  for (int s = 0; s < mdp.n_states; ++s) {
    if (mdp.is_terminal(s)) continue;
    const int a = pi[s];
    if (a < 0)
      throw std::invalid_argument("[bridge] partial policy: no action at non-terminal state " +
                                  std::to_string(s));
    mdp.check_action(a);
    tokens.insert({s, a});
  }
  return tokens;
}

std::set<TokenEdge> token_edges(const Mdp& mdp, const std::set<Token>& tokens) {
  // index tokens by state for successor lookup
  std::map<int, std::vector<Token>> by_state;
  for (const Token& t : tokens) {
    mdp.check_state(t.s);
    mdp.check_action(t.a);
    if (mdp.is_terminal(t.s))
      throw std::invalid_argument("[bridge] token at terminal state " + std::to_string(t.s));
    by_state[t.s].push_back(t);
  }
  std::set<TokenEdge> edges;
  for (const Token& t : tokens) {
    const auto row = mdp.trans_row(t.s, t.a);
    for (int s2 = 0; s2 < mdp.n_states; ++s2) {
      if (!(row[s2] > 0.0)) continue;
      const auto it = by_state.find(s2);
      if (it == by_state.end()) continue;
      for (const Token& succ : it->second) edges.insert({t, succ});
    }
  }
  return edges;
}

TokenGraph build_token_graph(const Mdp& mdp, const std::vector<int>& pi,
                             const std::string& provenance) {
  TokenGraph g;
  g.provenance = provenance.empty() ? mdp.name : provenance;
  if (g.provenance.empty())
    throw std::invalid_argument("[bridge] token graph requires a provenance tag");
  g.tokens = tokens_from_policy(mdp, pi);
  g.edges = token_edges(mdp, g.tokens);
  for (const Token& t : g.tokens) {
    const auto row = mdp.trans_row(t.s, t.a);
    for (int s2 = 0; s2 < mdp.n_states; ++s2)
      if (row[s2] > 0.0 && mdp.is_terminal(s2)) g.absorbing_exits.push_back({t, s2});
  }
  return g;
}

std::string token_counter_id(const Token& t) {
  return "x_" + std::to_string(t.s) + "_" + std::to_string(t.a);
}

std::optional<Token> parse_counter_id(const std::string& id) {
  if (id.size() < 5 || id[0] != 'x' || id[1] != '_') return std::nullopt;
  const std::size_t sep = id.find('_', 2);
  if (sep == std::string::npos || sep + 1 >= id.size()) return std::nullopt;
  try {
    std::size_t used = 0;
    const int s = std::stoi(id.substr(2, sep - 2), &used);
    if (used != sep - 2) return std::nullopt;
    const int a = std::stoi(id.substr(sep + 1), &used);
    if (used != id.size() - sep - 1) return std::nullopt;
    if (s < 0 || a < 0) return std::nullopt;
    return Token{s, a};
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

CounterUniverse to_gogar_universe(const TokenGraph& g) {
  CounterUniverse u;
  u.provenance = g.provenance;
  for (const Token& t : g.tokens) u.add_counter(token_counter_id(t));
  for (const auto& [from, to] : g.edges) u.add_cc(token_counter_id(from), token_counter_id(to));
  return u;
}

bool check_structural_equivalence(const TokenGraph& g, const CounterUniverse& u) {
  if (g.tokens.size() != u.counters.size()) return false;
  for (const Token& t : g.tokens)
    if (!u.has(token_counter_id(t))) return false;
  for (const CounterId& c : u.counters) {
    const auto t = parse_counter_id(c);
    if (!t || g.tokens.count(*t) == 0) return false;
  }

  std::size_t cc_pairs = 0;
  for (const auto& [from, targets] : u.cc) cc_pairs += targets.size();
  if (cc_pairs != g.edges.size()) return false;
  for (const auto& [from, to] : g.edges) {
    const auto it = u.cc.find(token_counter_id(from));
    if (it == u.cc.end() || it->second.count(token_counter_id(to)) == 0) return false;
  }
  for (const auto& [from, targets] : u.cc) {
    const auto ft = parse_counter_id(from);
    if (!ft) return false;
    for (const CounterId& to : targets) {
      const auto tt = parse_counter_id(to);
      if (!tt || g.edges.count({*ft, *tt}) == 0) return false;
    }
  }
  return true;
}

std::string serialize_token_graph(const TokenGraph& g) {
  std::ostringstream os;
  os << "provenance " << g.provenance << '\n';
  for (const Token& t : g.tokens) os << "tok " << t.s << ' ' << t.a << '\n';
  for (const auto& [from, to] : g.edges)
    os << "edge " << from.s << ' ' << from.a << ' ' << to.s << ' ' << to.a << '\n';
  return os.str();
}

TokenGraph parse_token_graph(std::string_view text) {
  TokenGraph g;
  std::istringstream is{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::string key;
    if (!(ls >> key) || key[0] == '#') continue;
    if (key == "provenance") {
      if (!(ls >> g.provenance))
        throw std::invalid_argument("[bridge] line " + std::to_string(lineno) +
                                    ": provenance tag missing");
    } else if (key == "tok") {
      Token t;
      if (!(ls >> t.s >> t.a))
        throw std::invalid_argument("[bridge] line " + std::to_string(lineno) + ": bad tok line");
      g.tokens.insert(t);
    } else if (key == "edge") {
      Token from, to;
      if (!(ls >> from.s >> from.a >> to.s >> to.a))
        throw std::invalid_argument("[bridge] line " + std::to_string(lineno) + ": bad edge line");
      if (g.tokens.count(from) == 0 || g.tokens.count(to) == 0)
        throw std::invalid_argument("[bridge] line " + std::to_string(lineno) +
                                    ": edge endpoint is not a listed token");
      g.edges.insert({from, to});
    } else {
      throw std::invalid_argument("[bridge] line " + std::to_string(lineno) + ": unknown key '" +
                                  key + "'");
    }
  }
  if (g.provenance.empty())
    throw std::invalid_argument("[bridge] token graph file lacks a provenance tag");
  return g;
}

}  // namespace rlgogar
