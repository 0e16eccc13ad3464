#include "rlgogar/config.hpp"

#include <set>
#include <sstream>
#include <stdexcept>

#include "rlgogar/mdp_io.hpp"

namespace rlgogar {

std::string to_string(Algorithm a) {
  switch (a) {
    case Algorithm::QLearning: return "q_learning";
    case Algorithm::Reinforce: return "reinforce";
    case Algorithm::ActorCritic: return "actor_critic";
    case Algorithm::A3c: return "a3c";
    case Algorithm::GogarA3c: return "gogar_a3c";
  }
  return "?";
}

Algorithm algorithm_from_string(const std::string& s) {
  if (s == "q_learning") return Algorithm::QLearning;
  if (s == "reinforce") return Algorithm::Reinforce;
  if (s == "actor_critic") return Algorithm::ActorCritic;
  if (s == "a3c") return Algorithm::A3c;
  if (s == "gogar_a3c") return Algorithm::GogarA3c;
  throw std::invalid_argument("[harness] unknown algorithm '" + s + "'");
}

namespace {

[[noreturn]] void fail(const std::string& why) {
  throw std::invalid_argument("[harness] config: " + why);
}

const std::set<std::string>& allowed_keys(Algorithm a) {
  static const std::set<std::string> common = {"algorithm", "mdp", "output_dir",
                                               "seed",      "gamma", "step_cap"};
  static const auto make = [](std::initializer_list<std::string> extra) {
    std::set<std::string> s = common;
    s.insert(extra);
    return s;
  };
  static const std::set<std::string> q = make({"alpha", "epsilon", "episodes"});
  static const std::set<std::string> rf = make({"alpha", "episodes"});
  static const std::set<std::string> ac = make({"alpha", "beta", "episodes"});
  static const std::set<std::string> a3c = make({"alpha", "beta", "t_max", "n_threads", "segments"});
  static const std::set<std::string> ga3c =
      make({"alpha", "beta", "t_max", "population_size", "rounds", "trace_enabled"});
  switch (a) {
    case Algorithm::QLearning: return q;
    case Algorithm::Reinforce: return rf;
    case Algorithm::ActorCritic: return ac;
    case Algorithm::A3c: return a3c;
    case Algorithm::GogarA3c: return ga3c;
  }
  return common;
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double x = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    fail("key '" + key + "' needs a number, got '" + v + "'");
  }
}

long long to_int(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const long long x = std::stoll(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    fail("key '" + key + "' needs an integer, got '" + v + "'");
  }
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "1" || v == "true") return true;
  if (v == "0" || v == "false") return false;
  fail("key '" + key + "' needs 0/1, got '" + v + "'");
}

}  // namespace

ExperimentConfig parse_config(std::string_view text) {
  std::map<std::string, std::string> kv;
  std::istringstream is{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string key, value, extra;
    if (!(ls >> key)) continue;
    if (!(ls >> value)) fail("line " + std::to_string(lineno) + ": key '" + key + "' has no value");
    if (ls >> extra) fail("line " + std::to_string(lineno) + ": trailing token '" + extra + "'");
    if (!kv.emplace(key, value).second)
      fail("line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
  }

  const auto it_algo = kv.find("algorithm");
  if (it_algo == kv.end()) fail("missing required key 'algorithm'");
  ExperimentConfig cfg;
  cfg.algorithm = algorithm_from_string(it_algo->second);

  const auto& allowed = allowed_keys(cfg.algorithm);
  for (const auto& [key, value] : kv)
    if (allowed.count(key) == 0)
      fail("key '" + key + "' is not accepted for algorithm " + to_string(cfg.algorithm));

  auto take = [&kv](const char* key) -> std::optional<std::string> {
    const auto it = kv.find(key);
    if (it == kv.end()) return std::nullopt;
    return it->second;
  };

  if (const auto v = take("mdp")) cfg.mdp_path = *v;
  if (cfg.mdp_path.empty()) fail("missing required key 'mdp'");
  if (const auto v = take("output_dir")) cfg.output_dir = *v;
  if (cfg.output_dir.empty()) fail("missing required key 'output_dir'");
  if (const auto v = take("seed")) cfg.seed = static_cast<std::uint64_t>(to_int("seed", *v));

  if (const auto v = take("alpha")) cfg.alpha = to_double("alpha", *v);
  if (!(cfg.alpha > 0.0)) fail("alpha must be > 0");
  if (const auto v = take("beta")) cfg.beta = to_double("beta", *v);
  if (!(cfg.beta > 0.0)) fail("beta must be > 0");
  if (const auto v = take("epsilon")) cfg.epsilon = to_double("epsilon", *v);
  if (!(cfg.epsilon >= 0.0 && cfg.epsilon <= 1.0)) fail("epsilon must lie in [0, 1]");
  if (const auto v = take("gamma")) {
    const double g = to_double("gamma", *v);
    if (!(g >= 0.0 && g < 1.0)) fail("gamma must lie in [0, 1)");
    cfg.gamma_override = g;
  }
  if (const auto v = take("step_cap")) {
    cfg.step_cap = static_cast<int>(to_int("step_cap", *v));
    if (cfg.step_cap < 0) fail("step_cap must be >= 0");
  }

  switch (cfg.algorithm) {
    case Algorithm::QLearning:
      if (cfg.alpha > 1.0) fail("alpha must lie in (0, 1] for q_learning");
      [[fallthrough]];
    case Algorithm::Reinforce:
    case Algorithm::ActorCritic: {
      const auto v = take("episodes");
      if (!v) fail("missing required key 'episodes'");
      cfg.episodes = to_int("episodes", *v);
      if (cfg.episodes < 0) fail("episodes must be >= 0");
      break;
    }
    case Algorithm::A3c: {
      const auto v = take("segments");
      if (!v) fail("missing required key 'segments'");
      cfg.segments = to_int("segments", *v);
      if (cfg.segments < 0) fail("segments must be >= 0");
      if (const auto t = take("t_max")) cfg.t_max = static_cast<int>(to_int("t_max", *t));
      if (cfg.t_max < 1) fail("t_max must be >= 1");
      if (const auto n = take("n_threads")) cfg.n_threads = static_cast<int>(to_int("n_threads", *n));
      if (cfg.n_threads < 1) fail("n_threads must be >= 1");
      break;
    }
    case Algorithm::GogarA3c: {
      const auto v = take("rounds");
      if (!v) fail("missing required key 'rounds'");
      cfg.rounds = to_int("rounds", *v);
      if (cfg.rounds < 0) fail("rounds must be >= 0");
      if (const auto t = take("t_max")) cfg.t_max = static_cast<int>(to_int("t_max", *t));
      if (cfg.t_max < 1) fail("t_max must be >= 1");
      if (const auto p = take("population_size"))
        cfg.population_size = static_cast<int>(to_int("population_size", *p));
      if (cfg.population_size < 2) fail("population_size must be >= 2");
      if (const auto tr = take("trace_enabled")) cfg.trace_enabled = to_bool("trace_enabled", *tr);
      break;
    }
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  try {
    return parse_config(read_text_file(path));
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(std::string(e.what()) + " (file " + path + ")");
  }
}

std::string ExperimentConfig::canonical_text() const {
  std::ostringstream os;
  os << "algorithm " << to_string(algorithm) << '\n';
  os << "mdp " << mdp_path << '\n';
  os << "output_dir " << output_dir << '\n';
  os << "seed " << seed << '\n';
  if (gamma_override) os << "gamma " << format_g17(*gamma_override) << '\n';
  if (step_cap > 0) os << "step_cap " << step_cap << '\n';
  switch (algorithm) {
    case Algorithm::QLearning:
      os << "alpha " << format_g17(alpha) << '\n';
      os << "epsilon " << format_g17(epsilon) << '\n';
      os << "episodes " << episodes << '\n';
      break;
    case Algorithm::Reinforce:
      os << "alpha " << format_g17(alpha) << '\n';
      os << "episodes " << episodes << '\n';
      break;
    case Algorithm::ActorCritic:
      os << "alpha " << format_g17(alpha) << '\n';
      os << "beta " << format_g17(beta) << '\n';
      os << "episodes " << episodes << '\n';
      break;
    case Algorithm::A3c:
      os << "alpha " << format_g17(alpha) << '\n';
      os << "beta " << format_g17(beta) << '\n';
      os << "t_max " << t_max << '\n';
      os << "n_threads " << n_threads << '\n';
      os << "segments " << segments << '\n';
      break;
    case Algorithm::GogarA3c:
      os << "alpha " << format_g17(alpha) << '\n';
      os << "beta " << format_g17(beta) << '\n';
      os << "t_max " << t_max << '\n';
      os << "population_size " << population_size << '\n';
      os << "rounds " << rounds << '\n';
      os << "trace_enabled " << (trace_enabled ? 1 : 0) << '\n';
      break;
  }
  return os.str();
}

}  // namespace rlgogar
