#include "rlgogar/checkpoint.hpp"

#include <sstream>
#include <stdexcept>

#include "rlgogar/mdp_io.hpp"

namespace rlgogar {

namespace {

[[noreturn]] void fail(const std::string& why) {
  throw std::invalid_argument("[harness] checkpoint: " + why);
}

std::vector<std::string> split_lines(std::string_view text) {
  std::vector<std::string> lines;
  std::istringstream is{std::string(text)};
  std::string line;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    bool blank = true;
    for (char c : line)
      if (c != ' ' && c != '\t') blank = false;
    if (!blank) lines.push_back(line);
  }
  return lines;
}

void read_values(std::istringstream& ls, double* out, int n, const std::string& what) {
  for (int i = 0; i < n; ++i)
    if (!(ls >> out[i])) fail("short " + what + " line");
  double extra;
  if (ls >> extra) fail("trailing values on " + what + " line");
}

}  // namespace

std::string write_qtable(const QTable& q) {
  std::ostringstream os;
  os << "qtable " << q.n_states() << ' ' << q.n_actions() << '\n';
  for (int s = 0; s < q.n_states(); ++s) {
    os << "q " << s;
    for (int a = 0; a < q.n_actions(); ++a) os << ' ' << format_g17(q.values.at(s, a));
    os << '\n';
  }
  return os.str();
}

QTable parse_qtable(std::string_view text) {
  const auto lines = split_lines(text);
  if (lines.empty()) fail("empty qtable file");
  std::istringstream hd(lines[0]);
  std::string key;
  int S = 0, A = 0;
  if (!(hd >> key >> S >> A) || key != "qtable" || S <= 0 || A <= 0) fail("bad qtable header");
  if (static_cast<int>(lines.size()) != S + 1) fail("qtable needs one q line per state");
  QTable q(S, A);
  for (int i = 1; i <= S; ++i) {
    std::istringstream ls(lines[i]);
    int s;
    if (!(ls >> key >> s) || key != "q" || s != i - 1) fail("q lines must be ordered by state");
    read_values(ls, q.values.row(s), A, "q");
  }
  return q;
}

std::string write_actor_critic(const SoftmaxPolicy& p, const LinearValueFn* v) {
  std::ostringstream os;
  os << "softmax " << p.n_actions() << ' ' << p.dim() << '\n';
  for (int a = 0; a < p.n_actions(); ++a) {
    os << "theta " << a;
    for (int j = 0; j < p.dim(); ++j) os << ' ' << format_g17(p.theta.at(a, j));
    os << '\n';
  }
  if (v != nullptr) {
    os << "w";
    for (double x : v->w) os << ' ' << format_g17(x);
    os << '\n';
  }
  return os.str();
}

ActorCriticCheckpoint parse_actor_critic(std::string_view text) {
  const auto lines = split_lines(text);
  if (lines.empty()) fail("empty softmax file");
  std::istringstream hd(lines[0]);
  std::string key;
  int A = 0, D = 0;
  if (!(hd >> key >> A >> D) || key != "softmax" || A <= 0 || D <= 0) fail("bad softmax header");
  ActorCriticCheckpoint ck;
  ck.policy = SoftmaxPolicy(A, D);
  std::size_t i = 1;
  for (int a = 0; a < A; ++a, ++i) {
    if (i >= lines.size()) fail("missing theta lines");
    std::istringstream ls(lines[i]);
    int row;
    if (!(ls >> key >> row) || key != "theta" || row != a) fail("theta lines must be ordered");
    read_values(ls, ck.policy.theta.row(a), D, "theta");
  }
  if (i < lines.size()) {
    std::istringstream ls(lines[i]);
    if (!(ls >> key) || key != "w") fail("unexpected line after theta rows");
    LinearValueFn v(D);
    read_values(ls, v.w.data(), D, "w");
    ck.value = std::move(v);
    ++i;
  }
  if (i != lines.size()) fail("trailing lines in softmax file");
  return ck;
}

std::string write_population(const Population& pop) {
  if (pop.empty()) fail("cannot write an empty population");
  std::ostringstream os;
  const int A = pop[0]->policy.n_actions();
  const int D = pop[0]->policy.dim();
  os << "population " << pop.size() << ' ' << A << ' ' << D << '\n';
  for (const auto& unit : pop) {
    const auto [theta, w] = unit->snapshot_params();
    os << "unit " << unit->pid << '\n';
    for (int a = 0; a < A; ++a) {
      os << "theta " << a;
      for (int j = 0; j < D; ++j) os << ' ' << format_g17(theta.at(a, j));
      os << '\n';
    }
    os << "w";
    for (double x : w) os << ' ' << format_g17(x);
    os << '\n';
  }
  return os.str();
}

PopulationCheckpoint parse_population(std::string_view text) {
  const auto lines = split_lines(text);
  if (lines.empty()) fail("empty population file");
  std::istringstream hd(lines[0]);
  std::string key;
  int P = 0, A = 0, D = 0;
  if (!(hd >> key >> P >> A >> D) || key != "population" || P <= 0 || A <= 0 || D <= 0)
    fail("bad population header");
  PopulationCheckpoint ck;
  std::size_t i = 1;
  for (int u = 0; u < P; ++u) {
    if (i >= lines.size()) fail("missing unit block");
    std::istringstream ls(lines[i]);
    PopulationCheckpoint::Unit unit;
    if (!(ls >> key >> unit.pid) || key != "unit") fail("expected unit line");
    ++i;
    unit.policy = SoftmaxPolicy(A, D);
    for (int a = 0; a < A; ++a, ++i) {
      if (i >= lines.size()) fail("missing theta lines in unit block");
      std::istringstream ts(lines[i]);
      int row;
      if (!(ts >> key >> row) || key != "theta" || row != a) fail("theta lines must be ordered");
      read_values(ts, unit.policy.theta.row(a), D, "theta");
    }
    if (i >= lines.size()) fail("missing w line in unit block");
    std::istringstream ws(lines[i]);
    if (!(ws >> key) || key != "w") fail("expected w line");
    unit.value = LinearValueFn(D);
    read_values(ws, unit.value.w.data(), D, "w");
    ++i;
    ck.units.push_back(std::move(unit));
  }
  if (i != lines.size()) fail("trailing lines in population file");
  return ck;
}

std::string write_policy_file(const std::vector<int>& pi) {
  std::ostringstream os;
  os << "policy " << pi.size() << '\n';
  for (std::size_t s = 0; s < pi.size(); ++s) os << "pi " << s << ' ' << pi[s] << '\n';
  return os.str();
}

std::vector<int> parse_policy_file(std::string_view text) {
  const auto lines = split_lines(text);
  if (lines.empty()) fail("empty policy file");
  std::istringstream hd(lines[0]);
  std::string key;
  int S = 0;
  if (!(hd >> key >> S) || key != "policy" || S <= 0) fail("bad policy header");
  std::vector<int> pi(S, -1);
  for (std::size_t i = 1; i < lines.size(); ++i) {
    std::istringstream ls(lines[i]);
    int s, a;
    if (!(ls >> key >> s >> a) || key != "pi") fail("bad pi line");
    if (s < 0 || s >= S) fail("pi state out of range");
    pi[s] = a;
  }
  return pi;
}

PolicySource parse_policy_source(std::string_view text) {
  std::istringstream is{std::string(text)};
  std::string first;
  is >> first;
  PolicySource src{PolicySourceKind::Explicit, {}, {}, {}, {}};
  if (first == "qtable") {
    src.kind = PolicySourceKind::QTable;
    src.qtable = parse_qtable(text);
  } else if (first == "softmax") {
    src.kind = PolicySourceKind::Softmax;
    src.actor_critic = parse_actor_critic(text);
  } else if (first == "population") {
    src.kind = PolicySourceKind::Population;
    src.population = parse_population(text);
  } else if (first == "policy") {
    src.kind = PolicySourceKind::Explicit;
    src.explicit_policy = parse_policy_file(text);
  } else {
    fail("unrecognized policy source (expected qtable/softmax/population/policy header)");
  }
  return src;
}

}  // namespace rlgogar
