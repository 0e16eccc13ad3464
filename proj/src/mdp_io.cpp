#include "rlgogar/mdp_io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace rlgogar {

namespace {

[[noreturn]] void fail(int lineno, const std::string& why) {
  throw std::invalid_argument("[harness] mdp line " + std::to_string(lineno) + ": " + why);
}

struct Trip {
  int s, a, s2;
  auto operator<=>(const Trip&) const = default;
};

using TripLines = std::map<Trip, int>;  // first line number per triple

}  // namespace

std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

Mdp parse_mdp(std::string_view text, const std::string& name) {
  Mdp m;
  m.name = name;
  m.n_states = -1;
  m.n_actions = -1;
  bool sized = false;

  TripLines seen_t, seen_r;
  bool saw_start = false;

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

    auto need_sized = [&] {
      if (!sized) fail(lineno, "states and actions must be declared before '" + key + "'");
    };
    auto check_s = [&](int s) {
      if (s < 0 || s >= m.n_states) fail(lineno, "state index " + std::to_string(s) + " out of range");
    };
    auto check_a = [&](int a) {
      if (a < 0 || a >= m.n_actions)
        fail(lineno, "action index " + std::to_string(a) + " out of range");
    };

    if (key == "states") {
      if (m.n_states >= 0) fail(lineno, "duplicate states line");
      if (!(ls >> m.n_states) || m.n_states <= 0) fail(lineno, "states needs a positive integer");
    } else if (key == "actions") {
      if (m.n_actions >= 0) fail(lineno, "duplicate actions line");
      if (!(ls >> m.n_actions) || m.n_actions <= 0) fail(lineno, "actions needs a positive integer");
    } else if (key == "gamma") {
      if (!(ls >> m.gamma)) fail(lineno, "gamma needs a number");
    } else if (key == "terminal") {
      need_sized();
      int s;
      while (ls >> s) {
        check_s(s);
        m.terminal[s] = true;
      }
      if (!ls.eof()) fail(lineno, "terminal takes state indices");
    } else if (key == "start") {
      need_sized();
      if (saw_start) fail(lineno, "duplicate start line");
      saw_start = true;
      int s;
      double p;
      bool any = false;
      while (ls >> s) {
        if (!(ls >> p)) fail(lineno, "start takes (state, probability) pairs");
        check_s(s);
        m.start_dist[s] = p;
        any = true;
      }
      if (!any) fail(lineno, "start needs at least one (state, probability) pair");
    } else if (key == "t") {
      need_sized();
      int s, a, s2;
      double p;
      if (!(ls >> s >> a >> s2 >> p)) fail(lineno, "t needs: s a s' p");
      check_s(s);
      check_a(a);
      check_s(s2);
      if (m.terminal[s]) fail(lineno, "terminal state " + std::to_string(s) + " cannot carry t lines");
      if (!seen_t.emplace(Trip{s, a, s2}, lineno).second) fail(lineno, "duplicate t line");
      m.transition[(static_cast<std::size_t>(s) * m.n_actions + a) * m.n_states + s2] = p;
    } else if (key == "r") {
      need_sized();
      int s, a, s2;
      double v;
      if (!(ls >> s >> a >> s2 >> v)) fail(lineno, "r needs: s a s' value");
      check_s(s);
      check_a(a);
      check_s(s2);
      if (m.terminal[s]) fail(lineno, "terminal state " + std::to_string(s) + " cannot carry r lines");
      if (!seen_r.emplace(Trip{s, a, s2}, lineno).second) fail(lineno, "duplicate r line");
      m.reward[(static_cast<std::size_t>(s) * m.n_actions + a) * m.n_states + s2] = v;
    } else {
      fail(lineno, "unknown key '" + key + "'");
    }

    if (m.n_states > 0 && m.n_actions > 0 && !sized) {
      sized = true;
      const auto total = static_cast<std::size_t>(m.n_states) * m.n_actions * m.n_states;
      m.transition.assign(total, 0.0);
      m.reward.assign(total, 0.0);
      m.terminal.assign(m.n_states, false);
      m.start_dist.assign(m.n_states, 0.0);
    }
  }

  if (!sized) throw std::invalid_argument("[harness] mdp file lacks states/actions declarations");
  if (!saw_start) throw std::invalid_argument("[harness] mdp file lacks a start line");

  // t/r lines whose source was declared terminal later in the file
  for (const auto& [trip, line] : seen_t)
    if (m.terminal[trip.s])
      fail(line, "terminal state " + std::to_string(trip.s) + " cannot carry t lines");
  for (const auto& [trip, line] : seen_r)
    if (m.terminal[trip.s])
      fail(line, "terminal state " + std::to_string(trip.s) + " cannot carry r lines");

  // terminal self-loops are derived, not stored
  for (int s = 0; s < m.n_states; ++s) {
    if (!m.terminal[s]) continue;
    for (int a = 0; a < m.n_actions; ++a)
      m.transition[(static_cast<std::size_t>(s) * m.n_actions + a) * m.n_states + s] = 1.0;
  }

  m.validate();
  return m;
}

std::string write_mdp(const Mdp& mdp) {
  std::ostringstream os;
  os << "states " << mdp.n_states << '\n';
  os << "actions " << mdp.n_actions << '\n';
  os << "gamma " << format_g17(mdp.gamma) << '\n';
  const auto terms = mdp.terminal_states();
  if (!terms.empty()) {
    os << "terminal";
    for (int s : terms) os << ' ' << s;
    os << '\n';
  }
  os << "start";
  for (int s = 0; s < mdp.n_states; ++s)
    if (mdp.start_dist[s] > 0.0) os << ' ' << s << ' ' << format_g17(mdp.start_dist[s]);
  os << '\n';
  for (int s = 0; s < mdp.n_states; ++s) {
    if (mdp.is_terminal(s)) continue;
    for (int a = 0; a < mdp.n_actions; ++a)
      for (int s2 = 0; s2 < mdp.n_states; ++s2) {
        const double p = mdp.trans_prob(s, a, s2);
        if (p > 0.0) os << "t " << s << ' ' << a << ' ' << s2 << ' ' << format_g17(p) << '\n';
      }
  }
  for (int s = 0; s < mdp.n_states; ++s) {
    if (mdp.is_terminal(s)) continue;
    for (int a = 0; a < mdp.n_actions; ++a)
      for (int s2 = 0; s2 < mdp.n_states; ++s2) {
        const double r = mdp.reward_at(s, a, s2);
        if (r != 0.0 && mdp.trans_prob(s, a, s2) > 0.0)
          os << "r " << s << ' ' << a << ' ' << s2 << ' ' << format_g17(r) << '\n';
      }
  }
  return os.str();
}

std::string read_text_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("[harness] cannot open '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("[harness] cannot write '" + path + "'");
  f << content;
  if (!f) throw std::runtime_error("[harness] short write to '" + path + "'");
}

Mdp load_mdp(const std::string& path) {
  const std::string text = read_text_file(path);
  std::string stem = std::filesystem::path(path).stem().string();
  if (stem.empty()) stem = "mdp";
  try {
    return parse_mdp(text, stem);
  } catch (const std::exception& e) {
    throw std::invalid_argument(std::string(e.what()) + " (file " + path + ")");
  }
}

void save_mdp(const Mdp& mdp, const std::string& path) { write_text_file(path, write_mdp(mdp)); }

}  // namespace rlgogar
