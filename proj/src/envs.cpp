#include "rlgogar/envs.hpp"

#include <stdexcept>
#include <string>

namespace rlgogar {

namespace {

Mdp blank(int n_states, int n_actions, double gamma, const std::string& name) {
  Mdp m;
  m.n_states = n_states;
  m.n_actions = n_actions;
  m.gamma = gamma;
  m.transition.assign(static_cast<std::size_t>(n_states) * n_actions * n_states, 0.0);
  m.reward.assign(m.transition.size(), 0.0);
  m.terminal.assign(n_states, false);
  m.start_dist.assign(n_states, 0.0);
  m.name = name;
  return m;
}

void set_t(Mdp& m, int s, int a, int s2, double p) {
  m.transition[(static_cast<std::size_t>(s) * m.n_actions + a) * m.n_states + s2] = p;
}

void set_r(Mdp& m, int s, int a, int s2, double r) {
  m.reward[(static_cast<std::size_t>(s) * m.n_actions + a) * m.n_states + s2] = r;
}

void seal_terminal(Mdp& m, int s) {
  m.terminal[s] = true;
  for (int a = 0; a < m.n_actions; ++a) {
    for (int s2 = 0; s2 < m.n_states; ++s2) {
      set_t(m, s, a, s2, s2 == s ? 1.0 : 0.0);
      set_r(m, s, a, s2, 0.0);
    }
  }
}

}  // namespace

Mdp make_chain(int n_states, double gamma) {
  if (n_states < 2) throw std::invalid_argument("[envs] chain needs at least 2 states");
  Mdp m = blank(n_states, 2, gamma, "chain" + std::to_string(n_states));
  const int goal = n_states - 1;
  for (int s = 0; s < goal; ++s) {
    set_t(m, s, 0, s + 1, 1.0);  // advance
    set_t(m, s, 1, s, 1.0);      // stay
    if (s + 1 == goal) set_r(m, s, 0, s + 1, 1.0);
  }
  seal_terminal(m, goal);
  m.start_dist[0] = 1.0;
  m.validate();
  return m;
}

Mdp make_random_walk(int n_states, double gamma, double slip) {
  if (n_states < 3) throw std::invalid_argument("[envs] random walk needs at least 3 states");
  if (!(slip >= 0.0 && slip < 1.0)) throw std::invalid_argument("[envs] slip must be in [0, 1)");
  Mdp m = blank(n_states, 2, gamma, "walk" + std::to_string(n_states));
  const int right_end = n_states - 1;
  for (int s = 1; s < right_end; ++s) {
    set_t(m, s, 0, s - 1, 1.0 - slip);  // left drift
    set_t(m, s, 0, s + 1, slip);
    set_t(m, s, 1, s + 1, 1.0 - slip);  // right drift
    set_t(m, s, 1, s - 1, slip);
    for (int a = 0; a < 2; ++a)
      if (m.transition[(static_cast<std::size_t>(s) * 2 + a) * n_states + right_end] > 0.0)
        set_r(m, s, a, right_end, 1.0);
  }
  seal_terminal(m, 0);
  seal_terminal(m, right_end);
  m.start_dist[n_states / 2] = 1.0;
  m.validate();
  return m;
}

Mdp make_gridworld(int rows, int cols, double gamma) {
  if (rows < 2 || cols < 2) throw std::invalid_argument("[envs] gridworld needs at least 2x2");
  const int n = rows * cols;
  Mdp m = blank(n, 4, gamma,
                "grid" + std::to_string(rows) + "x" + std::to_string(cols));
  const int goal = n - 1;
  // actions: 0 up, 1 down, 2 left, 3 right
  const int dr[4] = {-1, 1, 0, 0};
  const int dc[4] = {0, 0, -1, 1};
  for (int s = 0; s < n; ++s) {
    if (s == goal) continue;
    const int r = s / cols, c = s % cols;
    for (int a = 0; a < 4; ++a) {
      int nr = r + dr[a], nc = c + dc[a];
      if (nr < 0 || nr >= rows || nc < 0 || nc >= cols) {
        nr = r;
        nc = c;
      }
      const int s2 = nr * cols + nc;
      set_t(m, s, a, s2, 1.0);
      set_r(m, s, a, s2, -1.0);
    }
  }
  seal_terminal(m, goal);
  for (int s = 0; s < n; ++s)
    if (s != goal) m.start_dist[s] = 1.0 / (n - 1);
  m.validate();
  return m;
}

}  // namespace rlgogar
