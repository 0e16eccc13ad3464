#pragma once

#include "rlgogar/mdp.hpp"

namespace rlgogar {

// Canonical desk-scale environments used by the fixtures and the test suite.

// n-state chain: action 0 advances toward the terminal end state, action 1
// stays put. Reward 1 on the transition into the terminal state, 0 elsewhere.
// Start is state 0 with probability 1.
Mdp make_chain(int n_states = 3, double gamma = 0.9);

// Random walk on a line with terminals at both ends. Action 0 drifts left and
// action 1 drifts right, each with probability 1-slip of moving the chosen
// way. Reward 1 on entering the rightmost state. Start is the middle state.
Mdp make_random_walk(int n_states = 5, double gamma = 0.9, double slip = 0.1);

// rows x cols gridworld, goal terminal in the bottom-right corner, actions
// up/down/left/right (bumping the edge stays put), reward -1 per step.
// Start is uniform over the non-terminal states.
Mdp make_gridworld(int rows = 4, int cols = 4, double gamma = 0.9);

}  // namespace rlgogar
