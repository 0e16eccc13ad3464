#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>

#include "rlgogar/a3c.hpp"
#include "rlgogar/bridge.hpp"
#include "rlgogar/envs.hpp"
#include "rlgogar/gogar.hpp"
#include "rlgogar/mdp.hpp"
#include "rlgogar/mdp_io.hpp"
#include "rlgogar/policy_gradient.hpp"
#include "rlgogar/population.hpp"
#include "rlgogar/qlearn.hpp"
#include "rlgogar/runner.hpp"
#include "rlgogar/version.hpp"

namespace py = pybind11;
using namespace rlgogar;

namespace {

std::vector<std::vector<double>> matrix_rows(const Matrix& m) {
  std::vector<std::vector<double>> rows(m.rows);
  for (int i = 0; i < m.rows; ++i) rows[i].assign(m.row(i), m.row(i) + m.cols);
  return rows;
}

AcHyper make_hyper(const Mdp& mdp, double alpha, double beta, std::optional<double> gamma,
                   int step_cap) {
  AcHyper h;
  h.alpha = alpha;
  h.beta = beta;
  h.gamma = gamma.value_or(mdp.gamma);
  h.t_cap = step_cap > 0 ? step_cap : 10 * mdp.n_states;
  return h;
}

struct PyUnit {
  std::string pid;
  std::vector<std::vector<double>> theta;
  std::vector<double> w;
  long long interaction_count = 0;
};

}  // namespace

PYBIND11_MODULE(rlgogar, m) {
  m.doc() = "Tabular reinforcement learning with a commitment-game bridge.";
  m.attr("__version__") = kVersion;

  py::class_<Mdp>(m, "Mdp")
      .def_readonly("n_states", &Mdp::n_states)
      .def_readonly("n_actions", &Mdp::n_actions)
      .def_readonly("gamma", &Mdp::gamma)
      .def_readonly("name", &Mdp::name)
      .def("is_terminal", &Mdp::is_terminal, py::arg("s"))
      .def("terminal_states", &Mdp::terminal_states)
      .def("transition_row",
           [](const Mdp& mdp, int s, int a) {
             mdp.check_state(s);
             mdp.check_action(a);
             const auto row = mdp.trans_row(s, a);
             return std::vector<double>(row.begin(), row.end());
           })
      .def("reward", &Mdp::reward_at, py::arg("s"), py::arg("a"), py::arg("s2"))
      .def("validate", &Mdp::validate)
      .def("__repr__", [](const Mdp& mdp) {
        return "<Mdp '" + mdp.name + "' " + std::to_string(mdp.n_states) + "x" +
               std::to_string(mdp.n_actions) + ">";
      });

  m.def("load_mdp", &load_mdp, py::arg("path"));
  m.def("write_mdp", &write_mdp, py::arg("mdp"));
  m.def("save_mdp", &save_mdp, py::arg("mdp"), py::arg("path"));
  m.def("make_chain", &make_chain, py::arg("n_states") = 3, py::arg("gamma") = 0.9);
  m.def("make_random_walk", &make_random_walk, py::arg("n_states") = 5, py::arg("gamma") = 0.9,
        py::arg("slip") = 0.1);
  m.def("make_gridworld", &make_gridworld, py::arg("rows") = 4, py::arg("cols") = 4,
        py::arg("gamma") = 0.9);

  py::class_<ValueIterationResult>(m, "ValueIterationResult")
      .def_readonly("values", &ValueIterationResult::values)
      .def_readonly("policy", &ValueIterationResult::policy)
      .def_readonly("sweeps", &ValueIterationResult::sweeps);
  m.def("value_iteration", &value_iteration, py::arg("mdp"), py::arg("tol") = 1e-10);

  m.def("discounted_return",
        [](const std::vector<double>& rewards, double gamma, int t) {
          return discounted_return(rewards, gamma, t);
        },
        py::arg("rewards"), py::arg("gamma"), py::arg("t") = 0);

  py::class_<Episode>(m, "Episode")
      .def_property_readonly("steps",
                             [](const Episode& e) {
                               std::vector<std::tuple<int, int, double>> out;
                               for (const auto& st : e.steps)
                                 out.emplace_back(st.state, st.action, st.reward);
                               return out;
                             })
      .def_readonly("final_state", &Episode::final_state);
  m.def(
      "generate_episode",
      [](const Mdp& mdp, const std::vector<int>& pi, std::uint64_t seed, int max_len) {
        Rng rng(seed);
        return generate_episode(
            mdp, [&pi](int s, Rng&) { return pi.at(s); }, rng, max_len);
      },
      py::arg("mdp"), py::arg("policy"), py::arg("seed"), py::arg("max_len") = 1000,
      "Roll out one episode under a fixed deterministic policy.");

  py::class_<QTable>(m, "QTable")
      .def_property_readonly("values", [](const QTable& q) { return matrix_rows(q.values); })
      .def_property_readonly("n_states", &QTable::n_states)
      .def_property_readonly("n_actions", &QTable::n_actions);
  m.def(
      "train_q",
      [](const Mdp& mdp, long long episodes, double alpha, double epsilon, std::uint64_t seed,
         std::optional<double> gamma, int step_cap) {
        QLearnConfig cfg;
        cfg.alpha = alpha;
        cfg.epsilon = epsilon;
        cfg.gamma_override = gamma;
        cfg.step_cap = step_cap;
        return train_q(mdp, episodes, cfg, seed);
      },
      py::arg("mdp"), py::arg("episodes"), py::arg("alpha") = 0.1, py::arg("epsilon") = 0.1,
      py::arg("seed") = 0, py::arg("gamma") = std::nullopt, py::arg("step_cap") = 0);
  m.def("greedy_policy", &greedy_policy, py::arg("qtable"));

  py::class_<SoftmaxPolicy>(m, "SoftmaxPolicy")
      .def_property_readonly("theta", [](const SoftmaxPolicy& p) { return matrix_rows(p.theta); })
      .def_property_readonly("n_actions", &SoftmaxPolicy::n_actions)
      .def_property_readonly("dim", &SoftmaxPolicy::dim)
      .def("action_probs", [](const SoftmaxPolicy& p, int s) {
        return policy_probs(p, FeatureMap::one_hot(p.dim()), s);
      });

  py::class_<LinearValueFn>(m, "LinearValueFn")
      .def_readonly("w", &LinearValueFn::w)
      .def("value", [](const LinearValueFn& v, int s) {
        return value(v, FeatureMap::one_hot(v.dim()), s);
      });

  py::class_<AcResult>(m, "AcResult")
      .def_readonly("policy", &AcResult::policy)
      .def_readonly("value", &AcResult::value);

  m.def(
      "train_reinforce",
      [](const Mdp& mdp, long long episodes, double alpha, std::uint64_t seed,
         std::optional<double> gamma, int step_cap) {
        const double g = gamma.value_or(mdp.gamma);
        const int cap = step_cap > 0 ? step_cap : 10 * mdp.n_states;
        return train_reinforce(mdp, alpha, g, episodes, cap, seed);
      },
      py::arg("mdp"), py::arg("episodes"), py::arg("alpha") = 0.05, py::arg("seed") = 0,
      py::arg("gamma") = std::nullopt, py::arg("step_cap") = 0);

  m.def(
      "train_actor_critic",
      [](const Mdp& mdp, long long episodes, double alpha, double beta, std::uint64_t seed,
         std::optional<double> gamma, int step_cap) {
        return train_actor_critic(mdp, make_hyper(mdp, alpha, beta, gamma, step_cap), episodes,
                                  seed);
      },
      py::arg("mdp"), py::arg("episodes"), py::arg("alpha") = 0.1, py::arg("beta") = 0.1,
      py::arg("seed") = 0, py::arg("gamma") = std::nullopt, py::arg("step_cap") = 0);

  py::class_<A3cResult>(m, "A3cResult")
      .def_property_readonly("theta",
                             [](const A3cResult& r) { return matrix_rows(r.params.theta); })
      .def_property_readonly("w", [](const A3cResult& r) { return r.params.w; })
      .def_readonly("update_count", &A3cResult::update_count)
      .def_property_readonly("policy", [](const A3cResult& r) {
        return SoftmaxPolicy{r.params.theta};
      });
  m.def(
      "train_a3c",
      [](const Mdp& mdp, int n_threads, long long segments, int t_max, double alpha, double beta,
         std::uint64_t seed, std::optional<double> gamma, int step_cap) {
        return train_a3c(mdp, n_threads, make_hyper(mdp, alpha, beta, gamma, step_cap), t_max,
                         segments, seed);
      },
      py::arg("mdp"), py::arg("n_threads"), py::arg("segments"), py::arg("t_max") = 5,
      py::arg("alpha") = 0.1, py::arg("beta") = 0.1, py::arg("seed") = 0,
      py::arg("gamma") = std::nullopt, py::arg("step_cap") = 0);

  // bridge
  py::class_<Token>(m, "Token")
      .def_readonly("s", &Token::s)
      .def_readonly("a", &Token::a)
      .def("__repr__", [](const Token& t) { return token_counter_id(t); });
  py::class_<TokenGraph>(m, "TokenGraph")
      .def_property_readonly("tokens",
                             [](const TokenGraph& g) {
                               std::vector<std::pair<int, int>> out;
                               for (const auto& t : g.tokens) out.emplace_back(t.s, t.a);
                               return out;
                             })
      .def_property_readonly("edges",
                             [](const TokenGraph& g) {
                               std::vector<std::tuple<int, int, int, int>> out;
                               for (const auto& [f, t] : g.edges)
                                 out.emplace_back(f.s, f.a, t.s, t.a);
                               return out;
                             })
      .def_readonly("provenance", &TokenGraph::provenance);
  m.def("build_token_graph", &build_token_graph, py::arg("mdp"), py::arg("policy"),
        py::arg("provenance") = "");
  m.def("to_gogar_universe", &to_gogar_universe, py::arg("graph"));
  m.def("check_structural_equivalence", &check_structural_equivalence, py::arg("graph"),
        py::arg("universe"));
  m.def("serialize_token_graph", &serialize_token_graph, py::arg("graph"));
  m.def("token_counter_id", &token_counter_id, py::arg("token"));

  // scorekeeping engine
  py::class_<CounterUniverse>(m, "CounterUniverse")
      .def(py::init<>())
      .def_readonly("counters", &CounterUniverse::counters)
      .def_readonly("cc", &CounterUniverse::cc)
      .def_readwrite("provenance", &CounterUniverse::provenance)
      .def("add_counter", &CounterUniverse::add_counter)
      .def("add_cc", &CounterUniverse::add_cc)
      .def("add_incompatible", &CounterUniverse::add_incompatible)
      .def("has", &CounterUniverse::has);
  m.def("cc_closure", &cc_closure, py::arg("universe"), py::arg("counter"));
  m.def("parse_universe", &parse_universe, py::arg("text"));
  m.def("write_universe", &write_universe, py::arg("universe"));

  py::class_<ParticipantState>(m, "ParticipantState")
      .def_readonly("id", &ParticipantState::id)
      .def_readonly("commitment_box", &ParticipantState::commitment_box)
      .def_readonly("entitlement_box", &ParticipantState::entitlement_box)
      .def_readonly("defend_pledges", &ParticipantState::defend_pledges);

  py::class_<GameState>(m, "GameState")
      .def(py::init([](const CounterUniverse& u, bool transitive_commit) {
             return GameState(u, GogarOptions{transitive_commit});
           }),
           py::arg("universe"), py::arg("transitive_commit") = true)
      .def("commit", &GameState::commit, py::arg("player"), py::arg("counter"))
      .def("entitle", &GameState::entitle, py::arg("player"), py::arg("counter"))
      .def(
          "challenge",
          [](GameState& g, const ParticipantId& keeper, const ParticipantId& player,
             const CounterId& c) {
            return g.challenge(keeper, player, c) == ChallengeOutcome::Defended ? "defended"
                                                                                : "retracted";
          },
          py::arg("scorekeeper"), py::arg("player"), py::arg("counter"))
      .def("is_assertion", &GameState::is_assertion, py::arg("player"), py::arg("counter"))
      .def("assert_move", &GameState::assert_move, py::arg("player"), py::arg("counter"))
      .def("register_counter", &GameState::register_counter, py::arg("counter"))
      .def_property_readonly("universe", &GameState::universe)
      .def("participant", &GameState::participant, py::arg("id"),
           py::return_value_policy::reference_internal)
      .def_property_readonly("move_log_text",
                             [](const GameState& g) { return serialize_move_log(g.move_log()); });
  m.def(
      "replay",
      [](const CounterUniverse& u, const std::string& log_text, bool transitive_commit) {
        return replay(u, parse_move_log(log_text), GogarOptions{transitive_commit});
      },
      py::arg("universe"), py::arg("log_text"), py::arg("transitive_commit") = true);

  // population trainer
  py::class_<PyUnit>(m, "ParticipantUnit")
      .def_readonly("pid", &PyUnit::pid)
      .def_readonly("theta", &PyUnit::theta)
      .def_readonly("w", &PyUnit::w)
      .def_readonly("interaction_count", &PyUnit::interaction_count)
      .def_property_readonly("policy", [](const PyUnit& u) {
        SoftmaxPolicy p(static_cast<int>(u.theta.size()),
                        static_cast<int>(u.theta.empty() ? 0 : u.theta[0].size()));
        for (int a = 0; a < p.n_actions(); ++a)
          for (int j = 0; j < p.dim(); ++j) p.theta.at(a, j) = u.theta[a][j];
        return p;
      });
  m.def(
      "train_gogar_a3c",
      [](const Mdp& mdp, int population_size, long long rounds, int t_max, double alpha,
         double beta, std::uint64_t seed, bool trace, std::optional<double> gamma, int step_cap) {
        GogarA3cConfig cfg;
        cfg.population_size = population_size;
        cfg.t_max = t_max;
        cfg.rounds = rounds;
        cfg.seed = seed;
        cfg.trace_enabled = trace;
        CounterUniverse universe;
        if (trace) {
          const auto vi = value_iteration(mdp);
          universe = to_gogar_universe(build_token_graph(mdp, vi.policy));
          cfg.trace_universe = &universe;
        }
        const auto res = train_gogar_a3c(mdp, make_hyper(mdp, alpha, beta, gamma, step_cap), cfg);
        std::vector<PyUnit> units;
        for (const auto& u : res.population) {
          auto [theta, w] = u->snapshot_params();
          units.push_back({u->pid, matrix_rows(theta), std::move(w), u->interaction_count});
        }
        std::vector<std::string> traces;
        for (const auto& tr : res.traces) traces.push_back(serialize_trace(tr));
        return py::make_tuple(units, traces);
      },
      py::arg("mdp"), py::arg("population_size"), py::arg("rounds"), py::arg("t_max") = 10,
      py::arg("alpha") = 0.1, py::arg("beta") = 0.1, py::arg("seed") = 0, py::arg("trace") = false,
      py::arg("gamma") = std::nullopt, py::arg("step_cap") = 0);
}
