#pragma once

#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace rlgogar {

using CounterId = std::string;
using ParticipantId = std::string;

// Raised when a move log cannot be replayed: malformed entry, unknown
// counter, or a recorded outcome that does not match the re-derived one.
struct LogCorruptionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// The token space of the commitment game: counters plus the directed
// committive-consequence relation among them, with an optional (inert)
// incompatibility relation and a practice tag naming where the relation
// comes from. Counters are registered lazily; a universe only ever holds the
// counters a game has touched.
struct CounterUniverse {
  std::set<CounterId> counters;
  std::map<CounterId, std::set<CounterId>> cc;  // direct consequences
  std::set<std::pair<CounterId, CounterId>> incompatible;  // stored with first < second
  std::string provenance;  // optional practice tag

  bool has(const CounterId& c) const { return counters.count(c) != 0; }
  void add_counter(const CounterId& c);
  void add_cc(const CounterId& from, const CounterId& to);  // both must be registered
  void add_incompatible(const CounterId& a, const CounterId& b);
  const std::set<CounterId>& consequences(const CounterId& c) const;

  friend bool operator==(const CounterUniverse&, const CounterUniverse&) = default;
};

// Everything reachable from c along cc edges, including c itself. Terminates
// on cyclic relations.
std::set<CounterId> cc_closure(const CounterUniverse& u, const CounterId& c);

// Per-participant score: what they are committed to, what they claim
// entitlement to, and which entitlements they have pledged to defend.
// entitlement_box is always a subset of commitment_box, and defend_pledges a
// subset of entitlement_box.
struct ParticipantState {
  ParticipantId id;
  std::set<CounterId> commitment_box;
  std::set<CounterId> entitlement_box;
  std::set<CounterId> defend_pledges;

  friend bool operator==(const ParticipantState&, const ParticipantState&) = default;
};

enum class MoveKind { Commit, Entitle, Challenge, Assert };
enum class MoveOutcome { Ok, Defended, Retracted, True, False };

struct MoveRecord {
  long long seq = 0;
  MoveKind kind = MoveKind::Commit;
  ParticipantId actor;    // the mover (for challenges: the scorekeeper)
  ParticipantId target;   // challenges only: the challenged player
  CounterId counter;
  MoveOutcome outcome = MoveOutcome::Ok;

  friend bool operator==(const MoveRecord&, const MoveRecord&) = default;
};

struct GogarOptions {
  // Commitment places the full transitive cc closure by default; direct-only
  // placement is available for comparison.
  bool transitive_commit = true;

  friend bool operator==(const GogarOptions&, const GogarOptions&) = default;
};

enum class ChallengeOutcome { Defended, Retracted };

// One game: a universe, per-participant boxes, and an append-only move log
// whose replay from the empty game reproduces the state exactly. Moves are
// applied sequentially through a single owner.
class GameState {
 public:
  GameState() = default;  // empty universe, no participants
  explicit GameState(CounterUniverse universe, GogarOptions options = {});

  const CounterUniverse& universe() const { return universe_; }
  const GogarOptions& options() const { return options_; }
  const std::map<ParticipantId, ParticipantState>& participants() const { return participants_; }
  const std::vector<MoveRecord>& move_log() const { return log_; }

  bool has_participant(const ParticipantId& p) const { return participants_.count(p) != 0; }
  const ParticipantState& participant(const ParticipantId& p) const;

  // Registers a counter that is not part of the universe yet (empty cc).
  void register_counter(const CounterId& c);

  // Places c and (by default) its whole cc closure in the player's
  // commitment box. Participants are created on first use.
  void commit(const ParticipantId& player, const CounterId& c);

  // Copies an already-committed counter into the entitlement box and pledges
  // to defend it.
  void entitle(const ParticipantId& player, const CounterId& c);

  // Scorekeeper refuses to accept an entitled claim. The player defends it if
  // some other committed counter carries c among its consequences; otherwise
  // the claim is retracted from the entitlement box (commitments stay).
  ChallengeOutcome challenge(const ParticipantId& scorekeeper, const ParticipantId& player,
                             const CounterId& c);

  // Pure query: entitled and pledged-to-defend.
  bool is_assertion(const ParticipantId& player, const CounterId& c) const;

  // Same query, recorded in the move log as an assert move.
  bool assert_move(const ParticipantId& player, const CounterId& c);

  friend bool operator==(const GameState& a, const GameState& b) {
    return a.universe_ == b.universe_ && a.options_ == b.options_ &&
           a.participants_ == b.participants_ && a.log_ == b.log_;
  }

 private:
  ParticipantState& touch(const ParticipantId& p);
  void require_counter(const CounterId& c) const;

  CounterUniverse universe_;
  GogarOptions options_;
  std::map<ParticipantId, ParticipantState> participants_;
  std::vector<MoveRecord> log_;
};

// Deterministic reconstruction of a game from its move log. Every entry is
// re-applied and its recorded outcome re-derived; any mismatch, unknown
// counter, or malformed entry raises a log-corruption error.
GameState replay(const CounterUniverse& universe, const std::vector<MoveRecord>& log,
                 GogarOptions options = {});

// Move-log text format, one move per line:
//   <seq> <kind> <actor> [<target>] <counter> <outcome>
// ids are ASCII tokens without spaces; challenge lines carry the target.
std::string move_to_line(const MoveRecord& m);
MoveRecord parse_move_line(std::string_view line);
std::string serialize_move_log(const std::vector<MoveRecord>& log);
// Parses a log; lines starting with '#' and blank lines are skipped.
std::vector<MoveRecord> parse_move_log(std::string_view text);

std::string to_string(MoveKind k);
std::string to_string(MoveOutcome o);

}  // namespace rlgogar
