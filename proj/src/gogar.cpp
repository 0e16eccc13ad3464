#include "rlgogar/gogar.hpp"

#include <deque>
#include <sstream>
#include <stdexcept>

namespace rlgogar {

namespace {

void check_id_token(const std::string& id, const char* what) {
  if (id.empty()) throw std::invalid_argument(std::string("[gogar] empty ") + what);
  for (char ch : id)
    if (ch == ' ' || ch == '\t' || ch == '\n' || ch == '\r' || ch == '#' ||
        static_cast<unsigned char>(ch) > 126)
      throw std::invalid_argument(std::string("[gogar] invalid character in ") + what + " '" + id +
                                  "'");
}

[[noreturn]] void corruption(long long seq, const std::string& why) {
  throw LogCorruptionError("[gogar] log corruption at entry " + std::to_string(seq) + ": " + why);
}

}  // namespace

void CounterUniverse::add_counter(const CounterId& c) {
  check_id_token(c, "counter id");
  counters.insert(c);
}

void CounterUniverse::add_cc(const CounterId& from, const CounterId& to) {
  if (!has(from) || !has(to))
    throw std::invalid_argument("[gogar] cc endpoints must be registered counters");
  cc[from].insert(to);
}

void CounterUniverse::add_incompatible(const CounterId& a, const CounterId& b) {
  if (!has(a) || !has(b))
    throw std::invalid_argument("[gogar] incompatible endpoints must be registered counters");
  if (a == b) throw std::invalid_argument("[gogar] incompatibility must be irreflexive");
  incompatible.insert(a < b ? std::make_pair(a, b) : std::make_pair(b, a));
}

const std::set<CounterId>& CounterUniverse::consequences(const CounterId& c) const {
  static const std::set<CounterId> kEmpty;
  const auto it = cc.find(c);
  return it == cc.end() ? kEmpty : it->second;
}

std::set<CounterId> cc_closure(const CounterUniverse& u, const CounterId& c) {
  if (!u.has(c)) throw std::invalid_argument("[gogar] unknown counter '" + c + "'");
  std::set<CounterId> seen{c};
  std::deque<CounterId> frontier{c};
  while (!frontier.empty()) {
    const CounterId cur = frontier.front();
    frontier.pop_front();
    for (const auto& next : u.consequences(cur))
      if (seen.insert(next).second) frontier.push_back(next);
  }
  return seen;
}

GameState::GameState(CounterUniverse universe, GogarOptions options)
    : universe_(std::move(universe)), options_(options) {}

const ParticipantState& GameState::participant(const ParticipantId& p) const {
  const auto it = participants_.find(p);
  if (it == participants_.end())
    throw std::invalid_argument("[gogar] unknown participant '" + p + "'");
  return it->second;
}

ParticipantState& GameState::touch(const ParticipantId& p) {
  check_id_token(p, "participant id");
  auto [it, inserted] = participants_.try_emplace(p);
  if (inserted) it->second.id = p;
  return it->second;
}

void GameState::require_counter(const CounterId& c) const {
  if (!universe_.has(c)) throw std::invalid_argument("[gogar] unknown counter '" + c + "'");
}

void GameState::register_counter(const CounterId& c) { universe_.add_counter(c); }

void GameState::commit(const ParticipantId& player, const CounterId& c) {
  require_counter(c);
  ParticipantState& ps = touch(player);
  if (options_.transitive_commit) {
    const auto closure = cc_closure(universe_, c);
    ps.commitment_box.insert(closure.begin(), closure.end());
  } else {
    ps.commitment_box.insert(c);
    const auto& direct = universe_.consequences(c);
    ps.commitment_box.insert(direct.begin(), direct.end());
  }
  log_.push_back({static_cast<long long>(log_.size()), MoveKind::Commit, player, "", c,
                  MoveOutcome::Ok});
}

void GameState::entitle(const ParticipantId& player, const CounterId& c) {
  require_counter(c);
  ParticipantState& ps = touch(player);
  if (ps.commitment_box.count(c) == 0)
    throw std::runtime_error("[gogar] entitlement without commitment: '" + c + "'");
  ps.entitlement_box.insert(c);
  ps.defend_pledges.insert(c);
  log_.push_back({static_cast<long long>(log_.size()), MoveKind::Entitle, player, "", c,
                  MoveOutcome::Ok});
}

ChallengeOutcome GameState::challenge(const ParticipantId& scorekeeper,
                                      const ParticipantId& player, const CounterId& c) {
  if (scorekeeper == player) throw std::invalid_argument("[gogar] self-challenge is not a move");
  require_counter(c);
  touch(scorekeeper);
  ParticipantState& ps = touch(player);
  if (ps.entitlement_box.count(c) == 0)
    throw std::runtime_error("[gogar] challenge target '" + c + "' is not entitled");

  // Defense rule: some other committed counter must carry c among its
  // committive consequences.
  bool defended = false;
  for (const auto& witness : ps.commitment_box) {
    if (witness == c) continue;
    if (cc_closure(universe_, witness).count(c) != 0) {
      defended = true;
      break;
    }
  }
  if (!defended) {
    ps.entitlement_box.erase(c);
    ps.defend_pledges.erase(c);
  }
  log_.push_back({static_cast<long long>(log_.size()), MoveKind::Challenge, scorekeeper, player, c,
                  defended ? MoveOutcome::Defended : MoveOutcome::Retracted});
  return defended ? ChallengeOutcome::Defended : ChallengeOutcome::Retracted;
}

bool GameState::is_assertion(const ParticipantId& player, const CounterId& c) const {
  const auto it = participants_.find(player);
  if (it == participants_.end()) return false;
  return it->second.entitlement_box.count(c) != 0 && it->second.defend_pledges.count(c) != 0;
}

bool GameState::assert_move(const ParticipantId& player, const CounterId& c) {
  touch(player);
  const bool result = is_assertion(player, c);
  log_.push_back({static_cast<long long>(log_.size()), MoveKind::Assert, player, "", c,
                  result ? MoveOutcome::True : MoveOutcome::False});
  return result;
}

GameState replay(const CounterUniverse& universe, const std::vector<MoveRecord>& log,
                 GogarOptions options) {
  GameState g(universe, options);
  for (std::size_t i = 0; i < log.size(); ++i) {
    const MoveRecord& m = log[i];
    if (m.seq != static_cast<long long>(i)) corruption(m.seq, "sequence number out of order");
    try {
      switch (m.kind) {
        case MoveKind::Commit: {
          if (m.outcome != MoveOutcome::Ok) corruption(m.seq, "commit outcome must be ok");
          g.commit(m.actor, m.counter);
          break;
        }
        case MoveKind::Entitle: {
          if (m.outcome != MoveOutcome::Ok) corruption(m.seq, "entitle outcome must be ok");
          g.entitle(m.actor, m.counter);
          break;
        }
        case MoveKind::Challenge: {
          const auto out = g.challenge(m.actor, m.target, m.counter);
          const auto expected = out == ChallengeOutcome::Defended ? MoveOutcome::Defended
                                                                  : MoveOutcome::Retracted;
          if (m.outcome != expected) corruption(m.seq, "challenge outcome mismatch");
          break;
        }
        case MoveKind::Assert: {
          const bool result = g.assert_move(m.actor, m.counter);
          if (m.outcome != (result ? MoveOutcome::True : MoveOutcome::False))
            corruption(m.seq, "assert outcome mismatch");
          break;
        }
      }
    } catch (const LogCorruptionError&) {
      throw;
    } catch (const std::exception& e) {
      corruption(m.seq, e.what());
    }
  }
  return g;
}

std::string to_string(MoveKind k) {
  switch (k) {
    case MoveKind::Commit: return "commit";
    case MoveKind::Entitle: return "entitle";
    case MoveKind::Challenge: return "challenge";
    case MoveKind::Assert: return "assert";
  }
  return "?";
}

std::string to_string(MoveOutcome o) {
  switch (o) {
    case MoveOutcome::Ok: return "ok";
    case MoveOutcome::Defended: return "defended";
    case MoveOutcome::Retracted: return "retracted";
    case MoveOutcome::True: return "true";
    case MoveOutcome::False: return "false";
  }
  return "?";
}

namespace {

MoveKind parse_kind(const std::string& s, long long seq) {
  if (s == "commit") return MoveKind::Commit;
  if (s == "entitle") return MoveKind::Entitle;
  if (s == "challenge") return MoveKind::Challenge;
  if (s == "assert") return MoveKind::Assert;
  corruption(seq, "unknown move kind '" + s + "'");
}

MoveOutcome parse_outcome(const std::string& s, long long seq) {
  if (s == "ok") return MoveOutcome::Ok;
  if (s == "defended") return MoveOutcome::Defended;
  if (s == "retracted") return MoveOutcome::Retracted;
  if (s == "true") return MoveOutcome::True;
  if (s == "false") return MoveOutcome::False;
  corruption(seq, "unknown outcome '" + s + "'");
}

}  // namespace

std::string move_to_line(const MoveRecord& m) {
  std::ostringstream os;
  os << m.seq << ' ' << to_string(m.kind) << ' ' << m.actor;
  if (m.kind == MoveKind::Challenge) os << ' ' << m.target;
  os << ' ' << m.counter << ' ' << to_string(m.outcome);
  return os.str();
}

MoveRecord parse_move_line(std::string_view line) {
  std::istringstream is{std::string(line)};
  std::vector<std::string> fields;
  std::string tok;
  while (is >> tok) fields.push_back(tok);
  if (fields.size() < 5) throw LogCorruptionError("[gogar] log corruption: short move line");

  MoveRecord m;
  try {
    m.seq = std::stoll(fields[0]);
  } catch (const std::exception&) {
    throw LogCorruptionError("[gogar] log corruption: bad sequence field '" + fields[0] + "'");
  }
  m.kind = parse_kind(fields[1], m.seq);
  const std::size_t expected = m.kind == MoveKind::Challenge ? 6 : 5;
  if (fields.size() != expected) corruption(m.seq, "wrong field count for " + fields[1]);
  m.actor = fields[2];
  if (m.kind == MoveKind::Challenge) {
    m.target = fields[3];
    m.counter = fields[4];
    m.outcome = parse_outcome(fields[5], m.seq);
  } else {
    m.counter = fields[3];
    m.outcome = parse_outcome(fields[4], m.seq);
  }
  return m;
}

std::string serialize_move_log(const std::vector<MoveRecord>& log) {
  std::string out;
  for (const auto& m : log) {
    out += move_to_line(m);
    out += '\n';
  }
  return out;
}

std::vector<MoveRecord> parse_move_log(std::string_view text) {
  std::vector<MoveRecord> log;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    // trim leading spaces
    while (!line.empty() && (line.front() == ' ' || line.front() == '\t')) line.remove_prefix(1);
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.remove_suffix(1);
    if (line.empty() || line.front() == '#') continue;
    log.push_back(parse_move_line(line));
  }
  return log;
}

}  // namespace rlgogar
