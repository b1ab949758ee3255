#pragma once

#include <array>
#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "mum/engine.hpp"

namespace mum {

using nlohmann::json;

enum class Opponent { Engine, Human };

enum class SessionStatus { InProgress, Won };

struct HistoryEntry {
  std::string player;
  MoveAction move;
  std::vector<Heap> heaps;  // position after the move

  friend bool operator==(const HistoryEntry&, const HistoryEntry&) = default;
};

/// One game between two seats. Against the engine the seats are "human" and
/// "engine"; a hot-seat game uses "player1" and "player2". The first seat
/// moves first.
struct GameSession {
  std::string id;
  Variant variant;
  ConsolidationPolicy policy = ConsolidationPolicy::StrandedOnly;
  Opponent opponent = Opponent::Engine;
  std::vector<Heap> initial_heaps;
  GamePosition position;
  std::vector<HistoryEntry> history;
  std::string player_to_move;
  SessionStatus status = SessionStatus::InProgress;
  std::string winner;
  std::string created_at;
  std::string updated_at;

  std::array<std::string, 2> seats() const {
    if (opponent == Opponent::Engine) return {"human", "engine"};
    return {"player1", "player2"};
  }

  std::string other(const std::string& seat) const {
    const auto s = seats();
    return seat == s[0] ? s[1] : s[0];
  }

  bool is_engine(const std::string& seat) const { return opponent == Opponent::Engine && seat == "engine"; }
};

namespace detail {

inline std::string utc_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(now.time_since_epoch()).count() % 1000;
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%S") << '.' << std::setw(3) << std::setfill('0') << ms << 'Z';
  return os.str();
}

inline std::string random_id() {
  static thread_local std::mt19937_64 gen{std::random_device{}()};
  std::ostringstream os;
  os << std::hex << std::setfill('0') << std::setw(16) << gen() << std::setw(16) << gen();
  return os.str();
}

}  // namespace detail

/// A fresh session. The position is validated by the core constructors; a
/// terminal start is already decided in favour of the second seat.
inline GameSession new_session(const Variant& variant, std::vector<Heap> heaps, Opponent opponent,
                               ConsolidationPolicy policy) {
  GamePosition pos(variant, heaps);
  GameSession s{detail::random_id(), variant, policy, opponent, pos.heaps(), pos, {}, "", SessionStatus::InProgress,
                "", detail::utc_now(), ""};
  s.updated_at = s.created_at;
  s.player_to_move = s.seats()[0];
  if (pos.is_terminal()) {
    s.status = SessionStatus::Won;
    s.winner = s.seats()[1];
  }
  return s;
}

/// Applies `move` for the side to move and updates turn and status. The
/// caller checks whose turn it is.
inline void play(GameSession& s, const MoveAction& move) {
  if (s.status != SessionStatus::InProgress) throw Error(ErrorCode::IllegalMove, "the game is over");
  GamePosition next = s.position.apply(move, s.policy);
  const std::string mover = s.player_to_move;
  s.history.push_back({mover, move, next.heaps()});
  s.position = std::move(next);
  s.player_to_move = s.other(mover);
  if (s.position.is_terminal()) {
    s.status = SessionStatus::Won;
    s.winner = mover;
  }
  s.updated_at = detail::utc_now();
}

/// Replays the history from the initial heaps; throws if any step is illegal
/// or disagrees with the recorded snapshot, or the end state differs.
inline void verify_history(const GameSession& s) {
  GamePosition pos(s.variant, s.initial_heaps);
  std::string seat = s.seats()[0];
  for (std::size_t i = 0; i < s.history.size(); ++i) {
    const auto& e = s.history[i];
    if (e.player != seat) {
      throw Error(ErrorCode::ParseError, "history entry " + std::to_string(i) + " is out of turn");
    }
    pos = pos.apply(e.move, s.policy);
    if (pos.heaps() != e.heaps) {
      throw Error(ErrorCode::ParseError, "history entry " + std::to_string(i) + " does not match its snapshot");
    }
    seat = s.other(seat);
  }
  if (pos.heaps() != s.position.heaps()) throw Error(ErrorCode::ParseError, "replayed history ends elsewhere");
  if (seat != s.player_to_move) throw Error(ErrorCode::ParseError, "player to move disagrees with history");
  const bool over = pos.is_terminal();
  if (over != (s.status == SessionStatus::Won)) throw Error(ErrorCode::ParseError, "status disagrees with position");
}

// ---------------------------------------------------------------------------
// JSON

inline ConsolidationPolicy parse_policy(const std::string& s) {
  if (s == "stranded-only") return ConsolidationPolicy::StrandedOnly;
  if (s == "always") return ConsolidationPolicy::Always;
  throw Error(ErrorCode::ParseError, "unknown policy '" + s + "' (expected stranded-only or always)");
}

inline Opponent parse_opponent(const std::string& s) {
  if (s == "engine") return Opponent::Engine;
  if (s == "human") return Opponent::Human;
  throw Error(ErrorCode::ParseError, "unknown opponent '" + s + "' (expected engine or human)");
}

inline json to_json(const MoveAction& m) {
  if (m.is_compound()) return {{"type", "consolidate"}, {"amount", m.amount}};
  return {{"type", "reduce"}, {"heapIndex", m.heap_index}, {"amount", m.amount}};
}

inline MoveAction move_from_json(const json& j) {
  if (!j.is_object()) throw Error(ErrorCode::ParseError, "move must be an object");
  const std::string type = j.value("type", "reduce");
  if (!j.contains("amount") || !j["amount"].is_number_integer()) {
    throw Error(ErrorCode::ParseError, "move needs an integer amount");
  }
  const auto amount = j["amount"].get<std::int64_t>();
  if (type == "consolidate") return MoveAction::consolidate(amount);
  if (type != "reduce") throw Error(ErrorCode::ParseError, "unknown move type '" + type + "'");
  if (!j.contains("heapIndex") || !j["heapIndex"].is_number_integer() || j["heapIndex"].get<std::int64_t>() < 0) {
    throw Error(ErrorCode::ParseError, "reduce needs a non-negative integer heapIndex");
  }
  return MoveAction::reduce(j["heapIndex"].get<std::size_t>(), amount);
}

inline json to_json(const Variant& v) {
  if (v.type == Variant::Type::Numeric) return {{"type", "numeric"}, {"modulus", v.modulus->value()}};
  return {{"type", "poly"},
          {"p", v.field->p()},
          {"n", v.field->n()},
          {"irreducible", v.field->irreducible_bits()},
          {"irreduciblePolynomial", poly::to_string(v.field->irreducible())}};
}

inline Variant variant_from_json(const json& j) {
  if (!j.is_object()) throw Error(ErrorCode::ParseError, "variant must be an object");
  const std::string type = j.value("type", "numeric");
  auto integer = [&j](const char* key) {
    if (!j.contains(key) || !j[key].is_number_integer()) {
      throw Error(ErrorCode::ParseError, std::string("variant needs an integer '") + key + "'");
    }
    return j[key].get<std::int64_t>();
  };
  if (type == "numeric") return Variant::numeric(integer("modulus"));
  if (type == "poly") {
    const auto n = integer("n");
    if (n < 1 || n > 62) throw Error(ErrorCode::FieldTooLarge, "degree " + std::to_string(n) + " out of range");
    return Variant::poly(make_field_from_bits(integer("p"), static_cast<int>(n), integer("irreducible")));
  }
  throw Error(ErrorCode::ParseError, "unknown variant type '" + type + "'");
}

inline std::vector<Heap> heaps_from_json(const json& j) {
  if (!j.is_array()) throw Error(ErrorCode::ParseError, "heaps must be an array of integers");
  std::vector<Heap> out;
  for (const auto& h : j) {
    if (!h.is_number_integer()) throw Error(ErrorCode::ParseError, "heaps must be an array of integers");
    out.push_back(h.get<Heap>());
  }
  return out;
}

inline json to_json(const FieldElement& e) { return {{"rep", e.rep}, {"polynomial", e.to_string()}}; }

inline json to_json(const AnalysisView& v) {
  json j{{"heaps", v.heaps},
         {"product", v.product},
         {"productText", v.product_text},
         {"outcome", std::string(to_string(v.outcome))},
         {"losingForPlayerToMove", v.outcome == Outcome::PPosition},
         {"terminal", v.terminal},
         {"stranded", v.stranded},
         {"stateVector", nullptr},
         {"mumber", nullptr},
         {"hintAvailable", v.hint_available}};
  if (v.state_vector) {
    json comps = json::array();
    for (std::size_t i = 0; i < v.state_vector->factors.size(); ++i) {
      comps.push_back({{"modulus", v.state_vector->factors[i].value},
                       {"value", v.state_vector->components[i].value()}});
    }
    j["stateVector"] = comps;
  }
  if (v.mumber || !v.mumber_note.empty()) {
    j["mumber"] = {{"value", v.mumber ? json(*v.mumber) : json(nullptr)},
                   {"policy", std::string(to_string(v.policy))}};
    if (!v.mumber_note.empty()) j["mumber"]["note"] = v.mumber_note;
  }
  return j;
}

inline json to_json(const Hint& h) {
  json j{{"move", h.move ? to_json(*h.move) : json(nullptr)},
         {"explanation", h.explanation},
         {"viaConsolidation", h.via_consolidation}};
  if (h.coproduct) j["coproduct"] = *h.coproduct;
  if (h.inverse) j["inverse"] = *h.inverse;
  if (h.target) j["target"] = *h.target;
  if (h.field_product) j["fieldProduct"] = to_json(*h.field_product);
  if (h.field_product_inverse) j["fieldProductInverse"] = to_json(*h.field_product_inverse);
  return j;
}

inline json to_json(const GameSession& s) {
  json history = json::array();
  for (const auto& e : s.history) history.push_back({{"player", e.player}, {"move", to_json(e.move)}, {"heaps", e.heaps}});
  return {{"id", s.id},
          {"variant", to_json(s.variant)},
          {"policy", std::string(to_string(s.policy))},
          {"opponent", s.opponent == Opponent::Engine ? "engine" : "human"},
          {"initialHeaps", s.initial_heaps},
          {"heaps", s.position.heaps()},
          {"history", history},
          {"playerToMove", s.player_to_move},
          {"status", s.status == SessionStatus::Won ? "won" : "in-progress"},
          {"winner", s.winner.empty() ? json(nullptr) : json(s.winner)},
          {"createdAt", s.created_at},
          {"updatedAt", s.updated_at}};
}

/// Parses a stored session and checks it by replaying its history.
inline GameSession session_from_json(const json& j) {
  try {
    const Variant variant = variant_from_json(j.at("variant"));
    const auto initial = heaps_from_json(j.at("initialHeaps"));
    GameSession s{j.at("id").get<std::string>(),
                  variant,
                  parse_policy(j.at("policy").get<std::string>()),
                  parse_opponent(j.at("opponent").get<std::string>()),
                  initial,
                  GamePosition(variant, heaps_from_json(j.at("heaps"))),
                  {},
                  j.at("playerToMove").get<std::string>(),
                  j.at("status").get<std::string>() == "won" ? SessionStatus::Won : SessionStatus::InProgress,
                  j.at("winner").is_null() ? "" : j.at("winner").get<std::string>(),
                  j.at("createdAt").get<std::string>(),
                  j.at("updatedAt").get<std::string>()};
    for (const auto& e : j.at("history")) {
      s.history.push_back({e.at("player").get<std::string>(), move_from_json(e.at("move")), heaps_from_json(e.at("heaps"))});
    }
    verify_history(s);
    return s;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("malformed session document: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// Store

/// One JSON document per session in a directory. Saves write a temporary file
/// and rename it over the old document, so readers never see a partial file.
class SessionStore {
 public:
  struct LoadResult {
    std::map<std::string, GameSession> sessions;
    std::map<std::string, std::string> unloadable;  // id -> reason
  };

  explicit SessionStore(std::filesystem::path dir) : dir_(std::move(dir)) {
    std::filesystem::create_directories(dir_);
  }

  const std::filesystem::path& directory() const noexcept { return dir_; }

  std::filesystem::path path_for(const std::string& id) const { return dir_ / (id + ".json"); }

  void save(const GameSession& s) const {
    const auto final_path = path_for(s.id);
    auto tmp = final_path;
    tmp += ".tmp-" + detail::random_id();
    {
      std::ofstream out(tmp, std::ios::trunc);
      if (!out) throw std::runtime_error("cannot write " + tmp.string());
      out << to_json(s).dump(2) << "\n";
      out.flush();
      if (!out) throw std::runtime_error("short write to " + tmp.string());
    }
    std::filesystem::rename(tmp, final_path);
  }

  GameSession load(const std::string& id) const {
    std::ifstream in(path_for(id));
    if (!in) throw std::runtime_error("no stored session " + id);
    json j;
    try {
      in >> j;
    } catch (const json::exception& e) {
      throw Error(ErrorCode::ParseError, std::string("corrupt session document: ") + e.what());
    }
    GameSession s = session_from_json(j);
    if (s.id != id) throw Error(ErrorCode::ParseError, "document id " + s.id + " does not match file name");
    return s;
  }

  LoadResult load_all() const {
    LoadResult out;
    for (const auto& entry : std::filesystem::directory_iterator(dir_)) {
      if (!entry.is_regular_file() || entry.path().extension() != ".json") continue;
      const std::string id = entry.path().stem().string();
      try {
        out.sessions.emplace(id, load(id));
      } catch (const std::exception& e) {
        out.unloadable.emplace(id, e.what());
      }
    }
    return out;
  }

 private:
  std::filesystem::path dir_;
};

}  // namespace mum
