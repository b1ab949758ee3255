#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include "mum/session.hpp"

namespace mum {

/// A failure with the HTTP status it maps to.
class ServiceError : public std::runtime_error {
 public:
  ServiceError(int status, std::string code, const std::string& message)
      : std::runtime_error(message), status_(status), code_(std::move(code)) {}

  int status() const noexcept { return status_; }
  const std::string& code() const noexcept { return code_; }

  json body() const { return {{"error", code_}, {"message", what()}}; }

 private:
  int status_;
  std::string code_;
};

/// HTTP status for a core error: malformed input is 400, anything that names a
/// broken game rule is 422.
inline int http_status(ErrorCode code) { return code == ErrorCode::ParseError ? 400 : 422; }

/// Sessions keyed by id, optionally persisted to a SessionStore. Each session
/// has its own mutex, so moves on one session apply one at a time while other
/// sessions proceed in parallel.
class SessionService {
 public:
  static constexpr std::size_t kMumberBudget = 200'000;

  explicit SessionService(std::optional<std::filesystem::path> store_dir = std::nullopt,
                          std::size_t mumber_budget = kMumberBudget)
      : solver_(mumber_budget) {
    if (store_dir) {
      store_.emplace(*store_dir);
      auto loaded = store_->load_all();
      for (auto& [id, s] : loaded.sessions) entries_.emplace(id, std::make_shared<Entry>(std::move(s)));
      unloadable_ = std::move(loaded.unloadable);
    }
  }

  std::size_t size() const {
    std::shared_lock lock(registry_mutex_);
    return entries_.size();
  }

  std::map<std::string, std::string> unloadable() const {
    std::shared_lock lock(registry_mutex_);
    return unloadable_;
  }

  json list() const {
    std::shared_lock lock(registry_mutex_);
    json ids = json::array();
    for (const auto& [id, e] : entries_) ids.push_back(id);
    json bad = json::array();
    for (const auto& [id, why] : unloadable_) bad.push_back({{"id", id}, {"reason", why}});
    return {{"sessions", ids}, {"unloadable", bad}};
  }

  /// Body: {variant, heaps, opponent?, policy?}.
  json create(const json& req) {
    if (!req.is_object()) throw ServiceError(400, "ParseError", "request body must be a JSON object");
    GameSession s = guarded([&] {
      const Variant v = variant_from_json(req.value("variant", json::object()));
      if (!req.contains("heaps")) throw Error(ErrorCode::EmptyHeaps, "request needs heaps");
      return new_session(v, heaps_from_json(req["heaps"]), parse_opponent(req.value("opponent", "engine")),
                         parse_policy(req.value("policy", "stranded-only")));
    });
    auto entry = std::make_shared<Entry>(std::move(s));
    std::lock_guard lock(entry->mutex);
    persist(entry->session);
    {
      std::unique_lock reg(registry_mutex_);
      entries_.emplace(entry->session.id, entry);
    }
    return view(entry->session);
  }

  json get(const std::string& id) {
    auto e = find(id);
    std::lock_guard lock(e->mutex);
    return view(e->session);
  }

  GameSession snapshot(const std::string& id) {
    auto e = find(id);
    std::lock_guard lock(e->mutex);
    return e->session;
  }

  json moves(const std::string& id) {
    auto e = find(id);
    std::lock_guard lock(e->mutex);
    return {{"playerToMove", e->session.player_to_move}, {"legalMoves", legal_moves_json(e->session)}};
  }

  /// Body: {move: {type, heapIndex, amount}, player?}. Against the engine the
  /// reply is played in the same call.
  json play(const std::string& id, const json& req) {
    if (!req.is_object() || !req.contains("move")) {
      throw ServiceError(400, "ParseError", "request body needs a move object");
    }
    const MoveAction move = guarded([&] { return move_from_json(req["move"]); });
    auto e = find(id);
    std::lock_guard lock(e->mutex);
    GameSession& s = e->session;
    require_in_progress(s);
    if (req.contains("player") && req["player"] != s.player_to_move) {
      throw ServiceError(409, "NotYourTurn", "it is " + s.player_to_move + "'s turn");
    }
    if (s.is_engine(s.player_to_move)) {
      throw ServiceError(409, "NotYourTurn", "it is the engine's turn; request an ai-move");
    }
    GameSession next = s;
    json applied = json::array();
    guarded([&] { play_and_record(next, move, applied); });
    engine_reply(next, applied);
    commit(s, std::move(next));
    json out = view(s);
    out["applied"] = applied;
    return out;
  }

  /// Plays the engine's choice for the side to move, then the engine's reply
  /// when the opponent is the engine.
  json ai_move(const std::string& id) {
    auto e = find(id);
    std::lock_guard lock(e->mutex);
    GameSession& s = e->session;
    require_in_progress(s);
    GameSession next = s;
    json applied = json::array();
    play_and_record(next, *engine_choice(next.position, next.policy), applied);
    engine_reply(next, applied);
    commit(s, std::move(next));
    json out = view(s);
    out["applied"] = applied;
    return out;
  }

  json hint(const std::string& id) {
    auto e = find(id);
    std::lock_guard lock(e->mutex);
    const GameSession& s = e->session;
    json out = to_json(s.position.hint(s.policy));
    out["playerToMove"] = s.player_to_move;
    return out;
  }

  /// Analysis of the current position, or of `scratch` heaps in the same
  /// variant and policy (a what-if preview that leaves the session alone).
  json analysis(const std::string& id, const std::optional<std::vector<Heap>>& scratch = std::nullopt) {
    auto e = find(id);
    std::unique_lock lock(e->mutex);
    const Variant variant = e->session.variant;
    const ConsolidationPolicy policy = e->session.policy;
    if (!scratch) {
      const GamePosition pos = e->session.position;
      lock.unlock();
      return to_json(pos.analyze(policy, solver_));
    }
    lock.unlock();
    return guarded([&] { return to_json(GamePosition(variant, *scratch).analyze(policy, solver_)); });
  }

  json view(const GameSession& s) {
    return {{"session", to_json(s)},
            {"analysis", to_json(s.position.analyze(s.policy, solver_))},
            {"legalMoves", legal_moves_json(s)}};
  }

 private:
  struct Entry {
    explicit Entry(GameSession s) : session(std::move(s)) {}
    std::mutex mutex;
    GameSession session;
  };

  template <typename F>
  static auto guarded(F&& f) -> decltype(f()) {
    try {
      return f();
    } catch (const Error& e) {
      throw ServiceError(http_status(e.code()), std::string(to_string(e.code())), e.what());
    } catch (const json::exception& e) {
      throw ServiceError(400, "ParseError", e.what());
    }
  }

  std::shared_ptr<Entry> find(const std::string& id) const {
    std::shared_lock lock(registry_mutex_);
    if (auto it = entries_.find(id); it != entries_.end()) return it->second;
    if (auto it = unloadable_.find(id); it != unloadable_.end()) {
      throw ServiceError(500, "SessionUnloadable", "session " + id + " could not be loaded: " + it->second);
    }
    throw ServiceError(404, "NotFound", "no session " + id);
  }

  static void require_in_progress(const GameSession& s) {
    if (s.status != SessionStatus::InProgress) {
      throw ServiceError(409, "GameOver", "the game is over; " + s.winner + " won");
    }
  }

  static json legal_moves_json(const GameSession& s) {
    json out = json::array();
    if (s.status != SessionStatus::InProgress) return out;
    for (const auto& m : s.position.legal_moves(s.policy)) out.push_back(to_json(m));
    return out;
  }

  static void play_and_record(GameSession& s, const MoveAction& move, json& applied) {
    const std::string mover = s.player_to_move;
    mum::play(s, move);
    applied.push_back({{"player", mover}, {"move", to_json(move)}, {"heaps", s.position.heaps()}});
  }

  static void engine_reply(GameSession& s, json& applied) {
    if (s.status == SessionStatus::InProgress && s.is_engine(s.player_to_move)) {
      play_and_record(s, *engine_choice(s.position, s.policy), applied);
    }
  }

  void commit(GameSession& live, GameSession next) {
#ifdef MUM_VERIFY_HISTORY
    verify_history(next);
#endif
    persist(next);
    live = std::move(next);
  }

  void persist(const GameSession& s) const {
    if (!store_) return;
    try {
      store_->save(s);
    } catch (const std::exception& e) {
      throw ServiceError(500, "StoreError", e.what());
    }
  }

  MumberSolver solver_;
  std::optional<SessionStore> store_;
  mutable std::shared_mutex registry_mutex_;
  std::map<std::string, std::shared_ptr<Entry>> entries_;
  std::map<std::string, std::string> unloadable_;
};

}  // namespace mum
