#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <shared_mutex>
#include <tuple>
#include <unordered_map>
#include <utility>
#include <vector>

#include "mum/error.hpp"
#include "mum/game.hpp"
#include "mum/modular.hpp"

namespace mum {

/// Mumber (recursive multiplicative mex) and brute-force win/loss search over
/// numeric positions, memoized on (modulus, policy, sorted heaps).
///
/// Single-heap positions are tabulated bottom-up, since consolidation can
/// produce one very large heap. Multi-heap positions recurse; their depth is
/// bounded by the heap total. The caches are guarded by a shared mutex, so one
/// solver may serve concurrent sweeps; results never depend on interleaving.
class MumberSolver {
 public:
  static constexpr std::size_t kDefaultBudget = 50'000'000;

  explicit MumberSolver(std::size_t node_budget = kDefaultBudget) : budget_(node_budget) {}

  MumberSolver(const MumberSolver&) = delete;
  MumberSolver& operator=(const MumberSolver&) = delete;

  /// Recursive mex over the option mumbers. Throws SetSaturated when the
  /// value falls outside Z_m (see mumber_value).
  Residue mumber_mex(const NumPosition& pos, ConsolidationPolicy policy) {
    const std::int64_t v = mumber_value(pos, policy);
    if (v >= pos.modulus().value()) {
      throw Error(ErrorCode::SetSaturated, "option mumbers of the position cover every residue mod " +
                                               std::to_string(pos.modulus().value()));
    }
    return Residue(v, pos.modulus());
  }

  /// Mumber under the extended mex order (residues, then m, m+1, ...). Equals
  /// mumber_mex whenever that is defined; can reach m or beyond only under the
  /// StrandedOnly policy, where non-unit mumbers occur.
  std::int64_t mumber_value(const NumPosition& pos, ConsolidationPolicy policy) {
    std::size_t spent = 0;
    return solve(pos, policy, Query::Mumber, spent);
  }

  /// Game-tree search that never looks at heap products. Terminal positions are
  /// P-positions; a position is N iff some legal move reaches a P-position.
  Outcome outcome_bruteforce(const NumPosition& pos, ConsolidationPolicy policy) {
    std::size_t spent = 0;
    return solve(pos, policy, Query::Outcome, spent) == kLosing ? Outcome::PPosition
                                                                  : Outcome::NPosition;
  }

  void clear() {
    std::unique_lock lock(mutex_);
    multi_.clear();
    single_.clear();
  }

 private:
  enum class Query { Mumber, Outcome };
  static constexpr std::int64_t kLosing = 1;
  static constexpr std::int64_t kWinning = 0;
  static constexpr std::int64_t kUnset = -1;

  struct Key {
    std::int64_t modulus;
    ConsolidationPolicy policy;
    Query query;
    std::vector<Heap> heaps;
    friend bool operator==(const Key&, const Key&) = default;
  };

  struct KeyHash {
    std::size_t operator()(const Key& k) const noexcept {
      std::size_t h = std::hash<std::int64_t>{}(k.modulus);
      h = h * 31 + static_cast<std::size_t>(k.policy) * 7 + static_cast<std::size_t>(k.query);
      for (Heap x : k.heaps) h = h * 1'000'003 ^ std::hash<Heap>{}(x);
      return h;
    }
  };

  using SingleKey = std::tuple<std::int64_t, ConsolidationPolicy, Query>;

  void charge(std::size_t& spent, std::size_t amount = 1) const {
    spent += amount;
    if (spent > budget_) {
      throw Error(ErrorCode::SearchBudgetExceeded,
                  "search exceeded " + std::to_string(budget_) + " nodes");
    }
  }

  std::int64_t combine(const std::vector<std::int64_t>& child_values, Modulus m, Query q) const {
    if (q == Query::Mumber) return extended_mex(child_values, m);
    for (std::int64_t v : child_values) {
      if (v == kLosing) return kWinning;
    }
    return kLosing;
  }

  std::int64_t single(Heap h, Modulus m, ConsolidationPolicy policy, Query q, std::size_t& spent) {
    const SingleKey key{m.value(), policy, q};
    {
      std::shared_lock lock(mutex_);
      auto it = single_.find(key);
      if (it != single_.end() && static_cast<std::size_t>(h) < it->second.size()) {
        return it->second[static_cast<std::size_t>(h)];
      }
    }
    std::unique_lock lock(mutex_);
    auto& table = single_[key];
    if (table.empty()) table.push_back(kUnset);  // index 0 is never a heap
    if (static_cast<std::size_t>(h) >= table.size()) {
      charge(spent, static_cast<std::size_t>(h) + 1 - table.size());
      table.reserve(static_cast<std::size_t>(h) + 1);
    }
    std::vector<std::int64_t> child_values;
    for (Heap v = static_cast<Heap>(table.size()); v <= h; ++v) {
      if (std::gcd(v, m.value()) != 1) {
        table.push_back(kUnset);
        continue;
      }
      const NumPosition pos(m, {v});
      child_values.clear();
      for (const MoveAction& mv : legal_moves(pos, policy)) {
        child_values.push_back(table[static_cast<std::size_t>(apply_move(pos, mv, policy)[0])]);
      }
      table.push_back(combine(child_values, m, q));
    }
    return table[static_cast<std::size_t>(h)];
  }

  std::int64_t solve(const NumPosition& pos, ConsolidationPolicy policy, Query q,
                     std::size_t& spent) {
    if (pos.size() == 1) return single(pos[0], pos.modulus(), policy, q, spent);
    Key key{pos.modulus().value(), policy, q, pos.heaps()};
    {
      std::shared_lock lock(mutex_);
      if (auto it = multi_.find(key); it != multi_.end()) return it->second;
    }
    charge(spent);
    std::vector<std::int64_t> child_values;
    for (const MoveAction& mv : legal_moves(pos, policy)) {
      child_values.push_back(solve(apply_move(pos, mv, policy), policy, q, spent));
    }
    const std::int64_t value = combine(child_values, pos.modulus(), q);
    std::unique_lock lock(mutex_);
    multi_.emplace(std::move(key), value);
    return value;
  }

  std::size_t budget_;
  std::shared_mutex mutex_;
  std::unordered_map<Key, std::int64_t, KeyHash> multi_;
  std::map<SingleKey, std::vector<std::int64_t>> single_;
};

inline MumberSolver& default_solver() {
  static MumberSolver solver;
  return solver;
}

inline Residue mumber_mex(const NumPosition& pos, ConsolidationPolicy policy) {
  return default_solver().mumber_mex(pos, policy);
}

inline std::int64_t mumber_value(const NumPosition& pos, ConsolidationPolicy policy) {
  return default_solver().mumber_value(pos, policy);
}

inline Outcome outcome_bruteforce(const NumPosition& pos, ConsolidationPolicy policy) {
  return default_solver().outcome_bruteforce(pos, policy);
}

/// Closed-form mumber of a single heap.
inline Residue single_heap_mumber(Heap h, Modulus m) { return Residue(h, m); }

/// Grundy values G(1..h_max) of the single-heap subtraction game removing
/// 1..p-1, with the ordinary mex from 0. Multiples of p are not skipped.
/// Element 0 of the result is unused.
inline std::vector<std::int64_t> grundy_sequence(Heap h_max, Modulus p) {
  std::vector<std::int64_t> g(static_cast<std::size_t>(std::max<Heap>(h_max, 0)) + 1, 0);
  std::vector<bool> seen;
  for (Heap h = 1; h <= h_max; ++h) {
    seen.assign(static_cast<std::size_t>(p.value()) + 1, false);
    for (std::int64_t r = 1; r < p.value() && h - r >= 1; ++r) {
      seen[static_cast<std::size_t>(g[static_cast<std::size_t>(h - r)])] = true;
    }
    std::int64_t mex = 0;
    while (seen[static_cast<std::size_t>(mex)]) ++mex;
    g[static_cast<std::size_t>(h)] = mex;
  }
  return g;
}

inline std::int64_t grundy_single_heap(Heap h, Modulus p) {
  if (!is_prime(p.value())) {
    throw Error(ErrorCode::NotPrime, std::to_string(p.value()) + " is not prime");
  }
  if (h < 1) throw Error(ErrorCode::NonPositiveHeap, "heap " + std::to_string(h) + " is not positive");
  return grundy_sequence(h, p)[static_cast<std::size_t>(h)];
}

/// Product residues of the children reached by reducing heap `heap_index`.
inline std::set<std::int64_t> children_mumbers(const NumPosition& pos, std::size_t heap_index) {
  if (heap_index >= pos.size()) {
    throw Error(ErrorCode::IllegalMove, "heap index " + std::to_string(heap_index) + " out of range");
  }
  if (pos[heap_index] <= pos.modulus().value()) {
    throw Error(ErrorCode::HeapTooSmall, "heap " + std::to_string(pos[heap_index]) +
                                             " does not exceed the modulus " +
                                             std::to_string(pos.modulus().value()));
  }
  std::set<std::int64_t> out;
  for (std::int64_t r : detail::legal_amounts(pos[heap_index], pos.modulus())) {
    out.insert(product_mod(apply_move(pos, MoveAction::reduce(heap_index, r))).value());
  }
  return out;
}

/// Disjunctive sum as multiset union.
inline NumPosition disjunctive_sum(const NumPosition& a, const NumPosition& b) {
  if (a.modulus() != b.modulus()) {
    throw Error(ErrorCode::ModulusMismatch, "cannot add games mod " +
                                                std::to_string(a.modulus().value()) + " and mod " +
                                                std::to_string(b.modulus().value()));
  }
  std::vector<Heap> heaps = a.heaps();
  heaps.insert(heaps.end(), b.heaps().begin(), b.heaps().end());
  return NumPosition(a.modulus(), std::move(heaps));
}

inline bool sum_multiplicativity_check(const NumPosition& a, const NumPosition& b,
                                       ConsolidationPolicy policy,
                                       MumberSolver& solver = default_solver()) {
  const NumPosition sum = disjunctive_sum(a, b);
  const std::int64_t m = a.modulus().value();
  const std::int64_t lhs = solver.mumber_mex(sum, policy).value();
  const std::int64_t rhs =
      mul_mod(solver.mumber_mex(a, policy).value(), solver.mumber_mex(b, policy).value(), m);
  return lhs == rhs;
}

struct MumberReport {
  NumPosition position;
  std::int64_t mumber_mex;  // extended value; at or above m only when Z_m saturates
  Residue mumber_product;
  std::optional<std::int64_t> grundy;  // prime moduli only
  Outcome outcome;
  bool stranded;
};

inline MumberReport mumber_report(const NumPosition& pos, ConsolidationPolicy policy,
                                  MumberSolver& solver = default_solver()) {
  const Residue product = product_mod(pos);
  std::optional<std::int64_t> grundy;
  if (is_prime(pos.modulus().value())) {
    grundy = normalize(product.value() - 1, pos.modulus().value());
  }
  return MumberReport{pos,      solver.mumber_value(pos, policy), product, grundy,
                      classify(pos), is_stranded(pos)};
}

}  // namespace mum
