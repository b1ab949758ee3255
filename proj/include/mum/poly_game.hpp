#pragma once

#include <algorithm>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "mum/error.hpp"
#include "mum/game.hpp"
#include "mum/poly_field.hpp"

namespace mum {

/// Poly-MuM state under the canonical heap model: heaps are canonical integers
/// 1..p^n-1, so distinct heaps are always distinct field elements.
class PolyPosition {
 public:
  PolyPosition(FieldSpec field, std::vector<Heap> heaps)
      : field_(std::move(field)), heaps_(std::move(heaps)) {
    if (heaps_.empty()) throw Error(ErrorCode::EmptyHeaps, "a position needs at least one heap");
    for (Heap h : heaps_) {
      if (h < 1) {
        throw Error(ErrorCode::NonPositiveHeap, "heap " + std::to_string(h) + " is not positive");
      }
      if (h >= field_.order()) {
        throw Error(ErrorCode::HeapOutOfField,
                    "heap " + std::to_string(h) + " is not canonical (must be below " +
                        std::to_string(field_.order()) + ")");
      }
    }
    std::sort(heaps_.begin(), heaps_.end());
  }

  const FieldSpec& field() const noexcept { return field_; }
  const std::vector<Heap>& heaps() const noexcept { return heaps_; }
  std::size_t size() const noexcept { return heaps_.size(); }
  Heap operator[](std::size_t i) const { return heaps_.at(i); }

  friend bool operator==(const PolyPosition&, const PolyPosition&) = default;

 private:
  FieldSpec field_;
  std::vector<Heap> heaps_;
};

inline std::ostream& operator<<(std::ostream& os, const PolyPosition& pos) {
  os << "[";
  for (std::size_t i = 0; i < pos.size(); ++i) os << (i ? "," : "") << pos[i];
  return os << "] in F(" << pos.field().p() << "^" << pos.field().n() << ")";
}

inline FieldElement field_product(const PolyPosition& pos) {
  FieldElement acc = field_one(pos.field());
  for (Heap h : pos.heaps()) acc = field_mul(acc, element(h, pos.field()));
  return acc;
}

inline Outcome classify_poly(const PolyPosition& pos) {
  return field_product(pos).rep == 1 ? Outcome::PPosition : Outcome::NPosition;
}

inline bool is_terminal_poly(const PolyPosition& pos) {
  return std::all_of(pos.heaps().begin(), pos.heaps().end(), [](Heap h) { return h == 1; });
}

namespace detail {

/// The only heap value that, replacing heap i, makes the product 1.
inline Heap poly_target(const PolyPosition& pos, std::size_t i, const FieldElement& product_inv) {
  return field_mul(element(pos[i], pos.field()), product_inv).rep;
}

}  // namespace detail

/// Winning, non-terminal, and no direct reduction reaches product 1.
inline bool is_stranded_poly(const PolyPosition& pos) {
  if (is_terminal_poly(pos)) return false;
  const FieldElement product = field_product(pos);
  if (product.rep == 1) return false;
  const Heap top = pos.field().order() - 1;
  // A heap at p^n-1 always has its target strictly below it.
  if (pos.heaps().back() == top) return false;
  const FieldElement inv = field_inv(product);
  for (std::size_t i = 0; i < pos.size(); ++i) {
    if (detail::poly_target(pos, i, inv) < pos[i]) return false;
  }
  return true;
}

inline bool consolidation_permitted_poly(const PolyPosition& pos, ConsolidationPolicy policy) {
  if (policy == ConsolidationPolicy::Always) return pos.size() >= 2;
  return is_stranded_poly(pos);
}

/// Reduce(i, r) moves heap i to h-r for every 1 <= r < h, then compound moves
/// that merge into C(P_field) and reduce that heap.
inline std::vector<MoveAction> legal_moves_poly(const PolyPosition& pos,
                                                ConsolidationPolicy policy) {
  std::vector<MoveAction> moves;
  for (std::size_t i = 0; i < pos.size(); ++i) {
    for (std::int64_t r = 1; r < pos[i]; ++r) moves.push_back(MoveAction::reduce(i, r));
  }
  if (consolidation_permitted_poly(pos, policy)) {
    const Heap merged = field_product(pos).rep;
    for (std::int64_t r = 1; r < merged; ++r) moves.push_back(MoveAction::consolidate(r));
  }
  return moves;
}

inline PolyPosition apply_move_poly(const PolyPosition& pos, const MoveAction& move,
                                    ConsolidationPolicy policy = ConsolidationPolicy::StrandedOnly) {
  if (move.is_compound()) {
    if (!consolidation_permitted_poly(pos, policy)) {
      throw Error(ErrorCode::IllegalMove,
                  policy == ConsolidationPolicy::Always
                      ? std::string("consolidation needs at least two heaps")
                      : std::string("consolidation is only allowed from a stranded position"));
    }
    const Heap merged = field_product(pos).rep;
    if (move.amount < 1 || move.amount >= merged) {
      throw Error(ErrorCode::IllegalMove, "consolidated heap " + std::to_string(merged) +
                                              ": amount " + std::to_string(move.amount) +
                                              " violates 1 <= r < h");
    }
    return PolyPosition(pos.field(), {merged - move.amount});
  }
  if (move.heap_index >= pos.size()) {
    throw Error(ErrorCode::IllegalMove, "heap index " + std::to_string(move.heap_index) +
                                            " out of range (" + std::to_string(pos.size()) +
                                            " heaps)");
  }
  const Heap h = pos[move.heap_index];
  if (move.amount < 1 || move.amount >= h) {
    throw Error(ErrorCode::IllegalMove, "amount " + std::to_string(move.amount) +
                                            " violates 1 <= r < h (heap is " + std::to_string(h) +
                                            ")");
  }
  std::vector<Heap> heaps = pos.heaps();
  heaps[move.heap_index] = h - move.amount;
  return PolyPosition(pos.field(), std::move(heaps));
}

struct PolyMoveRationale {
  std::optional<MoveAction> move;
  std::optional<FieldElement> product;
  std::optional<FieldElement> product_inverse;
  std::optional<Heap> target;
  bool via_consolidation = false;
  std::string explanation;
};

inline PolyMoveRationale explain_optimal_move_poly(const PolyPosition& pos,
                                                   ConsolidationPolicy policy) {
  PolyMoveRationale out;
  const FieldElement product = field_product(pos);
  out.product = product;
  if (product.rep == 1) {
    out.explanation = is_terminal_poly(pos)
                          ? "position is losing: no moves remain"
                          : "position is losing: every legal move changes the field product away from 1";
    return out;
  }
  const FieldElement inv = field_inv(product);
  out.product_inverse = inv;
  // The target is unique per heap, so no other reduction of that heap can win.
  for (std::size_t i = 0; i < pos.size(); ++i) {
    const Heap k = detail::poly_target(pos, i, inv);
    if (k < pos[i]) {
      out.move = MoveAction::reduce(i, pos[i] - k);
      out.target = k;
      std::ostringstream os;
      os << "field product is " << product.to_string() << " (" << product.rep
         << "), its inverse is " << inv.to_string() << " (" << inv.rep << "); heap " << pos[i]
         << " times the inverse is " << element(k, pos.field()).to_string() << " (" << k
         << "), so reduce heap " << pos[i] << " to " << k;
      out.explanation = os.str();
      return out;
    }
  }
  if (consolidation_permitted_poly(pos, policy)) {
    out.move = MoveAction::consolidate(product.rep - 1);
    out.target = 1;
    out.via_consolidation = true;
    std::ostringstream os;
    os << "every heap's target lies above it (stranded); consolidate into C(P) = " << product.rep
       << " and reduce it to 1";
    out.explanation = os.str();
    return out;
  }
  out.explanation = "no move reaches a losing position under the active policy";
  return out;
}

inline std::optional<MoveAction> optimal_move_poly(const PolyPosition& pos,
                                                   ConsolidationPolicy policy) {
  return explain_optimal_move_poly(pos, policy).move;
}

/// Memoized game-tree search over Poly-MuM positions; consults only the move
/// rules, never the field product classification.
class PolySolver {
 public:
  Outcome outcome_bruteforce(const PolyPosition& pos, ConsolidationPolicy policy) {
    return solve(pos, policy) ? Outcome::PPosition : Outcome::NPosition;
  }

 private:
  bool solve(const PolyPosition& pos, ConsolidationPolicy policy) {
    auto key = std::make_pair(policy, pos.heaps());
    {
      std::lock_guard lock(mutex_);
      if (!(field_ && *field_ == pos.field())) {
        cache_.clear();
        field_ = pos.field();
      }
      if (auto it = cache_.find(key); it != cache_.end()) return it->second;
    }
    bool losing = true;
    for (const MoveAction& mv : legal_moves_poly(pos, policy)) {
      if (solve(apply_move_poly(pos, mv, policy), policy)) {
        losing = false;
        break;
      }
    }
    std::lock_guard lock(mutex_);
    cache_.emplace(std::move(key), losing);
    return losing;
  }

  std::mutex mutex_;
  std::optional<FieldSpec> field_;
  std::map<std::pair<ConsolidationPolicy, std::vector<Heap>>, bool> cache_;
};

inline Outcome outcome_bruteforce_poly(const PolyPosition& pos, ConsolidationPolicy policy) {
  PolySolver solver;
  return solver.outcome_bruteforce(pos, policy);
}

}  // namespace mum
