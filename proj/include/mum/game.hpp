#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "mum/error.hpp"
#include "mum/modular.hpp"

namespace mum {

using Heap = std::int64_t;

enum class Outcome { PPosition, NPosition };

/// When a compound consolidate-then-reduce move is on offer.
enum class ConsolidationPolicy { StrandedOnly, Always };

inline std::string_view to_string(Outcome o) {
  return o == Outcome::PPosition ? "P" : "N";
}

inline std::string_view to_string(ConsolidationPolicy p) {
  return p == ConsolidationPolicy::StrandedOnly ? "stranded-only" : "always";
}

/// One turn: either reduce a single heap by `amount`, or merge all heaps into
/// their product and reduce that merged heap by `amount`. The compound form is
/// a single turn.
struct MoveAction {
  enum class Kind { Reduce, ConsolidateThenReduce };

  Kind kind = Kind::Reduce;
  std::size_t heap_index = 0;
  std::int64_t amount = 0;

  static MoveAction reduce(std::size_t heap_index, std::int64_t amount) {
    return {Kind::Reduce, heap_index, amount};
  }
  static MoveAction consolidate(std::int64_t amount) {
    return {Kind::ConsolidateThenReduce, 0, amount};
  }

  bool is_compound() const noexcept { return kind == Kind::ConsolidateThenReduce; }

  friend bool operator==(const MoveAction&, const MoveAction&) = default;
};

inline std::ostream& operator<<(std::ostream& os, const MoveAction& m) {
  if (m.is_compound()) return os << "ConsolidateThenReduce(" << m.amount << ")";
  return os << "Reduce(" << m.heap_index << "," << m.amount << ")";
}

inline std::string describe(const MoveAction& m) {
  std::ostringstream os;
  if (m.is_compound()) {
    os << "consolidate all heaps, then subtract " << m.amount;
  } else {
    os << "subtract " << m.amount << " from heap #" << m.heap_index;
  }
  return os.str();
}

/// Product of heaps as an exact integer. Throws ProductOverflow past int64.
inline Heap checked_product(const std::vector<Heap>& heaps) {
  Heap acc = 1;
  for (Heap h : heaps) {
    if (__builtin_mul_overflow(acc, h, &acc)) {
      throw Error(ErrorCode::ProductOverflow,
                  "heap product exceeds the 64-bit range; consolidation unavailable");
    }
  }
  return acc;
}

/// Numeric game state: a sorted multiset of heaps, each coprime to the modulus.
class NumPosition {
 public:
  NumPosition(Modulus modulus, std::vector<Heap> heaps)
      : modulus_(modulus), heaps_(std::move(heaps)) {
    if (heaps_.empty()) throw Error(ErrorCode::EmptyHeaps, "a position needs at least one heap");
    for (Heap h : heaps_) {
      if (h < 1) {
        throw Error(ErrorCode::NonPositiveHeap,
                    "heap " + std::to_string(h) + " is not positive");
      }
      if (std::gcd(h, modulus.value()) != 1) {
        throw Error(ErrorCode::HeapNotCoprime,
                    "heap " + std::to_string(h) + " not coprime to " +
                        std::to_string(modulus.value()));
      }
    }
    std::sort(heaps_.begin(), heaps_.end());
  }

  Modulus modulus() const noexcept { return modulus_; }
  const std::vector<Heap>& heaps() const noexcept { return heaps_; }
  std::size_t size() const noexcept { return heaps_.size(); }
  Heap operator[](std::size_t i) const { return heaps_.at(i); }

  friend bool operator==(const NumPosition&, const NumPosition&) = default;

 private:
  Modulus modulus_;
  std::vector<Heap> heaps_;
};

inline NumPosition new_position(std::int64_t modulus, std::vector<Heap> heaps) {
  return NumPosition(Modulus(modulus), std::move(heaps));
}

inline std::ostream& operator<<(std::ostream& os, const NumPosition& pos) {
  os << "[";
  for (std::size_t i = 0; i < pos.size(); ++i) os << (i ? "," : "") << pos[i];
  return os << "] mod " << pos.modulus().value();
}

inline Residue product_mod(const NumPosition& pos) {
  const std::int64_t m = pos.modulus().value();
  std::int64_t acc = 1 % m;
  for (Heap h : pos.heaps()) acc = mul_mod(acc, h % m, m);
  return Residue(acc, pos.modulus());
}

inline Outcome classify(const NumPosition& pos) {
  return product_mod(pos).value() == 1 ? Outcome::PPosition : Outcome::NPosition;
}

inline bool is_terminal(const NumPosition& pos) {
  return std::all_of(pos.heaps().begin(), pos.heaps().end(), [](Heap h) { return h == 1; });
}

/// Why reducing heap value `h` by `r` is illegal mod m, or nullopt if it is legal.
inline std::optional<std::string> reduce_violation(Heap h, std::int64_t r, Modulus m) {
  const std::int64_t mv = m.value();
  if (r < 1 || r >= mv) {
    return "amount " + std::to_string(r) + " violates 1 <= r < " + std::to_string(mv);
  }
  if (r >= h) {
    return "amount " + std::to_string(r) + " violates r < h (heap is " + std::to_string(h) + ")";
  }
  if (std::gcd(h - r, mv) != 1) {
    return "resulting heap " + std::to_string(h - r) + " not coprime to " + std::to_string(mv);
  }
  return std::nullopt;
}

namespace detail {

/// Product of all heaps except index i, mod m.
inline std::int64_t coproduct_mod(const NumPosition& pos, std::size_t i) {
  const std::int64_t m = pos.modulus().value();
  std::int64_t acc = 1 % m;
  for (std::size_t j = 0; j < pos.size(); ++j) {
    if (j != i) acc = mul_mod(acc, pos[j] % m, m);
  }
  return acc;
}

inline std::vector<std::int64_t> legal_amounts(Heap h, Modulus m) {
  std::vector<std::int64_t> out;
  for (std::int64_t r = 1; r < m.value() && r < h; ++r) {
    if (!reduce_violation(h, r, m)) out.push_back(r);
  }
  return out;
}

}  // namespace detail

/// A non-terminal winning position where no single-heap reduction reaches a
/// product of 1.
inline bool is_stranded(const NumPosition& pos) {
  if (classify(pos) == Outcome::PPosition || is_terminal(pos)) return false;
  const std::int64_t m = pos.modulus().value();
  for (std::size_t i = 0; i < pos.size(); ++i) {
    const std::int64_t co = detail::coproduct_mod(pos, i);
    for (std::int64_t r : detail::legal_amounts(pos[i], pos.modulus())) {
      if (mul_mod((pos[i] - r) % m, co, m) == 1) return false;
    }
  }
  return true;
}

inline bool consolidation_permitted(const NumPosition& pos, ConsolidationPolicy policy) {
  if (policy == ConsolidationPolicy::Always) return pos.size() >= 2;
  return is_stranded(pos);
}

/// Reduce moves ordered by heap index then amount, followed by compound moves
/// ordered by amount.
inline std::vector<MoveAction> legal_moves(const NumPosition& pos, ConsolidationPolicy policy) {
  std::vector<MoveAction> moves;
  for (std::size_t i = 0; i < pos.size(); ++i) {
    for (std::int64_t r : detail::legal_amounts(pos[i], pos.modulus())) {
      moves.push_back(MoveAction::reduce(i, r));
    }
  }
  if (consolidation_permitted(pos, policy)) {
    const Heap merged = checked_product(pos.heaps());
    for (std::int64_t r : detail::legal_amounts(merged, pos.modulus())) {
      moves.push_back(MoveAction::consolidate(r));
    }
  }
  return moves;
}

inline NumPosition apply_move(const NumPosition& pos, const MoveAction& move,
                              ConsolidationPolicy policy = ConsolidationPolicy::StrandedOnly) {
  if (move.is_compound()) {
    if (!consolidation_permitted(pos, policy)) {
      throw Error(ErrorCode::IllegalMove,
                  policy == ConsolidationPolicy::Always
                      ? std::string("consolidation needs at least two heaps")
                      : std::string("consolidation is only allowed from a stranded position"));
    }
    const Heap merged = checked_product(pos.heaps());
    if (auto why = reduce_violation(merged, move.amount, pos.modulus())) {
      throw Error(ErrorCode::IllegalMove, "consolidated heap " + std::to_string(merged) + ": " + *why);
    }
    return NumPosition(pos.modulus(), {merged - move.amount});
  }
  if (move.heap_index >= pos.size()) {
    throw Error(ErrorCode::IllegalMove, "heap index " + std::to_string(move.heap_index) +
                                            " out of range (" + std::to_string(pos.size()) +
                                            " heaps)");
  }
  const Heap h = pos[move.heap_index];
  if (auto why = reduce_violation(h, move.amount, pos.modulus())) {
    throw Error(ErrorCode::IllegalMove, *why);
  }
  std::vector<Heap> heaps = pos.heaps();
  heaps[move.heap_index] = h - move.amount;
  return NumPosition(pos.modulus(), std::move(heaps));
}

/// Worked reasoning behind an optimal move, for hints.
struct MoveRationale {
  std::optional<MoveAction> move;
  std::optional<std::int64_t> coproduct;  // product of the other heaps mod m
  std::optional<std::int64_t> inverse;    // inverse of the coproduct
  std::optional<std::int64_t> target;     // new heap residue mod m
  bool via_consolidation = false;
  std::string explanation;
};

inline MoveRationale explain_optimal_move(const NumPosition& pos, ConsolidationPolicy policy) {
  MoveRationale out;
  const Modulus mod = pos.modulus();
  const std::int64_t m = mod.value();
  if (classify(pos) == Outcome::PPosition) {
    out.explanation = is_terminal(pos)
                          ? "position is losing: no moves remain"
                          : "position is losing: every legal move leads to a winning position";
    return out;
  }

  // Direct construction on a heap larger than m: leave h - r = coproduct^-1.
  for (std::size_t j = 0; j < pos.size(); ++j) {
    if (pos[j] <= m) continue;
    const std::int64_t co = detail::coproduct_mod(pos, j);
    const std::int64_t inv = mod_inverse(co, mod).value();
    const std::int64_t r = normalize(pos[j] - inv, m);
    if (r >= 1 && !reduce_violation(pos[j], r, mod)) {
      out.move = MoveAction::reduce(j, r);
      out.coproduct = co;
      out.inverse = inv;
      out.target = inv;
      std::ostringstream os;
      os << "other heaps multiply to " << co << " (mod " << m << "); its inverse is " << inv
         << ", so reduce heap " << pos[j] << " by " << r << " to " << pos[j] - r
         << " which is " << inv << " (mod " << m << "), making the product 1";
      out.explanation = os.str();
      return out;
    }
  }

  for (std::size_t j = 0; j < pos.size(); ++j) {
    const std::int64_t co = detail::coproduct_mod(pos, j);
    for (std::int64_t r : detail::legal_amounts(pos[j], mod)) {
      if (mul_mod((pos[j] - r) % m, co, m) == 1) {
        const std::int64_t inv = mod_inverse(co, mod).value();
        out.move = MoveAction::reduce(j, r);
        out.coproduct = co;
        out.inverse = inv;
        out.target = inv;
        std::ostringstream os;
        os << "other heaps multiply to " << co << " (mod " << m << "); its inverse is " << inv
           << ", and heap " << pos[j] << " can drop by " << r << " to " << pos[j] - r
           << " which is " << inv << " (mod " << m << "), making the product 1";
        out.explanation = os.str();
        return out;
      }
    }
  }

  if (consolidation_permitted(pos, policy)) {
    const Heap merged = checked_product(pos.heaps());
    const std::int64_t r = normalize(merged - 1, m);
    if (r >= 1 && !reduce_violation(merged, r, mod)) {
      out.move = MoveAction::consolidate(r);
      out.via_consolidation = true;
      out.coproduct = 1;
      out.inverse = 1;
      out.target = 1;
      std::ostringstream os;
      os << "no single-heap reduction reaches product 1 (stranded); consolidate into one heap of "
         << merged << " and subtract " << r << " to leave " << merged - r << " which is 1 (mod "
         << m << ")";
      out.explanation = os.str();
      return out;
    }
  }
  out.explanation = "no move reaches a losing position under the active policy";
  return out;
}

/// A move to a position with product 1, or nullopt from a losing position.
/// Ties break on lowest heap index, then smallest amount.
inline std::optional<MoveAction> optimal_move(const NumPosition& pos, ConsolidationPolicy policy) {
  return explain_optimal_move(pos, policy).move;
}

}  // namespace mum
