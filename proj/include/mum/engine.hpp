#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "mum/crt.hpp"
#include "mum/game.hpp"
#include "mum/grundy.hpp"
#include "mum/poly_game.hpp"

namespace mum {

/// Which game a session plays: numeric MuM mod m, or Poly-MuM over a field.
struct Variant {
  enum class Type { Numeric, Poly };

  Type type = Type::Numeric;
  std::optional<Modulus> modulus;
  std::optional<FieldSpec> field;

  static Variant numeric(std::int64_t m) { return {Type::Numeric, Modulus(m), std::nullopt}; }
  static Variant poly(FieldSpec f) { return {Type::Poly, std::nullopt, std::move(f)}; }

  std::string describe() const {
    if (type == Type::Numeric) return "MuM mod " + std::to_string(modulus->value());
    return "Poly-MuM over F(" + std::to_string(field->p()) + "^" + std::to_string(field->n()) +
           ") with I(x) = " + poly::to_string(field->irreducible());
  }

  friend bool operator==(const Variant&, const Variant&) = default;
};

/// Read-only analysis of one position.
struct AnalysisView {
  std::vector<Heap> heaps;
  std::int64_t product = 0;         // residue mod m, or canonical field rep
  std::string product_text;         // "4 (mod 5)" or "x^2+1"
  Outcome outcome = Outcome::NPosition;
  bool terminal = false;
  bool stranded = false;
  std::optional<StateVector> state_vector;  // composite moduli only
  std::optional<std::int64_t> mumber;       // numeric only, under `policy`
  std::string mumber_note;
  ConsolidationPolicy policy = ConsolidationPolicy::StrandedOnly;
  bool hint_available = false;
};

/// An optimal move with the algebra behind it. Numeric hints fill the
/// coproduct fields; poly hints fill the field product and its inverse.
struct Hint {
  std::optional<MoveAction> move;
  std::string explanation;
  bool via_consolidation = false;
  std::optional<std::int64_t> coproduct;
  std::optional<std::int64_t> inverse;
  std::optional<std::int64_t> target;
  std::optional<FieldElement> field_product;
  std::optional<FieldElement> field_product_inverse;
};

/// A numeric or poly position behind one interface.
class GamePosition {
 public:
  GamePosition(const Variant& variant, std::vector<Heap> heaps)
      : pos_(make(variant, std::move(heaps))) {}
  explicit GamePosition(NumPosition p) : pos_(std::move(p)) {}
  explicit GamePosition(PolyPosition p) : pos_(std::move(p)) {}

  bool is_numeric() const noexcept { return std::holds_alternative<NumPosition>(pos_); }
  const NumPosition& numeric() const { return std::get<NumPosition>(pos_); }
  const PolyPosition& polynomial() const { return std::get<PolyPosition>(pos_); }

  const std::vector<Heap>& heaps() const {
    return std::visit([](const auto& p) -> const std::vector<Heap>& { return p.heaps(); }, pos_);
  }

  bool is_terminal() const {
    return is_numeric() ? mum::is_terminal(numeric()) : is_terminal_poly(polynomial());
  }

  Outcome classify() const { return is_numeric() ? mum::classify(numeric()) : classify_poly(polynomial()); }

  bool stranded() const { return is_numeric() ? is_stranded(numeric()) : is_stranded_poly(polynomial()); }

  std::vector<MoveAction> legal_moves(ConsolidationPolicy policy) const {
    return is_numeric() ? mum::legal_moves(numeric(), policy) : legal_moves_poly(polynomial(), policy);
  }

  GamePosition apply(const MoveAction& move, ConsolidationPolicy policy) const {
    if (is_numeric()) return GamePosition(apply_move(numeric(), move, policy));
    return GamePosition(apply_move_poly(polynomial(), move, policy));
  }

  Hint hint(ConsolidationPolicy policy) const {
    Hint h;
    if (is_numeric()) {
      auto r = explain_optimal_move(numeric(), policy);
      h.move = r.move;
      h.explanation = std::move(r.explanation);
      h.via_consolidation = r.via_consolidation;
      h.coproduct = r.coproduct;
      h.inverse = r.inverse;
      h.target = r.target;
    } else {
      auto r = explain_optimal_move_poly(polynomial(), policy);
      h.move = r.move;
      h.explanation = std::move(r.explanation);
      h.via_consolidation = r.via_consolidation;
      h.target = r.target;
      h.field_product = r.product;
      h.field_product_inverse = r.product_inverse;
    }
    return h;
  }

  AnalysisView analyze(ConsolidationPolicy policy, MumberSolver& solver) const {
    AnalysisView v;
    v.heaps = heaps();
    v.outcome = classify();
    v.terminal = is_terminal();
    v.stranded = stranded();
    v.policy = policy;
    v.hint_available = v.outcome == Outcome::NPosition;
    if (is_numeric()) {
      const auto& p = numeric();
      const Residue prod = product_mod(p);
      v.product = prod.value();
      v.product_text = std::to_string(prod.value()) + " (mod " + std::to_string(p.modulus().value()) + ")";
      if (factor_prime_powers(p.modulus()).size() > 1) v.state_vector = mum::state_vector(p);
      try {
        v.mumber = solver.mumber_value(p, policy);
        if (*v.mumber >= p.modulus().value()) {
          v.mumber_note = "option mumbers cover every residue; value lies past the residues";
        }
      } catch (const Error& e) {
        if (e.code() != ErrorCode::SearchBudgetExceeded && e.code() != ErrorCode::ProductOverflow) throw;
        v.mumber_note = std::string("not computed: ") + e.what();
      }
    } else {
      const FieldElement prod = field_product(polynomial());
      v.product = prod.rep;
      v.product_text = prod.to_string();
    }
    return v;
  }

 private:
  static std::variant<NumPosition, PolyPosition> make(const Variant& variant, std::vector<Heap> heaps) {
    if (variant.type == Variant::Type::Numeric) return NumPosition(*variant.modulus, std::move(heaps));
    return PolyPosition(*variant.field, std::move(heaps));
  }

  std::variant<NumPosition, PolyPosition> pos_;
};

/// The engine's move: optimal when one exists, otherwise the first legal move
/// (lowest heap index, smallest amount). Nullopt only at a terminal position.
inline std::optional<MoveAction> engine_choice(const GamePosition& pos, ConsolidationPolicy policy) {
  if (auto mv = pos.hint(policy).move) return mv;
  const auto moves = pos.legal_moves(policy);
  if (moves.empty()) return std::nullopt;
  return moves.front();
}

}  // namespace mum
