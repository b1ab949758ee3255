#pragma once

#include <algorithm>
#include <vector>

#include "mum/error.hpp"
#include "mum/game.hpp"
#include "mum/modular.hpp"

namespace mum {

/// Heap product reduced modulo each prime-power factor of the modulus.
struct StateVector {
  std::vector<PrimePowerFactor> factors;
  std::vector<Residue> components;

  friend bool operator==(const StateVector&, const StateVector&) = default;
};

inline StateVector state_vector(const NumPosition& pos) {
  StateVector v{factor_prime_powers(pos.modulus()), {}};
  for (const auto& f : v.factors) {
    const Modulus fm(f.value);
    std::int64_t acc = 1 % f.value;
    for (Heap h : pos.heaps()) acc = mul_mod(acc, h % f.value, f.value);
    v.components.emplace_back(acc, fm);
  }
  return v;
}

inline bool is_identity_vector(const StateVector& v) {
  return std::all_of(v.components.begin(), v.components.end(),
                     [](const Residue& r) { return r.value() == 1 % r.modulus().value(); });
}

/// The same heaps read modulo one prime-power factor.
inline NumPosition project(const NumPosition& pos, const PrimePowerFactor& factor) {
  if (factor.value < 2 || pos.modulus().value() % factor.value != 0) {
    throw Error(ErrorCode::FactorMismatch, std::to_string(factor.value) + " does not divide " +
                                               std::to_string(pos.modulus().value()));
  }
  return NumPosition(Modulus(factor.value), pos.heaps());
}

inline Residue recombine(const StateVector& v) { return crt_combine(v.components, v.factors); }

}  // namespace mum
