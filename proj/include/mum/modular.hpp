#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <ostream>
#include <ranges>
#include <span>
#include <string>
#include <vector>

#include "mum/error.hpp"

namespace mum {

/// A modulus m >= 2.
class Modulus {
 public:
  explicit Modulus(std::int64_t value) : value_(value) {
    if (value < 2) {
      throw Error(ErrorCode::InvalidModulus,
                  "modulus " + std::to_string(value) + " must be at least 2");
    }
  }

  std::int64_t value() const noexcept { return value_; }

  friend bool operator==(Modulus, Modulus) = default;
  friend auto operator<=>(Modulus, Modulus) = default;

 private:
  std::int64_t value_;
};

/// Least non-negative representative of an integer modulo m.
class Residue {
 public:
  Residue(std::int64_t value, Modulus modulus) : modulus_(modulus) {
    std::int64_t r = value % modulus.value();
    value_ = r < 0 ? r + modulus.value() : r;
  }

  std::int64_t value() const noexcept { return value_; }
  Modulus modulus() const noexcept { return modulus_; }

  friend bool operator==(const Residue&, const Residue&) = default;
  friend auto operator<=>(const Residue&, const Residue&) = default;

 private:
  std::int64_t value_;
  Modulus modulus_;
};

inline std::ostream& operator<<(std::ostream& os, const Residue& r) {
  return os << r.value() << " (mod " << r.modulus().value() << ")";
}

struct PrimePowerFactor {
  std::int64_t prime;
  int exponent;
  std::int64_t value;

  friend bool operator==(const PrimePowerFactor&,
                         const PrimePowerFactor&) = default;
};

inline std::int64_t mul_mod(std::int64_t a, std::int64_t b, std::int64_t m) {
  auto r = static_cast<__int128>(a) * b % m;
  if (r < 0) r += m;
  return static_cast<std::int64_t>(r);
}

inline std::int64_t normalize(std::int64_t a, std::int64_t m) {
  std::int64_t r = a % m;
  return r < 0 ? r + m : r;
}

inline bool is_prime(std::int64_t n) {
  if (n < 2) return false;
  for (std::int64_t d = 2; d * d <= n; ++d) {
    if (n % d == 0) return false;
  }
  return true;
}

inline bool is_unit(std::int64_t a, Modulus m) {
  return std::gcd(normalize(a, m.value()), m.value()) == 1;
}

/// Units of Z_m in ascending order.
inline std::vector<std::int64_t> units(Modulus m) {
  std::vector<std::int64_t> out;
  for (std::int64_t t = 1; t < m.value(); ++t) {
    if (std::gcd(t, m.value()) == 1) out.push_back(t);
  }
  return out;
}

/// Inverse of a modulo m by the extended Euclidean algorithm.
inline Residue mod_inverse(std::int64_t a, Modulus m) {
  std::int64_t r0 = m.value();
  std::int64_t r1 = normalize(a, m.value());
  std::int64_t t0 = 0;
  std::int64_t t1 = 1;
  while (r1 != 0) {
    std::int64_t q = r0 / r1;
    std::int64_t r2 = r0 - q * r1;
    r0 = r1;
    r1 = r2;
    std::int64_t t2 = t0 - q * t1;
    t0 = t1;
    t1 = t2;
  }
  if (r0 != 1) {
    throw Error(ErrorCode::NotInvertible,
                std::to_string(a) + " is not invertible mod " +
                    std::to_string(m.value()) + " (gcd " + std::to_string(r0) +
                    ")");
  }
  return Residue(t0, m);
}

/// Candidate order for the multiplicative mex: units ascending, then 0, then
/// the remaining non-units ascending. For prime m this is 1, 2, ..., m-1, 0.
inline std::vector<std::int64_t> mex_scan_order(Modulus m) {
  std::vector<std::int64_t> order = units(m);
  order.push_back(0);
  for (std::int64_t t = 2; t < m.value(); ++t) {
    if (std::gcd(t, m.value()) != 1) order.push_back(t);
  }
  return order;
}

/// First value absent from `taken`, scanning mex_scan_order(m) and then, once
/// every residue is taken, m, m+1, ... . Values at or above m are kept as is;
/// they arise only in games whose option mumbers cover all of Z_m.
template <std::ranges::input_range R>
  requires std::convertible_to<std::ranges::range_value_t<R>, std::int64_t>
std::int64_t extended_mex(const R& taken, Modulus m) {
  std::vector<bool> seen(static_cast<std::size_t>(m.value()), false);
  std::vector<std::int64_t> beyond;
  for (auto v : taken) {
    const auto x = static_cast<std::int64_t>(v);
    if (x >= m.value()) {
      beyond.push_back(x);
    } else {
      seen[static_cast<std::size_t>(x)] = true;
    }
  }
  for (std::int64_t candidate : mex_scan_order(m)) {
    if (!seen[static_cast<std::size_t>(candidate)]) return candidate;
  }
  std::sort(beyond.begin(), beyond.end());
  std::int64_t candidate = m.value();
  for (std::int64_t x : beyond) {
    if (x == candidate) ++candidate;
    else if (x > candidate) break;
  }
  return candidate;
}

/// First residue, in mex_scan_order(m), that does not occur in `taken`.
/// The mex of the empty set is 1, the mumber of a terminal position.
template <std::ranges::input_range R>
  requires std::convertible_to<std::ranges::range_value_t<R>, std::int64_t>
Residue unit_mex(const R& taken, Modulus m) {
  std::vector<std::int64_t> values;
  for (auto v : taken) values.push_back(normalize(static_cast<std::int64_t>(v), m.value()));
  const std::int64_t mex = extended_mex(values, m);
  if (mex >= m.value()) {
    throw Error(ErrorCode::SetSaturated,
                "every residue mod " + std::to_string(m.value()) + " is taken");
  }
  return Residue(mex, m);
}

inline Residue unit_mex(std::span<const Residue> taken, Modulus m) {
  std::vector<std::int64_t> values;
  values.reserve(taken.size());
  for (const auto& r : taken) {
    if (r.modulus() != m) {
      throw Error(ErrorCode::ModulusMismatch, "residue modulus differs from mex modulus");
    }
    values.push_back(r.value());
  }
  return unit_mex(values, m);
}

/// Prime-power factorization by trial division, ascending by prime.
inline std::vector<PrimePowerFactor> factor_prime_powers(Modulus m) {
  std::vector<PrimePowerFactor> factors;
  std::int64_t rest = m.value();
  for (std::int64_t d = 2; d * d <= rest; ++d) {
    if (rest % d != 0) continue;
    PrimePowerFactor f{d, 0, 1};
    while (rest % d == 0) {
      rest /= d;
      ++f.exponent;
      f.value *= d;
    }
    factors.push_back(f);
  }
  if (rest > 1) factors.push_back({rest, 1, rest});
  return factors;
}

/// Per-factor residues of x.
inline std::vector<Residue> project_residue(std::int64_t x,
                                            std::span<const PrimePowerFactor> factors) {
  std::vector<Residue> out;
  out.reserve(factors.size());
  for (const auto& f : factors) out.emplace_back(x, Modulus(f.value));
  return out;
}

/// Chinese remainder reconstruction modulo the product of the factor values.
inline Residue crt_combine(std::span<const Residue> residues,
                           std::span<const PrimePowerFactor> factors) {
  if (residues.size() != factors.size() || factors.empty()) {
    throw Error(ErrorCode::LengthMismatch,
                "got " + std::to_string(residues.size()) + " residues for " +
                    std::to_string(factors.size()) + " factors");
  }
  std::int64_t acc = 0;
  std::int64_t acc_mod = 1;
  for (std::size_t i = 0; i < factors.size(); ++i) {
    const std::int64_t mi = factors[i].value;
    if (residues[i].modulus().value() != mi) {
      throw Error(ErrorCode::ModulusMismatch,
                  "residue " + std::to_string(i) + " is mod " +
                      std::to_string(residues[i].modulus().value()) +
                      ", factor is " + std::to_string(mi));
    }
    if (acc_mod == 1) {
      acc = residues[i].value();
      acc_mod = mi;
      continue;
    }
    // acc + acc_mod * k = residue (mod mi)
    const std::int64_t inv = mod_inverse(acc_mod % mi, Modulus(mi)).value();
    const std::int64_t k = mul_mod(normalize(residues[i].value() - acc, mi), inv, mi);
    acc += acc_mod * k;
    acc_mod *= mi;
  }
  return Residue(acc, Modulus(acc_mod));
}

}  // namespace mum
