#pragma once

#include <cstdint>
#include <memory>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "mum/error.hpp"
#include "mum/modular.hpp"

namespace mum {

/// Dense polynomials over Z_p, coefficient i multiplies x^i. Kept trimmed: no
/// trailing zero coefficients, and the zero polynomial is empty.
namespace poly {

using Poly = std::vector<std::int64_t>;

inline void trim(Poly& a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
}

inline int degree(const Poly& a) { return static_cast<int>(a.size()) - 1; }

/// Base-p digits of h, least significant first.
inline Poly from_int(std::int64_t h, std::int64_t p) {
  Poly a;
  for (; h > 0; h /= p) a.push_back(h % p);
  return a;
}

inline std::int64_t to_int(const Poly& a, std::int64_t p) {
  std::int64_t h = 0;
  for (auto it = a.rbegin(); it != a.rend(); ++it) h = h * p + *it;
  return h;
}

inline Poly sub(Poly a, const Poly& b, std::int64_t p) {
  if (a.size() < b.size()) a.resize(b.size(), 0);
  for (std::size_t i = 0; i < b.size(); ++i) a[i] = normalize(a[i] - b[i], p);
  trim(a);
  return a;
}

inline Poly mul(const Poly& a, const Poly& b, std::int64_t p) {
  if (a.empty() || b.empty()) return {};
  Poly c(a.size() + b.size() - 1, 0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0) continue;
    for (std::size_t j = 0; j < b.size(); ++j) c[i + j] = (c[i + j] + a[i] * b[j]) % p;
  }
  trim(c);
  return c;
}

/// Quotient and remainder of a by a nonzero divisor over the prime field Z_p.
inline std::pair<Poly, Poly> divmod(Poly a, const Poly& b, std::int64_t p) {
  if (b.empty()) throw Error(ErrorCode::ZeroInverse, "polynomial division by zero");
  trim(a);
  const std::int64_t lead_inv = mod_inverse(b.back(), Modulus(p)).value();
  Poly q;
  if (a.size() >= b.size()) q.assign(a.size() - b.size() + 1, 0);
  while (a.size() >= b.size() && !a.empty()) {
    const std::size_t shift = a.size() - b.size();
    const std::int64_t c = a.back() * lead_inv % p;
    q[shift] = c;
    for (std::size_t j = 0; j < b.size(); ++j) {
      a[shift + j] = normalize(a[shift + j] - c * b[j], p);
    }
    trim(a);
  }
  trim(q);
  return {q, a};
}

inline Poly mod(const Poly& a, const Poly& b, std::int64_t p) { return divmod(a, b, p).second; }

/// Formats like "x^2+x+1"; coefficients other than 1 prefix their term.
inline std::string to_string(const Poly& a) {
  if (a.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (int i = degree(a); i >= 0; --i) {
    const std::int64_t c = a[static_cast<std::size_t>(i)];
    if (c == 0) continue;
    if (!first) os << "+";
    first = false;
    if (i == 0) {
      os << c;
      continue;
    }
    if (c != 1) os << c;
    os << "x";
    if (i > 1) os << "^" << i;
  }
  return os.str();
}

/// True iff the polynomial has no monic factor of degree 1..deg/2. Candidate
/// divisors are enumerated as base-p integers with a leading 1.
inline bool is_irreducible(Poly f, std::int64_t p) {
  trim(f);
  const int n = degree(f);
  if (n < 1) return false;
  for (int d = 1; d <= n / 2; ++d) {
    std::int64_t count = 1;
    for (int i = 0; i < d; ++i) count *= p;
    for (std::int64_t low = 0; low < count; ++low) {
      Poly g = from_int(low, p);
      g.resize(static_cast<std::size_t>(d) + 1, 0);
      g[static_cast<std::size_t>(d)] = 1;
      if (mod(f, g, p).empty()) return false;
    }
  }
  return true;
}

}  // namespace poly

/// The field F(p^n) = Z_p[x]/(I(x)) for a monic irreducible I of degree n.
/// Immutable; copies share one validated definition.
class FieldSpec {
 public:
  std::int64_t p() const noexcept { return data_->p; }
  int n() const noexcept { return data_->n; }
  const poly::Poly& irreducible() const noexcept { return data_->irreducible; }
  /// p^n
  std::int64_t order() const noexcept { return data_->order; }
  /// I(x) as a base-p integer (e.g. 11 = 0b1011 for x^3+x+1).
  std::int64_t irreducible_bits() const { return poly::to_int(data_->irreducible, data_->p); }

  friend bool operator==(const FieldSpec& a, const FieldSpec& b) {
    return a.p() == b.p() && a.irreducible() == b.irreducible();
  }

  friend FieldSpec make_field(std::int64_t p, int n, poly::Poly coeffs);

 private:
  struct Data {
    std::int64_t p;
    int n;
    poly::Poly irreducible;
    std::int64_t order;
  };
  explicit FieldSpec(std::shared_ptr<const Data> d) : data_(std::move(d)) {}
  std::shared_ptr<const Data> data_;
};

inline bool is_irreducible(const poly::Poly& coeffs, std::int64_t p) {
  return poly::is_irreducible(coeffs, p);
}

inline FieldSpec make_field(std::int64_t p, int n, poly::Poly coeffs) {
  if (!is_prime(p)) throw Error(ErrorCode::NotPrime, std::to_string(p) + " is not prime");
  for (auto& c : coeffs) {
    if (c < 0 || c >= p) {
      throw Error(ErrorCode::ParseError,
                  "coefficient " + std::to_string(c) + " is not a residue mod " + std::to_string(p));
    }
  }
  poly::trim(coeffs);
  if (n < 1 || poly::degree(coeffs) != n || coeffs.back() != 1) {
    throw Error(ErrorCode::NotMonic, "polynomial " + poly::to_string(coeffs) +
                                         " is not monic of degree " + std::to_string(n));
  }
  std::int64_t order = 1;
  for (int i = 0; i < n; ++i) {
    if (__builtin_mul_overflow(order, p, &order) || order > (std::int64_t{1} << 31)) {
      throw Error(ErrorCode::FieldTooLarge, "field order exceeds 2^31");
    }
  }
  if (coeffs.front() == 0 || !poly::is_irreducible(coeffs, p)) {
    throw Error(ErrorCode::NotIrreducible,
                poly::to_string(coeffs) + " is not irreducible over F_" + std::to_string(p));
  }
  return FieldSpec(std::make_shared<const FieldSpec::Data>(
      FieldSpec::Data{p, n, std::move(coeffs), order}));
}

/// Field from I(x) written as a base-p integer, e.g. (2, 3, 0b1011).
inline FieldSpec make_field_from_bits(std::int64_t p, int n, std::int64_t bits) {
  if (!is_prime(p)) throw Error(ErrorCode::NotPrime, std::to_string(p) + " is not prime");
  return make_field(p, n, poly::from_int(bits, p));
}

/// F(2^8) with the Rijndael modulus x^8+x^4+x^3+x+1.
inline FieldSpec aes_field() { return make_field_from_bits(2, 8, 0x11B); }

/// Canonical element: rep's base-p digits are the reduced coefficients.
struct FieldElement {
  std::int64_t rep;
  FieldSpec field;

  poly::Poly polynomial() const { return poly::from_int(rep, field.p()); }
  std::string to_string() const { return poly::to_string(polynomial()); }

  friend bool operator==(const FieldElement&, const FieldElement&) = default;
};

inline std::ostream& operator<<(std::ostream& os, const FieldElement& e) {
  return os << e.rep << " (" << e.to_string() << ")";
}

/// Interpret h's base-p digits as a polynomial and reduce modulo I(x).
inline FieldElement reduce_int(std::int64_t h, const FieldSpec& field) {
  if (h < 0) throw Error(ErrorCode::NonPositiveHeap, "cannot reduce negative " + std::to_string(h));
  const auto r = poly::mod(poly::from_int(h, field.p()), field.irreducible(), field.p());
  return {poly::to_int(r, field.p()), field};
}

/// The element with canonical integer `rep`, which must lie in 0..p^n-1.
inline FieldElement element(std::int64_t rep, const FieldSpec& field) {
  if (rep < 0 || rep >= field.order()) {
    throw Error(ErrorCode::HeapOutOfField, std::to_string(rep) + " is not a canonical element of F(" +
                                               std::to_string(field.p()) + "^" +
                                               std::to_string(field.n()) + ")");
  }
  return {rep, field};
}

inline FieldElement field_mul(const FieldElement& a, const FieldElement& b) {
  if (!(a.field == b.field)) throw Error(ErrorCode::FieldMismatch, "elements of different fields");
  const std::int64_t p = a.field.p();
  const auto prod = poly::mul(a.polynomial(), b.polynomial(), p);
  return {poly::to_int(poly::mod(prod, a.field.irreducible(), p), p), a.field};
}

inline FieldElement field_one(const FieldSpec& field) { return {1, field}; }

inline FieldElement field_pow(FieldElement base, std::uint64_t e) {
  FieldElement acc = field_one(base.field);
  while (e > 0) {
    if (e & 1U) acc = field_mul(acc, base);
    base = field_mul(base, base);
    e >>= 1U;
  }
  return acc;
}

/// Inverse by the extended Euclidean algorithm over Z_p[x].
inline FieldElement field_inv(const FieldElement& a) {
  if (a.rep == 0) throw Error(ErrorCode::ZeroInverse, "zero has no multiplicative inverse");
  const std::int64_t p = a.field.p();
  poly::Poly r0 = a.field.irreducible();
  poly::Poly r1 = a.polynomial();
  poly::Poly t0;
  poly::Poly t1{1};
  while (!r1.empty()) {
    auto [q, r2] = poly::divmod(r0, r1, p);
    poly::Poly t2 = poly::sub(t0, poly::mul(q, t1, p), p);
    r0 = std::move(r1);
    r1 = std::move(r2);
    t0 = std::move(t1);
    t1 = std::move(t2);
  }
  // r0 is a nonzero constant since I(x) is irreducible.
  const std::int64_t scale = mod_inverse(r0.front(), Modulus(p)).value();
  poly::Poly inv = poly::mul(t0, poly::Poly{scale}, p);
  inv = poly::mod(inv, a.field.irreducible(), p);
  return {poly::to_int(inv, p), a.field};
}

}  // namespace mum
