#pragma once

#include <algorithm>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "mum/crt.hpp"
#include "mum/error.hpp"
#include "mum/game.hpp"
#include "mum/grundy.hpp"
#include "mum/poly_field.hpp"

namespace mum {

enum class TableFormat { Text, Csv };

struct Table {
  std::string title;
  std::vector<std::string> headers;
  std::vector<std::vector<std::string>> rows;
};

namespace detail {

// Display width in code points; all table text is UTF-8 without wide glyphs.
inline std::size_t display_width(const std::string& s) {
  return static_cast<std::size_t>(
      std::count_if(s.begin(), s.end(), [](char c) { return (static_cast<unsigned char>(c) & 0xC0) != 0x80; }));
}

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace detail

inline std::string render_csv(const Table& t) {
  std::ostringstream os;
  auto line = [&os](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) os << (i ? "," : "") << detail::csv_field(cells[i]);
    os << "\n";
  };
  line(t.headers);
  for (const auto& r : t.rows) line(r);
  return os.str();
}

/// Columns separated by " | ", padded to the widest cell, with a dashed rule
/// under the header.
inline std::string render_text(const Table& t) {
  std::vector<std::size_t> width(t.headers.size(), 0);
  auto widen = [&width](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size() && i < width.size(); ++i) {
      width[i] = std::max(width[i], detail::display_width(cells[i]));
    }
  };
  widen(t.headers);
  for (const auto& r : t.rows) widen(r);

  std::ostringstream os;
  if (!t.title.empty()) os << t.title << "\n";
  auto line = [&](const std::vector<std::string>& cells) {
    std::string text;
    for (std::size_t i = 0; i < width.size(); ++i) {
      const std::string cell = i < cells.size() ? cells[i] : "";
      if (i) text += " | ";
      text += cell;
      if (i + 1 < width.size()) text.append(width[i] - detail::display_width(cell), ' ');
    }
    while (!text.empty() && text.back() == ' ') text.pop_back();
    os << text << "\n";
  };
  line(t.headers);
  std::string rule;
  for (std::size_t i = 0; i < width.size(); ++i) {
    if (i) rule += "-+-";
    rule.append(width[i], '-');
  }
  os << rule << "\n";
  for (const auto& r : t.rows) line(r);
  return os.str();
}

inline std::string render(const Table& t, TableFormat f) {
  return f == TableFormat::Csv ? render_csv(t) : render_text(t);
}

// ---------------------------------------------------------------------------
// Recursive mex tables

struct MexTable {
  Table single_heap;  // h, successor Grundy set, G(h)
  Table states;       // residue classes of single heaps, then multi-heap states
};

/// States (a, b, p+1) for a <= b drawn from {1, ..., p-1, p+1}.
inline std::vector<std::vector<Heap>> sample_states(Modulus p) {
  std::vector<Heap> values;
  for (Heap h = 1; h < p.value(); ++h) values.push_back(h);
  values.push_back(p.value() + 1);
  std::vector<std::vector<Heap>> out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    for (std::size_t j = i; j < values.size(); ++j) out.push_back({values[i], values[j], p.value() + 1});
  }
  return out;
}

struct MexTableOptions {
  Heap single_max = 7;
  Heap class_max = 64;
  std::vector<std::vector<Heap>> states;  // empty: sample_states(p)
};

/// The single-heap Grundy recursion, plus per-state product, residue, G-value
/// and recursive mex. The recursive mex column is reported in the identity-0
/// normalization, (mumber - 1) mod p, with mumbers computed under the Always
/// policy; residue-class rows take it from the single-heap recursion.
inline MexTable emit_mex_table(Modulus p, const MexTableOptions& opt,
                               MumberSolver& solver = default_solver()) {
  if (!is_prime(p.value())) throw Error(ErrorCode::NotPrime, std::to_string(p.value()) + " is not prime");
  if (opt.single_max < 1) throw Error(ErrorCode::NonPositiveHeap, "table needs at least one heap");
  const std::int64_t pv = p.value();
  MexTable out;

  const auto g = grundy_sequence(std::max(opt.single_max, opt.class_max), p);
  out.single_heap.title = "Recursive Grundy values G(h), p = " + std::to_string(pv);
  out.single_heap.headers = {"h", "Successor Grundy Set", "G(h)"};
  for (Heap h = 1; h <= opt.single_max; ++h) {
    std::string set;
    for (Heap s = std::max<Heap>(1, h - pv + 1); s < h; ++s) {
      if (!set.empty()) set += ", ";
      set += "G(" + std::to_string(s) + ")=" + std::to_string(g[static_cast<std::size_t>(s)]);
    }
    set = set.empty() ? "∅" : "{" + set + "}";
    out.single_heap.rows.push_back({std::to_string(h), set, std::to_string(g[static_cast<std::size_t>(h)])});
  }

  const auto states = opt.states.empty() ? sample_states(p) : opt.states;
  std::size_t width = 1;
  for (const auto& s : states) width = std::max(width, s.size());
  Table& t = out.states;
  t.title = "Recursive mex calculation for sample states, p = " + std::to_string(pv);
  for (std::size_t i = 0; i < width; ++i) t.headers.push_back("Heap " + std::to_string(i + 1));
  t.headers.insert(t.headers.end(), {"Single Heap or Product", "Product Mod " + std::to_string(pv),
                                     "G-value", "Recursive Mex"});

  for (std::int64_t c = 0; c < pv; ++c) {
    std::string members;
    Heap largest = 0;
    for (Heap h = c == 0 ? pv : c; h <= opt.class_max; h += pv) {
      members += (members.empty() ? "" : ",") + std::to_string(h);
      largest = h;
    }
    if (largest == 0) continue;
    std::vector<std::string> row(width, "");
    row[0] = "{" + members + "}";
    row.insert(row.end(), {std::to_string(largest), std::to_string(c), std::to_string(normalize(c - 1, pv)),
                           std::to_string(g[static_cast<std::size_t>(largest)])});
    t.rows.push_back(std::move(row));
  }

  for (const auto& s : states) {
    const NumPosition pos(p, s);
    const Heap product = checked_product(s);
    const std::int64_t residue = product % pv;
    const std::int64_t mex = solver.mumber_mex(pos, ConsolidationPolicy::Always).value();
    std::vector<std::string> row;
    for (std::size_t i = 0; i < width; ++i) row.push_back(i < s.size() ? std::to_string(s[i]) : "");
    row.insert(row.end(), {std::to_string(product), std::to_string(residue),
                           std::to_string(normalize(residue - 1, pv)), std::to_string(normalize(mex - 1, pv))});
    t.rows.push_back(std::move(row));
  }
  return out;
}

inline MexTable emit_mex_table(Modulus p, Heap h_max) {
  MexTableOptions opt;
  opt.single_max = h_max;
  return emit_mex_table(p, opt);
}

// ---------------------------------------------------------------------------
// CRT decomposition table

/// Every non-decreasing multiset of `heap_count` heaps from `heap_values`, with
/// each heap's per-factor residues, per-factor products and W/L status.
inline Table emit_crt_table(Modulus m, std::vector<Heap> heap_values, std::size_t heap_count = 3) {
  std::sort(heap_values.begin(), heap_values.end());
  heap_values.erase(std::unique(heap_values.begin(), heap_values.end()), heap_values.end());
  for (Heap h : heap_values) {
    if (h < 1 || std::gcd(h, m.value()) != 1) {
      throw Error(ErrorCode::HeapNotCoprime,
                  "heap " + std::to_string(h) + " not coprime to " + std::to_string(m.value()));
    }
  }
  const auto factors = factor_prime_powers(m);
  Table t;
  t.title = "Decomposition of MuM_" + std::to_string(m.value()) + " states";
  for (std::size_t i = 0; i < heap_count; ++i) {
    t.headers.push_back("H" + std::to_string(i + 1));
    for (const auto& f : factors) t.headers.push_back("M" + std::to_string(f.value));
  }
  for (const auto& f : factors) t.headers.push_back("M" + std::to_string(f.value) + " Prod");
  t.headers.push_back("Status");
  if (heap_values.empty() || heap_count == 0) return t;

  std::vector<std::size_t> idx(heap_count, 0);
  while (true) {
    std::vector<Heap> heaps;
    for (std::size_t k : idx) heaps.push_back(heap_values[k]);
    const NumPosition pos(m, heaps);
    const StateVector v = state_vector(pos);
    std::vector<std::string> row;
    for (Heap h : heaps) {
      row.push_back(std::to_string(h));
      for (const auto& f : factors) row.push_back(std::to_string(h % f.value));
    }
    for (const auto& c : v.components) row.push_back(std::to_string(c.value()));
    row.push_back(is_identity_vector(v) ? "L" : "W");
    t.rows.push_back(std::move(row));

    // next non-decreasing index tuple
    std::size_t k = heap_count;
    while (k > 0 && idx[k - 1] == heap_values.size() - 1) --k;
    if (k == 0) break;
    const std::size_t next = idx[k - 1] + 1;
    for (std::size_t j = k - 1; j < heap_count; ++j) idx[j] = next;
  }
  return t;
}

inline Table emit_mum15_table(std::vector<Heap> heap_values) {
  return emit_crt_table(Modulus(15), std::move(heap_values), 3);
}

// ---------------------------------------------------------------------------
// Field inverse table

/// Exponent k with x^k = e for every nonzero e, when x generates the
/// multiplicative group; empty otherwise. Index is the canonical rep.
inline std::vector<std::int64_t> discrete_logs_of_x(const FieldSpec& field) {
  const std::int64_t q = field.order();
  std::vector<std::int64_t> log(static_cast<std::size_t>(q), -1);
  const FieldElement x = reduce_int(field.p(), field);
  FieldElement acc = field_one(field);
  for (std::int64_t k = 0; k < q - 1; ++k) {
    if (log[static_cast<std::size_t>(acc.rep)] != -1) return {};
    log[static_cast<std::size_t>(acc.rep)] = k;
    acc = field_mul(acc, x);
  }
  return log;
}

inline Table emit_inverse_table(const FieldSpec& field) {
  const std::int64_t q = field.order();
  const auto log = discrete_logs_of_x(field);
  const bool powers = !log.empty();
  auto power = [&](std::int64_t rep) {
    const std::int64_t k = log[static_cast<std::size_t>(rep)];
    if (k == 0) return "x^0 or x^" + std::to_string(q - 1);
    return "x^" + std::to_string(k);
  };

  Table t;
  t.title = "Multiplicative inverses in F(" + std::to_string(field.p()) + "^" + std::to_string(field.n()) +
            ") with I(x) = " + poly::to_string(field.irreducible());
  if (powers) {
    t.headers = {"Polynomial s", "Integer Rep.", "Power of x",
                 "Inverse (Polynomial)", "Inverse (Integer)", "Inverse (Power)"};
  } else {
    t.headers = {"Polynomial s", "Integer Rep.", "Inverse (Polynomial)", "Inverse (Integer)"};
  }

  std::vector<std::int64_t> order;
  for (std::int64_t rep = 1; rep < q; ++rep) order.push_back(rep);
  if (powers) {
    std::sort(order.begin(), order.end(),
              [&](std::int64_t a, std::int64_t b) { return log[static_cast<std::size_t>(a)] < log[static_cast<std::size_t>(b)]; });
  }
  for (std::int64_t rep : order) {
    const FieldElement e = element(rep, field);
    const FieldElement inv = field_inv(e);
    if (powers) {
      t.rows.push_back({e.to_string(), std::to_string(rep), power(rep), inv.to_string(),
                        std::to_string(inv.rep), power(inv.rep)});
    } else {
      t.rows.push_back({e.to_string(), std::to_string(rep), inv.to_string(), std::to_string(inv.rep)});
    }
  }
  return t;
}

}  // namespace mum
