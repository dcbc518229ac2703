#pragma once

// Canonical text rendering of operators and a round-trip parser.
//
// Grammar (slots are 1-based in text):
//   op      := "I" | factor ("*" factor)*
//   factor  := phase | "X"s["^"e] | "Z"s | "R"k"{"s"}"["^"u] | czlike | plike
//            | "CNOT{"c","t"}"["^"e] | "SWAP{"a","b"}" | "SCALE{"s"}^"l
//   phase   := "w^"k | "-1" | "i" | "-i"
//   czlike  := ("CZ"|"CCZ"|"C"j"Z"|"C"j"R"k") "{" slots "}" ["^"u]
//   plike   := "P{" s["^"e] ("," s["^"e])* "}^" c     (generic monomial atom)
//
// Factors multiply left to right as operators.  render() emits a canonical
// factorization; parse(render(U)) == U exactly.

#include <sstream>
#include <string>

#include "op.hpp"

namespace lplo {

namespace detail {

inline void render_linear_atoms(const HierarchyOperator& U, std::vector<std::string>& out) {
  const uint32_t p = U.ring.p;
  size_t n = U.linear.rows.size();
  if (n == 0) return;
  // Peel elementary factors from the left: L = E1 E2 ... Ek.
  auto A = U.linear;
  for (size_t c = 0; c < n; ++c) {
    size_t r = c;
    while (r < n && A.at(r, c) == 0) ++r;
    if (r == n) throw std::domain_error("render: linear part not invertible");
    if (r != c) {
      out.push_back("SWAP{" + std::to_string(c + 1) + "," + std::to_string(r + 1) + "}");
      std::swap(A.rows[c], A.rows[r]);
    }
    uint32_t d = A.at(c, c);
    if (d != 1) {
      out.push_back("SCALE{" + std::to_string(c + 1) + "}^" + std::to_string(d));
      uint64_t inv = inv_mod(d, p);
      for (size_t j = 0; j < n; ++j) A.rows[c][j] = static_cast<uint32_t>(A.rows[c][j] * inv % p);
    }
    for (size_t i = 0; i < n; ++i) {
      if (i == c) continue;
      uint32_t v = A.at(i, c);
      if (!v) continue;
      std::string atom = "CNOT{" + std::to_string(c + 1) + "," + std::to_string(i + 1) + "}";
      if (v != 1) atom += "^" + std::to_string(v);
      out.push_back(atom);
      for (size_t j = 0; j < n; ++j)
        A.rows[i][j] = static_cast<uint32_t>((A.rows[i][j] + uint64_t(p - v) * A.rows[c][j]) % p);
    }
  }
}

inline std::string render_monomial_atom(const PhaseRing& ring, const Monomial& mono, uint64_t coeff) {
  const uint32_t p = ring.p;
  auto slots = mono.support(p);
  bool multilinear = true;
  for (uint32_t s : slots)
    if (mono.exponent(s, p) != 1) multilinear = false;

  uint32_t v = ring.valuation(coeff);
  uint64_t unit = coeff / pow_u64(p, v);
  uint32_t k = ring.m - v;  // phase order index: the atom carries a p^k-th root

  std::string slot_list;
  for (size_t i = 0; i < slots.size(); ++i)
    slot_list += (i ? "," : "") + std::to_string(slots[i] + 1);

  if (multilinear && k == 1) {
    std::string name = slots.size() == 1 ? "Z" + std::to_string(slots[0] + 1)
                       : slots.size() == 2 ? "CZ{" + slot_list + "}"
                       : slots.size() == 3 ? "CCZ{" + slot_list + "}"
                                           : "C" + std::to_string(slots.size() - 1) + "Z{" + slot_list + "}";
    if (unit != 1) name += "^" + std::to_string(unit);
    return name;
  }
  if (multilinear && p == 2) {
    std::string name = slots.size() == 1
                           ? "R" + std::to_string(k) + "{" + std::to_string(slots[0] + 1) + "}"
                           : "C" + std::to_string(slots.size() - 1) + "R" + std::to_string(k) + "{" + slot_list + "}";
    if (unit != 1) name += "^" + std::to_string(unit);
    return name;
  }
  // generic odd-prime monomial
  std::string body;
  for (size_t i = 0; i < slots.size(); ++i) {
    if (i) body += ",";
    body += std::to_string(slots[i] + 1);
    uint32_t e = mono.exponent(slots[i], p);
    if (e != 1) body += "^" + std::to_string(e);
  }
  return "P{" + body + "}^" + std::to_string(coeff);
}

}  // namespace detail

inline std::string render(const HierarchyOperator& U0) {
  HierarchyOperator U = U0;
  U.normalize();
  const PhaseRing ring = U.ring;
  std::vector<std::string> factors;

  uint64_t c = U.phase.constant_part();
  if (c) {
    uint64_t mod = ring.modulus();
    if (2 * c == mod)
      factors.push_back("-1");
    else if (mod % 4 == 0 && 4 * c == mod)
      factors.push_back("i");
    else if (mod % 4 == 0 && 4 * c == 3 * mod)
      factors.push_back("-i");
    else
      factors.push_back("w^" + std::to_string(c));
  }

  detail::render_linear_atoms(U, factors);

  // translation expressed before the linear part acts: a' = L^{-1} a
  std::vector<uint32_t> a = U.x_part;
  if (U.has_linear_part()) {
    auto inv = U.linear.inverse();
    a.resize(U.linear.rows.size(), 0);
    a = inv->apply(a);
  }
  for (size_t s = 0; s < a.size(); ++s) {
    if (!a[s]) continue;
    std::string f = "X" + std::to_string(s + 1);
    if (a[s] != 1) f += "^" + std::to_string(a[s]);
    factors.push_back(f);
  }
  for (const auto& [mono, coeff] : U.phase.terms) {
    if (mono.is_constant()) continue;
    factors.push_back(detail::render_monomial_atom(ring, mono, coeff));
  }
  if (factors.empty()) return "I";
  std::string out;
  for (size_t i = 0; i < factors.size(); ++i) out += (i ? "*" : "") + factors[i];
  return out;
}

namespace detail {

struct FactorParser {
  const std::string& text;
  size_t pos = 0;
  explicit FactorParser(const std::string& t) : text(t) {}

  bool eat(char c) {
    if (pos < text.size() && text[pos] == c) {
      ++pos;
      return true;
    }
    return false;
  }
  bool lookahead(const std::string& s) const { return text.compare(pos, s.size(), s) == 0; }
  bool eat_word(const std::string& s) {
    if (lookahead(s)) {
      pos += s.size();
      return true;
    }
    return false;
  }
  uint64_t number() {
    size_t start = pos;
    while (pos < text.size() && isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
    if (pos == start) throw std::invalid_argument("parse: expected number at '" + text.substr(start) + "'");
    return std::stoull(text.substr(start, pos - start));
  }
  std::vector<uint32_t> slot_list() {
    if (!eat('{')) throw std::invalid_argument("parse: expected '{'");
    std::vector<uint32_t> slots;
    do {
      slots.push_back(static_cast<uint32_t>(number()) - 1);
    } while (eat(','));
    if (!eat('}')) throw std::invalid_argument("parse: expected '}'");
    return slots;
  }
  uint64_t optional_exponent(uint64_t dflt = 1) {
    if (eat('^')) return number();
    return dflt;
  }
};

inline HierarchyOperator parse_factor(const std::string& tok, PhaseRing ring) {
  FactorParser p(tok);
  if (tok == "I") return HierarchyOperator::identity(ring);
  if (tok == "-1") return HierarchyOperator::phase_op(ring, static_cast<int64_t>(ring.modulus() / 2));
  if (tok == "i") {
    if (ring.modulus() % 4) throw std::invalid_argument("parse: 'i' needs m >= 2");
    return HierarchyOperator::phase_op(ring, static_cast<int64_t>(ring.modulus() / 4));
  }
  if (tok == "-i") {
    if (ring.modulus() % 4) throw std::invalid_argument("parse: '-i' needs m >= 2");
    return HierarchyOperator::phase_op(ring, static_cast<int64_t>(3 * (ring.modulus() / 4)));
  }
  if (p.eat_word("w^")) return HierarchyOperator::phase_op(ring, static_cast<int64_t>(p.number()));
  if (p.eat_word("CNOT")) {
    auto slots = p.slot_list();
    uint64_t e = p.optional_exponent();
    if (slots.size() != 2) throw std::invalid_argument("parse: CNOT needs two slots");
    auto u = HierarchyOperator::cnot_op(ring, slots[0], slots[1]);
    u.linear.rows[slots[1]][slots[0]] = static_cast<uint32_t>(e % ring.p);
    return u;
  }
  if (p.eat_word("SWAP")) {
    auto slots = p.slot_list();
    if (slots.size() != 2) throw std::invalid_argument("parse: SWAP needs two slots");
    return HierarchyOperator::swap_op(ring, slots[0], slots[1]);
  }
  if (p.eat_word("SCALE")) {
    auto slots = p.slot_list();
    uint64_t l = p.optional_exponent();
    return HierarchyOperator::scale_op(ring, slots[0], static_cast<uint32_t>(l % ring.p));
  }
  if (p.eat_word("P{")) {
    --p.pos;  // rewind to '{'
    p.pos = 1;
    Monomial mono;
    if (!p.eat('{')) throw std::invalid_argument("parse: P atom");
    do {
      uint32_t s = static_cast<uint32_t>(p.number()) - 1;
      uint32_t e = static_cast<uint32_t>(p.optional_exponent());
      mono = mono.with_exponent(s, e, ring.p);
    } while (p.eat(','));
    if (!p.eat('}') || !p.eat('^')) throw std::invalid_argument("parse: P atom exponent");
    uint64_t c = p.number();
    HierarchyOperator u(ring);
    u.phase = PhasePolynomial::term(ring, mono, static_cast<int64_t>(c));
    return u;
  }
  if (p.eat('X')) {
    uint32_t s = static_cast<uint32_t>(p.number()) - 1;
    uint64_t e = p.optional_exponent();
    return HierarchyOperator::x_op(ring, s, static_cast<uint32_t>(e % ring.p));
  }
  if (p.eat('Z')) {
    uint32_t s = static_cast<uint32_t>(p.number()) - 1;
    uint64_t e = p.optional_exponent();
    return HierarchyOperator::z_op(ring, s, static_cast<uint32_t>(e % ring.p));
  }
  // R<k>{s}, C<j>Z{...}, CZ, CCZ, C<j>R<k>{...}
  uint32_t controls = 0;
  uint32_t rk = 0;
  if (p.eat('C')) {
    if (p.lookahead("CZ")) {  // "CCZ"
      p.eat('C');
      p.eat('Z');
      controls = 2;
      rk = 1;
    } else if (p.eat('Z')) {
      controls = 1;
      rk = 1;
    } else {
      controls = static_cast<uint32_t>(p.number());
      if (p.eat('Z'))
        rk = 1;
      else if (p.eat('R'))
        rk = static_cast<uint32_t>(p.number());
      else
        throw std::invalid_argument("parse: bad controlled atom '" + tok + "'");
    }
  } else if (p.eat('R')) {
    rk = static_cast<uint32_t>(p.number());
    controls = 0;
  } else {
    throw std::invalid_argument("parse: unknown factor '" + tok + "'");
  }
  auto slots = p.slot_list();
  uint64_t unit = p.optional_exponent();
  if (slots.size() != controls + 1)
    throw std::invalid_argument("parse: slot count mismatch in '" + tok + "'");
  PhaseRing r2 = ring;
  if (rk > ring.m) {
    if (ring.p != 2) throw std::invalid_argument("parse: R_k atoms need p = 2");
    r2 = PhaseRing(2, rk);
  }
  Monomial mono;
  for (uint32_t s : slots) mono = mono.with_exponent(s, 1, r2.p);
  int64_t coeff = static_cast<int64_t>(unit % r2.modulus()) * static_cast<int64_t>(pow_u64(r2.p, r2.m - rk));
  HierarchyOperator u(r2);
  u.phase = PhasePolynomial::term(r2, mono, coeff);
  return u;
}

}  // namespace detail

inline HierarchyOperator parse_operator(const std::string& text, PhaseRing ring) {
  HierarchyOperator u = HierarchyOperator::identity(ring);
  size_t start = 0;
  while (start <= text.size()) {
    size_t star = text.find('*', start);
    std::string tok = text.substr(start, star == std::string::npos ? std::string::npos : star - start);
    if (tok.empty()) throw std::invalid_argument("parse: empty factor");
    u = multiply(u, detail::parse_factor(tok, ring));
    if (star == std::string::npos) break;
    start = star + 1;
  }
  return u;
}

}  // namespace lplo
