#pragma once

// Exact phase arithmetic for generalized Pauli / diagonal hierarchy operators.
//
// Phases are tracked as integer exponents of a fixed primitive root of unity
// w = exp(2*pi*i / p^m).  For qubits (p = 2) the precision m can grow on
// demand; for odd primes m is pinned to 1.  Diagonal operators are phase
// polynomials: functions Z_p^n -> Z_{p^m} stored as canonical term maps.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace lplo {

inline uint64_t pow_u64(uint64_t b, uint32_t e) {
  uint64_t r = 1;
  while (e--) r *= b;
  return r;
}

// Multiplicative inverse mod `mod` (requires gcd(v, mod) == 1).
inline uint64_t inv_mod(uint64_t v, uint64_t mod) {
  int64_t t = 0, nt = 1;
  int64_t r = static_cast<int64_t>(mod), nr = static_cast<int64_t>(v % mod);
  while (nr != 0) {
    int64_t q = r / nr;
    std::swap(t -= q * nt, nt);
    std::swap(r -= q * nr, nr);
  }
  if (r != 1) throw std::domain_error("inv_mod: value not invertible");
  return static_cast<uint64_t>(t < 0 ? t + static_cast<int64_t>(mod) : t);
}

struct PhaseRing {
  uint32_t p = 2;  // qudit dimension, prime
  uint32_t m = 1;  // precision: phases are exponents mod p^m (m == 1 unless p == 2)

  PhaseRing() = default;
  PhaseRing(uint32_t p_, uint32_t m_) : p(p_), m(m_) {
    if (p < 2) throw std::invalid_argument("PhaseRing: p must be a prime >= 2");
    if (m < 1) throw std::invalid_argument("PhaseRing: m must be >= 1");
    if (p != 2 && m != 1) throw std::invalid_argument("PhaseRing: m > 1 only supported for p = 2");
  }
  static PhaseRing qubit(uint32_t m = 1) { return PhaseRing(2, m); }
  static PhaseRing qudit(uint32_t p) { return PhaseRing(p, 1); }

  uint64_t modulus() const { return pow_u64(p, m); }
  bool operator==(const PhaseRing& o) const { return p == o.p && m == o.m; }
  bool operator!=(const PhaseRing& o) const { return !(*this == o); }

  // Smallest common ring two operands can be lifted into.
  static PhaseRing join(const PhaseRing& a, const PhaseRing& b) {
    if (a.p != b.p) throw std::invalid_argument("PhaseRing: incompatible primes");
    return PhaseRing(a.p, std::max(a.m, b.m));
  }

  uint64_t reduce(int64_t v) const {
    int64_t n = static_cast<int64_t>(modulus());
    int64_t r = v % n;
    return static_cast<uint64_t>(r < 0 ? r + n : r);
  }
  // p-adic valuation of a nonzero exponent (capped at m).
  uint32_t valuation(uint64_t v) const {
    uint32_t k = 0;
    while (k < m && v % p == 0) { v /= p; ++k; }
    return k;
  }
};

// A monomial in the 0/1- (or Z_p-) valued slot variables, packed into 64 bits.
// p == 2: one bit per slot (slots 0..63), multilinear.
// p > 2 : four bits per slot (slots 0..15), exponents 1..p-1.
class Monomial {
 public:
  uint64_t bits = 0;

  Monomial() = default;
  explicit Monomial(uint64_t b) : bits(b) {}

  static Monomial one() { return Monomial(0); }
  bool is_constant() const { return bits == 0; }
  bool operator==(const Monomial& o) const { return bits == o.bits; }
  bool operator<(const Monomial& o) const { return bits < o.bits; }

  static uint32_t max_slots(uint32_t p) { return p == 2 ? 64 : 16; }

  uint32_t exponent(uint32_t slot, uint32_t p) const {
    if (p == 2) return (bits >> slot) & 1u;
    return (bits >> (4 * slot)) & 0xfu;
  }
  Monomial with_exponent(uint32_t slot, uint32_t e, uint32_t p) const {
    if (slot >= max_slots(p)) throw std::invalid_argument("Monomial: slot out of range");
    uint64_t b = bits;
    if (p == 2) {
      b &= ~(uint64_t(1) << slot);
      if (e % 2) b |= uint64_t(1) << slot;
    } else {
      b &= ~(uint64_t(0xf) << (4 * slot));
      b |= uint64_t(e & 0xf) << (4 * slot);
    }
    return Monomial(b);
  }
  uint32_t degree(uint32_t p) const {
    if (p == 2) return static_cast<uint32_t>(__builtin_popcountll(bits));
    uint32_t d = 0;
    for (uint32_t s = 0; s < 16; ++s) d += exponent(s, p);
    return d;
  }
  std::vector<uint32_t> support(uint32_t p) const {
    std::vector<uint32_t> out;
    for (uint32_t s = 0; s < max_slots(p); ++s)
      if (exponent(s, p)) out.push_back(s);
    return out;
  }
  // Product of monomials as functions Z_p -> Z_p (x^p reduces to x).
  Monomial times(const Monomial& o, uint32_t p) const {
    if (p == 2) return Monomial(bits | o.bits);
    Monomial r;
    for (uint32_t s = 0; s < 16; ++s) {
      uint32_t e = exponent(s, p) + o.exponent(s, p);
      if (e >= p) e = (e - 1) % (p - 1) + 1;
      r = r.with_exponent(s, e, p);
    }
    return r;
  }
  // Value of the monomial at a point with coordinates in Z_p.
  uint32_t eval(const std::vector<uint32_t>& point, uint32_t p) const {
    uint64_t v = 1;
    for (uint32_t s : support(p)) {
      uint32_t x = s < point.size() ? point[s] % p : 0;
      uint32_t e = exponent(s, p);
      uint64_t t = 1;
      for (uint32_t k = 0; k < e; ++k) t = (t * x) % p;
      v = (v * t) % p;
      if (v == 0) return 0;
    }
    return static_cast<uint32_t>(v);
  }
};

// Canonical sparse phase polynomial: sorted (monomial, coefficient) pairs,
// coefficients nonzero mod p^m.
class PhasePolynomial {
 public:
  PhaseRing ring;
  std::vector<std::pair<Monomial, uint64_t>> terms;  // sorted by monomial key

  PhasePolynomial() = default;
  explicit PhasePolynomial(PhaseRing r) : ring(r) {}

  static PhasePolynomial zero(PhaseRing r) { return PhasePolynomial(r); }
  static PhasePolynomial constant(PhaseRing r, int64_t c) {
    PhasePolynomial f(r);
    f.add_term(Monomial::one(), c);
    return f;
  }
  static PhasePolynomial term(PhaseRing r, Monomial mono, int64_t c) {
    PhasePolynomial f(r);
    f.add_term(mono, c);
    return f;
  }

  bool is_zero() const { return terms.empty(); }
  bool is_constant() const {
    return terms.empty() || (terms.size() == 1 && terms[0].first.is_constant());
  }
  uint64_t constant_part() const {
    return (!terms.empty() && terms[0].first.is_constant()) ? terms[0].second : 0;
  }
  uint64_t coefficient(const Monomial& mono) const {
    auto it = std::lower_bound(terms.begin(), terms.end(), mono,
                               [](const auto& t, const Monomial& k) { return t.first < k; });
    return (it != terms.end() && it->first == mono) ? it->second : 0;
  }

  void add_term(Monomial mono, int64_t c) {
    uint64_t cc = ring.reduce(c);
    if (cc == 0) return;
    auto it = std::lower_bound(terms.begin(), terms.end(), mono,
                               [](const auto& t, const Monomial& k) { return t.first < k; });
    if (it != terms.end() && it->first == mono) {
      uint64_t nc = ring.reduce(static_cast<int64_t>(it->second + cc));
      if (nc == 0)
        terms.erase(it);
      else
        it->second = nc;
    } else {
      terms.insert(it, {mono, cc});
    }
  }

  PhasePolynomial& operator+=(const PhasePolynomial& o) {
    for (const auto& [mono, c] : o.terms) add_term(mono, static_cast<int64_t>(c));
    return *this;
  }
  friend PhasePolynomial operator+(PhasePolynomial a, const PhasePolynomial& b) { return a += b; }
  PhasePolynomial negated() const {
    PhasePolynomial r(ring);
    for (const auto& [mono, c] : terms) r.add_term(mono, -static_cast<int64_t>(c));
    return r;
  }
  PhasePolynomial scaled(int64_t k) const {
    PhasePolynomial r(ring);
    for (const auto& [mono, c] : terms) r.add_term(mono, static_cast<int64_t>(c) * k);
    return r;
  }
  PhasePolynomial without_constant() const {
    PhasePolynomial r = *this;
    if (!r.terms.empty() && r.terms[0].first.is_constant()) r.terms.erase(r.terms.begin());
    return r;
  }

  // Pointwise product (used by substitution); reduces x^p -> x per variable.
  PhasePolynomial times(const PhasePolynomial& o) const {
    PhasePolynomial r(ring);
    for (const auto& [ma, ca] : terms)
      for (const auto& [mb, cb] : o.terms)
        r.add_term(ma.times(mb, ring.p), static_cast<int64_t>(ca) * static_cast<int64_t>(cb % ring.modulus()));
    return r;
  }

  // Lift into a larger ring (exact embedding: exponents scale by the modulus ratio).
  PhasePolynomial lifted(PhaseRing target) const {
    if (target.p != ring.p || target.m < ring.m)
      throw std::invalid_argument("PhasePolynomial: invalid ring lift");
    if (target.m == ring.m) return *this;
    uint64_t scale = pow_u64(ring.p, target.m - ring.m);
    PhasePolynomial r(target);
    for (const auto& [mono, c] : terms) r.terms.push_back({mono, c * scale});
    return r;
  }

  // Substitute x -> x + b (translation of the argument).
  PhasePolynomial shifted(const std::vector<uint32_t>& b) const {
    const uint32_t p = ring.p;
    PhasePolynomial r(ring);
    if (p == 2) {
      uint64_t bmask = 0;
      for (size_t s = 0; s < b.size(); ++s)
        if (b[s] % 2) bmask |= uint64_t(1) << s;
      for (const auto& [mono, c] : terms) {
        uint64_t flip = mono.bits & bmask;   // variables receiving x -> 1 - x
        uint64_t keep = mono.bits & ~bmask;
        // prod_{i in flip} (1 - x_i) = sum_{T subset flip} (-1)^|T| x_T
        uint64_t sub = 0;
        while (true) {
          int sign = (__builtin_popcountll(sub) % 2) ? -1 : 1;
          r.add_term(Monomial(keep | sub), sign * static_cast<int64_t>(c));
          if (sub == flip) break;
          sub = (sub - flip) & flip;  // next subset
        }
      }
      return r;
    }
    for (const auto& [mono, c] : terms) {
      PhasePolynomial t = PhasePolynomial::constant(ring, static_cast<int64_t>(c));
      for (uint32_t s : mono.support(p)) {
        uint32_t bs = s < b.size() ? b[s] % p : 0;
        PhasePolynomial lin(ring);
        lin.add_term(Monomial().with_exponent(s, 1, p), 1);
        if (bs) lin.add_term(Monomial::one(), bs);
        PhasePolynomial pw = PhasePolynomial::constant(ring, 1);
        for (uint32_t k = 0; k < mono.exponent(s, p); ++k) pw = pw.times(lin);
        t = t.times(pw);
      }
      r += t;
    }
    return r;
  }

  // Substitute each variable by an affine form (degree <= 1 polynomial).
  PhasePolynomial substituted(const std::vector<PhasePolynomial>& forms) const {
    PhasePolynomial r(ring);
    for (const auto& [mono, c] : terms) {
      PhasePolynomial t = PhasePolynomial::constant(ring, static_cast<int64_t>(c));
      for (uint32_t s : mono.support(ring.p)) {
        if (s >= forms.size()) continue;  // identity on untouched slots
        for (uint32_t k = 0; k < mono.exponent(s, ring.p); ++k) t = t.times(forms[s]);
      }
      r += t;
    }
    return r;
  }

  // Evaluate at a point of Z_p^n; result is an exponent mod p^m.
  uint64_t eval(const std::vector<uint32_t>& point) const {
    uint64_t acc = 0;
    for (const auto& [mono, c] : terms)
      acc += c * mono.eval(point, ring.p);
    return acc % ring.modulus();
  }

  // The function x -> sum_j c_j x_j + cst over Z_p, written as an exact
  // polynomial over Z_{p^m}.  For p = 2 with m > 1 the mod-2 sum must be
  // expanded multilinearly (XOR(a,b) = a + b - 2ab as 0/1-valued integers).
  static PhasePolynomial affine_form(PhaseRing ring, const std::vector<uint32_t>& coeffs,
                                     uint32_t cst) {
    if (ring.p != 2 || ring.m == 1) {
      PhasePolynomial f(ring);
      for (size_t j = 0; j < coeffs.size(); ++j)
        if (coeffs[j] % ring.p)
          f.add_term(Monomial().with_exponent(static_cast<uint32_t>(j), 1, ring.p), coeffs[j] % ring.p);
      if (cst % ring.p) f.add_term(Monomial::one(), cst % ring.p);
      return f;
    }
    PhasePolynomial acc(ring);
    for (size_t j = 0; j < coeffs.size(); ++j) {
      if (coeffs[j] % 2 == 0) continue;
      PhasePolynomial v = PhasePolynomial::term(ring, Monomial().with_exponent(static_cast<uint32_t>(j), 1, 2), 1);
      // XOR fold: acc + v - 2 acc v
      PhasePolynomial cross = acc.times(v).scaled(-2);
      acc += v;
      acc += cross;
    }
    if (cst % 2) {
      // XOR with 1: 1 - acc
      acc = acc.negated();
      acc.add_term(Monomial::one(), 1);
    }
    return acc;
  }

  uint32_t max_slot() const {
    uint32_t hi = 0;
    for (const auto& [mono, c] : terms)
      for (uint32_t s : mono.support(ring.p)) hi = std::max(hi, s + 1);
    return hi;
  }

  bool operator==(const PhasePolynomial& o) const {
    return ring == o.ring && terms == o.terms;
  }
};

}  // namespace lplo
