#pragma once

// Generalized Pauli x diagonal hierarchy operators, with an optional linear
// part so that CNOT/SWAP-type permutation gates live in the same class.
//
// An operator acts on computational basis states of Z_p^n as
//
//     U |q> = w^{f(q)} |L q + a>
//
// with L invertible over Z_p, a in Z_p^n and f a phase polynomial.  The class
// is closed under products, inverses and conjugation, and contains every
// logical representative, square and group commutator the wall classification
// needs.  It does not contain Hadamard; Hadamard-type gates are handled at the
// tableau level (see gate.hpp).

#include <cassert>
#include <optional>

#include "phase.hpp"

namespace lplo {

// Small dense invertible matrix over Z_p; empty rows mean "identity".
class LinearMap {
 public:
  uint32_t p = 2;
  std::vector<std::vector<uint32_t>> rows;  // rows[i][j] = coefficient of x_j in (Lx)_i

  LinearMap() = default;
  explicit LinearMap(uint32_t p_) : p(p_) {}

  bool is_identity() const {
    for (size_t i = 0; i < rows.size(); ++i)
      for (size_t j = 0; j < rows[i].size(); ++j)
        if (rows[i][j] % p != (i == j ? 1u : 0u)) return false;
    return true;
  }
  size_t size() const { return rows.size(); }

  void ensure(size_t n) {
    size_t old = rows.size();
    if (n <= old) return;
    for (auto& r : rows) r.resize(n, 0);
    for (size_t i = old; i < n; ++i) {
      rows.emplace_back(n, 0);
      rows[i][i] = 1;
    }
  }
  uint32_t at(size_t i, size_t j) const {
    if (i < rows.size() && j < rows[i].size()) return rows[i][j] % p;
    return i == j ? 1 : 0;
  }
  static LinearMap identity(uint32_t p, size_t n) {
    LinearMap l(p);
    l.ensure(n);
    return l;
  }

  std::vector<uint32_t> apply(const std::vector<uint32_t>& x) const {
    size_t n = std::max(rows.size(), x.size());
    std::vector<uint32_t> y(n, 0);
    for (size_t i = 0; i < n; ++i) {
      uint64_t acc = 0;
      for (size_t j = 0; j < n; ++j) acc += uint64_t(at(i, j)) * (j < x.size() ? x[j] % p : 0);
      y[i] = static_cast<uint32_t>(acc % p);
    }
    return y;
  }

  LinearMap times(const LinearMap& o) const {
    size_t n = std::max(rows.size(), o.rows.size());
    LinearMap r(p);
    r.ensure(n);
    for (size_t i = 0; i < n; ++i)
      for (size_t j = 0; j < n; ++j) {
        uint64_t acc = 0;
        for (size_t k = 0; k < n; ++k) acc += uint64_t(at(i, k)) * o.at(k, j);
        r.rows[i][j] = static_cast<uint32_t>(acc % p);
      }
    return r;
  }

  std::optional<LinearMap> inverse() const {
    size_t n = rows.size();
    if (n == 0) return LinearMap(p);
    // Gauss-Jordan over the field Z_p.
    std::vector<std::vector<uint32_t>> a(n, std::vector<uint32_t>(2 * n, 0));
    for (size_t i = 0; i < n; ++i) {
      for (size_t j = 0; j < n; ++j) a[i][j] = at(i, j);
      a[i][n + i] = 1;
    }
    for (size_t col = 0; col < n; ++col) {
      size_t piv = col;
      while (piv < n && a[piv][col] % p == 0) ++piv;
      if (piv == n) return std::nullopt;
      std::swap(a[col], a[piv]);
      uint64_t inv = inv_mod(a[col][col] % p, p);
      for (size_t j = 0; j < 2 * n; ++j) a[col][j] = static_cast<uint32_t>(a[col][j] * inv % p);
      for (size_t i = 0; i < n; ++i) {
        if (i == col || a[i][col] % p == 0) continue;
        uint32_t fac = a[i][col] % p;
        for (size_t j = 0; j < 2 * n; ++j)
          a[i][j] = static_cast<uint32_t>((a[i][j] + uint64_t(p - fac) * a[col][j]) % p);
      }
    }
    LinearMap r(p);
    r.ensure(n);
    for (size_t i = 0; i < n; ++i)
      for (size_t j = 0; j < n; ++j) r.rows[i][j] = a[i][n + j];
    return r;
  }

  bool operator==(const LinearMap& o) const {
    size_t n = std::max(rows.size(), o.rows.size());
    for (size_t i = 0; i < n; ++i)
      for (size_t j = 0; j < n; ++j)
        if (at(i, j) != o.at(i, j)) return false;
    return true;
  }
};

class HierarchyOperator {
 public:
  PhaseRing ring;
  LinearMap linear;             // defaults to identity
  std::vector<uint32_t> x_part; // translation a, entries mod p
  PhasePolynomial phase;        // f

  HierarchyOperator() : phase(ring) { linear.p = ring.p; }
  explicit HierarchyOperator(PhaseRing r) : ring(r), linear(r.p), phase(r) {}

  void normalize() {
    for (auto& v : x_part) v %= ring.p;
    while (!x_part.empty() && x_part.back() == 0) x_part.pop_back();
    if (linear.is_identity()) linear.rows.clear();
  }

  uint32_t slot_span() const {
    uint32_t hi = static_cast<uint32_t>(x_part.size());
    hi = std::max(hi, phase.max_slot());
    hi = std::max(hi, static_cast<uint32_t>(linear.rows.size()));
    return hi;
  }

  bool has_linear_part() const { return !linear.is_identity(); }
  bool is_diagonal() const { return !has_linear_part() && x_translation_trivial(); }
  bool x_translation_trivial() const {
    for (uint32_t v : x_part)
      if (v % ring.p) return false;
    return true;
  }

  uint32_t x_at(size_t slot) const { return slot < x_part.size() ? x_part[slot] % ring.p : 0; }
  void set_x(size_t slot, uint32_t v) {
    if (x_part.size() <= slot) x_part.resize(slot + 1, 0);
    x_part[slot] = v % ring.p;
  }

  HierarchyOperator lifted(PhaseRing target) const {
    HierarchyOperator r(target);
    r.linear = linear;
    r.linear.p = target.p;
    r.x_part = x_part;
    r.phase = phase.lifted(target);
    return r;
  }

  bool operator==(const HierarchyOperator& o) const {
    if (ring.p != o.ring.p) return false;
    PhaseRing c = PhaseRing::join(ring, o.ring);
    HierarchyOperator a = lifted(c), b = o.lifted(c);
    a.normalize();
    b.normalize();
    return a.linear == b.linear && a.x_part == b.x_part && a.phase == b.phase;
  }
  bool operator!=(const HierarchyOperator& o) const { return !(*this == o); }

  // ---- constructors for the standard operators -----------------------------

  static HierarchyOperator identity(PhaseRing r) { return HierarchyOperator(r); }

  static HierarchyOperator phase_op(PhaseRing r, int64_t exponent) {
    HierarchyOperator u(r);
    u.phase = PhasePolynomial::constant(r, exponent);
    return u;
  }
  static HierarchyOperator x_op(PhaseRing r, uint32_t slot, uint32_t e = 1) {
    HierarchyOperator u(r);
    u.set_x(slot, e);
    return u;
  }
  // Z^e on a slot: phase exponent e * p^{m-1} * x_slot.
  static HierarchyOperator z_op(PhaseRing r, uint32_t slot, uint32_t e = 1) {
    HierarchyOperator u(r);
    int64_t c = static_cast<int64_t>(e % r.p) * static_cast<int64_t>(pow_u64(r.p, r.m - 1));
    u.phase = PhasePolynomial::term(r, Monomial().with_exponent(slot, 1, r.p), c);
    return u;
  }
  // C^{k-1}Z on a set of slots (k = slots.size()), exponent e.
  static HierarchyOperator ckz_op(PhaseRing r, const std::vector<uint32_t>& slots, uint32_t e = 1) {
    HierarchyOperator u(r);
    Monomial mono;
    for (uint32_t s : slots) mono = mono.with_exponent(s, 1, r.p);
    int64_t c = static_cast<int64_t>(e % r.p) * static_cast<int64_t>(pow_u64(r.p, r.m - 1));
    u.phase = PhasePolynomial::term(r, mono, c);
    return u;
  }
  // R_k = diag(1, w_{2^k}) on a slot; qubits only, requires (or lifts to) m >= k.
  static HierarchyOperator r_op(PhaseRing r, uint32_t k, uint32_t slot) {
    if (r.p != 2) throw std::invalid_argument("r_op: R_k is a qubit gate");
    PhaseRing rr(2, std::max(r.m, k));
    HierarchyOperator u(rr);
    u.phase = PhasePolynomial::term(rr, Monomial().with_exponent(slot, 1, 2),
                                    static_cast<int64_t>(pow_u64(2, rr.m - k)));
    return u;
  }
  static HierarchyOperator cnot_op(PhaseRing r, uint32_t control, uint32_t target) {
    HierarchyOperator u(r);
    u.linear = LinearMap::identity(r.p, std::max(control, target) + 1);
    u.linear.rows[target][control] = 1;
    return u;
  }
  static HierarchyOperator swap_op(PhaseRing r, uint32_t a, uint32_t b) {
    HierarchyOperator u(r);
    u.linear = LinearMap::identity(r.p, std::max(a, b) + 1);
    u.linear.rows[a][a] = 0;
    u.linear.rows[b][b] = 0;
    u.linear.rows[a][b] = 1;
    u.linear.rows[b][a] = 1;
    return u;
  }
  // |q> -> |lambda q> on one slot (qudit multiplication gate).
  static HierarchyOperator scale_op(PhaseRing r, uint32_t slot, uint32_t lambda) {
    if (lambda % r.p == 0) throw std::invalid_argument("scale_op: lambda must be a unit");
    HierarchyOperator u(r);
    u.linear = LinearMap::identity(r.p, slot + 1);
    u.linear.rows[slot][slot] = lambda % r.p;
    return u;
  }
};

// ---- core algebra ----------------------------------------------------------

inline HierarchyOperator multiply(const HierarchyOperator& U0, const HierarchyOperator& V0) {
  if (U0.ring.p != V0.ring.p)
    throw std::invalid_argument("multiply: incompatible primes");
  PhaseRing r = PhaseRing::join(U0.ring, V0.ring);
  HierarchyOperator U = U0.lifted(r), V = V0.lifted(r);
  size_t n = std::max(U.slot_span(), V.slot_span());
  U.linear.ensure(n);
  V.linear.ensure(n);
  U.x_part.resize(n, 0);
  V.x_part.resize(n, 0);

  // (U V)|q> = w^{fV(q) + fU(LV q + aV)} |LU LV q + LU aV + aU>
  HierarchyOperator W(r);
  W.linear = U.linear.times(V.linear);
  std::vector<uint32_t> shift = U.linear.apply(V.x_part);
  W.x_part.resize(n, 0);
  for (size_t i = 0; i < n; ++i) W.x_part[i] = (shift[i] + U.x_part[i]) % r.p;

  PhasePolynomial fU = U.phase;
  if (!V.linear.is_identity()) {
    std::vector<PhasePolynomial> forms(n, PhasePolynomial(r));
    for (size_t i = 0; i < n; ++i) {
      std::vector<uint32_t> coeffs(n, 0);
      for (size_t j = 0; j < n; ++j) coeffs[j] = V.linear.at(i, j);
      forms[i] = PhasePolynomial::affine_form(r, coeffs, V.x_part[i]);
    }
    fU = fU.substituted(forms);
  } else {
    fU = fU.shifted(V.x_part);
  }
  W.phase = fU + V.phase;
  W.normalize();
  return W;
}

inline HierarchyOperator inverse(const HierarchyOperator& U0) {
  HierarchyOperator U = U0;
  size_t n = U.slot_span();
  U.linear.ensure(n);
  U.x_part.resize(n, 0);
  auto linv = U.linear.inverse();
  if (!linv) throw std::domain_error("inverse: linear part not invertible");

  // U^{-1}|q> = w^{-f(L^{-1}(q-a))} |L^{-1}(q-a)>
  HierarchyOperator W(U.ring);
  W.linear = *linv;
  std::vector<uint32_t> na(n);
  for (size_t i = 0; i < n; ++i) na[i] = (U.ring.p - U.x_part[i] % U.ring.p) % U.ring.p;
  W.x_part = W.linear.apply(na);

  std::vector<PhasePolynomial> forms(n, PhasePolynomial(U.ring));
  for (size_t i = 0; i < n; ++i) {
    std::vector<uint32_t> coeffs(n, 0);
    for (size_t j = 0; j < n; ++j) coeffs[j] = W.linear.at(i, j);
    forms[i] = PhasePolynomial::affine_form(U.ring, coeffs, W.x_part[i]);
  }
  W.phase = U.phase.substituted(forms).negated();
  W.normalize();
  return W;
}

// Unitary monomial operators: dagger coincides with the inverse.
inline HierarchyOperator dagger(const HierarchyOperator& U) { return inverse(U); }

inline HierarchyOperator square(const HierarchyOperator& U) { return multiply(U, U); }

inline HierarchyOperator power(const HierarchyOperator& U, uint32_t k) {
  HierarchyOperator r = HierarchyOperator::identity(U.ring);
  for (uint32_t i = 0; i < k; ++i) r = multiply(r, U);
  return r;
}

// Group commutator K(U, V) = U V U^dag V^dag.
inline HierarchyOperator group_commutator(const HierarchyOperator& U, const HierarchyOperator& V) {
  return multiply(multiply(U, V), multiply(dagger(U), dagger(V)));
}

// U A U^dag.
inline HierarchyOperator conjugate_by(const HierarchyOperator& U, const HierarchyOperator& A) {
  return multiply(multiply(U, A), dagger(U));
}

inline bool is_identity(const HierarchyOperator& U) {
  HierarchyOperator n = U;
  n.normalize();
  return !n.has_linear_part() && n.x_translation_trivial() && n.phase.is_zero();
}

// The constant exponent iff U is a pure phase.
inline std::optional<uint64_t> is_phase(const HierarchyOperator& U) {
  HierarchyOperator n = U;
  n.normalize();
  if (n.has_linear_part() || !n.x_translation_trivial() || !n.phase.is_constant())
    return std::nullopt;
  return n.phase.constant_part();
}

inline bool equal_up_to_phase(const HierarchyOperator& U, const HierarchyOperator& V) {
  if (U.ring.p != V.ring.p) return false;
  PhaseRing c = PhaseRing::join(U.ring, V.ring);
  HierarchyOperator a = U.lifted(c), b = V.lifted(c);
  a.phase = a.phase.without_constant();
  b.phase = b.phase.without_constant();
  return a == b;
}

inline bool is_pauli(const HierarchyOperator& U) {
  HierarchyOperator n = U;
  n.normalize();
  if (n.has_linear_part()) return false;
  uint64_t zcoeff = pow_u64(n.ring.p, n.ring.m - 1);
  for (const auto& [mono, c] : n.phase.terms) {
    if (mono.is_constant()) continue;
    if (mono.degree(n.ring.p) > 1) return false;
    if (c % zcoeff != 0) return false;
  }
  return true;
}

// Remap every slot index s -> s + offset.
inline HierarchyOperator shift_slots(const HierarchyOperator& U0, uint32_t offset) {
  if (offset == 0) return U0;
  HierarchyOperator U = U0;
  U.normalize();
  uint32_t shift_bits = (U.ring.p == 2 ? 1 : 4) * offset;
  HierarchyOperator W(U.ring);
  W.x_part.assign(offset, 0);
  W.x_part.insert(W.x_part.end(), U.x_part.begin(), U.x_part.end());
  if (U.has_linear_part()) {
    size_t n = U.linear.rows.size();
    W.linear = LinearMap::identity(U.ring.p, n + offset);
    for (size_t i = 0; i < n; ++i)
      for (size_t j = 0; j < n; ++j) W.linear.rows[i + offset][j + offset] = U.linear.at(i, j);
  }
  W.phase = PhasePolynomial(U.ring);
  for (const auto& [mono, c] : U.phase.terms) {
    if (mono.bits == 0) {
      W.phase.add_term(mono, static_cast<int64_t>(c));
      continue;
    }
    if (shift_bits >= 64 || (mono.bits >> (64 - shift_bits)) != 0)
      throw std::domain_error("shift_slots: slot overflow");
    W.phase.add_term(Monomial(mono.bits << shift_bits), static_cast<int64_t>(c));
  }
  W.normalize();
  return W;
}

// Smallest k with U in C_k of the Clifford hierarchy.  Pure phases and Paulis
// report 1.  Diagonal monomial terms contribute deg + (m - 1 - val(coeff)); a
// nontrivial linear part is Clifford and contributes 2.
inline uint32_t hierarchy_level(const HierarchyOperator& U) {
  HierarchyOperator n = U;
  n.normalize();
  uint32_t lvl = 1;
  if (n.has_linear_part()) lvl = std::max(lvl, 2u);
  for (const auto& [mono, c] : n.phase.terms) {
    if (mono.is_constant()) continue;
    uint32_t w = mono.degree(n.ring.p) + (n.ring.m - 1) - n.ring.valuation(c);
    lvl = std::max(lvl, w);
  }
  return lvl;
}

}  // namespace lplo
