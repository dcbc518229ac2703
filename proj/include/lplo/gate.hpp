#pragma once

// Logical gates realizing domain walls on stacked boundaries.
//
// Clifford walls that swap species (Hadamard-like) are represented by their
// conjugation tableau: images of the logical X/Z generators as Pauli
// operators.  Walls whose gates stay in the monomial class (CNOT/SWAP-type
// linear parts plus diagonal phase polynomials) are synthesized as explicit
// HierarchyOperators: the linear part from the flux block of the action, the
// diagonal part by solving f(x + b) - f(x) = g_b for the prescribed appended
// operators, verified post hoc by full conjugation.

#include "wall.hpp"

namespace lplo {

// Solve A x = b over Z_{p^m} (A dense, small).  Returns a solution or nullopt.
inline std::optional<std::vector<uint64_t>> solve_mod(std::vector<std::vector<uint64_t>> A,
                                                      std::vector<uint64_t> b, PhaseRing ring) {
  const uint64_t mod = ring.modulus();
  const size_t rows = A.size();
  const size_t cols = rows ? A[0].size() : 0;
  std::vector<size_t> pivot_col;
  size_t r = 0;
  for (size_t c = 0; c < cols && r < rows; ++c) {
    // pivot: minimal p-adic valuation in column c at rows >= r
    size_t best = rows;
    uint32_t best_v = ring.m + 1;
    for (size_t i = r; i < rows; ++i) {
      uint64_t v = A[i][c] % mod;
      if (!v) continue;
      uint32_t val = ring.valuation(v);
      if (val < best_v) {
        best_v = val;
        best = i;
      }
    }
    if (best == rows) continue;
    std::swap(A[r], A[best]);
    std::swap(b[r], b[best]);
    uint64_t unit = (A[r][c] % mod) / pow_u64(ring.p, best_v);
    uint64_t uinv = inv_mod(unit, mod);
    for (size_t j = 0; j < cols; ++j) A[r][j] = A[r][j] * uinv % mod;
    b[r] = b[r] * uinv % mod;  // pivot is now p^{best_v}
    uint64_t piv = pow_u64(ring.p, best_v);
    for (size_t i = 0; i < rows; ++i) {
      if (i == r) continue;
      uint64_t e = A[i][c] % mod;
      if (!e) continue;
      if (ring.valuation(e) < best_v) return std::nullopt;  // cannot eliminate
      uint64_t q = e / piv;
      for (size_t j = 0; j < cols; ++j) A[i][j] = (A[i][j] + (mod - A[r][j] * q % mod)) % mod;
      b[i] = (b[i] + (mod - b[r] * q % mod)) % mod;
    }
    pivot_col.push_back(c);
    ++r;
  }
  for (size_t i = r; i < rows; ++i)
    if (b[i] % mod) return std::nullopt;
  std::vector<uint64_t> x(cols, 0);
  for (size_t i = 0; i < r; ++i) {
    size_t c = pivot_col[i];
    uint64_t piv = A[i][c] % mod;  // p^v
    uint64_t rhs = b[i] % mod;
    // subtract contributions of later columns (free vars are zero)
    if (rhs % piv) return std::nullopt;
    x[c] = rhs / piv;
  }
  return x;
}

struct CliffordTableau {
  PhaseRing ring;
  std::vector<HierarchyOperator> img_x, img_z;  // Pauli images per slot

  uint32_t slots() const { return static_cast<uint32_t>(img_x.size()); }

  // Conjugate a Pauli-type operator through the tableau.
  HierarchyOperator conjugate(const HierarchyOperator& pauli) const {
    if (!is_pauli(pauli)) throw std::invalid_argument("tableau conjugation needs a Pauli operand");
    HierarchyOperator P = pauli;
    P.normalize();
    const uint32_t p = ring.p;
    // canonical decomposition P = w^c * prod X^a * prod Z^b
    std::vector<uint32_t> a(slots(), 0), bz(slots(), 0);
    for (uint32_t s = 0; s < slots(); ++s) a[s] = P.x_at(s);
    uint64_t zunit = pow_u64(p, ring.m - 1);
    for (const auto& [mono, c] : P.phase.terms) {
      if (mono.is_constant()) continue;
      uint32_t s = mono.support(p)[0];
      if (s >= slots()) throw std::invalid_argument("tableau conjugation: slot out of range");
      bz[s] = static_cast<uint32_t>((c / zunit) % p);
    }
    HierarchyOperator canon = HierarchyOperator::identity(ring);
    HierarchyOperator image = HierarchyOperator::identity(ring);
    for (uint32_t s = 0; s < slots(); ++s)
      if (a[s]) {
        canon = multiply(canon, HierarchyOperator::x_op(ring, s, a[s]));
        image = multiply(image, power(img_x[s], a[s]));
      }
    for (uint32_t s = 0; s < slots(); ++s)
      if (bz[s]) {
        canon = multiply(canon, HierarchyOperator::z_op(ring, s, bz[s]));
        image = multiply(image, power(img_z[s], bz[s]));
      }
    auto residual = is_phase(multiply(P, inverse(canon)));
    if (!residual) throw std::logic_error("tableau conjugation: non-Pauli residual");
    return multiply(HierarchyOperator::phase_op(ring, static_cast<int64_t>(*residual)), image);
  }

  // Commutation relations preserved?
  bool symplectic() const {
    for (uint32_t i = 0; i < slots(); ++i)
      for (uint32_t j = 0; j < slots(); ++j) {
        auto want_xz = group_commutator(HierarchyOperator::x_op(ring, i), HierarchyOperator::z_op(ring, j));
        if (group_commutator(img_x[i], img_z[j]) != want_xz) return false;
        if (!is_identity(group_commutator(img_x[i], img_x[j]))) return false;
        if (!is_identity(group_commutator(img_z[i], img_z[j]))) return false;
      }
    return true;
  }
};

struct LogicalGate {
  enum class Kind { Tableau, Operator };
  Kind kind = Kind::Operator;
  std::string name;        // canonical gate name
  uint32_t support_dim = 0;
  uint32_t level = 1;
  std::optional<CliffordTableau> tableau;
  std::optional<HierarchyOperator> op;

  // Conjugate a representative; operand must be Pauli for tableau gates.
  HierarchyOperator conjugate(const HierarchyOperator& A) const {
    if (kind == Kind::Tableau) return tableau->conjugate(A);
    return conjugate_by(*op, A);
  }
};

namespace detail {

inline std::string gate_name_for_wall(const std::string& wall) {
  if (wall.empty()) return wall;
  if (wall == "1") return "I";
  if (wall[0] == 'h') return "H{" + wall.substr(1) + "}";
  if (wall[0] == 'c') return "CNOT" + wall.substr(1);
  if (wall[0] == 'w') return "SWAP" + wall.substr(1);
  if (wall.rfind("s2", 0) == 0) return "CZ" + wall.substr(2);
  if (wall[0] == 's' && wall.size() > 1 && isdigit(static_cast<unsigned char>(wall[1]))) {
    size_t brace = wall.find('{');
    uint32_t k = static_cast<uint32_t>(std::stoul(wall.substr(1, brace - 1)));
    std::string slots = wall.substr(brace);
    return k == 3 ? "CCZ" + slots : "C" + std::to_string(k - 1) + "Z" + slots;
  }
  if (wall.rfind("scale", 0) == 0) {
    size_t caret = wall.find('^');
    return "SCALE{" + wall.substr(5, caret - 5) + "}" + wall.substr(caret);
  }
  return "";
}

}  // namespace detail

// Hadamard-like walls send charges to images with flux (or label) content;
// everything else stays in the monomial operator class.
inline bool wall_swaps_species(const ExcitationContext& ctx, const WallAction& a) {
  for (uint32_t g = 0; g < ctx.n_eigen; ++g) {
    if (ctx.gens[g].species != Species::Charge) continue;
    for (uint32_t k = 0; k < ctx.n_gens(); ++k)
      if (ctx.exponent(a.images[g], k) && ctx.gens[k].species != Species::Charge) return true;
  }
  return false;
}

// The wall as a pure factor permutation, when it is one.
inline std::optional<std::vector<uint32_t>> wall_factor_permutation(const ExcitationContext& ctx,
                                                                    const WallAction& a) {
  const uint32_t n = ctx.spec().n_factors();
  std::vector<uint32_t> perm(n, n);
  for (uint32_t i = 0; i < n; ++i) {
    uint32_t target = n;
    for (uint32_t j = 0; j < n; ++j)
      if (a.images[2 * i] == ctx.unit(2 * j) && a.images[2 * i + 1] == ctx.unit(2 * j + 1))
        target = j;
    if (target == n) return std::nullopt;
    perm[i] = target;
  }
  std::vector<bool> hit(n, false);
  for (uint32_t t : perm) {
    if (hit[t]) return std::nullopt;
    hit[t] = true;
  }
  return perm;
}

namespace detail {

inline std::vector<uint32_t> x_vector(const HierarchyOperator& u, uint32_t slots) {
  std::vector<uint32_t> v(slots, 0);
  for (uint32_t s = 0; s < slots; ++s) v[s] = u.x_at(s);
  return v;
}

// Linear part of a monomial gate: L * xvec(rep(g)) = xvec(rep(image g)) for
// every generator, extended by the identity on a complement of the span.
inline std::optional<LinearMap> solve_linear_part(const ExcitationContext& ctx,
                                                  const WallAction& action, uint32_t slots) {
  const uint32_t p = ctx.p();
  // Pure factor permutations get the block-permutation gate directly; the
  // eigenstate representatives need not span every logical slot (Levin-Wen
  // codes have spectator qubits), so the span-extension below would miss the
  // permutation of those slots.
  if (auto perm = wall_factor_permutation(ctx, action)) {
    uint32_t n = ctx.spec().n_factors();
    uint32_t block = n ? slots / n : 1;
    LinearMap L = LinearMap::identity(p, slots);
    for (uint32_t i = 0; i < n; ++i)
      for (uint32_t q = 0; q < block; ++q) {
        for (uint32_t s = 0; s < slots; ++s) L.rows[(*perm)[i] * block + q][s] = 0;
        L.rows[(*perm)[i] * block + q][i * block + q] = 1;
      }
    return L;
  }
  // Echelon basis of (source, image) x-vector pairs.
  std::vector<std::pair<std::vector<uint32_t>, std::vector<uint32_t>>> basis;
  auto reduce = [&](std::vector<uint32_t>& v, std::vector<uint32_t>& w) {
    for (const auto& [bv, bw] : basis) {
      uint32_t pivot = 0;
      while (pivot < slots && !bv[pivot]) ++pivot;
      if (pivot == slots || !v[pivot]) continue;
      uint32_t c = static_cast<uint32_t>(v[pivot] * inv_mod(bv[pivot], p) % p);
      for (uint32_t s = 0; s < slots; ++s) {
        v[s] = (v[s] + (p - c) * bv[s]) % p;
        w[s] = (w[s] + (p - c) * bw[s]) % p;
      }
    }
  };
  for (uint32_t g = 0; g < ctx.n_eigen; ++g) {
    std::vector<uint32_t> src = x_vector(ctx.representative(ctx.unit(g)), slots);
    std::vector<uint32_t> dst = x_vector(ctx.representative(action.images[g]), slots);
    reduce(src, dst);
    bool src_zero = true, dst_zero = true;
    for (uint32_t s = 0; s < slots; ++s) {
      if (src[s]) src_zero = false;
      if (dst[s]) dst_zero = false;
    }
    if (src_zero) {
      if (!dst_zero) return std::nullopt;  // inconsistent translation constraints
      continue;
    }
    basis.emplace_back(src, dst);
  }
  // Extend by identity on the complement.
  for (uint32_t s = 0; s < slots; ++s) {
    std::vector<uint32_t> unit(slots, 0), img(slots, 0);
    unit[s] = img[s] = 1;
    reduce(unit, img);
    bool zero = true;
    for (uint32_t t = 0; t < slots; ++t)
      if (unit[t]) zero = false;
    if (!zero) basis.emplace_back(unit, img);
  }
  if (basis.size() != slots) return std::nullopt;
  LinearMap V(p), W(p);
  V.ensure(slots);
  W.ensure(slots);
  for (uint32_t c = 0; c < slots; ++c)
    for (uint32_t r = 0; r < slots; ++r) {
      V.rows[r][c] = basis[c].first[r];
      W.rows[r][c] = basis[c].second[r];
    }
  auto vinv = V.inverse();
  if (!vinv) return std::nullopt;
  LinearMap L = W.times(*vinv);
  if (!L.inverse()) return std::nullopt;
  return L;
}

}  // namespace detail

// Synthesize the gate realizing a wall on the stacked (or tabled) boundary.
// Throws domain_error when no realizing operator exists.
inline LogicalGate wall_to_gate(const ExcitationContext& ctx, const WallAction& action,
                                const std::string& wall, uint32_t wall_dim, uint32_t level) {
  const uint32_t n = ctx.spec().n_factors();
  bool tabled = ctx.spec().boundary.variant == BoundarySpec::Variant::tabled;
  uint32_t slots = tabled ? n * ctx.spec().boundary.qubits_per_factor : n;
  LogicalGate gate;
  gate.support_dim = wall_dim + 1;
  gate.level = std::max(level, 1u);
  gate.name = detail::gate_name_for_wall(wall);

  auto E = [&](uint32_t i) { return 2 * i; };
  auto M = [&](uint32_t i) { return 2 * i + 1; };

  if (wall_swaps_species(ctx, action)) {
    // Clifford tableau from the excitation <-> Pauli identification.
    if (tabled) throw std::domain_error("wall_to_gate: species swap unsupported for tabled codes");
    for (uint32_t g = 0; g < ctx.n_eigen; ++g)
      for (uint32_t k = ctx.n_eigen; k < ctx.n_gens(); ++k)
        if (ctx.exponent(action.images[g], k))
          throw std::domain_error("wall_to_gate: species-swapping wall with label images");
    CliffordTableau tab;
    tab.ring = ctx.ring;
    for (uint32_t i = 0; i < n; ++i) {
      tab.img_x.push_back(ctx.representative(action.images[M(i)]));
      tab.img_z.push_back(ctx.representative(action.images[E(i)]));
    }
    if (!tab.symplectic())
      throw std::domain_error("wall_to_gate: no realizing operator (tableau not symplectic)");
    gate.kind = LogicalGate::Kind::Tableau;
    gate.tableau = tab;
    if (gate.name.empty()) gate.name = "clifford_" + wall;
    return gate;
  }

  // Monomial gate U = P_L D_f with U rep(g) U^dag = rep(image g) up to phase:
  //   L xvec(rep g) = xvec(rep image g)         (linear part)
  //   f(x + a_g) - f(x) = h'_g(L x) - h_g(x)    (diagonal part)
  auto L = detail::solve_linear_part(ctx, action, slots);
  if (!L) throw std::domain_error("wall_to_gate: no monomial linear part realizes the wall");

  PhaseRing ring = ctx.ring;
  for (uint32_t g = 0; g < ctx.n_eigen; ++g)
    ring = PhaseRing::join(ring, ctx.representative(action.images[g]).ring);

  std::vector<PhasePolynomial> lforms(slots, PhasePolynomial(ring));
  for (uint32_t r = 0; r < slots; ++r) {
    std::vector<uint32_t> coeffs(slots, 0);
    for (uint32_t c = 0; c < slots; ++c) coeffs[c] = L->at(r, c);
    lforms[r] = PhasePolynomial::affine_form(ring, coeffs, 0);
  }

  std::vector<std::vector<uint32_t>> shifts;
  std::vector<PhasePolynomial> targets;
  std::set<uint32_t> slot_set;
  for (uint32_t g = 0; g < ctx.n_eigen; ++g) {
    HierarchyOperator src = ctx.representative(ctx.unit(g));
    HierarchyOperator img = ctx.representative(action.images[g]);
    if (src.has_linear_part() || img.has_linear_part())
      throw std::domain_error("wall_to_gate: non-diagonal representatives unsupported");
    std::vector<uint32_t> a = detail::x_vector(src, slots);
    std::vector<uint32_t> b = detail::x_vector(img, slots);
    std::vector<uint32_t> la = L->apply(a);
    la.resize(slots, 0);
    if (la != b) throw std::domain_error("wall_to_gate: linear part mismatch");
    PhasePolynomial target =
        img.phase.lifted(ring).substituted(lforms) + src.phase.lifted(ring).negated();
    shifts.push_back(a);
    targets.push_back(target.without_constant());
    for (uint32_t s = 0; s < slots; ++s)
      if (a[s]) slot_set.insert(s);
    for (const auto& [mono, c] : targets.back().terms)
      for (uint32_t s : mono.support(ctx.p())) slot_set.insert(s);
  }

  std::vector<uint32_t> solve_slots(slot_set.begin(), slot_set.end());
  std::vector<Monomial> monos;
  {
    uint64_t total = 1;
    for (size_t i = 0; i < solve_slots.size(); ++i) {
      total *= ctx.p();
      if (total > 4096) throw std::domain_error("wall_to_gate: diagonal solve too large");
    }
    for (uint64_t idx = 1; idx < total; ++idx) {
      uint64_t rest = idx;
      Monomial mo;
      for (uint32_t s : solve_slots) {
        mo = mo.with_exponent(s, static_cast<uint32_t>(rest % ctx.p()), ctx.p());
        rest /= ctx.p();
      }
      monos.push_back(mo);
    }
  }
  std::vector<std::vector<uint64_t>> A;
  std::vector<uint64_t> rhs;
  std::map<uint64_t, size_t> row_index;  // (generator, monomial) -> row
  for (uint32_t i = 0; i < static_cast<uint32_t>(shifts.size()); ++i) {
    auto row_of = [&](const Monomial& mo) -> size_t {
      uint64_t key = (static_cast<uint64_t>(i) << 48) ^ (mo.bits * 0x9e3779b97f4a7c15ull >> 16) ^
                     mo.bits;
      auto it = row_index.find(key);
      if (it != row_index.end()) return it->second;
      size_t r = A.size();
      row_index[key] = r;
      A.emplace_back(monos.size(), 0);
      rhs.push_back(0);
      return r;
    };
    for (size_t u = 0; u < monos.size(); ++u) {
      PhasePolynomial fu = PhasePolynomial::term(ring, monos[u], 1);
      PhasePolynomial delta = fu.shifted(shifts[i]) + fu.negated();
      for (const auto& [mo, c] : delta.terms) {
        if (mo.is_constant()) continue;
        size_t r = row_of(mo);
        A[r][u] = (A[r][u] + c) % ring.modulus();
      }
    }
    for (const auto& [mo, c] : targets[i].terms) {
      size_t r = row_of(mo);
      rhs[r] = (rhs[r] + c) % ring.modulus();
    }
  }
  auto sol = solve_mod(A, rhs, ring);
  if (!sol) throw std::domain_error("wall_to_gate: no realizing operator (diagonal solve failed)");

  HierarchyOperator U(ring);
  U.linear = *L;
  U.linear.p = ring.p;
  U.phase = PhasePolynomial(ring);
  for (size_t u = 0; u < monos.size(); ++u)
    if ((*sol)[u]) U.phase.add_term(monos[u], static_cast<int64_t>((*sol)[u]));
  U.normalize();

  // Post-hoc verification: conjugation matches the wall on every generator.
  for (uint32_t g = 0; g < ctx.n_eigen; ++g) {
    auto want = ctx.representative(action.images[g]);
    auto got = conjugate_by(U, ctx.representative(ctx.unit(g)));
    if (!equal_up_to_phase(want, got))
      throw std::domain_error("wall_to_gate: conjugation check failed on " + ctx.gens[g].name);
  }

  gate.kind = LogicalGate::Kind::Operator;
  gate.op = U;
  uint32_t oplevel = hierarchy_level(U);
  gate.level = std::max(gate.level, oplevel);
  if (gate.name.empty()) gate.name = render(U);
  return gate;
}

}  // namespace lplo
