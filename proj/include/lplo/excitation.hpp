#pragma once

// Excitation content of a canonical code spec: eigenstate generators, labels
// for promoted (non-eigenstate) wall excitations, composite excitations as
// packed exponent vectors, logical representatives, and the exchange (T) /
// braiding (S) data computed from squares and group commutators.

#include <functional>

#include "spec.hpp"

namespace lplo {

// A composite excitation: exponents of each known generator, packed like a
// Monomial (1 bit per generator for p = 2, a nibble otherwise).
using Composite = uint64_t;

enum class Species : uint8_t { Charge, Flux, Label };

struct GeneratorInfo {
  Species species = Species::Charge;
  uint32_t factor = 0;   // owning factor for eigenstate generators
  uint32_t dim = 0;      // excitation dimension
  std::string name;      // "e1", "m2", "s2{1,3}", ...
  HierarchyOperator rep; // logical representative (with phase convention)
  uint32_t level = 1;    // Clifford-hierarchy level of the representative's wall
};

class ExcitationContext {
 public:
  CanonicalSpec cspec;
  PhaseRing ring;
  std::vector<GeneratorInfo> gens;  // e1, m1, e2, m2, ..., then labels
  uint32_t n_eigen = 0;

  const CodeSpec& spec() const { return cspec.spec; }
  uint32_t p() const { return ring.p; }
  uint32_t n_gens() const { return static_cast<uint32_t>(gens.size()); }

  uint32_t exp_bits() const { return p() == 2 ? 1 : 4; }
  uint32_t max_gens() const { return p() == 2 ? 64 : 16; }

  uint32_t exponent(Composite c, uint32_t g) const {
    if (p() == 2) return (c >> g) & 1u;
    return (c >> (4 * g)) & 0xfu;
  }
  Composite with_exponent(Composite c, uint32_t g, uint32_t e) const {
    e %= p();
    if (p() == 2) {
      c &= ~(Composite(1) << g);
      if (e) c |= Composite(1) << g;
    } else {
      c &= ~(Composite(0xf) << (4 * g));
      c |= Composite(e) << (4 * g);
    }
    return c;
  }
  Composite unit(uint32_t g) const { return with_exponent(0, g, 1); }

  Composite combine(Composite a, Composite b) const {
    if (p() == 2) return a ^ b;
    Composite r = 0;
    for (uint32_t g = 0; g < n_gens(); ++g)
      r = with_exponent(r, g, exponent(a, g) + exponent(b, g));
    return r;
  }
  Composite inverse_of(Composite a) const {
    if (p() == 2) return a;
    Composite r = 0;
    for (uint32_t g = 0; g < n_gens(); ++g)
      r = with_exponent(r, g, p() - exponent(a, g));
    return r;
  }
  Composite scale(Composite a, uint32_t k) const {
    if (p() == 2) return (k % 2) ? a : 0;
    Composite r = 0;
    for (uint32_t g = 0; g < n_gens(); ++g)
      r = with_exponent(r, g, exponent(a, g) * k);
    return r;
  }

  bool is_vacuum(Composite c) const { return c == 0; }

  // Dimension of a composite: max over contributing generators (vacuum: 0).
  uint32_t dim_of(Composite c) const {
    uint32_t d = 0;
    for (uint32_t g = 0; g < n_gens(); ++g)
      if (exponent(c, g)) d = std::max(d, gens[g].dim);
    return d;
  }

  // Canonical product of per-generator representatives.
  HierarchyOperator representative(Composite c) const {
    HierarchyOperator u = HierarchyOperator::identity(ring);
    for (uint32_t g = 0; g < n_gens(); ++g) {
      uint32_t e = exponent(c, g);
      if (e) u = multiply(u, power(gens[g].rep, e));
    }
    return u;
  }

  std::string excitation_name(Composite c) const {
    if (c == 0) return "1";
    std::string out;
    for (uint32_t g = 0; g < n_gens(); ++g) {
      uint32_t e = exponent(c, g);
      if (!e) continue;
      if (!out.empty()) out += "*";
      out += gens[g].name;
      if (e > 1) out += "^" + std::to_string(e);
    }
    return out;
  }

  std::optional<Composite> parse_excitation(const std::string& text) const {
    if (text == "1") return 0;
    Composite c = 0;
    size_t start = 0;
    while (start <= text.size()) {
      size_t star = text.find('*', start);
      std::string tok = text.substr(start, star == std::string::npos ? std::string::npos : star - start);
      uint32_t e = 1;
      size_t caret = tok.find('^');
      if (caret != std::string::npos) {
        e = static_cast<uint32_t>(std::stoul(tok.substr(caret + 1)));
        tok = tok.substr(0, caret);
      }
      bool found = false;
      for (uint32_t g = 0; g < n_gens(); ++g)
        if (gens[g].name == tok) {
          c = with_exponent(c, g, exponent(c, g) + e);
          found = true;
          break;
        }
      if (!found) return std::nullopt;
      if (star == std::string::npos) break;
      start = star + 1;
    }
    return c;
  }
};

// Eigenstate generators of a canonical spec.  For stacked boundaries factor i
// owns logical slot i; tabled boundaries assign a block of slots per factor
// with representatives read from the table.
inline ExcitationContext make_context(const CanonicalSpec& cs) {
  ExcitationContext ctx;
  ctx.cspec = cs;
  const CodeSpec& spec = cs.spec;
  bool fermionic = false;
  for (const auto& [k, v] : spec.exchange_overrides)
    if (v == -1) fermionic = true;
  ctx.ring = PhaseRing(spec.p, spec.p == 2 && fermionic ? 2 : 1);

  bool tabled = spec.boundary.variant == BoundarySpec::Variant::tabled;
  uint32_t block = tabled ? spec.boundary.qubits_per_factor : 1;
  if (2 * spec.n_factors() > ctx.max_gens())
    throw std::domain_error("make_context: too many factors for packed composites");

  for (uint32_t i = 0; i < spec.n_factors(); ++i) {
    uint32_t slot0 = i * block;
    GeneratorInfo e, m;
    e.species = Species::Charge;
    e.factor = i;
    e.dim = spec.factors[i].E;
    e.name = "e" + std::to_string(i + 1);
    m.species = Species::Flux;
    m.factor = i;
    m.dim = spec.factors[i].M;
    m.name = "m" + std::to_string(i + 1);
    if (tabled) {
      e.rep = shift_slots(parse_operator(spec.boundary.representatives.at("e"), ctx.ring), slot0);
      m.rep = shift_slots(parse_operator(spec.boundary.representatives.at("m"), ctx.ring), slot0);
    } else {
      e.rep = HierarchyOperator::z_op(ctx.ring, slot0);
      m.rep = HierarchyOperator::x_op(ctx.ring, slot0);
      auto ov_e = spec.exchange_overrides.find(e.name);
      if (ov_e != spec.exchange_overrides.end() && ov_e->second == -1)
        e.rep = multiply(HierarchyOperator::phase_op(ctx.ring, static_cast<int64_t>(ctx.ring.modulus() / 4)),
                         e.rep);
      auto ov_m = spec.exchange_overrides.find(m.name);
      if (ov_m != spec.exchange_overrides.end() && ov_m->second == -1)
        m.rep = multiply(HierarchyOperator::phase_op(ctx.ring, static_cast<int64_t>(ctx.ring.modulus() / 4)),
                         m.rep);
    }
    ctx.gens.push_back(e);
    ctx.gens.push_back(m);
  }
  ctx.n_eigen = 2 * spec.n_factors();
  return ctx;
}

inline std::vector<GeneratorInfo> eigenstate_generators(const CodeSpec& spec) {
  auto errs = validate(spec);
  if (!errs.empty()) throw std::invalid_argument("eigenstate_generators: invalid spec: " + errs[0]);
  ExcitationContext ctx = make_context(canonicalize(spec));
  std::vector<GeneratorInfo> out(ctx.gens.begin(), ctx.gens.begin() + ctx.n_eigen);
  // report in the caller's (non-dual) frame
  for (uint32_t i = 0; i < spec.n_factors(); ++i) {
    if (i < ctx.cspec.dual.size() && ctx.cspec.dual[i]) {
      std::swap(out[2 * i].dim, out[2 * i + 1].dim);
      std::swap(out[2 * i].rep, out[2 * i + 1].rep);
    }
  }
  return out;
}

// T_{a,a}: the square of the canonical representative (exchange overrides are
// carried by the representative's phase convention).
inline HierarchyOperator exchange(const ExcitationContext& ctx, Composite a) {
  return square(ctx.representative(a));
}

// S_{a,b}: group commutator of the representatives.
inline HierarchyOperator braiding(const ExcitationContext& ctx, Composite a, Composite b) {
  return group_commutator(ctx.representative(a), ctx.representative(b));
}

// Exchange datum used for wall admissibility comparisons.  For p = 2 this is
// the raw square.  For odd p squares of generalized Paulis are Paulis rather
// than phases, so the datum is normalized by the canonical representative of
// the doubled excitation, leaving the exact topological-spin phase.
inline HierarchyOperator exchange_datum(const ExcitationContext& ctx, Composite a) {
  HierarchyOperator sq = square(ctx.representative(a));
  if (ctx.p() == 2) return sq;
  return multiply(sq, inverse(ctx.representative(ctx.scale(a, 2))));
}

struct STData {
  std::vector<std::string> names;                 // excitation names, tensor order
  std::vector<HierarchyOperator> T;               // exchange data, indexed by excitation
  std::vector<std::vector<HierarchyOperator>> S;  // braiding data, ordered pairs
};

// Full eigenstate-sector tables (p^{2n} excitations; guarded by `cap`).
inline STData st_matrices(const ExcitationContext& ctx, uint64_t cap = 4096) {
  const uint32_t n = ctx.cspec.spec.n_factors();
  uint64_t count = 1;
  for (uint32_t i = 0; i < 2 * n; ++i) {
    count *= ctx.p();
    if (count > cap) throw std::domain_error("st_matrices: excitation count exceeds cap");
  }
  // tensor order: factor 1 is the most significant block; within a factor the
  // order is (1, e, ..., m, em, ...), i.e. block index = m_exp * p + e_exp
  std::vector<Composite> order(count);
  const uint64_t p2 = uint64_t(ctx.p()) * ctx.p();
  for (uint64_t idx = 0; idx < count; ++idx) {
    uint64_t rest = idx;
    Composite c = 0;
    for (uint32_t i = 0; i < n; ++i) {
      uint32_t f = n - 1 - i;  // least significant block = last factor
      uint64_t block = rest % p2;
      rest /= p2;
      c = ctx.with_exponent(c, 2 * f, static_cast<uint32_t>(block % ctx.p()));      // e
      c = ctx.with_exponent(c, 2 * f + 1, static_cast<uint32_t>(block / ctx.p()));  // m
    }
    order[idx] = c;
  }
  STData st;
  st.names.reserve(count);
  st.T.reserve(count);
  for (Composite c : order) {
    st.names.push_back(ctx.excitation_name(c));
    st.T.push_back(exchange(ctx, c));
  }
  st.S.resize(count);
  for (uint64_t i = 0; i < count; ++i) {
    st.S[i].reserve(count);
    for (uint64_t j = 0; j < count; ++j) st.S[i].push_back(braiding(ctx, order[i], order[j]));
  }
  return st;
}

inline json st_to_json(const STData& st) {
  json j;
  j["excitations"] = st.names;
  json T = json::array(), S = json::array();
  for (const auto& t : st.T) T.push_back(render(t));
  for (const auto& row : st.S) {
    json r = json::array();
    for (const auto& s : row) r.push_back(render(s));
    S.push_back(r);
  }
  j["T"] = T;
  j["S"] = S;
  return j;
}

}  // namespace lplo
