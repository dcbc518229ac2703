#pragma once

// Independent wall oracle for the eigenstate sector: enumerate every
// invertible linear map on Z_p^{2n} and keep exactly those preserving the
// S and T data.  Dimension constraints play no role (the precondition is
// that all eigenstate excitations share one dimension), so this checks the
// level-2 classification from the opposite direction: no level iteration,
// no candidate pruning, just a full GL filter.

#include "wall.hpp"

namespace lplo {

struct WallGroupOracle {
  uint64_t candidates = 0;  // |GL(2n, p)| actually enumerated
  std::vector<WallAction> walls;
};

inline WallGroupOracle brute_force_walls(const CodeSpec& spec, uint64_t cap = 2'000'000) {
  auto errs = validate(spec);
  if (!errs.empty()) throw std::invalid_argument("brute_force_walls: invalid spec: " + errs[0]);
  CanonicalSpec cs = canonicalize(spec);
  ExcitationContext ctx = make_context(cs);
  const uint32_t n = 2 * spec.n_factors();
  const uint32_t p = spec.p;
  uint32_t dim0 = ctx.gens.empty() ? 0 : ctx.gens[0].dim;
  for (const auto& g : ctx.gens)
    if (g.dim != dim0)
      throw std::domain_error("brute_force_walls: eigenstate excitations must share one dimension");

  uint64_t total = 1;
  for (uint32_t i = 0; i < n * n; ++i) {
    total *= p;
    if (total > cap * 64) throw std::domain_error("brute_force_walls: GL enumeration too large");
  }

  WallGroupOracle out;
  std::vector<uint32_t> entries(n * n, 0);
  for (uint64_t idx = 0; idx < total; ++idx) {
    uint64_t rest = idx;
    for (uint32_t e = 0; e < n * n; ++e) {
      entries[e] = static_cast<uint32_t>(rest % p);
      rest /= p;
    }
    LinearMap m(p);
    m.ensure(n);
    for (uint32_t r = 0; r < n; ++r)
      for (uint32_t c = 0; c < n; ++c) m.rows[r][c] = entries[r * n + c];
    if (!m.inverse()) continue;
    ++out.candidates;
    WallAction a;
    a.images.resize(n);
    for (uint32_t g = 0; g < n; ++g) {
      Composite c = 0;
      for (uint32_t r = 0; r < n; ++r) c = ctx.with_exponent(c, r, m.rows[r][g]);
      a.images[g] = c;
    }
    // exact S/T filter (no dimension constraints by precondition)
    bool ok = true;
    for (uint32_t g = 0; g < n && ok; ++g)
      ok = exchange_datum(ctx, a.images[g]) == exchange_datum(ctx, ctx.unit(g));
    for (uint32_t g1 = 0; g1 < n && ok; ++g1)
      for (uint32_t g2 = 0; g2 < n && ok; ++g2) {
        if (g1 == g2) continue;
        ok = braiding(ctx, a.images[g1], a.images[g2]) ==
             braiding(ctx, ctx.unit(g1), ctx.unit(g2));
      }
    if (ok && p != 2)
      for (uint32_t g1 = 0; g1 < n && ok; ++g1)
        for (uint32_t g2 = g1 + 1; g2 < n && ok; ++g2)
          ok = exchange_datum(ctx, ctx.combine(a.images[g1], a.images[g2])) ==
               exchange_datum(ctx, ctx.combine(ctx.unit(g1), ctx.unit(g2)));
    if (ok) out.walls.push_back(a);
  }
  std::sort(out.walls.begin(), out.walls.end(),
            [](const WallAction& x, const WallAction& y) { return x.images < y.images; });
  return out;
}

}  // namespace lplo
