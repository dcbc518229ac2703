#pragma once

// Generalised domain walls: invertible actions on the excitation generators,
// the dimension rule for generalised walls, and the admissibility checks
// (dimension, invertibility, exchange, braiding) with structured rejections.

#include "excitation.hpp"

namespace lplo {

// Wall dimension needed to transform an l-dimensional region of a
// j-dimensional excitation in a d-dimensional code: k = d - 1 - j + l.
inline uint32_t required_wall_dimension(uint32_t d, uint32_t source_dim, uint32_t appended_dim) {
  return d - 1 - source_dim + appended_dim;
}

// Action on the eigenstate generators (images may involve promoted labels).
struct WallAction {
  std::vector<Composite> images;  // indexed by eigenstate generator

  bool operator==(const WallAction& o) const { return images == o.images; }
  bool is_identity(const ExcitationContext& ctx) const {
    for (uint32_t g = 0; g < images.size(); ++g)
      if (images[g] != ctx.unit(g)) return false;
    return true;
  }
  static WallAction identity(const ExcitationContext& ctx) {
    WallAction a;
    a.images.resize(ctx.n_eigen);
    for (uint32_t g = 0; g < ctx.n_eigen; ++g) a.images[g] = ctx.unit(g);
    return a;
  }
  uint64_t key(const ExcitationContext& ctx) const {
    uint64_t h = 0xcbf29ce484222325ull;
    for (Composite c : images) {
      h ^= c;
      h *= 0x100000001b3ull;
    }
    (void)ctx;
    return h;
  }
};

struct Rejection {
  enum class Kind { Dimension, Invertibility, Exchange, Braiding, PairExchange };
  Kind kind = Kind::Dimension;
  std::string where;  // generator or pair
  std::string lhs, rhs;

  std::string describe() const {
    static const char* names[] = {"dimension", "invertibility", "exchange", "braiding",
                                  "pair-exchange"};
    std::string s = names[static_cast<int>(kind)];
    s += " at " + where;
    if (!lhs.empty() || !rhs.empty()) s += ": " + lhs + " vs " + rhs;
    return s;
  }
};

struct Admissibility {
  bool ok = false;
  std::optional<Rejection> rejection;
  uint32_t wall_dimension = 0;
  uint32_t level = 1;
};

// Dimension rule for one generator image.  Every component of the image must
// have dimension <= dim(g), and the image's top dimension must equal dim(g)
// (walls cannot change excitation dimensionality in either direction).
inline bool image_dims_ok(const ExcitationContext& ctx, uint32_t g, Composite image) {
  if (ctx.is_vacuum(image)) return false;
  uint32_t j = ctx.gens[g].dim;
  uint32_t top = 0;
  for (uint32_t k = 0; k < ctx.n_gens(); ++k)
    if (ctx.exponent(image, k)) {
      if (ctx.gens[k].dim > j) return false;
      top = std::max(top, ctx.gens[k].dim);
    }
  return top == j;
}

// Wall dimension of an action: max over generators of d-1-j+l where l is the
// dimension of the changed content (image * g^{-1}); untouched generators
// contribute nothing.
inline uint32_t wall_dimension_of(const ExcitationContext& ctx, const WallAction& a) {
  const uint32_t d = ctx.spec().d;
  uint32_t dim = 0;
  for (uint32_t g = 0; g < ctx.n_eigen; ++g) {
    Composite delta = ctx.combine(a.images[g], ctx.inverse_of(ctx.unit(g)));
    if (ctx.is_vacuum(delta)) continue;
    dim = std::max(dim, required_wall_dimension(d, ctx.gens[g].dim, ctx.dim_of(delta)));
  }
  return dim;
}

inline uint32_t wall_level_of(const ExcitationContext& ctx, const WallAction& a) {
  if (a.is_identity(ctx)) return 1;
  uint32_t lvl = 2;
  for (uint32_t g = 0; g < ctx.n_eigen; ++g)
    for (uint32_t k = ctx.n_eigen; k < ctx.n_gens(); ++k)
      if (ctx.exponent(a.images[g], k)) lvl = std::max(lvl, ctx.gens[k].level + 1);
  return lvl;
}

inline bool eigen_block_invertible(const ExcitationContext& ctx, const WallAction& a) {
  LinearMap m(ctx.p());
  m.ensure(ctx.n_eigen);
  for (uint32_t g = 0; g < ctx.n_eigen; ++g)
    for (uint32_t k = 0; k < ctx.n_eigen; ++k) m.rows[k][g] = ctx.exponent(a.images[g], k);
  return m.inverse().has_value();
}

inline Admissibility check_wall(const ExcitationContext& ctx, const WallAction& a) {
  Admissibility res;
  auto reject = [&](Rejection::Kind kind, const std::string& where, const std::string& lhs,
                    const std::string& rhs) {
    res.ok = false;
    res.rejection = Rejection{kind, where, lhs, rhs};
    return res;
  };

  for (uint32_t g = 0; g < ctx.n_eigen; ++g)
    if (!image_dims_ok(ctx, g, a.images[g]))
      return reject(Rejection::Kind::Dimension, ctx.gens[g].name,
                    ctx.excitation_name(a.images[g]),
                    "dim " + std::to_string(ctx.gens[g].dim));

  for (uint32_t g = 0; g < ctx.n_eigen; ++g) {
    auto lhs = exchange_datum(ctx, a.images[g]);
    auto rhs = exchange_datum(ctx, ctx.unit(g));
    if (lhs != rhs)
      return reject(Rejection::Kind::Exchange, ctx.gens[g].name, render(lhs), render(rhs));
  }

  for (uint32_t g1 = 0; g1 < ctx.n_eigen; ++g1)
    for (uint32_t g2 = 0; g2 < ctx.n_eigen; ++g2) {
      if (g1 == g2) continue;
      auto lhs = braiding(ctx, a.images[g1], a.images[g2]);
      auto rhs = braiding(ctx, ctx.unit(g1), ctx.unit(g2));
      if (lhs != rhs)
        return reject(Rejection::Kind::Braiding, ctx.gens[g1].name + "," + ctx.gens[g2].name,
                      render(lhs), render(rhs));
    }

  if (ctx.p() != 2) {
    // For odd primes the exchange datum of a composite is not determined by
    // the generator data (spins are a quadratic refinement), so pairs are
    // checked explicitly.
    for (uint32_t g1 = 0; g1 < ctx.n_eigen; ++g1)
      for (uint32_t g2 = g1 + 1; g2 < ctx.n_eigen; ++g2) {
        auto lhs = exchange_datum(ctx, ctx.combine(a.images[g1], a.images[g2]));
        auto rhs = exchange_datum(ctx, ctx.combine(ctx.unit(g1), ctx.unit(g2)));
        if (lhs != rhs)
          return reject(Rejection::Kind::PairExchange,
                        ctx.gens[g1].name + "," + ctx.gens[g2].name, render(lhs), render(rhs));
      }
  }

  if (!eigen_block_invertible(ctx, a))
    return reject(Rejection::Kind::Invertibility, "eigenstate block", "", "");

  res.ok = true;
  res.wall_dimension = wall_dimension_of(ctx, a);
  res.level = wall_level_of(ctx, a);
  return res;
}

// ---- canonical wall templates ------------------------------------------------

struct WallTemplate {
  std::string name;
  WallAction action;
  uint32_t level = 2;  // by construction
};

namespace detail {

inline std::string brace_list(const std::vector<uint32_t>& factors) {
  std::string s = "{";
  for (size_t i = 0; i < factors.size(); ++i)
    s += (i ? "," : "") + std::to_string(factors[i] + 1);
  return s + "}";
}

}  // namespace detail

// All canonical template walls expressible with the current label set.
// Families follow the paper's generator names:
//   h{i}     : e_i <-> m_i
//   scale{i}^l : e_i -> e_i^{1/l}, m_i -> m_i^l (odd primes)
//   p{i}     : m_i -> e_i m_i
//   s<k>A    : m_a -> m_a s^{(k-1)}_{A \ a}  (s2: m_i -> m_i e_j, m_j -> e_i m_j)
//   c{i,j}   : m_i -> m_i m_j, e_j -> e_i e_j
//   w{i,j}   : e_i <-> e_j, m_i <-> m_j
inline std::vector<WallTemplate> wall_templates(const ExcitationContext& ctx) {
  std::vector<WallTemplate> out;
  const uint32_t n = ctx.spec().n_factors();
  auto E = [&](uint32_t i) { return 2 * i; };
  auto M = [&](uint32_t i) { return 2 * i + 1; };
  auto base = [&]() { return WallAction::identity(ctx); };

  for (uint32_t i = 0; i < n; ++i) {
    WallTemplate t;
    t.name = "h" + std::to_string(i + 1);
    t.action = base();
    std::swap(t.action.images[E(i)], t.action.images[M(i)]);
    out.push_back(t);
  }
  if (ctx.p() != 2) {
    for (uint32_t i = 0; i < n; ++i)
      for (uint32_t l = 2; l < ctx.p(); ++l) {
        WallTemplate t;
        t.name = "scale" + std::to_string(i + 1) + "^" + std::to_string(l);
        t.action = base();
        t.action.images[M(i)] = ctx.scale(ctx.unit(M(i)), l);
        t.action.images[E(i)] = ctx.scale(ctx.unit(E(i)), static_cast<uint32_t>(inv_mod(l, ctx.p())));
        out.push_back(t);
      }
  }
  for (uint32_t i = 0; i < n; ++i) {
    WallTemplate t;
    t.name = "p" + std::to_string(i + 1);
    t.action = base();
    t.action.images[M(i)] = ctx.combine(ctx.unit(M(i)), ctx.unit(E(i)));
    out.push_back(t);
  }
  // s2{i,j}
  for (uint32_t i = 0; i < n; ++i)
    for (uint32_t j = i + 1; j < n; ++j) {
      WallTemplate t;
      t.name = "s2" + detail::brace_list({i, j});
      t.action = base();
      t.action.images[M(i)] = ctx.combine(ctx.unit(M(i)), ctx.unit(E(j)));
      t.action.images[M(j)] = ctx.combine(ctx.unit(M(j)), ctx.unit(E(i)));
      out.push_back(t);
    }
  // s<k> for k >= 3 needs every s^{(k-1)} sublabel as a promoted excitation
  for (uint32_t k = 3; k <= n; ++k) {
    std::vector<uint32_t> subset(k);
    // iterate k-subsets of {0..n-1}
    std::function<void(uint32_t, uint32_t)> rec = [&](uint32_t start, uint32_t depth) {
      if (depth == k) {
        WallTemplate t;
        std::vector<uint32_t> fs(subset.begin(), subset.end());
        t.name = "s" + std::to_string(k) + detail::brace_list(fs);
        t.action = base();
        t.level = k;
        for (uint32_t a = 0; a < k; ++a) {
          std::vector<uint32_t> rest;
          for (uint32_t b = 0; b < k; ++b)
            if (b != a) rest.push_back(subset[b]);
          std::string label = "s" + std::to_string(k - 1) + detail::brace_list(rest);
          std::optional<uint32_t> label_gen;
          for (uint32_t g = ctx.n_eigen; g < ctx.n_gens(); ++g)
            if (ctx.gens[g].name == label) label_gen = g;
          if (!label_gen) return;  // sublabel not available yet
          t.action.images[M(subset[a])] =
              ctx.combine(ctx.unit(M(subset[a])), ctx.unit(*label_gen));
        }
        out.push_back(t);
        return;
      }
      for (uint32_t v = start; v + (k - depth) <= n; ++v) {
        subset[depth] = v;
        rec(v + 1, depth + 1);
      }
    };
    rec(0, 0);
  }
  // c{i,j} ordered pairs
  for (uint32_t i = 0; i < n; ++i)
    for (uint32_t j = 0; j < n; ++j) {
      if (i == j) continue;
      WallTemplate t;
      t.name = "c{" + std::to_string(i + 1) + "," + std::to_string(j + 1) + "}";
      t.action = base();
      t.action.images[M(i)] = ctx.combine(ctx.unit(M(i)), ctx.unit(M(j)));
      t.action.images[E(j)] = ctx.combine(ctx.unit(E(j)), ctx.unit(E(i)));
      out.push_back(t);
    }
  // w{i,j}
  for (uint32_t i = 0; i < n; ++i)
    for (uint32_t j = i + 1; j < n; ++j) {
      WallTemplate t;
      t.name = "w" + detail::brace_list({i, j});
      t.action = base();
      std::swap(t.action.images[E(i)], t.action.images[E(j)]);
      std::swap(t.action.images[M(i)], t.action.images[M(j)]);
      out.push_back(t);
    }
  return out;
}

// Canonical name for an arbitrary wall action: a template name when it
// matches one, otherwise a stable hash name.
inline std::string wall_name(const ExcitationContext& ctx, const WallAction& a) {
  if (a.is_identity(ctx)) return "1";
  for (const auto& t : wall_templates(ctx))
    if (t.action == a) return t.name;
  char buf[20];
  std::snprintf(buf, sizeof buf, "wall_%08llx",
                static_cast<unsigned long long>(a.key(ctx) & 0xffffffffull));
  return buf;
}

}  // namespace lplo
