#pragma once

// Level-by-level classification of generalised domain walls.
//
// The engine follows the iterative procedure: at each Clifford-hierarchy
// level it searches all admissible mappings from eigenstate generators to
// composites of known excitations, then promotes newly found lower-dimensional
// walls to excitations and repeats.  Completeness at each level is
// established exactly by orbit-stabilizer counting: |W| is the product of the
// per-generator orbit sizes along the stabilizer chain (each orbit element is
// an image value extendable to a full admissible wall), and the canonical
// generator set is verified to generate a group of exactly that order via a
// Schreier-Sims chain over wall actions.  Any shortfall is repaired by
// sifting the recorded witness walls, so non-template walls surface as
// hash-named generators instead of being lost.

#include <chrono>
#include <unordered_map>

#include "bounds.hpp"
#include "gate.hpp"

namespace lplo {

struct ClassifyOptions {
  uint32_t max_level = 0;           // 0: use the level bound floor(d/(a+1))
  uint64_t candidate_cap = 10'000'000;  // per-generator candidate images
  uint64_t closure_cap = 1'000'000;     // full element enumeration cap
  uint64_t node_cap = 50'000'000;       // DFS node budget
  uint32_t jobs = 1;                // parallel width for candidate scans
};

struct WallInfo {
  std::string name;          // canonical-frame name (h1, c{1,2}, s2{1,2}, ...)
  std::string display_name;  // user-frame name with Hadamard decorations
  WallAction action;         // canonical frame
  uint32_t dimension = 0;
  uint32_t level = 2;
  LogicalGate gate;
};

struct ClassificationResult {
  CodeSpec spec;
  CanonicalSpec canonical;
  ExcitationContext ctx;  // final context including promoted labels
  std::vector<WallInfo> generators;
  std::vector<WallInfo> labels;
  std::map<uint32_t, uint64_t> counts;  // level -> |W_level| (cumulative)
  uint64_t wall_count = 1;
  uint32_t levels_run = 1;
  bool terminated_early = false;  // a level added nothing before the bound
  bool complete = true;
  std::optional<std::vector<WallAction>> elements;  // when small enough
  BoundReport bounds;
  double elapsed_ms = 0;
};

class CapExceeded : public std::runtime_error {
 public:
  explicit CapExceeded(const std::string& what) : std::runtime_error(what) {}
};

namespace detail {

// Full wall element: images of every generator (eigenstate + labels).
//
// Products of composite representatives pick up Pauli corrections that a
// plain exponent model cannot see once labels are involved, so the action on
// an arbitrary composite is computed symbolically: conjugation sends the
// canonical product of unit representatives to the same-order product of
// image representatives, which is then decomposed back into a composite.
// Label-free contexts use the exact abelian fast path.
struct Element {
  std::vector<Composite> img;
  bool operator==(const Element& o) const { return img == o.img; }
};

class WallEngine {
 public:
  ExcitationContext ctx;
  ClassifyOptions opt;

  explicit WallEngine(const ExcitationContext& c, const ClassifyOptions& o) : ctx(c), opt(o) {
    rebuild_meta();
  }

  // Chain order: charges first, then fluxes (smaller stabilizer orbits), then
  // nothing else (labels are never base points; the stabilizer of all
  // eigenstate units is trivial).
  std::vector<uint32_t> chain_order;

  void rebuild_meta() {
    chain_order.clear();
    for (uint32_t g = 0; g < ctx.n_eigen; ++g)
      if (ctx.gens[g].species == Species::Charge) chain_order.push_back(g);
    for (uint32_t g = 0; g < ctx.n_eigen; ++g)
      if (ctx.gens[g].species == Species::Flux) chain_order.push_back(g);
    // fast-path eligibility: qubits, representatives without phase
    // conventions, labels that are single 2^{m-1}-monomial diagonals on the
    // factor slots (the stacked-code regime)
    fast_ = ctx.p() == 2 && ctx.spec().boundary.variant != BoundarySpec::Variant::tabled;
    label_masks_.clear();
    for (uint32_t k = 0; k < ctx.n_gens() && fast_; ++k) {
      const auto& gen = ctx.gens[k];
      if (gen.species == Species::Charge || gen.species == Species::Flux) {
        HierarchyOperator r = gen.rep;
        r.normalize();
        if (r.has_linear_part() || r.phase.constant_part() != 0) fast_ = false;
        continue;
      }
      HierarchyOperator r = gen.rep;
      r.normalize();
      PhasePolynomial f = r.phase.without_constant();
      if (r.has_linear_part() || !r.x_translation_trivial() || r.phase.constant_part() != 0 ||
          f.terms.size() != 1 || f.terms[0].second != pow_u64(2, r.ring.m - 1)) {
        fast_ = false;
        continue;
      }
      uint64_t mask = 0;
      for (uint32_t s : f.terms[0].first.support(2)) {
        if (s >= ctx.spec().n_factors()) fast_ = false;
        mask |= uint64_t(1) << s;
      }
      label_masks_[k] = mask;
    }
  }

  bool fast_context() const { return fast_; }

  // ---- representative / datum caches ------------------------------------

  const HierarchyOperator& rep(Composite c) {
    auto it = rep_cache_.find(c);
    if (it != rep_cache_.end()) return it->second;
    return rep_cache_.emplace(c, ctx.representative(c)).first->second;
  }
  const HierarchyOperator& xdatum(Composite c) {
    auto it = xdat_cache_.find(c);
    if (it != xdat_cache_.end()) return it->second;
    HierarchyOperator d = square(rep(c));
    if (ctx.p() != 2) d = multiply(d, inverse(rep(ctx.scale(c, 2))));
    return xdat_cache_.emplace(c, d).first->second;
  }
  void invalidate_caches() {
    rep_cache_.clear();
    xdat_cache_.clear();
    cands_.clear();
    rebuild_meta();
  }

  // ---- fast-path helpers (p = 2, bosonic stacked contexts) -----------------

  // slot masks of the flux / charge content of a composite
  uint64_t flux_mask(Composite c) const {
    uint64_t m = 0;
    for (uint32_t i = 0; i < ctx.spec().n_factors(); ++i)
      if (ctx.exponent(c, 2 * i + 1)) m |= uint64_t(1) << i;
    return m;
  }
  uint64_t charge_mask(Composite c) const {
    uint64_t m = 0;
    for (uint32_t i = 0; i < ctx.spec().n_factors(); ++i)
      if (ctx.exponent(c, 2 * i)) m |= uint64_t(1) << i;
    return m;
  }

  // Exact exchange check for the fast context.  The square of
  // X^V Z^W prod_A C..Z_A is a phase times a diagonal whose F_2 monomial
  // content is sum_A { (A\V) u S : S proper subset of A^V }; the candidate
  // passes iff the content vanishes and the phase (-1)^{|V^W| + #constants}
  // is trivial.
  bool fast_exchange_ok(Composite cand) {
    uint64_t V = flux_mask(cand), W = charge_mask(cand);
    std::set<uint64_t> residue;
    uint32_t const_par = (__builtin_popcountll(V & W)) & 1;
    for (const auto& [k, A] : label_masks_) {
      if (!ctx.exponent(cand, k)) continue;
      uint64_t inter = A & V;
      if (!inter) continue;
      uint64_t rest = A & ~V;
      // subsets S of inter with S != inter
      uint64_t S = 0;
      while (true) {
        if (S != inter) {
          uint64_t mono = rest | S;
          if (mono == 0)
            const_par ^= 1;
          else {
            auto it = residue.find(mono);
            if (it == residue.end())
              residue.insert(mono);
            else
              residue.erase(it);
          }
        }
        if (S == inter) break;
        S = (S - inter) & inter;
      }
    }
    return residue.empty() && const_par == 0;
  }

  // Exact braiding check of a candidate against a *unit* generator in the
  // fast context: only the Pauli phase and label monomials containing the
  // unit's factor matter.
  bool fast_unit_pair_ok(uint32_t unit_gen, Composite cand, uint32_t cand_gen) {
    uint32_t factor = ctx.gens[unit_gen].factor;
    bool unit_is_charge = ctx.gens[unit_gen].species == Species::Charge;
    uint64_t V = flux_mask(cand), W = charge_mask(cand);
    // base phases: K(rep(unit_j), rep(unit_g)) = -1 iff same factor, opposite species
    auto base_anticommutes = [&](uint32_t a, uint32_t b) {
      return ctx.gens[a].factor == ctx.gens[b].factor && ctx.gens[a].species != ctx.gens[b].species;
    };
    bool want = base_anticommutes(unit_gen, cand_gen);
    if (unit_is_charge) {
      // K(Z_f, cand) = (-1)^{V_f}; labels are diagonal and commute with Z
      bool got = (V >> factor) & 1;
      return got == want;
    }
    // K(X_f, cand): phase (-1)^{W_f}; any label monomial containing f leaves
    // an operator residue (distinct labels leave distinct residues)
    for (const auto& [k, A] : label_masks_)
      if (ctx.exponent(cand, k) && ((A >> factor) & 1)) return false;
    bool got = (W >> factor) & 1;
    return got == want;
  }

  // ---- candidate images ---------------------------------------------------

  // All composites that can appear as the image of generator g: components of
  // dimension <= dim(g), top dimension == dim(g), matching exchange datum.
  const std::vector<Composite>& candidates(uint32_t g) {
    auto it = cands_.find(g);
    if (it != cands_.end()) return it->second;
    std::vector<Composite> out;
    if (fast_ && ctx.gens[g].species == Species::Flux) {
      out = flux_candidates_fast(g);
    } else {
      out = candidates_generic(g);
    }
    return cands_.emplace(g, std::move(out)).first->second;
  }

  std::vector<Composite> candidates_generic(uint32_t g) {
    std::vector<uint32_t> allowed;
    for (uint32_t k = 0; k < ctx.n_gens(); ++k)
      if (ctx.gens[k].dim <= ctx.gens[g].dim) allowed.push_back(k);
    uint64_t total = 1;
    for (size_t i = 0; i < allowed.size(); ++i) {
      total *= ctx.p();
      if (total > opt.candidate_cap)
        throw CapExceeded("candidate image space for generator " + ctx.gens[g].name +
                          " exceeds cap (" + std::to_string(opt.candidate_cap) + ")");
    }
    std::vector<Composite> out;
    for (uint64_t idx = 1; idx < total; ++idx) {
      uint64_t rest = idx;
      Composite c = 0;
      for (uint32_t k : allowed) {
        c = ctx.with_exponent(c, k, static_cast<uint32_t>(rest % ctx.p()));
        rest /= ctx.p();
      }
      if (!image_dims_ok(ctx, g, c)) continue;
      if (fast_) {
        if (!fast_exchange_ok(c)) continue;
      } else if (xdatum(c) != xdatum(ctx.unit(g))) {
        continue;
      }
      out.push_back(c);
    }
    return out;
  }

  // Structured enumeration for flux images in the fast context: eigenstate
  // part x admissible label subsets.  For a fixed flux support V, appended
  // labels must either avoid V or combine so the squared residue cancels;
  // the cancelling subsets form the kernel of an F_2 residue matrix.
  std::vector<Composite> flux_candidates_fast(uint32_t g) {
    const uint32_t n = ctx.spec().n_factors();
    const uint32_t j = ctx.gens[g].dim;
    std::vector<uint32_t> labels_ok;
    for (uint32_t k = ctx.n_eigen; k < ctx.n_gens(); ++k)
      if (ctx.gens[k].dim <= j) labels_ok.push_back(k);
    std::vector<Composite> out;
    // enumerate flux parts of top dimension == j, charge parts of dim <= j
    std::vector<uint32_t> flux_slots, charge_slots;
    for (uint32_t i = 0; i < n; ++i) {
      if (ctx.gens[2 * i + 1].dim <= j) flux_slots.push_back(i);
      if (ctx.gens[2 * i].dim <= j) charge_slots.push_back(i);
    }
    for (uint64_t fbits = 0; fbits < (uint64_t(1) << flux_slots.size()); ++fbits) {
      Composite base = 0;
      uint64_t V = 0;
      uint32_t top = 0;
      for (size_t t = 0; t < flux_slots.size(); ++t)
        if ((fbits >> t) & 1) {
          base = ctx.with_exponent(base, 2 * flux_slots[t] + 1, 1);
          V |= uint64_t(1) << flux_slots[t];
          top = std::max(top, ctx.gens[2 * flux_slots[t] + 1].dim);
        }
      // split labels: disjoint from V (free) vs overlapping (kernel-constrained)
      std::vector<uint32_t> free_labels, overlap_labels;
      for (uint32_t k : labels_ok) {
        uint64_t A = label_masks_.at(k);
        (A & V) == 0 ? free_labels.push_back(k) : overlap_labels.push_back(k);
      }
      // residue vectors of overlapping labels over the F_2 monomial space
      std::vector<std::pair<std::set<uint64_t>, uint32_t>> rvec;  // (monomials, const parity)
      for (uint32_t k : overlap_labels) {
        uint64_t A = label_masks_.at(k);
        uint64_t inter = A & V, rest = A & ~V;
        std::set<uint64_t> monos;
        uint32_t cpar = 0;
        uint64_t S = 0;
        while (true) {
          if (S != inter) {
            uint64_t mono = rest | S;
            if (mono == 0)
              cpar ^= 1;
            else {
              auto mit = monos.find(mono);
              if (mit == monos.end())
                monos.insert(mono);
              else
                monos.erase(mit);
            }
          }
          if (S == inter) break;
          S = (S - inter) & inter;
        }
        rvec.push_back({monos, cpar});
      }
      // kernel of the residue map over F_2 (monomial part and constant part)
      std::vector<uint64_t> kernel = residue_kernel(rvec);
      for (uint64_t kel : kernel) {
        Composite with_overlap = base;
        uint32_t cpar = 0;
        for (size_t t = 0; t < overlap_labels.size(); ++t)
          if ((kel >> t) & 1) {
            with_overlap = ctx.with_exponent(with_overlap, overlap_labels[t], 1);
            cpar ^= rvec[t].second;
          }
        for (uint64_t lf = 0; lf < (uint64_t(1) << free_labels.size()); ++lf) {
          Composite with_labels = with_overlap;
          uint32_t ldim = 0;
          for (size_t t = 0; t < free_labels.size(); ++t)
            if ((lf >> t) & 1) {
              with_labels = ctx.with_exponent(with_labels, free_labels[t], 1);
              ldim = std::max(ldim, ctx.gens[free_labels[t]].dim);
            }
          for (uint64_t cb = 0; cb < (uint64_t(1) << charge_slots.size()); ++cb) {
            Composite c = with_labels;
            uint64_t W = 0;
            for (size_t t = 0; t < charge_slots.size(); ++t)
              if ((cb >> t) & 1) {
                c = ctx.with_exponent(c, 2 * charge_slots[t], 1);
                W |= uint64_t(1) << charge_slots[t];
              }
            if (c == 0) continue;
            // exchange phase: (-1)^{|V^W|} times overlap constants
            if (((__builtin_popcountll(V & W) + cpar) & 1) != 0) continue;
            if (!image_dims_ok(ctx, g, c)) continue;
            out.push_back(c);
          }
        }
      }
      if (out.size() > opt.candidate_cap)
        throw CapExceeded("candidate image space for generator " + ctx.gens[g].name +
                          " exceeds cap");
    }
    std::sort(out.begin(), out.end());
    return out;
  }

  // Kernel (as selector bitmasks) of the residue vectors over F_2.
  static std::vector<uint64_t> residue_kernel(
      const std::vector<std::pair<std::set<uint64_t>, uint32_t>>& rvec) {
    if (rvec.empty()) return {0};
    // index monomials
    std::map<uint64_t, size_t> cols;
    for (const auto& [monos, cpar] : rvec)
      for (uint64_t m : monos)
        if (!cols.count(m)) cols[m] = cols.size();
    size_t ncols = cols.size();
    // rows = labels, as bit rows over monomial columns; eliminate
    std::vector<std::vector<uint64_t>> rows;  // packed bitsets
    size_t words = (ncols + 63) / 64;
    std::vector<std::pair<std::vector<uint64_t>, uint64_t>> basis;  // (row, selector)
    std::vector<uint64_t> kernel;
    for (size_t r = 0; r < rvec.size(); ++r) {
      std::vector<uint64_t> row(words, 0);
      for (uint64_t m : rvec[r].first) {
        size_t cix = cols[m];
        row[cix / 64] ^= uint64_t(1) << (cix % 64);
      }
      uint64_t sel = uint64_t(1) << r;
      for (const auto& [bv, bsel] : basis) {
        // reduce by pivot = lowest set bit of bv
        size_t piv = 0;
        while (piv < words && !bv[piv]) ++piv;
        if (piv == words) continue;
        uint64_t bit = bv[piv] & (~bv[piv] + 1);
        if (row[piv] & bit) {
          for (size_t w = 0; w < words; ++w) row[w] ^= bv[w];
          sel ^= bsel;
        }
      }
      bool zero = true;
      for (uint64_t w : row)
        if (w) zero = false;
      if (zero)
        kernel.push_back(sel);
      else
        basis.push_back({row, sel});
    }
    // span of kernel selectors
    std::vector<uint64_t> span{0};
    for (uint64_t k : kernel) {
      size_t sz = span.size();
      for (size_t i = 0; i < sz; ++i) span.push_back(span[i] ^ k);
    }
    std::sort(span.begin(), span.end());
    span.erase(std::unique(span.begin(), span.end()), span.end());
    return span;
  }

  bool pair_ok(uint32_t g1, Composite c1, uint32_t g2, Composite c2) {
    if (fast_ && c1 == ctx.unit(g1)) return fast_unit_pair_ok(g1, c2, g2);
    if (fast_ && c2 == ctx.unit(g2)) return fast_unit_pair_ok(g2, c1, g1);
    if (group_commutator(rep(c1), rep(c2)) !=
        group_commutator(rep(ctx.unit(g1)), rep(ctx.unit(g2))))
      return false;
    if (group_commutator(rep(c2), rep(c1)) !=
        group_commutator(rep(ctx.unit(g2)), rep(ctx.unit(g1))))
      return false;
    if (ctx.p() != 2) {
      if (xdatum(ctx.combine(c1, c2)) != xdatum(ctx.combine(ctx.unit(g1), ctx.unit(g2))))
        return false;
    }
    return true;
  }

  // ---- extendability DFS ----------------------------------------------------

  // Is there a full admissible wall extending the partial assignment?  The
  // chain order carries the identity prefix; `upto` generators (in chain
  // order) are already assigned.
  std::optional<WallAction> extend_to_wall(const std::vector<Composite>& assigned, size_t upto) {
    std::vector<Composite> assign(ctx.n_eigen);
    for (uint32_t g = 0; g < ctx.n_eigen; ++g) assign[g] = ctx.unit(g);
    for (size_t i = 0; i < upto; ++i) assign[chain_order[i]] = assigned[i];
    nodes_ = 0;
    if (dfs(assign, upto)) {
      WallAction a;
      a.images = assign;
      return a;
    }
    return std::nullopt;
  }

 private:
  bool dfs(std::vector<Composite>& assign, size_t next) {
    if (++nodes_ > opt.node_cap) throw CapExceeded("wall search node budget exceeded");
    if (next == chain_order.size()) {
      WallAction a;
      a.images = assign;
      return check_wall(ctx, a).ok;
    }
    uint32_t g = chain_order[next];
    for (Composite cand : candidates(g)) {
      bool ok = true;
      for (size_t i = 0; i < next && ok; ++i)
        ok = pair_ok(chain_order[i], assign[chain_order[i]], g, cand);
      if (!ok) continue;
      assign[g] = cand;
      if (dfs(assign, next + 1)) return true;
    }
    assign[g] = ctx.unit(g);
    return false;
  }

 public:
  // ---- stabilizer-chain candidate sets ---------------------------------------

  // Per generator (in chain order): candidates compatible with the identity
  // prefix.  By orbit-stabilizer, |W| is the product of the per-generator
  // counts of *extendable* candidates; extendability is certified against
  // the generated group's orbits, with a DFS fallback for any outsider.
  std::vector<std::vector<Composite>> prefix_candidates() {
    std::vector<std::vector<Composite>> out(chain_order.size());
    for (size_t i = 0; i < chain_order.size(); ++i) {
      uint32_t g = chain_order[i];
      for (Composite cand : candidates(g)) {
        bool ok = true;
        for (size_t jx = 0; jx < i && ok; ++jx)
          ok = pair_ok(chain_order[jx], ctx.unit(chain_order[jx]), g, cand);
        if (ok) out[i].push_back(cand);
      }
    }
    return out;
  }

  // ---- elements ---------------------------------------------------------------

  Element identity_element() const {
    Element e;
    e.img.resize(ctx.n_gens());
    for (uint32_t k = 0; k < ctx.n_gens(); ++k) e.img[k] = ctx.unit(k);
    return e;
  }

  bool has_labels() const { return ctx.n_gens() > ctx.n_eigen; }

  // Action of an element on an arbitrary composite.  With labels present the
  // canonical product of image representatives is computed in the operator
  // algebra and decomposed back (exact); when no flux content of one image
  // row can collide with label content of another, reordering the product
  // only produces phases and the abelian row combination is already exact.
  Composite apply(const Element& el, Composite c) {
    for (uint32_t k = 0; k < ctx.n_gens(); ++k)
      if (c == ctx.unit(k)) return el.img[k];
    bool abelian_ok = !has_labels();
    if (!abelian_ok && fast_) {
      abelian_ok = true;
      uint64_t seen_flux = 0, seen_labels = 0;
      for (uint32_t k = 0; k < ctx.n_gens() && abelian_ok; ++k) {
        uint32_t e = ctx.exponent(c, k);
        if (!e) continue;
        uint64_t row_flux = flux_mask(el.img[k]);
        uint64_t row_labels = 0;
        for (const auto& [lk, mask] : label_masks_)
          if (ctx.exponent(el.img[k], lk)) row_labels |= mask;
        if ((row_flux & seen_labels) || (row_labels & seen_flux)) abelian_ok = false;
        seen_flux |= row_flux;
        seen_labels |= row_labels;
      }
    }
    if (abelian_ok) {
      Composite out = 0;
      for (uint32_t k = 0; k < ctx.n_gens(); ++k) {
        uint32_t e = ctx.exponent(c, k);
        if (e) out = ctx.combine(out, ctx.scale(el.img[k], e));
      }
      return out;
    }
    HierarchyOperator prod = HierarchyOperator::identity(ctx.ring);
    for (uint32_t k = 0; k < ctx.n_gens(); ++k) {
      uint32_t e = ctx.exponent(c, k);
      if (e) prod = multiply(prod, power(rep(el.img[k]), e));
    }
    return decompose_operator(prod);
  }

  Element compose(const Element& a, const Element& b) {
    Element c;
    c.img.resize(ctx.n_gens());
    for (uint32_t k = 0; k < ctx.n_gens(); ++k) c.img[k] = apply(a, b.img[k]);
    return c;
  }

  Element invert(const Element& a) {
    const uint32_t n = ctx.n_gens();
    // abelianized inverse as first guess
    LinearMap m(ctx.p());
    m.ensure(n);
    for (uint32_t k = 0; k < n; ++k)
      for (uint32_t r = 0; r < n; ++r) m.rows[r][k] = ctx.exponent(a.img[k], r);
    auto inv = m.inverse();
    if (!inv) throw std::logic_error("wall element not invertible");
    Element out;
    out.img.resize(n);
    for (uint32_t k = 0; k < n; ++k) {
      Composite c = 0;
      for (uint32_t r = 0; r < n; ++r) c = ctx.with_exponent(c, r, inv->rows[r][k]);
      out.img[k] = c;
    }
    if (!has_labels()) return out;
    // correct rows until a(out(g)) == unit(g); corrections live strictly
    // lower in the label hierarchy, so this terminates
    for (uint32_t k = 0; k < n; ++k) {
      for (int iter = 0; iter < 8; ++iter) {
        Composite got = apply(a, out.img[k]);
        if (got == ctx.unit(k)) break;
        Composite delta = ctx.combine(got, ctx.inverse_of(ctx.unit(k)));
        // pull the discrepancy back through the abelianized inverse
        Composite pull = 0;
        for (uint32_t r = 0; r < n; ++r) {
          uint32_t e = ctx.exponent(delta, r);
          if (!e) continue;
          Composite col = 0;
          for (uint32_t r2 = 0; r2 < n; ++r2) col = ctx.with_exponent(col, r2, inv->rows[r2][r]);
          pull = ctx.combine(pull, ctx.scale(col, e));
        }
        out.img[k] = ctx.combine(out.img[k], ctx.inverse_of(pull));
        if (iter == 7) throw std::logic_error("element inverse correction did not converge");
      }
    }
    return out;
  }

  // Decompose an operator into the composite excitation whose canonical
  // representative equals it up to a global phase: the translation is matched
  // against flux representatives, linear diagonal terms against charges, and
  // remaining monomials against promoted labels.
  Composite decompose_operator(const HierarchyOperator& V0) {
    HierarchyOperator V = V0;
    V.normalize();
    if (V.has_linear_part())
      throw std::domain_error("decompose_operator: non-diagonal label conjugation unsupported "
                              "(linear-part labels)");
    Composite c = 0;
    // flux part from the translation (flux x-vectors have disjoint supports)
    for (uint32_t s = 0; s < V.x_part.size(); ++s) {
      uint32_t v = V.x_at(s);
      if (!v) continue;
      bool matched = false;
      for (uint32_t k = 0; k < ctx.n_eigen && !matched; ++k) {
        if (ctx.gens[k].species != Species::Flux) continue;
        const HierarchyOperator& r = ctx.gens[k].rep;
        if (r.x_at(s) == 0) continue;
        uint32_t e = static_cast<uint32_t>(v * inv_mod(r.x_at(s), ctx.p()) % ctx.p());
        c = ctx.with_exponent(c, k, e);
        matched = true;
      }
      if (!matched) throw std::domain_error("decompose_operator: unmatched translation slot");
    }
    HierarchyOperator D = multiply(V, inverse(rep_part(c)));
    if (!D.is_diagonal()) throw std::domain_error("decompose_operator: residue not diagonal");
    for (const auto& [mono, coeff] : D.phase.terms) {
      if (mono.is_constant()) continue;
      if (!match_generator_term(mono, coeff, D.ring, c))
        throw std::domain_error("decompose_operator: unmatched diagonal term");
    }
    return c;
  }

 private:
  HierarchyOperator rep_part(Composite c) const {
    HierarchyOperator u = HierarchyOperator::identity(ctx.ring);
    for (uint32_t k = 0; k < ctx.n_gens(); ++k) {
      uint32_t e = ctx.exponent(c, k);
      if (e && ctx.gens[k].species == Species::Flux) u = multiply(u, power(ctx.gens[k].rep, e));
    }
    return u;
  }
  // Match one diagonal monomial against a charge or label representative.
  bool match_generator_term(const Monomial& mono, uint64_t coeff, PhaseRing ring, Composite& c) {
    for (uint32_t k = 0; k < ctx.n_gens(); ++k) {
      if (ctx.gens[k].species == Species::Flux) continue;
      const HierarchyOperator& lr = ctx.gens[k].rep;
      if (!lr.is_diagonal()) continue;
      PhasePolynomial lp = lr.phase.without_constant().lifted(ring);
      if (lp.terms.size() != 1) continue;
      if (!(lp.terms[0].first == mono)) continue;
      uint64_t base = lp.terms[0].second;
      for (uint32_t e = 1; e < ctx.p(); ++e)
        if (base * e % ring.modulus() == coeff % ring.modulus()) {
          c = ctx.with_exponent(c, k, ctx.exponent(c, k) + e);
          return true;
        }
    }
    return false;
  }

 public:
  Element full_element(const WallInfo& w) {
    Element el;
    el.img.resize(ctx.n_gens());
    for (uint32_t g = 0; g < ctx.n_eigen; ++g) el.img[g] = w.action.images[g];
    if (ctx.n_gens() == ctx.n_eigen) return el;
    bool tabled = ctx.spec().boundary.variant == BoundarySpec::Variant::tabled;
    if (!tabled) {
      for (uint32_t k = ctx.n_eigen; k < ctx.n_gens(); ++k) {
        if (w.gate.kind != LogicalGate::Kind::Operator)
          throw std::domain_error("full_element: label conjugation needs an operator-form gate");
        el.img[k] = decompose_operator(conjugate_by(*w.gate.op, ctx.gens[k].rep));
      }
      return el;
    }
    // Tabled codes: labels are factor-local; walls in scope either fix the
    // owning factor or permute factors wholesale, so labels follow their
    // factor.
    auto perm = wall_factor_permutation(ctx, w.action);
    for (uint32_t k = ctx.n_eigen; k < ctx.n_gens(); ++k) {
      uint32_t f = ctx.gens[k].factor;
      uint32_t target = perm ? (*perm)[f] : f;
      if (target == f) {
        el.img[k] = ctx.unit(k);
        continue;
      }
      std::string base;
      for (char ch : ctx.gens[k].name)
        if (!isdigit(static_cast<unsigned char>(ch))) base += ch;
      bool found = false;
      for (uint32_t k2 = ctx.n_eigen; k2 < ctx.n_gens(); ++k2) {
        if (ctx.gens[k2].factor != target) continue;
        std::string base2;
        for (char ch : ctx.gens[k2].name)
          if (!isdigit(static_cast<unsigned char>(ch))) base2 += ch;
        if (base2 == base) {
          el.img[k] = ctx.unit(k2);
          found = true;
          break;
        }
      }
      if (!found) throw std::domain_error("full_element: missing sibling label on permuted factor");
    }
    return el;
  }

  // ---- Schreier-Sims over wall elements --------------------------------------

  struct SSChain {
    std::vector<Composite> base;
    std::vector<std::unordered_map<Composite, Element>> transversal;
    std::vector<std::unordered_map<Composite, Element>> transversal_inv;
    std::vector<std::vector<Element>> gens_at;
    uint64_t order = 1;
  };

  SSChain build_chain(const std::vector<Element>& generators) {
    SSChain ss;
    for (uint32_t idx : chain_order) ss.base.push_back(ctx.unit(idx));
    ss.transversal.resize(ss.base.size());
    ss.transversal_inv.resize(ss.base.size());
    ss.gens_at.resize(ss.base.size());
    ss.gens_at[0] = generators;
    bool dirty = true;
    while (dirty) {
      dirty = false;
      for (size_t i = 0; i < ss.base.size(); ++i) {
        ss.transversal[i].clear();
        ss.transversal_inv[i].clear();
        ss.transversal[i][ss.base[i]] = identity_element();
        std::vector<Composite> frontier{ss.base[i]};
        std::vector<Element> gens;
        for (size_t j = 0; j <= i; ++j)
          for (const auto& g : ss.gens_at[j])
            if (fixes_prefix(g, ss.base, i)) gens.push_back(g);
        while (!frontier.empty()) {
          Composite x = frontier.back();
          frontier.pop_back();
          for (const auto& g : gens) {
            Composite y = apply(g, x);
            if (!ss.transversal[i].count(y)) {
              ss.transversal[i][y] = compose(g, ss.transversal[i].at(x));
              frontier.push_back(y);
            }
          }
        }
      }
      for (size_t i = 0; i < ss.base.size() && !dirty; ++i) {
        std::vector<Element> gens;
        for (size_t j = 0; j <= i; ++j)
          for (const auto& g : ss.gens_at[j])
            if (fixes_prefix(g, ss.base, i)) gens.push_back(g);
        for (const auto& [x, ux] : ss.transversal[i]) {
          for (const auto& g : gens) {
            Composite y = apply(g, x);
            Element schreier = compose(transversal_inverse(ss, i, y), compose(g, ux));
            auto [res, lvl] = sift(ss, schreier, i + 1);
            if (!(res == identity_element())) {
              ss.gens_at[std::min(lvl, ss.base.size() - 1)].push_back(res);
              dirty = true;
              break;
            }
          }
          if (dirty) break;
        }
      }
    }
    ss.order = 1;
    for (const auto& t : ss.transversal) ss.order *= t.size();
    return ss;
  }

  bool fixes_prefix(const Element& g, const std::vector<Composite>& base, size_t i) {
    for (size_t j = 0; j < i; ++j)
      if (apply(g, base[j]) != base[j]) return false;
    return true;
  }

  const Element& transversal_inverse(SSChain& ss, size_t i, Composite x) {
    auto it = ss.transversal_inv[i].find(x);
    if (it != ss.transversal_inv[i].end()) return it->second;
    return ss.transversal_inv[i].emplace(x, invert(ss.transversal[i].at(x))).first->second;
  }

  std::pair<Element, size_t> sift(SSChain& ss, Element el, size_t from = 0) {
    for (size_t i = from; i < ss.base.size(); ++i) {
      Composite x = apply(el, ss.base[i]);
      auto it = ss.transversal[i].find(x);
      if (it == ss.transversal[i].end()) return {el, i};
      el = compose(transversal_inverse(ss, i, x), el);
    }
    return {el, ss.base.size()};
  }

  bool contains(SSChain& ss, const Element& el) {
    auto [res, lvl] = sift(ss, el);
    return res == identity_element();
  }

 private:
  std::unordered_map<Composite, HierarchyOperator> rep_cache_;
  std::unordered_map<Composite, HierarchyOperator> xdat_cache_;
  std::unordered_map<uint32_t, std::vector<Composite>> cands_;
  std::map<uint32_t, uint64_t> label_masks_;
  bool fast_ = false;
  uint64_t nodes_ = 0;
};

}  // namespace detail

// ---- theorem-family emission order ------------------------------------------

inline int template_family_rank(const std::string& name) {
  if (name.empty()) return 99;
  if (name[0] == 'h') return 0;
  if (name.rfind("scale", 0) == 0) return 1;
  if (name[0] == 'p') return 2;
  if (name[0] == 's') return 3;  // s2 < s3 < ... by name
  if (name[0] == 'c') return 4;
  if (name[0] == 'w') return 5;
  return 98;
}

// w-walls and extras are only emitted when independent of what precedes them.
inline bool emit_needs_sift(const std::string& name) {
  return name.empty() || name[0] == 'w' || name.rfind("wall_", 0) == 0;
}

inline std::string decorate_display_name(const CanonicalSpec& cs, const std::string& canonical_name,
                                         const WallAction& action, const ExcitationContext& ctx,
                                         bool gate_names) {
  // Wrap the name with h/H factors for each dualized factor involved.
  std::vector<uint32_t> decorated;
  for (uint32_t i = 0; i < cs.spec.n_factors(); ++i) {
    if (!(i < cs.dual.size() && cs.dual[i])) continue;
    bool involved = false;
    Composite ei = ctx.unit(2 * i), mi = ctx.unit(2 * i + 1);
    if (action.images[2 * i] != ei || action.images[2 * i + 1] != mi) involved = true;
    for (uint32_t g = 0; g < ctx.n_eigen && !involved; ++g)
      if (ctx.exponent(action.images[g], 2 * i) || ctx.exponent(action.images[g], 2 * i + 1))
        if (action.images[g] != ctx.unit(g)) involved = true;
    if (involved) decorated.push_back(i);
  }
  if (decorated.empty()) return canonical_name;
  std::string pre;
  for (uint32_t i : decorated)
    pre += (gate_names ? "H{" : "h{") + std::to_string(i + 1) + "}*";
  return pre + canonical_name + "*" + pre.substr(0, pre.size() - 1);
}

// ---- classify ----------------------------------------------------------------

inline ClassificationResult classify(const CodeSpec& spec, const ClassifyOptions& opt = {}) {
  auto t0 = std::chrono::steady_clock::now();
  {
    auto errs = validate(spec);
    if (!errs.empty()) throw std::invalid_argument("classify: invalid spec: " + errs[0]);
  }
  CanonicalSpec cs = canonicalize(spec);
  ClassificationResult res;
  res.spec = spec;
  res.canonical = cs;
  res.ctx = make_context(cs);
  detail::WallEngine engine(res.ctx, opt);

  const uint32_t a = min_excitation_dim(spec);
  const uint32_t level_bound = std::max(2u, max_level(spec.d, a));
  const uint32_t top_level = opt.max_level ? opt.max_level : level_bound;

  uint64_t prev_count = 0;
  std::vector<WallInfo> emitted;

  auto make_wall_info = [&](const std::string& name, const WallAction& action,
                            const Admissibility& adm) {
    WallInfo w;
    w.name = name;
    w.action = action;
    w.dimension = adm.wall_dimension;
    w.level = adm.level;
    w.gate = wall_to_gate(engine.ctx, action, name, adm.wall_dimension, adm.level);
    return w;
  };

  for (uint32_t level = 2; level <= top_level; ++level) {
    // theorem-family templates admissible at exactly this level
    std::vector<WallTemplate> temps = wall_templates(engine.ctx);
    std::stable_sort(temps.begin(), temps.end(), [](const WallTemplate& x, const WallTemplate& y) {
      return template_family_rank(x.name) < template_family_rank(y.name);
    });
    std::vector<WallInfo> fresh;
    for (const auto& t : temps) {
      if (t.action.is_identity(engine.ctx)) continue;
      bool already = false;
      for (const auto& w : emitted)
        if (w.action == t.action) already = true;
      if (already) continue;
      auto adm = check_wall(engine.ctx, t.action);
      if (!adm.ok || adm.level != level) continue;
      fresh.push_back(make_wall_info(t.name, t.action, adm));
    }

    std::vector<detail::Element> elems;
    auto rebuild_elements = [&]() {
      elems.clear();
      for (const auto& w : emitted) elems.push_back(engine.full_element(w));
    };

    // unconditional theorem families first, then sift-gated families (w)
    for (auto& w : fresh) {
      if (!emit_needs_sift(w.name)) {
        emitted.push_back(w);
        continue;
      }
      rebuild_elements();
      auto ss = engine.build_chain(elems);
      if (!engine.contains(ss, engine.full_element(w))) emitted.push_back(w);
    }

    // completeness: per-generator prefix candidates vs group orbits
    auto prefix = engine.prefix_candidates();
    uint64_t cand_volume = 0;
    for (const auto& list : prefix) cand_volume += list.size();
    bool certified = cand_volume <= opt.closure_cap;
    uint64_t count = 1;

    if (certified) {
      rebuild_elements();
      auto ss = engine.build_chain(elems);
      for (size_t i = 0; i < prefix.size(); ++i) {
        for (Composite cand : prefix[i]) {
          if (ss.transversal[i].count(cand)) continue;
          // outsider: extendable candidates are missing group elements
          std::vector<Composite> assigned;
          for (size_t jx = 0; jx < i; ++jx) assigned.push_back(engine.ctx.unit(engine.chain_order[jx]));
          assigned.push_back(cand);
          auto witness = engine.extend_to_wall(assigned, i + 1);
          if (!witness) continue;  // not a wall image after all
          auto adm = check_wall(engine.ctx, *witness);
          if (!adm.ok) continue;
          WallInfo w = make_wall_info(wall_name(engine.ctx, *witness), *witness, adm);
          emitted.push_back(w);
          rebuild_elements();
          ss = engine.build_chain(elems);
          if (!ss.transversal[i].count(cand))
            throw std::logic_error("classify: witness wall did not extend the orbit");
        }
      }
      // every group orbit point must be a valid prefix candidate
      count = 1;
      for (size_t i = 0; i < prefix.size(); ++i) {
        std::set<Composite> cands(prefix[i].begin(), prefix[i].end());
        for (const auto& [pt, el] : ss.transversal[i])
          if (!cands.count(pt))
            throw std::logic_error("classify: group orbit leaves the admissible candidate set");
        count *= ss.transversal[i].size();
      }
    } else {
      // beyond the certification budget: report the candidate volume bound
      res.complete = false;
      count = 1;
      for (const auto& list : prefix) count *= list.size();
    }

    res.counts[level] = count;
    res.wall_count = count;
    res.levels_run = level;
    if (certified && count == prev_count) {
      res.terminated_early = true;
      break;
    }
    prev_count = count;

    // promote newly found lower-dimensional walls as excitations
    bool promoted = false;
    if (level < top_level) {
      for (const auto& w : emitted) {
        if (w.level != level || w.dimension > spec.d - 2) continue;
        if (w.gate.kind != LogicalGate::Kind::Operator &&
            spec.boundary.variant != BoundarySpec::Variant::tabled)
          continue;
        bool exists = false;
        for (uint32_t k = engine.ctx.n_eigen; k < engine.ctx.n_gens(); ++k)
          if (engine.ctx.gens[k].name == w.name) exists = true;
        if (exists) continue;
        if (engine.ctx.n_gens() + 1 > engine.ctx.max_gens())
          throw CapExceeded("too many promoted labels for packed composites");
        GeneratorInfo label;
        label.species = Species::Label;
        label.factor = 0;
        label.dim = w.dimension;
        label.name = w.name;
        label.level = w.level;
        if (spec.boundary.variant == BoundarySpec::Variant::tabled) {
          // Representatives of tabled non-eigenstate excitations are catalog
          // data (the wall<->gate pairing is orientation-dependent and not
          // derivable from the bulk algebra).
          std::string base;
          std::string digits;
          for (char ch : w.name)
            (isdigit(static_cast<unsigned char>(ch)) ? digits : base) += ch;
          auto it = spec.boundary.representatives.find(base);
          if (it == spec.boundary.representatives.end())
            throw std::domain_error("classify: no tabled representative for label '" + base + "'");
          uint32_t factor = digits.empty() ? 0 : static_cast<uint32_t>(std::stoul(digits)) - 1;
          label.factor = factor;
          label.rep = shift_slots(parse_operator(it->second, engine.ctx.ring),
                                  factor * spec.boundary.qubits_per_factor);
        } else {
          label.rep = *w.gate.op;
        }
        // label representatives must have order p up to phase
        if (!is_phase(power(label.rep, engine.ctx.p())))
          throw std::logic_error("classify: promoted label is not order p up to phase");
        engine.ctx.gens.push_back(label);
        res.labels.push_back(w);
        promoted = true;
      }
      if (promoted) engine.invalidate_caches();
    }
  }

  res.ctx = engine.ctx;
  std::stable_sort(emitted.begin(), emitted.end(), [](const WallInfo& x, const WallInfo& y) {
    if (x.level != y.level) return x.level < y.level;
    int rx = template_family_rank(x.name), ry = template_family_rank(y.name);
    if (rx != ry) return rx < ry;
    return x.name < y.name;
  });
  for (auto& w : emitted)
    w.display_name = decorate_display_name(cs, w.name, w.action, res.ctx, false);
  res.generators = emitted;

  // full element enumeration when small
  if (res.complete && res.wall_count <= opt.closure_cap && res.wall_count <= 200000) {
    std::vector<detail::Element> gens;
    for (const auto& w : emitted) gens.push_back(engine.full_element(w));
    std::map<std::vector<Composite>, detail::Element> seen;
    detail::Element id = engine.identity_element();
    seen.emplace(id.img, id);
    std::vector<detail::Element> frontier{id};
    while (!frontier.empty()) {
      auto cur = frontier.back();
      frontier.pop_back();
      for (const auto& g : gens) {
        auto nxt = engine.compose(g, cur);
        if (seen.count(nxt.img)) continue;
        seen.emplace(nxt.img, nxt);
        frontier.push_back(nxt);
        if (seen.size() > opt.closure_cap) throw CapExceeded("closure enumeration exceeded cap");
      }
    }
    std::vector<WallAction> all;
    all.reserve(seen.size());
    for (const auto& [img, el] : seen) {
      WallAction act;
      act.images.assign(img.begin(), img.begin() + res.ctx.n_eigen);
      all.push_back(act);
    }
    std::sort(all.begin(), all.end(),
              [](const WallAction& x, const WallAction& y) { return x.images < y.images; });
    res.elements = std::move(all);
    if (res.elements->size() != res.wall_count)
      throw std::logic_error("classify: element enumeration disagrees with chain count");
  }

  // bound report over the emitted gates
  res.bounds.d = spec.d;
  res.bounds.a = a;
  res.bounds.admissible_level_cap = level_bound;
  for (const auto& w : res.generators) {
    GateBoundRecord rec;
    rec.name = w.gate.name.empty() ? w.display_name : w.gate.name;
    rec.level = w.gate.level;
    rec.support_dim = w.gate.support_dim;
    rec.support_ok = rec.support_dim >= rec.level * (a + 1);
    rec.level_ok = rec.level <= level_bound;
    rec.saturated = rec.support_dim == rec.level * (a + 1);
    res.bounds.gates.push_back(rec);
    if (!rec.support_ok || !rec.level_ok) res.bounds.all_ok = false;
  }

  res.elapsed_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return res;
}

}  // namespace lplo
