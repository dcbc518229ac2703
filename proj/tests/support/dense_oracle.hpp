#pragma once

// Independent dense oracle for the operator algebra: every operator in scope
// is a generalized permutation matrix whose nonzero entries are roots of
// unity.  We store, per basis column, the image row and the exact phase
// exponent, and implement composition/inverse directly on these matrices.
// Matrices are built from an operator's *definition* (pointwise evaluation of
// the phase polynomial plus the affine action on basis labels), so agreement
// with the symbolic composition rules is a genuine cross-check.

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "lplo/op.hpp"

namespace lplo::testing {

struct MonomialMatrix {
  uint32_t p = 2;
  uint64_t phase_mod = 2;
  // column q maps to row `row[q]` with phase exponent `exp[q]`
  std::vector<uint64_t> row;
  std::vector<uint64_t> exp;

  size_t dim() const { return row.size(); }

  static MonomialMatrix identity(uint32_t p, uint64_t phase_mod, size_t dim) {
    MonomialMatrix m;
    m.p = p;
    m.phase_mod = phase_mod;
    m.row.resize(dim);
    m.exp.assign(dim, 0);
    for (size_t q = 0; q < dim; ++q) m.row[q] = q;
    return m;
  }

  MonomialMatrix times(const MonomialMatrix& o) const {
    if (dim() != o.dim() || p != o.p || phase_mod != o.phase_mod)
      throw std::invalid_argument("MonomialMatrix: shape mismatch");
    MonomialMatrix r = identity(p, phase_mod, dim());
    for (size_t q = 0; q < dim(); ++q) {
      uint64_t mid = o.row[q];
      r.row[q] = row[mid];
      r.exp[q] = (o.exp[q] + exp[mid]) % phase_mod;
    }
    return r;
  }

  MonomialMatrix dagger() const {
    MonomialMatrix r = identity(p, phase_mod, dim());
    for (size_t q = 0; q < dim(); ++q) {
      r.row[row[q]] = q;
      r.exp[row[q]] = (phase_mod - exp[q]) % phase_mod;
    }
    return r;
  }

  bool operator==(const MonomialMatrix& o) const {
    return p == o.p && phase_mod == o.phase_mod && row == o.row && exp == o.exp;
  }
};

inline std::vector<uint32_t> unpack_point(uint64_t idx, uint32_t p, uint32_t slots) {
  std::vector<uint32_t> q(slots);
  for (uint32_t s = 0; s < slots; ++s) {
    q[s] = static_cast<uint32_t>(idx % p);
    idx /= p;
  }
  return q;
}

inline uint64_t pack_point(const std::vector<uint32_t>& q, uint32_t p) {
  uint64_t idx = 0;
  for (size_t s = q.size(); s-- > 0;) idx = idx * p + (q[s] % p);
  return idx;
}

// Build the dense matrix of U on `slots` qudits by definition.
inline MonomialMatrix to_matrix(const HierarchyOperator& U, uint32_t slots) {
  const uint32_t p = U.ring.p;
  const uint64_t mod = U.ring.modulus();
  uint64_t dim = 1;
  for (uint32_t s = 0; s < slots; ++s) dim *= p;
  MonomialMatrix m = MonomialMatrix::identity(p, mod, dim);
  for (uint64_t idx = 0; idx < dim; ++idx) {
    std::vector<uint32_t> q = unpack_point(idx, p, slots);
    std::vector<uint32_t> out = U.linear.apply(q);
    out.resize(slots, 0);
    for (uint32_t s = 0; s < slots; ++s) out[s] = (out[s] + U.x_at(s)) % p;
    m.row[idx] = pack_point(out, p);
    m.exp[idx] = U.phase.eval(q);
  }
  return m;
}

}  // namespace lplo::testing
