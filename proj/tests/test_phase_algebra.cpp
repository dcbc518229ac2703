#include <catch2/catch_amalgamated.hpp>

#include "lplo/op.hpp"
#include "lplo/text.hpp"
#include "support/dense_oracle.hpp"
#include "support/random_ops.hpp"

using namespace lplo;
using lplo::testing::MonomialMatrix;
using lplo::testing::Rng;
using lplo::testing::to_matrix;

namespace {

const PhaseRing Q1 = PhaseRing::qubit(1);
const PhaseRing Q2 = PhaseRing::qubit(2);
const PhaseRing Q3 = PhaseRing::qubit(3);

HierarchyOperator X(PhaseRing r, uint32_t s) { return HierarchyOperator::x_op(r, s); }
HierarchyOperator Z(PhaseRing r, uint32_t s) { return HierarchyOperator::z_op(r, s); }
HierarchyOperator CZ(PhaseRing r, uint32_t a, uint32_t b) {
  return HierarchyOperator::ckz_op(r, {a, b});
}

HierarchyOperator minus_identity(PhaseRing r) {
  return HierarchyOperator::phase_op(r, static_cast<int64_t>(r.modulus() / 2));
}

}  // namespace

TEST_CASE("X squares to identity") {
  CHECK(is_identity(multiply(X(Q1, 0), X(Q1, 0))));
}

TEST_CASE("Z1 * X1 has x-part and linear phase, squares to -I") {
  auto zx = multiply(Z(Q2, 0), X(Q2, 0));
  CHECK(zx.x_at(0) == 1);
  CHECK_FALSE(zx.phase.is_constant());
  CHECK(square(zx) == minus_identity(Q2));
  // same em composite at m = 1
  auto zx1 = multiply(Z(Q1, 0), X(Q1, 0));
  CHECK(square(zx1) == minus_identity(Q1));
}

TEST_CASE("diagonal product is the sum of phase polynomials, pointwise on 2^4 states") {
  Rng rng(17);
  for (int iter = 0; iter < 50; ++iter) {
    PhasePolynomial f = lplo::testing::random_phase_poly(rng, Q3, 4, 3, 4);
    PhasePolynomial g = lplo::testing::random_phase_poly(rng, Q3, 4, 3, 4);
    HierarchyOperator Df(Q3), Dg(Q3);
    Df.phase = f;
    Dg.phase = g;
    HierarchyOperator prod = multiply(Df, Dg);
    CHECK(prod.is_diagonal());
    for (uint64_t idx = 0; idx < 16; ++idx) {
      auto q = lplo::testing::unpack_point(idx, 2, 4);
      CHECK(prod.phase.eval(q) == (f.eval(q) + g.eval(q)) % Q3.modulus());
    }
  }
}

TEST_CASE("group commutator basics") {
  SECTION("K(X,Z) = -I") {
    CHECK(group_commutator(X(Q1, 0), Z(Q1, 0)) == minus_identity(Q1));
  }
  SECTION("K(CZ_12, X_1) = Z_2") {
    CHECK(group_commutator(CZ(Q1, 0, 1), X(Q1, 0)) == Z(Q1, 1));
    CHECK(group_commutator(CZ(Q2, 0, 1), X(Q2, 0)) == Z(Q2, 1));
  }
  SECTION("K(X_j CZ_ki, X_i CZ_jk) = I") {
    // slots: i=0, j=1, k=2
    auto lhs = multiply(X(Q2, 1), CZ(Q2, 2, 0));
    auto rhs = multiply(X(Q2, 0), CZ(Q2, 1, 2));
    CHECK(is_identity(group_commutator(lhs, rhs)));
  }
}

TEST_CASE("squares from the paper") {
  SECTION("(X_i CZ_jk)^2 = I iff i not in {j,k}") {
    auto disjoint = multiply(X(Q2, 0), CZ(Q2, 1, 2));
    CHECK(is_identity(square(disjoint)));
    auto overlapping = multiply(X(Q2, 0), CZ(Q2, 0, 1));
    CHECK_FALSE(is_identity(square(overlapping)));
    CHECK(square(overlapping) == Z(Q2, 1));
  }
  SECTION("R3^2 = R2") {
    auto r3 = HierarchyOperator::r_op(Q3, 3, 0);
    auto r2 = HierarchyOperator::r_op(Q3, 2, 0);
    CHECK(square(r3) == r2);
  }
  SECTION("R2^2 = Z, R1 = Z") {
    auto r2 = HierarchyOperator::r_op(Q2, 2, 0);
    CHECK(square(r2) == Z(Q2, 0));
    CHECK(HierarchyOperator::r_op(Q1, 1, 0) == Z(Q1, 0));
  }
}

TEST_CASE("hierarchy levels") {
  CHECK(hierarchy_level(X(Q1, 0)) == 1);
  CHECK(hierarchy_level(Z(Q3, 0)) == 1);
  CHECK(hierarchy_level(CZ(Q1, 0, 1)) == 2);
  CHECK(hierarchy_level(HierarchyOperator::ckz_op(Q1, {0, 1, 2})) == 3);
  CHECK(hierarchy_level(HierarchyOperator::r_op(Q3, 3, 0)) == 3);
  CHECK(hierarchy_level(HierarchyOperator::r_op(Q2, 2, 0)) == 2);
  CHECK(hierarchy_level(HierarchyOperator::cnot_op(Q1, 0, 1)) == 2);
  CHECK(hierarchy_level(HierarchyOperator::phase_op(Q2, 3)) == 1);
  CHECK(hierarchy_level(multiply(X(Q2, 0), CZ(Q2, 1, 2))) == 2);
}

TEST_CASE("is_phase and equality up to phase") {
  CHECK(is_phase(minus_identity(Q1)) == Q1.modulus() / 2);
  CHECK_FALSE(is_phase(Z(Q1, 1)).has_value());
  auto i_z = multiply(HierarchyOperator::phase_op(Q2, 1), Z(Q2, 0));
  CHECK(equal_up_to_phase(i_z, Z(Q2, 0)));
  CHECK(i_z != Z(Q2, 0));
}

TEST_CASE("ring lifting is exact") {
  // Z at m=1 lifted to m=3 equals Z at m=3.
  CHECK(Z(Q1, 0).lifted(Q3) == Z(Q3, 0));
  // mixed-precision product auto-lifts
  auto prod = multiply(Z(Q1, 0), HierarchyOperator::r_op(Q3, 3, 0));
  CHECK(prod.ring.m == 3);
  CHECK(multiply(prod, dagger(HierarchyOperator::r_op(Q3, 3, 0))) == Z(Q3, 0));
}

TEST_CASE("incompatible primes are rejected") {
  CHECK_THROWS_AS(multiply(X(Q1, 0), X(PhaseRing::qudit(3), 0)), std::invalid_argument);
}

TEST_CASE("qudit commutation: K(Z,X) = w") {
  PhaseRing t = PhaseRing::qudit(3);
  auto k = group_commutator(Z(t, 0), X(t, 0));
  CHECK(is_phase(k) == 1);
  auto k2 = group_commutator(X(t, 0), Z(t, 0));
  CHECK(is_phase(k2) == 2);  // w^{-1}
}

TEST_CASE("dense oracle equivalence on random operators") {
  Rng rng(3);
  const uint32_t slots = 3;
  for (int iter = 0; iter < 300; ++iter) {
    PhaseRing ring = (iter % 3 == 0) ? PhaseRing::qudit(3) : PhaseRing::qubit(1 + iter % 3);
    auto U = lplo::testing::random_operator(rng, ring, slots, 3, iter % 2 == 0);
    auto V = lplo::testing::random_operator(rng, ring, slots, 3, iter % 2 == 1);
    auto MU = to_matrix(U, slots), MV = to_matrix(V, slots);

    CHECK(to_matrix(multiply(U, V), slots) == MU.times(MV));
    CHECK(to_matrix(dagger(U), slots) == MU.dagger());
    CHECK(to_matrix(square(U), slots) == MU.times(MU));
    CHECK(to_matrix(group_commutator(U, V), slots) ==
          MU.times(MV).times(MU.dagger()).times(MV.dagger()));
  }
}

TEST_CASE("associativity and definitional round trip") {
  Rng rng(11);
  for (int iter = 0; iter < 200; ++iter) {
    PhaseRing ring = PhaseRing::qubit(1 + iter % 3);
    auto A = lplo::testing::random_operator(rng, ring, 4, 3, true);
    auto B = lplo::testing::random_operator(rng, ring, 4, 3, false);
    auto C = lplo::testing::random_operator(rng, ring, 4, 2, true);
    CHECK(multiply(multiply(A, B), C) == multiply(A, multiply(B, C)));
    // K(U,V) (VU) = UV
    CHECK(multiply(group_commutator(A, B), multiply(B, A)) == multiply(A, B));
    CHECK(is_identity(multiply(A, inverse(A))));
  }
}

TEST_CASE("square identity (AB)^2 = A^2 K(Adag, B) B^2") {
  Rng rng(23);
  for (int iter = 0; iter < 200; ++iter) {
    PhaseRing ring = (iter % 4 == 0) ? PhaseRing::qudit(3) : PhaseRing::qubit(1 + iter % 4);
    auto A = lplo::testing::random_operator(rng, ring, 4, 3, true);
    auto B = lplo::testing::random_operator(rng, ring, 4, 3, true);
    auto lhs = square(multiply(A, B));
    auto rhs = multiply(multiply(square(A), group_commutator(dagger(A), B)), square(B));
    CHECK(lhs == rhs);
  }
}

TEST_CASE("square identity specializes to (AB)^2 = A^2 K(A,B) B^2 for Hermitian-phase A") {
  Rng rng(29);
  for (int iter = 0; iter < 200; ++iter) {
    PhaseRing ring = PhaseRing::qubit(2 + iter % 2);
    auto A = lplo::testing::random_hermitian_phase_pauli(rng, ring, 4);
    auto B = lplo::testing::random_operator(rng, ring, 4, 3, true);
    auto lhs = square(multiply(A, B));
    auto rhs = multiply(multiply(square(A), group_commutator(A, B)), square(B));
    CHECK(lhs == rhs);
  }
}

TEST_CASE("Pauli commutators are phases; nested commutators are trivial") {
  Rng rng(31);
  for (int iter = 0; iter < 100; ++iter) {
    PhaseRing ring = (iter % 3 == 0) ? PhaseRing::qudit(5) : PhaseRing::qubit(1 + iter % 3);
    auto P = lplo::testing::random_pauli(rng, ring, 4);
    auto Q = lplo::testing::random_pauli(rng, ring, 4);
    auto R = lplo::testing::random_pauli(rng, ring, 4);
    auto K = group_commutator(P, Q);
    CHECK(is_phase(K).has_value());
    CHECK(is_identity(group_commutator(K, R)));
  }
}

TEST_CASE("conjugating a Pauli by a level-k operator drops the level") {
  Rng rng(37);
  for (int iter = 0; iter < 150; ++iter) {
    PhaseRing ring = PhaseRing::qubit(1 + iter % 4);
    auto U = lplo::testing::random_operator(rng, ring, 4, 4, true);
    auto P = lplo::testing::random_pauli(rng, ring, 4);
    uint32_t k = hierarchy_level(U);
    uint32_t got = hierarchy_level(conjugate_by(U, P));
    CHECK(got <= std::max(k > 1 ? k - 1 : 1u, 1u));
  }
}

TEST_CASE("text rendering of standard operators") {
  CHECK(render(HierarchyOperator::identity(Q1)) == "I");
  CHECK(render(X(Q1, 0)) == "X1");
  CHECK(render(Z(Q2, 1)) == "Z2");
  CHECK(render(CZ(Q1, 1, 2)) == "CZ{2,3}");
  CHECK(render(HierarchyOperator::ckz_op(Q1, {0, 1, 2})) == "CCZ{1,2,3}");
  CHECK(render(HierarchyOperator::r_op(Q3, 3, 0)) == "R3{1}");
  CHECK(render(HierarchyOperator::cnot_op(Q1, 0, 1)) == "CNOT{1,2}");
  CHECK(render(HierarchyOperator::swap_op(Q1, 0, 2)) == "SWAP{1,3}");
  CHECK(render(multiply(X(Q1, 0), CZ(Q1, 1, 2))) == "X1*CZ{2,3}");
  CHECK(render(multiply(HierarchyOperator::phase_op(Q3, 3), Z(Q3, 1))) == "w^3*Z2");
  PhaseRing t = PhaseRing::qudit(3);
  CHECK(render(HierarchyOperator::scale_op(t, 0, 2)) == "SCALE{1}^2");
}

TEST_CASE("parser round trips") {
  Rng rng(41);
  for (int iter = 0; iter < 200; ++iter) {
    PhaseRing ring = (iter % 3 == 0) ? PhaseRing::qudit(3) : PhaseRing::qubit(1 + iter % 4);
    auto U = lplo::testing::random_operator(rng, ring, 4, 3, true);
    auto back = parse_operator(render(U), ring);
    CHECK(back == U);
  }
  // shortcuts
  CHECK(parse_operator("-1", Q1) == HierarchyOperator::phase_op(Q1, 1));
  CHECK(parse_operator("i", Q2) == HierarchyOperator::phase_op(Q2, 1));
  CHECK(parse_operator("i*Z1", Q2) == multiply(HierarchyOperator::phase_op(Q2, 1), Z(Q2, 0)));
  CHECK_THROWS_AS(parse_operator("FOO{1}", Q1), std::invalid_argument);
}

TEST_CASE("pauli predicate") {
  CHECK(is_pauli(multiply(X(Q2, 0), Z(Q2, 1))));
  CHECK(is_pauli(HierarchyOperator::phase_op(Q2, 1)));
  CHECK_FALSE(is_pauli(CZ(Q2, 0, 1)));
  CHECK_FALSE(is_pauli(HierarchyOperator::r_op(Q2, 2, 0)));
  CHECK_FALSE(is_pauli(HierarchyOperator::cnot_op(Q1, 0, 1)));
}
