#include <catch2/catch_amalgamated.hpp>

#include "lplo/excitation.hpp"
#include "support/random_ops.hpp"

using namespace lplo;
using lplo::testing::Rng;

namespace {

CodeSpec stack_spec(uint32_t d, uint32_t n, uint32_t M, uint32_t p = 2) {
  CodeSpec s;
  s.name = "stack";
  s.d = d;
  s.p = p;
  for (uint32_t i = 0; i < n; ++i) s.factors.push_back({M, d - 2 - M});
  return s;
}

CodeSpec levin_wen_bulk(uint32_t n_codes) {
  CodeSpec s;
  s.name = "levinwen";
  s.d = 3;
  s.p = 2;
  for (uint32_t i = 0; i < n_codes; ++i) {
    s.factors.push_back({1, 0});
    s.exchange_overrides["e" + std::to_string(i + 1)] = -1;
  }
  s.boundary.variant = BoundarySpec::Variant::tabled;
  s.boundary.qubits_per_factor = 2;
  s.boundary.representatives = {{"e", "i*Z1"}, {"m", "X1"}, {"p", "CZ{1,2}"}};
  return s;
}

}  // namespace

TEST_CASE("eigenstate generators and dimensions") {
  SECTION("single 2D surface code") {
    auto gens = eigenstate_generators(stack_spec(2, 1, 0));
    REQUIRE(gens.size() == 2);
    CHECK(gens[0].name == "e1");
    CHECK(gens[0].dim == 0);
    CHECK(gens[1].name == "m1");
    CHECK(gens[1].dim == 0);
  }
  SECTION("3D surface code with one-dimensional flux") {
    auto gens = eigenstate_generators(stack_spec(3, 1, 1));
    REQUIRE(gens.size() == 2);
    CHECK(gens[0].dim == 0);
    CHECK(gens[1].dim == 1);
  }
  SECTION("no factors -> no generators") {
    auto gens = eigenstate_generators(stack_spec(3, 0, 1));
    CHECK(gens.empty());
  }
  SECTION("dim(e) + dim(m) = d - 2 per factor") {
    for (uint32_t d = 2; d <= 5; ++d)
      for (uint32_t M = 0; M <= d - 2; ++M) {
        auto gens = eigenstate_generators(stack_spec(d, 2, M));
        for (size_t i = 0; i < gens.size(); i += 2)
          CHECK(gens[i].dim + gens[i + 1].dim == d - 2);
      }
  }
  SECTION("malformed spec is rejected") {
    CodeSpec bad = stack_spec(4, 1, 2);
    bad.factors[0].E = 1;  // 2 + 1 != d - 2
    CHECK_THROWS_AS(eigenstate_generators(bad), std::invalid_argument);
  }
}

TEST_CASE("representatives") {
  auto ctx = make_context(canonicalize(stack_spec(2, 1, 0)));
  Composite e = ctx.unit(0), m = ctx.unit(1), em = ctx.combine(e, m);
  CHECK(ctx.representative(e) == HierarchyOperator::z_op(ctx.ring, 0));
  CHECK(ctx.representative(m) == HierarchyOperator::x_op(ctx.ring, 0));
  CHECK(ctx.representative(em) ==
        multiply(HierarchyOperator::z_op(ctx.ring, 0), HierarchyOperator::x_op(ctx.ring, 0)));

  SECTION("Levin-Wen electric charge carries the i convention") {
    auto lw = make_context(canonicalize(levin_wen_bulk(1)));
    auto rep_e = lw.representative(lw.unit(0));
    CHECK(equal_up_to_phase(rep_e, HierarchyOperator::z_op(lw.ring, 0)));
    CHECK(is_phase(square(rep_e)) == lw.ring.modulus() / 2);  // squares to -1
  }

  SECTION("representative is a homomorphism up to phase") {
    Rng rng(5);
    for (uint32_t d = 2; d <= 4; ++d) {
      auto ctx2 = make_context(canonicalize(stack_spec(d, 3, d - 2)));
      for (int iter = 0; iter < 30; ++iter) {
        Composite a = rng.next() & ((1u << ctx2.n_gens()) - 1);
        Composite b = rng.next() & ((1u << ctx2.n_gens()) - 1);
        auto lhs = ctx2.representative(ctx2.combine(a, b));
        auto rhs = multiply(ctx2.representative(a), ctx2.representative(b));
        CHECK(equal_up_to_phase(lhs, rhs));
      }
    }
  }
}

TEST_CASE("exchange and braiding of the single surface code") {
  auto ctx = make_context(canonicalize(stack_spec(2, 1, 0)));
  Composite e = ctx.unit(0), m = ctx.unit(1), em = ctx.combine(e, m);
  CHECK(is_phase(exchange(ctx, em)) == ctx.ring.modulus() / 2);  // -1
  CHECK(is_identity(exchange(ctx, e)));
  CHECK(is_identity(exchange(ctx, m)));
  CHECK(is_phase(braiding(ctx, e, m)) == ctx.ring.modulus() / 2);  // -1
  CHECK(is_identity(braiding(ctx, e, e)));
}

TEST_CASE("stacked codes: cross-factor braiding is trivial") {
  auto ctx = make_context(canonicalize(stack_spec(3, 2, 1)));
  Composite e1 = ctx.unit(0), m2 = ctx.unit(3);
  CHECK(is_identity(braiding(ctx, e1, m2)));
}

TEST_CASE("Levin-Wen exchange statistics") {
  auto ctx = make_context(canonicalize(levin_wen_bulk(2)));
  Composite e1 = ctx.unit(0), m1 = ctx.unit(1), m2 = ctx.unit(3);
  CHECK(is_phase(exchange(ctx, e1)) == ctx.ring.modulus() / 2);  // fermion
  CHECK(is_identity(exchange(ctx, m1)));
  // T_{em,em} = T_{e,e} S_{e,m} T_{m,m} = (-1)(-1)(+1) = +1
  CHECK(is_identity(exchange(ctx, ctx.combine(e1, m1))));
  // cross-code composite picks up -1: T_{e1 m2} = -T_{m2}
  CHECK(is_phase(exchange(ctx, ctx.combine(e1, m2))) == ctx.ring.modulus() / 2);
}

TEST_CASE("eq:exchid holds for eigenstate a and arbitrary b (p = 2 catalogs)") {
  Rng rng(7);
  for (uint32_t d = 2; d <= 4; ++d) {
    auto ctx = make_context(canonicalize(stack_spec(d, 2, d - 2)));
    for (uint32_t g = 0; g < ctx.n_gens(); ++g) {
      Composite a = ctx.unit(g);
      for (int iter = 0; iter < 10; ++iter) {
        Composite b = rng.next() & ((1u << ctx.n_gens()) - 1);
        auto lhs = exchange(ctx, ctx.combine(a, b));
        auto rhs = multiply(multiply(exchange(ctx, a), braiding(ctx, a, b)), exchange(ctx, b));
        CHECK(lhs == rhs);
      }
    }
  }
  // and with a fermionic override in play
  auto lw = make_context(canonicalize(levin_wen_bulk(2)));
  for (uint32_t g = 0; g < lw.n_gens(); ++g) {
    Composite a = lw.unit(g);
    for (Composite b = 0; b < (1u << lw.n_gens()); ++b) {
      auto lhs = exchange(lw, lw.combine(a, b));
      auto rhs = multiply(multiply(exchange(lw, a), braiding(lw, a, b)), exchange(lw, b));
      CHECK(lhs == rhs);
    }
  }
}

TEST_CASE("S and T tables of the single surface code match the closed form") {
  auto ctx = make_context(canonicalize(stack_spec(2, 1, 0)));
  auto st = st_matrices(ctx);
  REQUIRE(st.names == std::vector<std::string>{"1", "e1", "m1", "e1*m1"});
  // S = [[1,1,1,1],[1,1,-1,-1],[1,-1,1,-1],[1,-1,-1,1]]
  int expect_S[4][4] = {{1, 1, 1, 1}, {1, 1, -1, -1}, {1, -1, 1, -1}, {1, -1, -1, 1}};
  int expect_T[4] = {1, 1, 1, -1};
  for (int i = 0; i < 4; ++i) {
    auto t = is_phase(st.T[i]);
    REQUIRE(t.has_value());
    CHECK((*t == 0 ? 1 : -1) == expect_T[i]);
    for (int j = 0; j < 4; ++j) {
      auto s = is_phase(st.S[i][j]);
      REQUIRE(s.has_value());
      CHECK((*s == 0 ? 1 : -1) == expect_S[i][j]);
    }
  }
}

TEST_CASE("stacked S/T tables are tensor products of the single-code tables") {
  auto ctx1 = make_context(canonicalize(stack_spec(2, 1, 0)));
  auto ctx2 = make_context(canonicalize(stack_spec(2, 2, 0)));
  auto st1 = st_matrices(ctx1);
  auto st2 = st_matrices(ctx2);
  REQUIRE(st2.names.size() == 16);
  for (int i1 = 0; i1 < 4; ++i1)
    for (int i2 = 0; i2 < 4; ++i2) {
      int i = i1 * 4 + i2;
      CHECK(st2.T[i] == multiply(st1.T[i1], st1.T[i2]));
      for (int j1 = 0; j1 < 4; ++j1)
        for (int j2 = 0; j2 < 4; ++j2) {
          int j = j1 * 4 + j2;
          CHECK(st2.S[i][j] == multiply(st1.S[i1][j1], st1.S[i2][j2]));
        }
    }
}

TEST_CASE("qutrit surface code braiding") {
  auto ctx = make_context(canonicalize(stack_spec(2, 1, 0, 3)));
  Composite e = ctx.unit(0), m = ctx.unit(1);
  CHECK(is_phase(braiding(ctx, e, m)) == 1);  // exp(2 pi i / 3)
  CHECK(is_phase(braiding(ctx, m, e)) == 2);
  // exchange data are spin-normalized phases
  CHECK(is_identity(exchange_datum(ctx, e)));
  CHECK(is_identity(exchange_datum(ctx, m)));
  CHECK(is_phase(exchange_datum(ctx, ctx.combine(e, m))).has_value());
}

TEST_CASE("ST tables export to JSON with canonical names") {
  auto ctx = make_context(canonicalize(stack_spec(2, 1, 0)));
  auto j = st_to_json(st_matrices(ctx));
  CHECK(j["excitations"][3] == "e1*m1");
  CHECK(j["T"][3] == "-1");
  CHECK(j["S"][1][2] == "-1");
}

TEST_CASE("excitation name round trip") {
  auto ctx = make_context(canonicalize(stack_spec(3, 2, 1)));
  Composite c = ctx.combine(ctx.unit(0), ctx.unit(3));
  CHECK(ctx.excitation_name(c) == "e1*m2");
  CHECK(ctx.parse_excitation("e1*m2") == c);
  CHECK(ctx.parse_excitation("1") == Composite(0));
  CHECK_FALSE(ctx.parse_excitation("bogus").has_value());
}

TEST_CASE("st_matrices cap guard") {
  auto ctx = make_context(canonicalize(stack_spec(2, 4, 0)));
  CHECK_THROWS_AS(st_matrices(ctx, 100), std::domain_error);
}
