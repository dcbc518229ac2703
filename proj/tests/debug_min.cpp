#include <cstdio>

#include "lplo/op.hpp"
#include "support/dense_oracle.hpp"

using namespace lplo;
using namespace lplo::testing;

void report(const char* name, const HierarchyOperator& U, const HierarchyOperator& V, uint32_t slots) {
  auto MU = to_matrix(U, slots), MV = to_matrix(V, slots);
  bool mul_ok = to_matrix(multiply(U, V), slots) == MU.times(MV);
  bool inv_ok = to_matrix(dagger(U), slots) == MU.dagger();
  std::printf("%-30s mul=%d inv=%d\n", name, mul_ok, inv_ok);
}

int main() {
  PhaseRing q2 = PhaseRing::qubit(2);
  PhaseRing t = PhaseRing::qudit(3);

  auto X0 = HierarchyOperator::x_op(q2, 0);
  auto Z0 = HierarchyOperator::z_op(q2, 0);
  auto CZ01 = HierarchyOperator::ckz_op(q2, {0, 1});
  auto CN = HierarchyOperator::cnot_op(q2, 0, 1);
  auto SW = HierarchyOperator::swap_op(q2, 0, 1);

  report("X0 * Z0", X0, Z0, 2);
  report("Z0 * X0", Z0, X0, 2);
  report("CZ * X0", CZ01, X0, 2);
  report("X0 * CZ", X0, CZ01, 2);
  report("CNOT * CZ", CN, CZ01, 2);
  report("CZ * CNOT", CZ01, CN, 2);
  report("CNOT * X0", CN, X0, 2);
  report("X0 * CNOT", X0, CN, 2);
  report("SWAP * CZ", SW, CZ01, 2);
  report("CNOT * SWAP", CN, SW, 2);

  auto Xt = HierarchyOperator::x_op(t, 0);
  auto Zt = HierarchyOperator::z_op(t, 0);
  auto CZt = HierarchyOperator::ckz_op(t, {0, 1});
  auto CNt = HierarchyOperator::cnot_op(t, 0, 1);
  report("qudit X*Z", Xt, Zt, 2);
  report("qudit Z*X", Zt, Xt, 2);
  report("qudit CZ*X", CZt, Xt, 2);
  report("qudit CNOT*CZ", CNt, CZt, 2);
  report("qudit CZ*CNOT", CZt, CNt, 2);
  report("qudit X2*Z2", HierarchyOperator::x_op(t, 0, 2), HierarchyOperator::z_op(t, 0, 2), 1);

  // deg-2 diagonal through CNOT substitution
  auto CCZ = HierarchyOperator::ckz_op(q2, {0, 1, 2});
  auto CN3 = HierarchyOperator::cnot_op(q2, 0, 2);
  report("CCZ * CNOT02", CCZ, CN3, 3);
  report("CNOT02 * CCZ", CN3, CCZ, 3);
  return 0;
}
