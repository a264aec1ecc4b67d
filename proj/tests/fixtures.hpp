#ifndef QLSLAB_TESTS_FIXTURES_HPP
#define QLSLAB_TESTS_FIXTURES_HPP

#include <cstdint>
#include <vector>

#include "qlslab/blls.hpp"
#include "qlslab/qubo.hpp"
#include "qlslab/rng.hpp"

namespace fixtures {

/// 3-variable golden instance: a small linear system with exact solution
/// x* = (1,1,0) and Ising ground energy -7. Every hand-checked constant
/// in the suites traces back to this problem.
inline qlslab::BllsInstance golden_instance() {
  qlslab::BllsInstance inst;
  inst.a = qlslab::Matrix(3, 3);
  const double a[3][3] = {{2, 1, 1}, {-1, 1, -1}, {1, 2, 3}};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) inst.a(i, j) = a[i][j];
  inst.b = {3, 0, 3};
  inst.x_star = std::vector<int>{1, 1, 0};
  inst.kind = qlslab::InstanceKind::consistent;
  return inst;
}

inline qlslab::IsingProblem golden_ising() {
  return qlslab::qubo_to_ising(qlslab::encode_qubo(golden_instance()));
}

inline qlslab::BllsInstance random_instance(int m, int n, std::uint64_t seed) {
  qlslab::SplitMix64 rng(seed);
  qlslab::BllsInstance inst;
  inst.a = qlslab::Matrix(m, n);
  for (auto& v : inst.a.data) v = rng.next_in(-1.0, 1.0);
  inst.b.resize(m);
  for (auto& v : inst.b) v = rng.next_in(-1.0, 1.0);
  inst.seed = seed;
  return inst;
}

inline qlslab::IsingProblem random_ising(int n, std::uint64_t seed, double scale = 1.0) {
  qlslab::SplitMix64 rng(seed);
  qlslab::IsingProblem p;
  p.h.resize(n);
  for (auto& v : p.h) v = scale * rng.next_in(-1.0, 1.0);
  for (int j = 0; j < n; ++j)
    for (int k = j + 1; k < n; ++k)
      p.j[{j, k}] = scale * rng.next_in(-1.0, 1.0);
  return p;
}

}  // namespace fixtures

#endif  // QLSLAB_TESTS_FIXTURES_HPP
