#ifndef QLSLAB_QUBO_HPP
#define QLSLAB_QUBO_HPP

#include <algorithm>
#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qlslab/blls.hpp"
#include "qlslab/linalg.hpp"

namespace qlslab {

/// F(x) = sum_j v_j x_j + sum_{j<k} w_jk x_j x_k over x in {0,1}^n.
/// `constant` is the additive term dropped from the objective (||b||^2
/// when derived from least squares); it is carried alongside so energies
/// can be mapped back to residuals.
struct QuboProblem {
  std::vector<double> linear;                          // v
  std::map<std::pair<int, int>, double> quadratic;     // w, keys j < k, zeros omitted
  double constant = 0.0;

  int n() const { return static_cast<int>(linear.size()); }
};

/// F(sigma) = sum_j h_j sigma_j + sum_{j<k} J_jk sigma_j sigma_k over
/// spins sigma in {-1,+1}^n, with F_ising(2x-1) + offset = F_qubo(x).
struct IsingProblem {
  std::vector<double> h;
  std::map<std::pair<int, int>, double> j;
  double offset = 0.0;

  int n() const { return static_cast<int>(h.size()); }
};

/// Fixed bit/spin/variable convention, used by every module:
/// a measured bit xi maps to spin sigma = +1 for xi = 0 and sigma = -1
/// for xi = 1 (Z eigenvalues), and the binary variable is x = 1 - xi.
namespace spin_convention {
constexpr int spin_of_bit(int bit) { return 1 - 2 * bit; }
constexpr int variable_of_bit(int bit) { return 1 - bit; }
constexpr int bit_of_variable(int x) { return 1 - x; }
}  // namespace spin_convention

// ---- bitstring helpers -----------------------------------------------------
//
// Index bit order: bit j of a basis-state index is qubit j's measured value.
// Printed bitstrings are qubit-1-first, i.e. character 0 is qubit 0.

inline std::vector<int> bits_of_index(std::uint32_t z, int n) {
  std::vector<int> bits(n);
  for (int j = 0; j < n; ++j) bits[j] = (z >> j) & 1u;
  return bits;
}

inline std::uint32_t index_of_bits(std::span<const int> bits) {
  std::uint32_t z = 0;
  for (std::size_t j = 0; j < bits.size(); ++j)
    if (bits[j]) z |= (1u << j);
  return z;
}

inline std::string bitstring_of_index(std::uint32_t z, int n) {
  std::string s(n, '0');
  for (int j = 0; j < n; ++j)
    if ((z >> j) & 1u) s[j] = '1';
  return s;
}

inline std::uint32_t index_of_bitstring(const std::string& s) {
  std::uint32_t z = 0;
  for (std::size_t j = 0; j < s.size(); ++j) {
    if (s[j] == '1')
      z |= (1u << j);
    else if (s[j] != '0')
      throw std::invalid_argument("bad bitstring: " + s);
  }
  return z;
}

// ---- encodings -------------------------------------------------------------

/// Expands ||A x - b||^2 into QUBO coefficients:
/// v_j = sum_i A_ij (A_ij - 2 b_i), w_jk = 2 sum_i A_ij A_ik,
/// constant = ||b||^2. Zero-valued couplings are omitted.
inline QuboProblem encode_qubo(const BllsInstance& inst) {
  const std::size_t m = inst.m(), n = inst.n();
  QuboProblem q;
  q.linear.assign(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < m; ++i) s += inst.a(i, j) * (inst.a(i, j) - 2.0 * inst.b[i]);
    q.linear[j] = s;
  }
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t k = j + 1; k < n; ++k) {
      double s = 0.0;
      for (std::size_t i = 0; i < m; ++i) s += inst.a(i, j) * inst.a(i, k);
      if (2.0 * s != 0.0)
        q.quadratic[{static_cast<int>(j), static_cast<int>(k)}] = 2.0 * s;
    }
  double bb = 0.0;
  for (double v : inst.b) bb += v * v;
  q.constant = bb;
  return q;
}

/// Substitutes x = (sigma + 1)/2 symbolically. The offset absorbs the
/// constants produced by the substitution; the QUBO `constant` is carried
/// through unchanged on the Ising side of the report.
inline IsingProblem qubo_to_ising(const QuboProblem& q) {
  const int n = q.n();
  IsingProblem p;
  p.h.assign(n, 0.0);
  double offset = 0.0;
  for (int j = 0; j < n; ++j) {
    p.h[j] += q.linear[j] / 2.0;
    offset += q.linear[j] / 2.0;
  }
  for (const auto& [jk, w] : q.quadratic) {
    p.h[jk.first] += w / 4.0;
    p.h[jk.second] += w / 4.0;
    offset += w / 4.0;
    if (w / 4.0 != 0.0) p.j[jk] = w / 4.0;
  }
  p.offset = offset;
  return p;
}

/// Ising energy of a measured bitstring (offset NOT included).
inline double ising_energy(const IsingProblem& p, std::span<const int> bits) {
  if (static_cast<int>(bits.size()) != p.n())
    throw std::invalid_argument("ising_energy: bit length mismatch");
  double e = 0.0;
  for (int j = 0; j < p.n(); ++j) e += p.h[j] * spin_convention::spin_of_bit(bits[j]);
  for (const auto& [jk, jv] : p.j)
    e += jv * spin_convention::spin_of_bit(bits[jk.first]) *
         spin_convention::spin_of_bit(bits[jk.second]);
  return e;
}

inline double ising_energy(const IsingProblem& p, std::uint32_t z) {
  auto bits = bits_of_index(z, p.n());
  return ising_energy(p, bits);
}

struct BruteForceResult {
  double ground_energy = 0.0;
  std::vector<std::uint32_t> ground_states;  // all minimizers, ascending index
};

/// Exact minimum of ising_energy over all 2^n bitstrings, ties preserved.
///
/// The scan walks a Gray code with O(n) incremental energy updates, then
/// re-evaluates near-minimal candidates exactly; the incremental pass can
/// drift by ~1e-7 over 2^24 steps, far below the 1e-5 candidate band.
inline BruteForceResult brute_force_solve(const IsingProblem& p) {
  const int n = p.n();
  if (n < 1 || n > 24) throw std::invalid_argument("brute_force_solve: n out of range");

  // local couplings as adjacency rows for the incremental update
  std::vector<std::vector<std::pair<int, double>>> adj(n);
  for (const auto& [jk, jv] : p.j) {
    adj[jk.first].push_back({jk.second, jv});
    adj[jk.second].push_back({jk.first, jv});
  }

  const std::uint64_t total = 1ull << n;
  std::vector<int> sigma(n, 1);  // z = 0: all bits 0, all spins +1
  double e = 0.0;
  for (int j = 0; j < n; ++j) e += p.h[j];
  for (const auto& [jk, jv] : p.j) e += jv;

  double rough_min = e;
  std::vector<std::uint32_t> candidates;
  const double band = 1e-5;

  // first pass: rough minimum
  {
    double cur = e;
    std::vector<int> s = sigma;
    for (std::uint64_t step = 1; step < total; ++step) {
      int t = __builtin_ctzll(step);  // Gray code flip position
      double local = p.h[t];
      for (const auto& [k, jv] : adj[t]) local += jv * s[k];
      cur += -2.0 * s[t] * local;
      s[t] = -s[t];
      if (cur < rough_min) rough_min = cur;
    }
  }

  // second pass: collect near-minimal candidates
  {
    double cur = e;
    std::vector<int> s = sigma;
    std::uint64_t gray = 0;
    if (cur <= rough_min + band) candidates.push_back(0);
    for (std::uint64_t step = 1; step < total; ++step) {
      int t = __builtin_ctzll(step);
      double local = p.h[t];
      for (const auto& [k, jv] : adj[t]) local += jv * s[k];
      cur += -2.0 * s[t] * local;
      s[t] = -s[t];
      gray ^= (1ull << t);
      if (cur <= rough_min + band) candidates.push_back(static_cast<std::uint32_t>(gray));
    }
  }

  // exact re-evaluation and tie collection at 1e-9
  double ground = 0.0;
  bool first = true;
  std::vector<std::pair<std::uint32_t, double>> exact;
  exact.reserve(candidates.size());
  for (std::uint32_t z : candidates) {
    double ez = ising_energy(p, z);
    exact.push_back({z, ez});
    if (first || ez < ground) {
      ground = ez;
      first = false;
    }
  }
  BruteForceResult res;
  res.ground_energy = ground;
  const double tie_tol = 1e-9;
  for (const auto& [z, ez] : exact)
    if (ez <= ground + tie_tol) res.ground_states.push_back(z);
  std::sort(res.ground_states.begin(), res.ground_states.end());
  return res;
}

/// Energies of all 2^n bitstrings, indexed by basis-state index. Built by
/// direct evaluation (no incremental drift); reused across a QAOA run.
inline std::vector<double> energy_table(const IsingProblem& p) {
  const int n = p.n();
  if (n < 1 || n > 20) throw std::invalid_argument("energy_table: n out of range");
  const std::size_t total = std::size_t{1} << n;
  std::vector<double> e(total, 0.0);

  // accumulate term by term; each term touches every index once
  for (int j = 0; j < n; ++j) {
    const double hj = p.h[j];
    if (hj == 0.0) continue;
    const std::size_t bit = std::size_t{1} << j;
    for (std::size_t z = 0; z < total; ++z) e[z] += (z & bit) ? -hj : hj;
  }
  for (const auto& [jk, jv] : p.j) {
    const std::size_t bj = std::size_t{1} << jk.first;
    const std::size_t bk = std::size_t{1} << jk.second;
    for (std::size_t z = 0; z < total; ++z) {
      bool parity = ((z & bj) != 0) ^ ((z & bk) != 0);
      e[z] += parity ? -jv : jv;
    }
  }
  return e;
}

}  // namespace qlslab

#endif  // QLSLAB_QUBO_HPP
