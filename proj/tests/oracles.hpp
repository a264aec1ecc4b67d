#ifndef QLSLAB_TESTS_ORACLES_HPP
#define QLSLAB_TESTS_ORACLES_HPP

// Test-only reference implementations, kept independent of the library's
// computation paths: dense matrix algebra for circuit unitaries, a Taylor
// matrix exponential, and an active-set NNLS enumerator.

#include <complex>
#include <stdexcept>
#include <vector>

#include "qlslab/circuit.hpp"
#include "qlslab/qubo.hpp"
#include "qlslab/statevector.hpp"

namespace oracle {

using cd = std::complex<double>;
using qlslab::Circuit;
using qlslab::Gate;
using qlslab::GateKind;

struct CMat {
  std::size_t n = 0;
  std::vector<cd> e;  // row-major n x n

  explicit CMat(std::size_t dim = 0) : n(dim), e(dim * dim) {}

  cd& at(std::size_t i, std::size_t j) { return e[i * n + j]; }
  cd at(std::size_t i, std::size_t j) const { return e[i * n + j]; }

  static CMat identity(std::size_t dim) {
    CMat m(dim);
    for (std::size_t i = 0; i < dim; ++i) m.at(i, i) = 1.0;
    return m;
  }
};

inline CMat mul(const CMat& a, const CMat& b) {
  CMat c(a.n);
  for (std::size_t i = 0; i < a.n; ++i)
    for (std::size_t k = 0; k < a.n; ++k) {
      cd aik = a.at(i, k);
      if (aik == cd{}) continue;
      for (std::size_t j = 0; j < a.n; ++j) c.at(i, j) += aik * b.at(k, j);
    }
  return c;
}

inline std::vector<cd> mat_apply(const CMat& a, const std::vector<cd>& v) {
  std::vector<cd> out(a.n);
  for (std::size_t i = 0; i < a.n; ++i) {
    cd s = 0.0;
    for (std::size_t j = 0; j < a.n; ++j) s += a.at(i, j) * v[j];
    out[i] = s;
  }
  return out;
}

inline double max_abs(const CMat& a) {
  double m = 0.0;
  for (const auto& x : a.e) m = std::max(m, std::abs(x));
  return m;
}

/// exp(A) by scaling-and-squaring with a Taylor series.
inline CMat expm(const CMat& a) {
  double norm = 0.0;
  for (std::size_t i = 0; i < a.n; ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < a.n; ++j) row += std::abs(a.at(i, j));
    norm = std::max(norm, row);
  }
  int s = 0;
  while (std::ldexp(norm, -s) > 0.5) ++s;
  CMat scaled(a.n);
  for (std::size_t i = 0; i < a.e.size(); ++i) scaled.e[i] = std::ldexp(1.0, -s) * a.e[i];

  CMat result = CMat::identity(a.n);
  CMat term = CMat::identity(a.n);
  for (int k = 1; k <= 30; ++k) {
    term = mul(term, scaled);
    for (auto& x : term.e) x /= static_cast<double>(k);
    for (std::size_t i = 0; i < result.e.size(); ++i) result.e[i] += term.e[i];
    if (max_abs(term) < 1e-18) break;
  }
  for (int i = 0; i < s; ++i) result = mul(result, result);
  return result;
}

inline int bit_of(std::size_t z, int q) { return static_cast<int>((z >> q) & 1u); }

/// Dense embedding of a single gate into the full 2^n space, built from
/// the published 2x2 / permutation definitions by index arithmetic.
inline CMat gate_matrix(const Gate& g, int n) {
  const std::size_t dim = std::size_t{1} << n;
  CMat m(dim);
  const cd i1(0.0, 1.0);

  auto fill_1q = [&](cd m00, cd m01, cd m10, cd m11) {
    for (std::size_t zi = 0; zi < dim; ++zi)
      for (std::size_t zj = 0; zj < dim; ++zj) {
        if ((zi & ~(std::size_t{1} << g.q0)) != (zj & ~(std::size_t{1} << g.q0))) continue;
        const int bi = bit_of(zi, g.q0), bj = bit_of(zj, g.q0);
        m.at(zi, zj) = bi == 0 ? (bj == 0 ? m00 : m01) : (bj == 0 ? m10 : m11);
      }
  };

  switch (g.kind) {
    case GateKind::H: {
      const double r = 1.0 / std::sqrt(2.0);
      fill_1q(r, r, r, -r);
      break;
    }
    case GateKind::RX: {
      const double c = std::cos(g.a0 / 2), sn = std::sin(g.a0 / 2);
      fill_1q(c, -i1 * sn, -i1 * sn, c);
      break;
    }
    case GateKind::RZ:
      fill_1q(std::exp(-i1 * (g.a0 / 2)), 0.0, 0.0, std::exp(i1 * (g.a0 / 2)));
      break;
    case GateKind::U1:
      fill_1q(1.0, 0.0, 0.0, std::exp(i1 * g.a0));
      break;
    case GateKind::U3: {
      const double c = std::cos(g.a0 / 2), sn = std::sin(g.a0 / 2);
      fill_1q(c, -std::exp(i1 * g.a2) * sn, std::exp(i1 * g.a1) * sn,
              std::exp(i1 * (g.a1 + g.a2)) * c);
      break;
    }
    case GateKind::CNOT:
      for (std::size_t zj = 0; zj < dim; ++zj) {
        std::size_t zi = zj;
        if (bit_of(zj, g.q0)) zi ^= (std::size_t{1} << g.q1);
        m.at(zi, zj) = 1.0;
      }
      break;
    case GateKind::SWAP:
      for (std::size_t zj = 0; zj < dim; ++zj) {
        std::size_t zi = zj;
        const int ba = bit_of(zj, g.q0), bb = bit_of(zj, g.q1);
        if (ba != bb) zi ^= (std::size_t{1} << g.q0) | (std::size_t{1} << g.q1);
        m.at(zi, zj) = 1.0;
      }
      break;
  }
  return m;
}

/// Full circuit unitary as an ordered dense product.
inline CMat circuit_unitary(const Circuit& c) {
  const std::size_t dim = std::size_t{1} << c.n_qubits;
  CMat u = CMat::identity(dim);
  for (const auto& g : c.gates) u = mul(gate_matrix(g, c.n_qubits), u);
  return u;
}

/// e^{-i beta B} e^{-i gamma C} per layer applied to H^{otimes n}|0..0>,
/// all through dense matrix exponentials. B is the Pauli-X sum; C is
/// diagonal in the provided energies.
inline std::vector<cd> qaoa_reference_state(const qlslab::IsingProblem& ising,
                                            const qlslab::QaoaParams& params) {
  const int n = ising.n();
  const std::size_t dim = std::size_t{1} << n;

  CMat bmat(dim);
  for (int q = 0; q < n; ++q)
    for (std::size_t z = 0; z < dim; ++z) bmat.at(z ^ (std::size_t{1} << q), z) += 1.0;

  // uniform superposition directly: H^{otimes n} |0...0>
  std::vector<cd> state(dim, cd(1.0 / std::sqrt(double(dim)), 0.0));

  const cd i1(0.0, 1.0);
  for (int l = 0; l < params.p(); ++l) {
    std::vector<cd> phased(dim);
    for (std::size_t z = 0; z < dim; ++z) {
      const double ez =
          qlslab::ising_energy(ising, static_cast<std::uint32_t>(z));
      phased[z] = std::exp(-i1 * (params.gamma[l] * ez)) * state[z];
    }
    CMat expb(dim);
    for (std::size_t k = 0; k < dim * dim; ++k) expb.e[k] = -i1 * params.beta[l] * bmat.e[k];
    state = mat_apply(expm(expb), phased);
  }
  return state;
}

/// Max elementwise distance after aligning global phase on the largest
/// reference amplitude.
inline double phase_aligned_distance(const std::vector<cd>& reference,
                                     const std::vector<cd>& test) {
  if (reference.size() != test.size()) return 1e30;
  std::size_t pivot = 0;
  for (std::size_t i = 0; i < reference.size(); ++i)
    if (std::abs(reference[i]) > std::abs(reference[pivot])) pivot = i;
  if (std::abs(test[pivot]) == 0.0 || std::abs(reference[pivot]) == 0.0) {
    double m = 0.0;
    for (std::size_t i = 0; i < reference.size(); ++i)
      m = std::max(m, std::abs(std::abs(reference[i]) - std::abs(test[i])));
    return m;
  }
  const cd phase = (reference[pivot] / std::abs(reference[pivot])) /
                   (test[pivot] / std::abs(test[pivot]));
  double m = 0.0;
  for (std::size_t i = 0; i < reference.size(); ++i)
    m = std::max(m, std::abs(reference[i] - phase * test[i]));
  return m;
}

inline double phase_aligned_distance(const CMat& reference, const CMat& test) {
  return phase_aligned_distance(reference.e, test.e);
}

/// Exact nonnegative least squares for small systems: enumerate active
/// sets, solve each reduced normal system by Gaussian elimination, keep
/// the best feasible solution.
inline std::vector<double> nnls_active_set(const std::vector<double>& target,
                                           const qlslab::Matrix& basis) {
  const std::size_t r = basis.cols;
  if (r > 12) throw std::invalid_argument("active-set oracle limited to small r");
  const std::size_t m = basis.rows;

  auto objective = [&](const std::vector<double>& w) {
    double s = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      double resid = -target[i];
      for (std::size_t a = 0; a < r; ++a) resid += basis(i, a) * w[a];
      s += resid * resid;
    }
    return s;
  };

  std::vector<double> best(r, 0.0);
  double best_obj = objective(best);
  for (std::size_t mask = 1; mask < (std::size_t{1} << r); ++mask) {
    std::vector<int> idx;
    for (std::size_t a = 0; a < r; ++a)
      if (mask & (std::size_t{1} << a)) idx.push_back(static_cast<int>(a));
    const std::size_t k = idx.size();

    // normal equations over the active set
    std::vector<std::vector<double>> aug(k, std::vector<double>(k + 1, 0.0));
    for (std::size_t p = 0; p < k; ++p) {
      for (std::size_t q = 0; q < k; ++q)
        for (std::size_t i = 0; i < m; ++i)
          aug[p][q] += basis(i, idx[p]) * basis(i, idx[q]);
      for (std::size_t i = 0; i < m; ++i) aug[p][k] += basis(i, idx[p]) * target[i];
    }
    // Gaussian elimination with partial pivoting
    bool singular = false;
    for (std::size_t col = 0; col < k && !singular; ++col) {
      std::size_t piv = col;
      for (std::size_t rr = col + 1; rr < k; ++rr)
        if (std::abs(aug[rr][col]) > std::abs(aug[piv][col])) piv = rr;
      if (std::abs(aug[piv][col]) < 1e-12) {
        singular = true;
        break;
      }
      std::swap(aug[col], aug[piv]);
      for (std::size_t rr = 0; rr < k; ++rr) {
        if (rr == col) continue;
        double f = aug[rr][col] / aug[col][col];
        for (std::size_t cc = col; cc <= k; ++cc) aug[rr][cc] -= f * aug[col][cc];
      }
    }
    if (singular) continue;
    std::vector<double> w(r, 0.0);
    bool feasible = true;
    for (std::size_t p = 0; p < k; ++p) {
      double v = aug[p][k] / aug[p][p];
      if (v < -1e-12) feasible = false;
      w[idx[p]] = std::max(0.0, v);
    }
    if (!feasible) continue;
    double obj = objective(w);
    if (obj < best_obj) {
      best_obj = obj;
      best = w;
    }
  }
  return best;
}

}  // namespace oracle

#endif  // QLSLAB_TESTS_ORACLES_HPP
