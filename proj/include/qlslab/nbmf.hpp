#ifndef QLSLAB_NBMF_HPP
#define QLSLAB_NBMF_HPP

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "qlslab/linalg.hpp"
#include "qlslab/qaoa.hpp"
#include "qlslab/qubo.hpp"
#include "qlslab/rng.hpp"
#include "qlslab/sa.hpp"

namespace qlslab {

struct NbmfProblem {
  Matrix v;  // nonnegative, m x n
  int rank = 1;
  int max_outer_iters = 50;
  double tolerance = 1e-5;  // relative change of ||V - W H||_F
  std::uint64_t seed = 0;
};

inline void validate(const NbmfProblem& p) {
  if (p.v.rows < 1 || p.v.cols < 1) throw std::invalid_argument("empty V");
  for (double x : p.v.data)
    if (!(x >= 0.0) || !std::isfinite(x))
      throw std::invalid_argument("V must be nonnegative and finite");
  if (p.rank < 1 || p.rank > static_cast<int>(std::min(p.v.rows, p.v.cols)))
    throw std::invalid_argument("rank out of range");
  if (p.max_outer_iters < 1) throw std::invalid_argument("max_outer_iters >= 1");
}

/// Which solver handles the binary column subproblems.
struct BllsBackend {
  enum class Kind { brute_force, simulated_annealing, qaoa };
  Kind kind = Kind::brute_force;
  SaConfig sa;
  QaoaRunConfig qaoa_cfg;

  static BllsBackend brute_force() { return {}; }
  static BllsBackend simulated_annealing(SaConfig cfg) {
    BllsBackend b;
    b.kind = Kind::simulated_annealing;
    b.sa = cfg;
    return b;
  }
  static BllsBackend qaoa(QaoaRunConfig cfg) {
    BllsBackend b;
    b.kind = Kind::qaoa;
    b.qaoa_cfg = cfg;
    return b;
  }
};

/// min_{w >= 0} ||basis w - target||^2 by projected gradient descent with
/// fixed step 1/L (L from power iteration on the Gram matrix), warm
/// started from `warm`. 500 iterations or projected-gradient norm 1e-8.
inline std::vector<double> nnls_row(std::span<const double> target, const Matrix& basis,
                                    std::span<const double> warm = {}) {
  if (target.size() != basis.rows) throw std::invalid_argument("nnls_row: shape mismatch");
  for (double v : target)
    if (!std::isfinite(v)) throw std::invalid_argument("nnls_row: non-finite target");
  for (double v : basis.data)
    if (!std::isfinite(v)) throw std::invalid_argument("nnls_row: non-finite basis");
  const std::size_t r = basis.cols;

  // gram = basis^T basis, bt = basis^T target
  Matrix gram(r, r);
  std::vector<double> bt(r, 0.0);
  for (std::size_t i = 0; i < basis.rows; ++i)
    for (std::size_t a = 0; a < r; ++a) {
      const double bia = basis(i, a);
      if (bia == 0.0) continue;
      bt[a] += bia * target[i];
      for (std::size_t b = 0; b < r; ++b) gram(a, b) += bia * basis(i, b);
    }

  // largest Gram eigenvalue by power iteration
  std::vector<double> vec(r, 1.0 / std::sqrt(static_cast<double>(r)));
  double lambda = 0.0;
  for (int it = 0; it < 60; ++it) {
    std::vector<double> nv(r, 0.0);
    for (std::size_t a = 0; a < r; ++a)
      for (std::size_t b = 0; b < r; ++b) nv[a] += gram(a, b) * vec[b];
    double norm = std::sqrt(norm_sq(nv));
    if (norm == 0.0) break;
    lambda = norm;
    for (std::size_t a = 0; a < r; ++a) vec[a] = nv[a] / norm;
  }
  std::vector<double> w(r, 0.0);
  if (!warm.empty()) {
    if (warm.size() != r) throw std::invalid_argument("nnls_row: warm size mismatch");
    for (std::size_t a = 0; a < r; ++a) w[a] = std::max(0.0, warm[a]);
  }
  if (lambda <= 1e-300) return std::vector<double>(r, 0.0);

  const double step = 1.0 / (2.0 * lambda * 1.01);
  for (int it = 0; it < 500; ++it) {
    // grad = 2 (gram w - bt)
    std::vector<double> grad(r, 0.0);
    double pg_norm = 0.0;
    for (std::size_t a = 0; a < r; ++a) {
      double g = -bt[a];
      for (std::size_t b = 0; b < r; ++b) g += gram(a, b) * w[b];
      grad[a] = 2.0 * g;
      const double pg = (w[a] > 0.0) ? grad[a] : std::min(grad[a], 0.0);
      pg_norm += pg * pg;
    }
    if (std::sqrt(pg_norm) <= 1e-8) break;
    for (std::size_t a = 0; a < r; ++a) w[a] = std::max(0.0, w[a] - step * grad[a]);
  }

  // never return anything worse than the zero vector:
  // f(w) - f(0) = w^T gram w - 2 w^T bt
  double excess = 0.0;
  for (std::size_t a = 0; a < r; ++a) {
    double ga = -2.0 * bt[a];
    for (std::size_t b = 0; b < r; ++b) ga += gram(a, b) * w[b];
    excess += w[a] * ga;
  }
  if (excess > 0.0) return std::vector<double>(r, 0.0);
  return w;
}

struct NbmfResult {
  Matrix w;   // m x r, nonnegative
  Matrix h;   // r x n, entries exactly 0 or 1
  std::vector<double> objective_trace;  // ||V - W H||_F after each outer iteration
  int iterations = 0;
};

namespace detail {

/// Best binary h for ||W h - v_col||^2 through the chosen backend. The
/// column problem is encoded exactly like a standalone least squares
/// instance; solutions come back in measured-bit convention and are
/// flipped to variables.
inline std::vector<int> solve_column(const Matrix& w, std::span<const double> v_col,
                                     const BllsBackend& backend, std::uint64_t seed) {
  BllsInstance inst;
  inst.a = w;
  inst.b.assign(v_col.begin(), v_col.end());
  inst.kind = InstanceKind::inconsistent;
  auto ising = qubo_to_ising(encode_qubo(inst));
  const int r = ising.n();

  std::vector<int> bits;
  switch (backend.kind) {
    case BllsBackend::Kind::brute_force: {
      if (r > 20) throw std::invalid_argument("brute_force backend requires rank <= 20");
      auto res = brute_force_solve(ising);
      bits = bits_of_index(res.ground_states.front(), r);  // deterministic tie-break
      break;
    }
    case BllsBackend::Kind::simulated_annealing: {
      SaConfig cfg = backend.sa;
      cfg.seed = seed;
      bits = sa_run(ising, cfg).best_bits;
      break;
    }
    case BllsBackend::Kind::qaoa: {
      QaoaRunConfig cfg = backend.qaoa_cfg;
      cfg.seed = seed;
      RunRecord rec = run_qaoa(ising, cfg);
      double best_e = 0.0;
      bool first = true;
      std::uint32_t best_z = 0;
      for (const auto& [bstr, cnt] : rec.final_counts.counts) {
        std::uint32_t z = index_of_bitstring(bstr);
        double e = ising_energy(ising, z);
        if (first || e < best_e) {
          best_e = e;
          best_z = z;
          first = false;
        }
      }
      bits = bits_of_index(best_z, r);
      break;
    }
  }
  std::vector<int> x(r);
  for (int a = 0; a < r; ++a) x[a] = spin_convention::variable_of_bit(bits[a]);
  return x;
}

}  // namespace detail

/// Alternating least squares: random binary H, then alternate
/// nonnegative W rows (projected gradient, warm started) and binary H
/// columns (backend). Stops when the relative change of ||V - W H||_F
/// drops below tolerance or iterations run out.
inline NbmfResult nbmf_solve(const NbmfProblem& p, const BllsBackend& backend) {
  validate(p);
  const std::size_t m = p.v.rows, n = p.v.cols;
  const int r = p.rank;

  SplitMix64 rng(derive(p.seed, 0xb1a));
  NbmfResult res;
  res.h = Matrix(r, n);
  for (auto& e : res.h.data) e = static_cast<double>(rng.next_bit());
  res.w = Matrix(m, r);

  double prev_obj = -1.0;
  for (int iter = 0; iter < p.max_outer_iters; ++iter) {
    // W rows against fixed H
    Matrix ht = res.h.transposed();  // n x r
    for (std::size_t i = 0; i < m; ++i) {
      std::vector<double> wi = nnls_row(p.v.row(i), ht, res.w.row(i));
      for (int a = 0; a < r; ++a) res.w(i, a) = wi[a];
    }
    // H columns against fixed W
    for (std::size_t jcol = 0; jcol < n; ++jcol) {
      std::vector<double> v_col(m);
      for (std::size_t i = 0; i < m; ++i) v_col[i] = p.v(i, jcol);
      std::vector<int> x = detail::solve_column(
          res.w, v_col, backend,
          derive(p.seed, static_cast<std::uint64_t>(iter), jcol));
      for (int a = 0; a < r; ++a) res.h(a, jcol) = static_cast<double>(x[a]);
    }

    const double obj = frobenius_diff(p.v, matmul(res.w, res.h));
    res.objective_trace.push_back(obj);
    res.iterations = iter + 1;
    if (iter > 0) {
      const double rel = std::abs(prev_obj - obj) / std::max(prev_obj, 1e-30);
      if (rel < p.tolerance) break;
    }
    prev_obj = obj;
  }
  return res;
}

}  // namespace qlslab

#endif  // QLSLAB_NBMF_HPP
