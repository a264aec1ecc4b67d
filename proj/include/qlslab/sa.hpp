#ifndef QLSLAB_SA_HPP
#define QLSLAB_SA_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "qlslab/fit.hpp"
#include "qlslab/qubo.hpp"
#include "qlslab/rng.hpp"

namespace qlslab {

struct SaConfig {
  double t0 = 100.0;  // initial temperature
  double tf = 0.01;   // final temperature
  int k = 10;         // temperature steps
  int sweeps_per_step = 1;
  std::uint64_t seed = 0;
};

inline void validate(const SaConfig& cfg) {
  if (!(cfg.t0 > cfg.tf && cfg.tf > 0.0))
    throw std::invalid_argument("SA requires t0 > tf > 0");
  if (cfg.k < 1) throw std::invalid_argument("SA requires k >= 1");
  if (cfg.sweeps_per_step < 1) throw std::invalid_argument("sweeps_per_step >= 1");
}

/// Exponential decay schedule T_i = T0 (Tf/T0)^(i/k) for 0 <= i <= k.
inline double sa_schedule(const SaConfig& cfg, int i) {
  validate(cfg);
  if (i < 0 || i > cfg.k) throw std::out_of_range("sa_schedule: step index out of range");
  return cfg.t0 * std::pow(cfg.tf / cfg.t0, static_cast<double>(i) / cfg.k);
}

struct SaResult {
  std::vector<int> best_bits;  // measured-bit convention
  double best_energy = 0.0;
};

/// Single-bit-flip Metropolis annealing. Starts from uniform random bits;
/// step i = 1..k runs sweeps of n proposals in random order at T_i, so the
/// run ends exactly at Tf. Accepts when dE <= 0, otherwise with
/// probability exp(-dE/T). Returns the best state seen, not the final one.
inline SaResult sa_run(const IsingProblem& p, const SaConfig& cfg) {
  validate(cfg);
  const int n = p.n();
  SplitMix64 rng(cfg.seed);

  // dense symmetric coupling copy for O(n) flip deltas
  std::vector<double> coupling(static_cast<std::size_t>(n) * n, 0.0);
  for (const auto& [jk, jv] : p.j) {
    coupling[jk.first * n + jk.second] = jv;
    coupling[jk.second * n + jk.first] = jv;
  }

  std::vector<int> sigma(n);
  for (int i = 0; i < n; ++i) sigma[i] = rng.next_bit() ? 1 : -1;

  auto energy_of = [&](const std::vector<int>& s) {
    double e = 0.0;
    for (int i = 0; i < n; ++i) e += p.h[i] * s[i];
    for (const auto& [jk, jv] : p.j) e += jv * s[jk.first] * s[jk.second];
    return e;
  };

  double energy = energy_of(sigma);
  SaResult best;
  best.best_energy = energy;
  best.best_bits.resize(n);
  auto record = [&]() {
    best.best_energy = energy;
    for (int i = 0; i < n; ++i)
      best.best_bits[i] = sigma[i] > 0 ? 0 : 1;  // spin +1 <-> bit 0
  };
  record();

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  for (int step = 1; step <= cfg.k; ++step) {
    const double temp = sa_schedule(cfg, step);
    for (int sweep = 0; sweep < cfg.sweeps_per_step; ++sweep) {
      shuffle(order, rng);
      for (int t : order) {
        double local = p.h[t];
        for (int u = 0; u < n; ++u) local += coupling[t * n + u] * sigma[u];
        const double delta = -2.0 * sigma[t] * local;
        if (delta <= 0.0 || rng.next_double() < std::exp(-delta / temp)) {
          sigma[t] = -sigma[t];
          energy += delta;
          if (energy < best.best_energy) record();
        }
      }
    }
  }
  return best;
}

/// Fraction of `runs` seeded runs that end on any ground state. Run r
/// uses the stream (cfg.seed, r).
inline double sa_success_fraction(const IsingProblem& p,
                                  const std::vector<std::uint32_t>& ground_states,
                                  int runs, const SaConfig& cfg) {
  if (runs < 1) throw std::invalid_argument("runs must be >= 1");
  int hits = 0;
  for (int r = 0; r < runs; ++r) {
    SaConfig run_cfg = cfg;
    run_cfg.seed = derive(cfg.seed, static_cast<std::uint64_t>(r));
    SaResult res = sa_run(p, run_cfg);
    std::uint32_t z = index_of_bits(res.best_bits);
    if (std::binary_search(ground_states.begin(), ground_states.end(), z)) ++hits;
  }
  return static_cast<double>(hits) / runs;
}

struct SaCurveEntry {
  int n = 0;
  std::string problem_id;
  double success_fraction = 0.0;
};

struct SaCurve {
  std::vector<SaCurveEntry> per_problem;
  std::vector<std::pair<int, double>> per_n_median;  // (n, median success)
};

struct SaCurveProblem {
  int n = 0;
  std::string problem_id;
  IsingProblem ising;
  std::vector<std::uint32_t> ground_states;
};

/// Success table over a problem suite: per-problem success fraction over
/// runs_per_problem seeded runs, then the per-n median.
inline SaCurve sa_success_curve(const std::vector<SaCurveProblem>& problems,
                                int runs_per_problem, const SaConfig& cfg) {
  SaCurve curve;
  std::map<int, std::vector<double>> by_n;
  for (const auto& prob : problems) {
    SaConfig pc = cfg;
    pc.seed = derive(cfg.seed, hash_string(prob.problem_id));
    double frac = sa_success_fraction(prob.ising, prob.ground_states, runs_per_problem, pc);
    curve.per_problem.push_back({prob.n, prob.problem_id, frac});
    by_n[prob.n].push_back(frac);
  }
  for (const auto& [n, fracs] : by_n) curve.per_n_median.push_back({n, median(fracs)});
  return curve;
}

/// Probability that `queries` uniform draws hit at least one of
/// ground_count ground states among 2^n: 1 - (1 - g/2^n)^queries.
inline double random_sampling_success(int n, int ground_count, std::uint64_t queries) {
  if (ground_count < 1) throw std::invalid_argument("ground_count must be >= 1");
  const double per_query = static_cast<double>(ground_count) / std::ldexp(1.0, n);
  return 1.0 - std::pow(1.0 - per_query, static_cast<double>(queries));
}

}  // namespace qlslab

#endif  // QLSLAB_SA_HPP
