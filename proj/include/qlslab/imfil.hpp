#ifndef QLSLAB_IMFIL_HPP
#define QLSLAB_IMFIL_HPP

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "qlslab/rng.hpp"

namespace qlslab {

using Objective = std::function<double(std::span<const double>)>;

struct BoxBounds {
  std::vector<double> lower;
  std::vector<double> upper;

  std::size_t dim() const { return lower.size(); }

  double width(std::size_t i) const { return upper[i] - lower[i]; }

  double diameter() const {
    double s = 0.0;
    for (std::size_t i = 0; i < dim(); ++i) s += width(i) * width(i);
    return std::sqrt(s);
  }

  std::vector<double> clip(std::vector<double> x) const {
    for (std::size_t i = 0; i < dim(); ++i)
      x[i] = std::min(std::max(x[i], lower[i]), upper[i]);
    return x;
  }

  bool contains(std::span<const double> x) const {
    for (std::size_t i = 0; i < dim(); ++i)
      if (x[i] < lower[i] || x[i] > upper[i]) return false;
    return true;
  }
};

inline void validate(const BoxBounds& b) {
  if (b.lower.size() != b.upper.size() || b.lower.empty())
    throw std::invalid_argument("bounds dimension mismatch");
  for (std::size_t i = 0; i < b.dim(); ++i)
    if (!(b.lower[i] < b.upper[i]))
      throw std::invalid_argument("bounds require lower < upper");
}

inline std::vector<double> default_scales() {
  std::vector<double> s;
  for (int k = 1; k <= 7; ++k) s.push_back(std::ldexp(1.0, -k));  // 2^-1 .. 2^-7
  return s;
}

struct OptimizerConfig {
  int budget = 200;                              // max objective evaluations
  std::vector<double> scales = default_scales();  // stencil sizes, fractions of box width
  double stencil_tol = 0.0;  // a stencil point must beat the center by more than this
  std::uint64_t seed = 0;
};

inline void validate(const OptimizerConfig& cfg) {
  if (cfg.budget < 1) throw std::invalid_argument("budget must be >= 1");
  if (cfg.scales.empty()) throw std::invalid_argument("no scales configured");
  double prev = 1.0 + 1e-12;
  for (double h : cfg.scales) {
    if (!(h > 0.0 && h <= 1.0 && h < prev))
      throw std::invalid_argument("scales must be strictly decreasing in (0,1]");
    prev = h;
  }
}

struct OptimizationResult {
  std::vector<double> best_point;
  double best_value = std::numeric_limits<double>::infinity();
  std::vector<std::pair<int, double>> trace;  // (evaluation index, value)
  int evaluations_used = 0;
  bool converged = false;  // all scales exhausted before the budget ran out
};

namespace detail {

struct BudgetExhausted {};

class Evaluator {
 public:
  Evaluator(const Objective& f, int budget) : f_(f), budget_(budget) {}

  double operator()(const std::vector<double>& x, OptimizationResult& res) {
    if (used_ >= budget_) throw BudgetExhausted{};
    double v = f_(x);
    if (!std::isfinite(v)) v = std::numeric_limits<double>::infinity();
    res.trace.push_back({used_, v});
    ++used_;
    if (v < res.best_value) {
      res.best_value = v;
      res.best_point = x;
    }
    return v;
  }

  int used() const { return used_; }

 private:
  const Objective& f_;
  int budget_;
  int used_ = 0;
};

}  // namespace detail

/// Implicit-filtering style bounded minimization for noisy objectives.
///
/// Per scale h: evaluate the central-difference coordinate stencil at
/// x +- h*width (clipped to the box), step along the negative stencil
/// gradient with up to 5 halvings of the projected line-search step, and
/// repeat until no stencil point improves on the center. On that stencil
/// failure, take the coordinate-wise parabolic minimizer of the stencil
/// when it helps (the stencil already paid for the curvature information),
/// then shrink to the next scale. Stops on budget or scale exhaustion.
///
/// Every evaluated point lies within bounds. Given a deterministic f the
/// run is deterministic; ties among stencil points resolve toward the
/// lowest coordinate index.
inline OptimizationResult minimize(const Objective& f, const BoxBounds& bounds,
                                   const OptimizerConfig& cfg,
                                   const std::vector<double>& start) {
  validate(bounds);
  validate(cfg);
  const std::size_t d = bounds.dim();
  if (start.size() != d) throw std::invalid_argument("start dimension mismatch");
  if (!bounds.contains(start)) throw std::invalid_argument("start out of bounds");

  OptimizationResult res;
  detail::Evaluator eval(f, cfg.budget);
  std::vector<double> x = start;
  const double diam = bounds.diameter();

  std::size_t scales_done = 0;
  try {
    double fx = eval(x, res);
    for (double h : cfg.scales) {
      while (true) {
        // stencil
        std::vector<double> fplus(d), fminus(d);
        std::vector<std::vector<double>> xplus(d), xminus(d);
        double best_sten = std::numeric_limits<double>::infinity();
        std::size_t best_i = 0;
        bool best_is_plus = true;
        for (std::size_t i = 0; i < d; ++i) {
          const double step = h * bounds.width(i);
          for (int sgn : {+1, -1}) {
            auto pt = x;
            pt[i] += sgn * step;
            pt = bounds.clip(pt);
            double v = (pt == x) ? fx : eval(pt, res);
            if (sgn > 0) {
              xplus[i] = std::move(pt);
              fplus[i] = v;
            } else {
              xminus[i] = std::move(pt);
              fminus[i] = v;
            }
            if (v < best_sten) {
              best_sten = v;
              best_i = i;
              best_is_plus = sgn > 0;
            }
          }
        }

        if (!(best_sten < fx - cfg.stencil_tol)) {
          // stencil failure; try the parabolic minimizer per coordinate
          auto cand = x;
          bool any = false;
          for (std::size_t i = 0; i < d; ++i) {
            const double denom = fplus[i] - 2.0 * fx + fminus[i];
            const double span = xplus[i][i] - xminus[i][i];
            if (denom > 0.0 && span > 0.0) {
              cand[i] = x[i] - (fplus[i] - fminus[i]) / (2.0 * denom) * (span / 2.0);
              any = true;
            }
          }
          cand = bounds.clip(cand);
          if (any && cand != x) {
            double fc = eval(cand, res);
            if (fc < fx) {
              x = cand;
              fx = fc;
            }
          }
          break;  // next scale
        }

        // stencil gradient over the actually evaluated (clipped) points
        std::vector<double> g(d, 0.0);
        double gnorm = 0.0;
        for (std::size_t i = 0; i < d; ++i) {
          const double span = xplus[i][i] - xminus[i][i];
          g[i] = span > 0.0 ? (fplus[i] - fminus[i]) / span : 0.0;
          gnorm += g[i] * g[i];
        }
        gnorm = std::sqrt(gnorm);

        bool moved = false;
        if (gnorm > 0.0) {
          for (int halve = 0; halve < 5 && !moved; ++halve) {
            const double step = h * diam * std::ldexp(1.0, -halve);
            auto cand = x;
            for (std::size_t i = 0; i < d; ++i) cand[i] -= step * g[i] / gnorm;
            cand = bounds.clip(cand);
            if (cand == x) continue;
            double fc = eval(cand, res);
            if (fc < fx) {
              x = std::move(cand);
              fx = fc;
              moved = true;
            }
          }
        }
        if (!moved) {
          // fall back to the improving stencil point
          x = best_is_plus ? xplus[best_i] : xminus[best_i];
          fx = best_sten;
        }
      }
      ++scales_done;
    }
  } catch (const detail::BudgetExhausted&) {
    // finish with what was evaluated
  }

  res.converged = scales_done == cfg.scales.size();
  res.evaluations_used = eval.used();
  if (res.best_point.empty()) {
    res.best_point = start;  // everything was non-finite
  }
  return res;
}

/// Runs minimize from n_starts uniform-random points in the box; the
/// budget applies per start. Start k draws its point and its objective
/// from streams derived from (seed, k), so results do not depend on
/// evaluation order across starts.
inline OptimizationResult multi_start_minimize(
    const std::function<Objective(std::uint64_t)>& objective_for_start,
    const BoxBounds& bounds, const OptimizerConfig& cfg, int n_starts,
    std::uint64_t seed) {
  validate(bounds);
  if (n_starts < 1) throw std::invalid_argument("n_starts must be >= 1");
  OptimizationResult best;
  for (int k = 0; k < n_starts; ++k) {
    SplitMix64 rng(derive(seed, static_cast<std::uint64_t>(k), 0x57a27));
    std::vector<double> start(bounds.dim());
    for (std::size_t i = 0; i < bounds.dim(); ++i)
      start[i] = rng.next_in(bounds.lower[i], bounds.upper[i]);
    Objective f = objective_for_start(static_cast<std::uint64_t>(k));
    OptimizationResult r = minimize(f, bounds, cfg, start);
    if (k == 0 || r.best_value < best.best_value) best = std::move(r);
  }
  return best;
}

inline OptimizationResult multi_start_minimize(const Objective& f, const BoxBounds& bounds,
                                               const OptimizerConfig& cfg, int n_starts,
                                               std::uint64_t seed) {
  return multi_start_minimize([&f](std::uint64_t) { return f; }, bounds, cfg, n_starts,
                              seed);
}

}  // namespace qlslab

#endif  // QLSLAB_IMFIL_HPP
