#ifndef QLSLAB_FIT_HPP
#define QLSLAB_FIT_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace qlslab {

/// Relative error of an expectation value against the ground energy,
/// |(C - E_gs) / E_gs|. Zero ground energy has no meaningful relative
/// error and is rejected (it only occurs for degenerate zero problems).
inline double relative_error(double expectation, double ground_energy) {
  if (ground_energy == 0.0)
    throw std::domain_error("relative_error: zero ground energy");
  return std::abs((expectation - ground_energy) / ground_energy);
}

/// 1 - (1 - p_eff)^k.
inline double cumulative_success(double p_eff, int k) {
  if (!(p_eff >= 0.0 && p_eff <= 1.0))
    throw std::domain_error("cumulative_success: p_eff outside [0,1]");
  if (k < 0) throw std::domain_error("cumulative_success: negative k");
  return 1.0 - std::pow(1.0 - p_eff, k);
}

struct Aggregate {
  double median = 0.0;
  double mad = 0.0;  // median absolute deviation
};

inline double median(std::vector<double> v) {
  if (v.empty()) throw std::invalid_argument("median of empty list");
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

inline Aggregate aggregate(const std::vector<double>& values) {
  Aggregate a;
  a.median = median(values);
  std::vector<double> dev(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) dev[i] = std::abs(values[i] - a.median);
  a.mad = median(dev);
  return a;
}

// ---- curve models ------------------------------------------------------------

enum class CurveModel { power_law, cumulative_success };

/// power_law:          y = a * n^b
/// cumulative_success: y = 1 - (1 - a / 2^(b n))^k
struct CurveFit {
  CurveModel model = CurveModel::power_law;
  double a = 0.0;
  double b = 0.0;
  int k = 1;                // cumulative_success only
  double fit_error = 0.0;   // mean relative error of model vs data
  bool converged = false;
};

inline double power_law_value(const CurveFit& f, double n) {
  return f.a * std::pow(n, f.b);
}

/// Per-query success a / 2^(b n), clamped into [0,1]; fixed to 1 below
/// n = 3 where the fitted curves overshoot.
inline double per_query_success(const CurveFit& f, double n) {
  if (n < 3.0) return 1.0;
  double q = f.a * std::pow(2.0, -f.b * n);
  return std::min(1.0, std::max(0.0, q));
}

inline double success_model_value(const CurveFit& f, double n, int k) {
  if (n < 3.0) return 1.0;
  return 1.0 - std::pow(1.0 - per_query_success(f, n), k);
}

inline double success_model_value(const CurveFit& f, double n) {
  return success_model_value(f, n, f.k);
}

inline nlohmann::json to_json(const CurveFit& f) {
  nlohmann::json j;
  j["model"] = f.model == CurveModel::power_law ? "power_law" : "cumulative_success";
  j["a"] = f.a;
  j["b"] = f.b;
  if (f.model == CurveModel::cumulative_success) j["k"] = f.k;
  j["fit_error"] = f.fit_error;
  j["converged"] = f.converged;
  return j;
}

namespace detail {

/// Mean relative model-vs-data error; points with y = 0 are skipped (they
/// have no relative error).
template <typename Model>
double mean_relative_error(const std::vector<std::pair<double, double>>& pts,
                           Model&& model) {
  double sum = 0.0;
  int used = 0;
  for (const auto& [n, y] : pts) {
    if (y == 0.0) continue;
    sum += std::abs((model(n) - y) / y);
    ++used;
  }
  return used ? sum / used : 0.0;
}

/// Damped Gauss-Newton on residuals r_i = model(n_i) - y_i for one or two
/// parameters with analytic Jacobian. Levenberg damping: grow lambda on a
/// rejected step, shrink on acceptance.
template <typename Residuals>
bool gauss_newton_2(std::vector<double>& theta, const Residuals& residuals,
                    int max_iters = 200) {
  const std::size_t np = theta.size();
  auto sum_sq = [&](const std::vector<double>& th) {
    std::vector<double> r;
    std::vector<std::vector<double>> jac;
    residuals(th, r, jac);
    double s = 0.0;
    for (double v : r) s += v * v;
    return s;
  };
  double lambda = 1e-3;
  double cur = sum_sq(theta);
  for (int it = 0; it < max_iters; ++it) {
    std::vector<double> r;
    std::vector<std::vector<double>> jac;  // rows: points, cols: params
    residuals(theta, r, jac);

    // normal equations (at most 2x2)
    double jtj[2][2] = {{0, 0}, {0, 0}};
    double jtr[2] = {0, 0};
    for (std::size_t i = 0; i < r.size(); ++i)
      for (std::size_t p = 0; p < np; ++p) {
        jtr[p] += jac[i][p] * r[i];
        for (std::size_t q = 0; q < np; ++q) jtj[p][q] += jac[i][p] * jac[i][q];
      }

    bool stepped = false;
    for (int attempt = 0; attempt < 30 && !stepped; ++attempt) {
      double m[2][2] = {{jtj[0][0] + lambda * (1.0 + jtj[0][0]), jtj[0][1]},
                        {jtj[1][0], jtj[1][1] + lambda * (1.0 + jtj[1][1])}};
      std::vector<double> delta(np, 0.0);
      if (np == 1) {
        if (m[0][0] == 0.0) return cur < 1e-18;
        delta[0] = jtr[0] / m[0][0];
      } else {
        double det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
        if (det == 0.0) return cur < 1e-18;
        delta[0] = (m[1][1] * jtr[0] - m[0][1] * jtr[1]) / det;
        delta[1] = (m[0][0] * jtr[1] - m[1][0] * jtr[0]) / det;
      }
      std::vector<double> cand(np);
      for (std::size_t p = 0; p < np; ++p) cand[p] = theta[p] - delta[p];
      double val = sum_sq(cand);
      if (std::isfinite(val) && val <= cur) {
        double step = 0.0;
        for (double dlt : delta) step += dlt * dlt;
        theta = cand;
        double improvement = cur - val;
        cur = val;
        lambda = std::max(lambda * 0.3, 1e-14);
        if (std::sqrt(step) < 1e-14 || improvement < 1e-18) return true;
        stepped = true;
      } else {
        lambda *= 10.0;
      }
    }
    if (!stepped) return true;  // damping saturated; theta is locally optimal
  }
  return false;
}

}  // namespace detail

/// Least-squares fit of y = a * n^b, initialized from a log-log linear
/// fit. When fixed_b is given only a is fitted (closed form).
inline CurveFit fit_power_law(const std::vector<std::pair<double, double>>& points,
                              std::optional<double> fixed_b = std::nullopt) {
  if (points.size() < 2) throw std::invalid_argument("fit_power_law: need >= 2 points");
  for (const auto& [n, y] : points)
    if (!(n > 0.0) || !(y > 0.0))
      throw std::invalid_argument("fit_power_law: points must be positive");

  CurveFit fit;
  fit.model = CurveModel::power_law;

  if (fixed_b) {
    // linear least squares on a alone
    double num = 0.0, den = 0.0;
    for (const auto& [n, y] : points) {
      double nb = std::pow(n, *fixed_b);
      num += y * nb;
      den += nb * nb;
    }
    fit.a = num / den;
    fit.b = *fixed_b;
    fit.converged = true;
  } else {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& [n, y] : points) {
      double lx = std::log(n), ly = std::log(y);
      sx += lx;
      sy += ly;
      sxx += lx * lx;
      sxy += lx * ly;
    }
    const double cnt = static_cast<double>(points.size());
    double b0 = (cnt * sxy - sx * sy) / std::max(cnt * sxx - sx * sx, 1e-30);
    double a0 = std::exp((sy - b0 * sx) / cnt);
    std::vector<double> theta{a0, b0};
    auto residuals = [&](const std::vector<double>& th, std::vector<double>& r,
                         std::vector<std::vector<double>>& jac) {
      r.resize(points.size());
      jac.assign(points.size(), std::vector<double>(2, 0.0));
      for (std::size_t i = 0; i < points.size(); ++i) {
        const auto [n, y] = points[i];
        const double nb = std::pow(n, th[1]);
        r[i] = th[0] * nb - y;
        jac[i][0] = nb;
        jac[i][1] = th[0] * nb * std::log(n);
      }
    };
    fit.converged = detail::gauss_newton_2(theta, residuals);
    if (!fit.converged)
      throw std::runtime_error("fit_power_law: no convergence within iteration limit");
    fit.a = theta[0];
    fit.b = theta[1];
  }
  fit.fit_error = detail::mean_relative_error(
      points, [&](double n) { return power_law_value(fit, n); });
  return fit;
}

/// Fit of the cumulative success model 1 - (1 - a/2^(b n))^k on (n,
/// success) data. With fix_a_to_one only b is fitted, so the per-query
/// probability tends to 1 as n tends to 0. Initialization is a coarse
/// grid over b (and a).
inline CurveFit fit_success_model(const std::vector<std::pair<double, double>>& points,
                                  int k, bool fix_a_to_one) {
  if (points.size() < 2)
    throw std::invalid_argument("fit_success_model: need >= 2 points");
  if (k < 1) throw std::invalid_argument("fit_success_model: k must be >= 1");
  bool any_positive = false;
  for (const auto& [n, y] : points) {
    if (!(y >= 0.0 && y <= 1.0))
      throw std::invalid_argument("fit_success_model: success outside [0,1]");
    if (y > 0.0) any_positive = true;
  }
  if (!any_positive)
    throw std::invalid_argument("fit_success_model: degenerate all-zero data");

  CurveFit fit;
  fit.model = CurveModel::cumulative_success;
  fit.k = k;

  auto model_val = [&](double a, double b, double n) {
    double q = std::min(1.0, std::max(0.0, a * std::pow(2.0, -b * n)));
    return 1.0 - std::pow(1.0 - q, k);
  };

  // coarse grid initialization
  double best_a = 1.0, best_b = 0.1, best_ss = std::numeric_limits<double>::infinity();
  for (double b = 0.01; b <= 2.0; b += 0.01) {
    std::vector<double> a_grid;
    if (fix_a_to_one)
      a_grid = {1.0};
    else
      for (double a = 0.2; a <= 3.0; a += 0.2) a_grid.push_back(a);
    for (double a : a_grid) {
      double ss = 0.0;
      for (const auto& [n, y] : points) {
        double r = model_val(a, b, n) - y;
        ss += r * r;
      }
      if (ss < best_ss) {
        best_ss = ss;
        best_a = a;
        best_b = b;
      }
    }
  }

  auto residuals = [&](const std::vector<double>& th, std::vector<double>& r,
                       std::vector<std::vector<double>>& jac) {
    const double a = fix_a_to_one ? 1.0 : th[0];
    const double b = fix_a_to_one ? th[0] : th[1];
    const std::size_t np = th.size();
    r.resize(points.size());
    jac.assign(points.size(), std::vector<double>(np, 0.0));
    constexpr double ln2 = 0.6931471805599453;
    for (std::size_t i = 0; i < points.size(); ++i) {
      const auto [n, y] = points[i];
      double q = a * std::pow(2.0, -b * n);
      q = std::min(1.0, std::max(0.0, q));
      const double t = 1.0 - q;
      r[i] = (1.0 - std::pow(t, k)) - y;
      const double dm_dq = k * std::pow(t, k - 1);
      const double dq_da = std::pow(2.0, -b * n);
      const double dq_db = -ln2 * n * q;
      if (fix_a_to_one) {
        jac[i][0] = dm_dq * dq_db;
      } else {
        jac[i][0] = dm_dq * dq_da;
        jac[i][1] = dm_dq * dq_db;
      }
    }
  };

  std::vector<double> theta =
      fix_a_to_one ? std::vector<double>{best_b} : std::vector<double>{best_a, best_b};
  fit.converged = detail::gauss_newton_2(theta, residuals);
  if (!fit.converged)
    throw std::runtime_error("fit_success_model: no convergence within iteration limit");
  if (fix_a_to_one) {
    fit.a = 1.0;
    fit.b = theta[0];
  } else {
    fit.a = theta[0];
    fit.b = theta[1];
  }
  fit.fit_error = detail::mean_relative_error(
      points, [&](double n) { return model_val(fit.a, fit.b, n); });
  return fit;
}

}  // namespace qlslab

#endif  // QLSLAB_FIT_HPP
