#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "qlslab/imfil.hpp"
#include "qlslab/rng.hpp"

using namespace qlslab;
using Catch::Approx;

namespace {

BoxBounds unit_box(std::size_t d) {
  BoxBounds b;
  b.lower.assign(d, 0.0);
  b.upper.assign(d, 1.0);
  return b;
}

}  // namespace

TEST_CASE("convex quadratic converges well below the last stencil size") {
  OptimizerConfig cfg;
  cfg.budget = 200;
  auto res = minimize([](std::span<const double> x) { return (x[0] - 0.3) * (x[0] - 0.3); },
                      unit_box(1), cfg, {0.9});
  REQUIRE(std::abs(res.best_point[0] - 0.3) < 1e-3);
  REQUIRE(res.converged);
  REQUIRE(res.evaluations_used <= 200);
}

TEST_CASE("constant objective converges after one sweep through the scales") {
  OptimizerConfig cfg;
  cfg.budget = 100;
  int evals = 0;
  auto res = minimize(
      [&evals](std::span<const double>) {
        ++evals;
        return 2.5;
      },
      unit_box(2), cfg, {0.5, 0.5});
  REQUIRE(res.converged);
  REQUIRE(res.best_value == 2.5);
  // one center + 4 stencil points per scale, nothing else
  REQUIRE(evals <= 1 + 4 * 7);
}

TEST_CASE("noisy sum of squares reaches the noise floor on most seeds") {
  const std::vector<double> target{0.4, 0.6, 0.2, 0.7};
  int good = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    SplitMix64 noise(derive(seed, 1));
    Objective f = [&](std::span<const double> x) {
      double s = 0.0;
      for (std::size_t i = 0; i < 4; ++i) s += (x[i] - target[i]) * (x[i] - target[i]);
      return s + noise.next_in(-0.01, 0.01);
    };
    OptimizerConfig cfg;
    cfg.budget = 400;
    auto res = multi_start_minimize(f, unit_box(4), cfg, 1, seed);
    if (res.best_value <= 0.05) ++good;
  }
  REQUIRE(good >= 9);
}

TEST_CASE("multi-start with one start equals minimize from that point") {
  Objective f = [](std::span<const double> x) {
    return std::cos(7 * x[0]) + x[0] * x[0];
  };
  OptimizerConfig cfg;
  cfg.budget = 120;
  auto multi = multi_start_minimize(f, unit_box(1), cfg, 1, 17);
  SplitMix64 rng(derive(17, 0, 0x57a27));
  auto direct = minimize(f, unit_box(1), cfg, {rng.next_in(0.0, 1.0)});
  REQUIRE(multi.best_value == direct.best_value);
  REQUIRE(multi.best_point == direct.best_point);
}

TEST_CASE("multi-start finds the global well of a two-well objective") {
  // local well at 0.08 (value -0.5), global well at 0.75 (value -1)
  Objective f = [](std::span<const double> x) {
    double d1 = (x[0] - 0.08) / 0.05;
    double d2 = (x[0] - 0.75) / 0.2;
    return -0.5 * std::exp(-d1 * d1) - std::exp(-d2 * d2);
  };
  int found = 0;
  OptimizerConfig cfg;
  cfg.budget = 150;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto res = multi_start_minimize(f, unit_box(1), cfg, 20, seed);
    if (std::abs(res.best_point[0] - 0.75) < 0.1) ++found;
  }
  REQUIRE(found >= 19);
}

TEST_CASE("same seed reproduces the identical result") {
  Objective f = [](std::span<const double> x) {
    return std::sin(5 * x[0]) * std::cos(3 * x[1]);
  };
  OptimizerConfig cfg;
  cfg.budget = 90;
  auto a = multi_start_minimize(f, unit_box(2), cfg, 4, 7);
  auto b = multi_start_minimize(f, unit_box(2), cfg, 4, 7);
  REQUIRE(a.best_value == b.best_value);
  REQUIRE(a.best_point == b.best_point);
  REQUIRE(a.trace == b.trace);
}

TEST_CASE("no evaluation ever leaves the box") {
  BoxBounds bounds;
  bounds.lower = {-2.0, 1.0};
  bounds.upper = {-1.0, 4.0};
  bool violated = false;
  Objective f = [&](std::span<const double> x) {
    if (!bounds.contains(x)) violated = true;
    return (x[0] + 1.7) * (x[0] + 1.7) + (x[1] - 3.2) * (x[1] - 3.2);
  };
  OptimizerConfig cfg;
  cfg.budget = 300;
  auto res = multi_start_minimize(f, bounds, cfg, 3, 5);
  REQUIRE_FALSE(violated);
  REQUIRE(std::abs(res.best_point[0] + 1.7) < 5e-3);
  REQUIRE(std::abs(res.best_point[1] - 3.2) < 5e-3);
}

TEST_CASE("trace is budget-bounded and its running minimum is the best value") {
  Objective f = [](std::span<const double> x) { return x[0] * x[0]; };
  OptimizerConfig cfg;
  cfg.budget = 37;
  BoxBounds b;
  b.lower = {-1.0};
  b.upper = {1.0};
  auto res = minimize(f, b, cfg, {0.8});
  REQUIRE(res.trace.size() <= 37);
  REQUIRE(static_cast<int>(res.trace.size()) == res.evaluations_used);
  double running = res.trace.front().second;
  for (const auto& [idx, v] : res.trace) running = std::min(running, v);
  REQUIRE(running == res.best_value);
}

TEST_CASE("noiseless final value never exceeds the start value") {
  Objective f = [](std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += (v - 0.25) * (v - 0.25);
    return s;
  };
  OptimizerConfig cfg;
  cfg.budget = 60;
  auto res = minimize(f, unit_box(3), cfg, {0.9, 0.9, 0.9});
  REQUIRE(res.best_value <= f(std::vector<double>{0.9, 0.9, 0.9}));
}

TEST_CASE("non-finite objective values are recorded as infinities") {
  int calls = 0;
  Objective f = [&calls](std::span<const double> x) {
    ++calls;
    if (calls == 2) return std::nan("");
    return x[0] * x[0];
  };
  BoxBounds b;
  b.lower = {-1.0};
  b.upper = {1.0};
  OptimizerConfig cfg;
  cfg.budget = 30;
  auto res = minimize(f, b, cfg, {0.5});
  bool saw_inf = false;
  for (const auto& [idx, v] : res.trace)
    if (std::isinf(v)) saw_inf = true;
  REQUIRE(saw_inf);
  REQUIRE(std::isfinite(res.best_value));
}

TEST_CASE("out-of-bounds start is rejected") {
  OptimizerConfig cfg;
  REQUIRE_THROWS_AS(minimize([](std::span<const double>) { return 0.0; }, unit_box(1),
                             cfg, {1.5}),
                    std::invalid_argument);
}

TEST_CASE("configs are validated") {
  OptimizerConfig cfg;
  cfg.budget = 0;
  REQUIRE_THROWS_AS(validate(cfg), std::invalid_argument);
  cfg.budget = 10;
  cfg.scales = {0.5, 0.5};
  REQUIRE_THROWS_AS(validate(cfg), std::invalid_argument);
  BoxBounds b;
  b.lower = {0.0};
  b.upper = {0.0};
  REQUIRE_THROWS_AS(validate(b), std::invalid_argument);
}
