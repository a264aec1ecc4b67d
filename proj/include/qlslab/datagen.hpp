#ifndef QLSLAB_DATAGEN_HPP
#define QLSLAB_DATAGEN_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qlslab/blls.hpp"
#include "qlslab/io.hpp"
#include "qlslab/qubo.hpp"
#include "qlslab/rng.hpp"

namespace qlslab {

struct DatasetSpec {
  std::vector<int> n_values{3, 4, 5, 9, 10};
  int m = 40;
  double density = 0.2;
  int problems_per_n = 100;
  double consistent_fraction = 0.4;
  std::uint64_t master_seed = 0;
  bool sparse_b = false;  // draw b with the same sparsity pattern rule as A
};

inline void validate(const DatasetSpec& spec) {
  if (spec.n_values.empty()) throw std::invalid_argument("no n values");
  for (int n : spec.n_values)
    if (n < 1 || n > 24) throw std::invalid_argument("n out of range");
  if (spec.m < 1) throw std::invalid_argument("m must be >= 1");
  if (!(spec.density > 0.0 && spec.density <= 1.0))
    throw std::invalid_argument("density must be in (0,1]");
  if (!(spec.consistent_fraction >= 0.0 && spec.consistent_fraction <= 1.0))
    throw std::invalid_argument("consistent_fraction must be in [0,1]");
  if (spec.problems_per_n < 1) throw std::invalid_argument("problems_per_n >= 1");
}

inline std::string instance_id(int n, int index) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "n%d_i%03d", n, index);
  return buf;
}

namespace detail {

inline double draw_value_3dp(SplitMix64& rng) {
  // uniform [-1, 1), rounded to 3 decimals
  return std::round(rng.next_in(-1.0, 1.0) * 1000.0) / 1000.0;
}

/// Brute-force best binary x for ||A x - b||^2, Gray-code incremental on
/// the residual vector, with exact re-evaluation of near-minimal
/// candidates. Returns all minimizers (ascending index) and the minimum.
inline std::pair<double, std::vector<std::uint32_t>> best_binary_solutions(
    const Matrix& a, const std::vector<double>& b) {
  const int n = static_cast<int>(a.cols);
  const std::size_t m = a.rows;
  const std::uint64_t total = 1ull << n;

  std::vector<double> residual(b.size());
  for (std::size_t i = 0; i < m; ++i) residual[i] = -b[i];  // x = 0
  auto cost = [&]() {
    double s = 0.0;
    for (double r : residual) s += r * r;
    return s;
  };

  double rough_min = cost();
  std::vector<int> x(n, 0);
  {
    auto res = residual;
    auto xx = x;
    for (std::uint64_t step = 1; step < total; ++step) {
      int t = __builtin_ctzll(step);
      const double sgn = xx[t] ? -1.0 : 1.0;
      xx[t] ^= 1;
      double s = 0.0;
      for (std::size_t i = 0; i < m; ++i) {
        res[i] += sgn * a(i, t);
        s += res[i] * res[i];
      }
      rough_min = std::min(rough_min, s);
    }
  }

  const double band = 1e-6 * (1.0 + rough_min);
  std::vector<std::uint32_t> candidates;
  {
    auto res = residual;
    auto xx = x;
    std::uint64_t gray = 0;
    if (cost() <= rough_min + band) candidates.push_back(0);
    for (std::uint64_t step = 1; step < total; ++step) {
      int t = __builtin_ctzll(step);
      const double sgn = xx[t] ? -1.0 : 1.0;
      xx[t] ^= 1;
      gray ^= (1ull << t);
      double s = 0.0;
      for (std::size_t i = 0; i < m; ++i) {
        res[i] += sgn * a(i, t);
        s += res[i] * res[i];
      }
      if (s <= rough_min + band) candidates.push_back(static_cast<std::uint32_t>(gray));
    }
  }

  double best = 0.0;
  bool first = true;
  std::vector<std::pair<std::uint32_t, double>> exact;
  for (std::uint32_t z : candidates) {
    std::vector<int> bits = bits_of_index(z, n);
    double s = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      double r = -b[i];
      for (int j = 0; j < n; ++j)
        if (bits[j]) r += a(i, j);
      s += r * r;
    }
    exact.push_back({z, s});
    if (first || s < best) {
      best = s;
      first = false;
    }
  }
  std::vector<std::uint32_t> minimizers;
  for (const auto& [z, s] : exact)
    if (s <= best + 1e-9 * (1.0 + best)) minimizers.push_back(z);
  std::sort(minimizers.begin(), minimizers.end());
  return {best, minimizers};
}

}  // namespace detail

/// Seeded random BLLS dataset. Entries of A are nonzero with probability
/// `density`, values uniform in [-1,1) rounded to 3 decimals; all-zero
/// rows are redrawn. Within each n the first
/// round(consistent_fraction * problems_per_n) instances are consistent
/// (x* drawn, b = A x*); the rest draw b dense from the value
/// distribution (or sparse under spec.sparse_b) and store a brute-force
/// optimum. Instance (n, i) derives its stream from (master_seed, n, i).
inline std::vector<BllsInstance> generate(const DatasetSpec& spec) {
  validate(spec);
  std::vector<BllsInstance> out;
  const int consistent_count =
      static_cast<int>(std::lround(spec.consistent_fraction * spec.problems_per_n));
  for (int n : spec.n_values) {
    for (int idx = 0; idx < spec.problems_per_n; ++idx) {
      const std::uint64_t inst_seed =
          derive(spec.master_seed, static_cast<std::uint64_t>(n),
                 static_cast<std::uint64_t>(idx));
      SplitMix64 rng(inst_seed);
      BllsInstance inst;
      inst.seed = inst_seed;
      inst.a = Matrix(spec.m, n);
      for (int i = 0; i < spec.m; ++i) {
        bool nonzero_row = false;
        for (int attempt = 0; attempt < 1000 && !nonzero_row; ++attempt) {
          for (int j = 0; j < n; ++j) {
            double v = 0.0;
            if (rng.next_double() < spec.density) v = detail::draw_value_3dp(rng);
            inst.a(i, j) = v;
            if (v != 0.0) nonzero_row = true;
          }
        }
        if (!nonzero_row)
          throw std::runtime_error("datagen: could not draw a nonzero row");
      }
      if (idx < consistent_count) {
        inst.kind = InstanceKind::consistent;
        std::vector<int> xs(n);
        for (int j = 0; j < n; ++j) xs[j] = rng.next_bit();
        std::vector<double> xd(xs.begin(), xs.end());
        inst.b = matvec(inst.a, xd);
        inst.x_star = xs;
      } else {
        inst.kind = InstanceKind::inconsistent;
        inst.b.resize(spec.m);
        for (int i = 0; i < spec.m; ++i) {
          if (spec.sparse_b && rng.next_double() >= spec.density)
            inst.b[i] = 0.0;
          else
            inst.b[i] = detail::draw_value_3dp(rng);
        }
        auto [best, minimizers] = detail::best_binary_solutions(inst.a, inst.b);
        inst.x_star = bits_of_index(minimizers.front(), n);
      }
      out.push_back(std::move(inst));
    }
  }
  return out;
}

struct ManifestRow {
  std::string instance_id;
  int n = 0;
  InstanceKind kind = InstanceKind::inconsistent;
  double ground_energy = 0.0;  // Ising ground energy (offset excluded)
  int n_ground_states = 0;
};

/// Writes one JSON file per instance plus manifest.csv with the Ising
/// ground data found by brute force.
inline std::vector<ManifestRow> write_dataset(const std::vector<BllsInstance>& instances,
                                              const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  std::vector<ManifestRow> rows;
  std::map<int, int> index_by_n;
  std::ostringstream manifest;
  manifest << "# qlslab-manifest-v1\n";
  manifest << "instance_id,n,kind,ground_energy,n_ground_states\n";
  for (const auto& inst : instances) {
    const int n = static_cast<int>(inst.n());
    const int idx = index_by_n[n]++;
    ManifestRow row;
    row.instance_id = instance_id(n, idx);
    row.n = n;
    row.kind = inst.kind;
    auto ising = qubo_to_ising(encode_qubo(inst));
    auto ground = brute_force_solve(ising);
    row.ground_energy = ground.ground_energy;
    row.n_ground_states = static_cast<int>(ground.ground_states.size());
    rows.push_back(row);
    save_instance(inst, out_dir / ("instance_" + row.instance_id + ".json"));
    manifest << row.instance_id << ',' << n << ',' << to_string(inst.kind) << ','
             << format_double(row.ground_energy) << ',' << row.n_ground_states << "\n";
  }
  write_text_file(out_dir / "manifest.csv", manifest.str());
  return rows;
}

}  // namespace qlslab

#endif  // QLSLAB_DATAGEN_HPP
