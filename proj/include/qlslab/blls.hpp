#ifndef QLSLAB_BLLS_HPP
#define QLSLAB_BLLS_HPP

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "qlslab/io.hpp"
#include "qlslab/linalg.hpp"

namespace qlslab {

enum class InstanceKind { consistent, inconsistent };

inline std::string to_string(InstanceKind k) {
  return k == InstanceKind::consistent ? "consistent" : "inconsistent";
}

inline InstanceKind instance_kind_from_string(const std::string& s) {
  if (s == "consistent") return InstanceKind::consistent;
  if (s == "inconsistent") return InstanceKind::inconsistent;
  throw std::invalid_argument("unknown instance kind: " + s);
}

/// A binary linear least squares problem: minimize ||A x - b||^2 over
/// x in {0,1}^n. When a known optimum is stored it is kept as x_star.
struct BllsInstance {
  Matrix a;                                // m x n
  std::vector<double> b;                   // length m
  std::optional<std::vector<int>> x_star;  // known optimum, 0/1 entries
  InstanceKind kind = InstanceKind::inconsistent;
  std::uint64_t seed = 0;

  std::size_t m() const { return a.rows; }
  std::size_t n() const { return a.cols; }
};

inline double residual_norm_sq(const BllsInstance& inst, std::span<const int> x) {
  if (x.size() != inst.n()) throw std::invalid_argument("x length mismatch");
  double total = 0.0;
  for (std::size_t i = 0; i < inst.m(); ++i) {
    double r = -inst.b[i];
    for (std::size_t j = 0; j < inst.n(); ++j)
      if (x[j]) r += inst.a(i, j);
    total += r * r;
  }
  return total;
}

inline void validate(const BllsInstance& inst) {
  if (inst.m() < 1 || inst.n() < 1) throw std::invalid_argument("empty instance");
  if (inst.b.size() != inst.m()) throw std::invalid_argument("b length != m");
  for (double v : inst.a.data)
    if (!std::isfinite(v)) throw std::invalid_argument("non-finite entry in A");
  for (double v : inst.b)
    if (!std::isfinite(v)) throw std::invalid_argument("non-finite entry in b");
  if (inst.x_star) {
    if (inst.x_star->size() != inst.n())
      throw std::invalid_argument("x_star length != n");
    for (int v : *inst.x_star)
      if (v != 0 && v != 1) throw std::invalid_argument("x_star not binary");
    if (inst.kind == InstanceKind::consistent) {
      auto ax = matvec(inst.a, [&] {
        std::vector<double> xd(inst.x_star->begin(), inst.x_star->end());
        return xd;
      }());
      for (std::size_t i = 0; i < inst.m(); ++i)
        if (std::abs(ax[i] - inst.b[i]) > 1e-9)
          throw std::invalid_argument("consistent instance violates A x* = b");
    }
  }
}

inline nlohmann::json to_json(const BllsInstance& inst) {
  nlohmann::json j;
  j["m"] = inst.m();
  j["n"] = inst.n();
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t i = 0; i < inst.m(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (std::size_t c = 0; c < inst.n(); ++c) row.push_back(inst.a(i, c));
    rows.push_back(row);
  }
  j["A"] = rows;
  j["b"] = inst.b;
  if (inst.x_star)
    j["x_star"] = *inst.x_star;
  else
    j["x_star"] = nullptr;
  j["kind"] = to_string(inst.kind);
  j["seed"] = inst.seed;
  return j;
}

inline BllsInstance blls_from_json(const nlohmann::json& j) {
  BllsInstance inst;
  std::size_t m = j.at("m").get<std::size_t>();
  std::size_t n = j.at("n").get<std::size_t>();
  inst.a = Matrix(m, n);
  const auto& rows = j.at("A");
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t c = 0; c < n; ++c) inst.a(i, c) = rows.at(i).at(c).get<double>();
  inst.b = j.at("b").get<std::vector<double>>();
  if (!j.at("x_star").is_null())
    inst.x_star = j.at("x_star").get<std::vector<int>>();
  inst.kind = instance_kind_from_string(j.at("kind").get<std::string>());
  inst.seed = j.at("seed").get<std::uint64_t>();
  validate(inst);
  return inst;
}

inline void save_instance(const BllsInstance& inst, const std::filesystem::path& path) {
  write_text_file(path, to_json(inst).dump(2) + "\n");
}

inline BllsInstance load_instance(const std::filesystem::path& path) {
  return blls_from_json(nlohmann::json::parse(read_text_file(path)));
}

}  // namespace qlslab

#endif  // QLSLAB_BLLS_HPP
