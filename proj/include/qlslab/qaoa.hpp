#ifndef QLSLAB_QAOA_HPP
#define QLSLAB_QAOA_HPP

#include <cstdint>
#include <memory>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "qlslab/circuit.hpp"
#include "qlslab/fit.hpp"
#include "qlslab/imfil.hpp"
#include "qlslab/noise.hpp"
#include "qlslab/qubo.hpp"
#include "qlslab/statevector.hpp"

namespace qlslab {

enum class BackendKind { exact_statevector, shot_sampling, noisy };

struct BackendMode {
  BackendKind kind = BackendKind::exact_statevector;
  std::uint64_t shots = 0;
  NoiseModel noise;
  CouplingMap coupling;

  static BackendMode exact() { return {}; }

  static BackendMode shot_based(std::uint64_t shots) {
    BackendMode m;
    m.kind = BackendKind::shot_sampling;
    m.shots = shots;
    return m;
  }

  static BackendMode noisy_mode(NoiseModel nm, std::uint64_t shots, CouplingMap map) {
    BackendMode m;
    m.kind = BackendKind::noisy;
    m.noise = nm;
    m.shots = shots;
    m.coupling = std::move(map);
    return m;
  }

  std::string label() const {
    switch (kind) {
      case BackendKind::exact_statevector: return "exact";
      case BackendKind::shot_sampling: return "shots";
      case BackendKind::noisy: return "noisy";
    }
    return "?";
  }
};

inline void validate(const BackendMode& m) {
  if (m.kind != BackendKind::exact_statevector && m.shots < 1)
    throw std::invalid_argument("backend mode requires shots >= 1");
  if (m.kind == BackendKind::noisy) {
    validate(m.noise);
    if (!is_connected(m.coupling))
      throw std::invalid_argument("noisy mode requires a connected coupling map");
  }
}

/// Per-problem context: the energy table and the brute-force ground set
/// are computed once and shared across all angle evaluations.
class QaoaProblem {
 public:
  explicit QaoaProblem(IsingProblem ising)
      : ising_(std::move(ising)),
        table_(energy_table(ising_)),
        ground_(brute_force_solve(ising_)) {}

  const IsingProblem& ising() const { return ising_; }
  const std::vector<double>& table() const { return table_; }
  const BruteForceResult& ground() const { return ground_; }
  int n() const { return ising_.n(); }

 private:
  IsingProblem ising_;
  std::vector<double> table_;
  BruteForceResult ground_;
};

/// One objective evaluation at fixed angles. Angle ranges are not
/// enforced here; the optimizer's box does that, and periodicity tests
/// deliberately probe outside it.
inline double objective(const QaoaProblem& prob, const QaoaParams& params,
                        const BackendMode& mode, std::uint64_t seed) {
  validate(mode);
  switch (mode.kind) {
    case BackendKind::exact_statevector:
      return expectation_exact(prob.table(),
                               qaoa_state_fast(prob.ising(), params, prob.table()));
    case BackendKind::shot_sampling: {
      auto state = qaoa_state_fast(prob.ising(), params, prob.table());
      return expectation_from_samples(prob.ising(), sample(state, mode.shots, seed));
    }
    case BackendKind::noisy: {
      Circuit c = route(build_qaoa_circuit(prob.ising(), params, true), mode.coupling);
      SampleSet raw = simulate_noisy(c, mode.noise, mode.shots, seed);
      return expectation_from_samples(prob.ising(),
                                      relabel_counts(raw, c.layout, prob.n()));
    }
  }
  throw std::logic_error("unreachable");
}

inline double objective(const IsingProblem& ising, const QaoaParams& params,
                        const BackendMode& mode, std::uint64_t seed) {
  return objective(QaoaProblem(ising), params, mode, seed);
}

/// Probability mass of the ground-state bitstrings in |psi(gamma,beta)>^2.
inline double success_probability(const QaoaProblem& prob, const QaoaParams& params) {
  auto state = qaoa_state_fast(prob.ising(), params, prob.table());
  double total = 0.0;
  for (std::uint32_t z : prob.ground().ground_states) total += std::norm(state.amps[z]);
  return total;
}

inline double success_probability(const IsingProblem& ising, const QaoaParams& params) {
  return success_probability(QaoaProblem(ising), params);
}

struct QaoaRunConfig {
  int p = 1;
  BackendMode mode = BackendMode::exact();
  OptimizerConfig opt;
  int n_starts = 20;
  std::uint64_t seed = 0;
  std::uint64_t final_shots = 1024;  // final sampling for the record
  bool rel_error_with_offset = false;
};

struct RunRecord {
  std::string instance_id;
  int n = 0;
  int p = 1;
  std::string mode;
  std::uint64_t shots = 0;
  std::uint64_t seed = 0;
  std::vector<double> best_gamma;
  std::vector<double> best_beta;
  double exact_expectation = 0.0;
  double ground_energy = 0.0;
  double rel_error = 0.0;
  double success_prob = 0.0;
  double best_sampled_energy = 0.0;
  int n_ground = 0;
  bool ground_hit = false;  // ground bitstring appeared in the final samples
  SampleSet final_counts;
  std::vector<std::pair<int, double>> trace;
  std::string trace_csv_path;
  int evaluations_used = 0;
  bool converged = false;
};

inline nlohmann::json to_json(const RunRecord& r) {
  nlohmann::json j;
  j["instance_id"] = r.instance_id;
  j["n"] = r.n;
  j["p"] = r.p;
  j["mode"] = r.mode;
  j["shots"] = r.shots;
  j["seed"] = r.seed;
  j["best_gamma"] = r.best_gamma;
  j["best_beta"] = r.best_beta;
  j["exact_expectation"] = r.exact_expectation;
  j["ground_energy"] = r.ground_energy;
  j["rel_error"] = r.rel_error;
  j["success_prob"] = r.success_prob;
  j["best_sampled_energy"] = r.best_sampled_energy;
  j["n_ground"] = r.n_ground;
  j["ground_hit"] = r.ground_hit;
  j["final_counts"] = to_json(r.final_counts);
  nlohmann::json tr = nlohmann::json::array();
  for (const auto& [idx, v] : r.trace) tr.push_back({idx, v});
  j["trace"] = tr;
  j["trace_csv_path"] = r.trace_csv_path;
  j["evaluations_used"] = r.evaluations_used;
  j["converged"] = r.converged;
  return j;
}

inline RunRecord run_record_from_json(const nlohmann::json& j) {
  RunRecord r;
  r.instance_id = j.at("instance_id").get<std::string>();
  r.n = j.at("n").get<int>();
  r.p = j.at("p").get<int>();
  r.mode = j.at("mode").get<std::string>();
  r.shots = j.at("shots").get<std::uint64_t>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.best_gamma = j.at("best_gamma").get<std::vector<double>>();
  r.best_beta = j.at("best_beta").get<std::vector<double>>();
  r.exact_expectation = j.at("exact_expectation").get<double>();
  r.ground_energy = j.at("ground_energy").get<double>();
  r.rel_error = j.at("rel_error").get<double>();
  r.success_prob = j.at("success_prob").get<double>();
  r.best_sampled_energy = j.at("best_sampled_energy").get<double>();
  r.n_ground = j.at("n_ground").get<int>();
  r.ground_hit = j.at("ground_hit").get<bool>();
  r.final_counts = sample_set_from_json(j.at("final_counts"));
  for (const auto& e : j.at("trace"))
    r.trace.push_back({e.at(0).get<int>(), e.at(1).get<double>()});
  r.trace_csv_path = j.at("trace_csv_path").get<std::string>();
  r.evaluations_used = j.at("evaluations_used").get<int>();
  r.converged = j.at("converged").get<bool>();
  return r;
}

/// Full variational run: multi-start implicit filtering over the 2p
/// angles, then one exact statevector pass at the best angles for the
/// reported expectation, relative error and success probability
/// (regardless of the optimization backend), plus a final sampling round.
///
/// `qubo_constant` is only consulted when rel_error_with_offset shifts
/// both energies back to residual form.
inline RunRecord run_qaoa(const QaoaProblem& prob, const QaoaRunConfig& cfg,
                          const std::string& instance_id = "",
                          double qubo_constant = 0.0) {
  if (cfg.p < 1) throw std::invalid_argument("run_qaoa: p must be >= 1");
  validate(cfg.mode);
  constexpr double pi = std::numbers::pi;
  const int p = cfg.p;

  // parameter packing: gamma_1..gamma_p then beta_1..beta_p
  BoxBounds bounds;
  bounds.lower.assign(2 * p, 0.0);
  bounds.upper.resize(2 * p);
  for (int l = 0; l < p; ++l) {
    bounds.upper[l] = 2 * pi;
    bounds.upper[p + l] = pi;
  }
  auto unpack = [p](std::span<const double> x) {
    QaoaParams params;
    params.gamma.assign(x.begin(), x.begin() + p);
    params.beta.assign(x.begin() + p, x.begin() + 2 * p);
    return params;
  };

  auto factory = [&](std::uint64_t start_idx) -> Objective {
    auto counter = std::make_shared<std::uint64_t>(0);
    return [&prob, &cfg, start_idx, counter, unpack](std::span<const double> x) {
      std::uint64_t eval_seed = derive(cfg.seed, 0xe7a1, start_idx, (*counter)++);
      return objective(prob, unpack(x), cfg.mode, eval_seed);
    };
  };

  OptimizationResult opt =
      multi_start_minimize(factory, bounds, cfg.opt, cfg.n_starts, cfg.seed);

  RunRecord rec;
  rec.instance_id = instance_id;
  rec.n = prob.n();
  rec.p = p;
  rec.mode = cfg.mode.label();
  rec.shots = cfg.mode.shots;
  rec.seed = cfg.seed;
  QaoaParams best = unpack(opt.best_point);
  rec.best_gamma = best.gamma;
  rec.best_beta = best.beta;
  rec.trace = opt.trace;
  rec.evaluations_used = opt.evaluations_used;
  rec.converged = opt.converged;

  // exact re-evaluation at the optimized angles
  auto state = qaoa_state_fast(prob.ising(), best, prob.table());
  rec.exact_expectation = expectation_exact(prob.table(), state);
  rec.ground_energy = prob.ground().ground_energy;
  rec.n_ground = static_cast<int>(prob.ground().ground_states.size());
  double succ = 0.0;
  for (std::uint32_t z : prob.ground().ground_states) succ += std::norm(state.amps[z]);
  rec.success_prob = succ;

  if (cfg.rel_error_with_offset) {
    const double shift = prob.ising().offset + qubo_constant;
    rec.rel_error = relative_error(rec.exact_expectation + shift,
                                   rec.ground_energy + shift);
  } else {
    rec.rel_error = relative_error(rec.exact_expectation, rec.ground_energy);
  }

  // final sampling round for the record
  std::uint64_t sample_seed = derive(cfg.seed, 0x5a3d1e);
  if (cfg.mode.kind == BackendKind::noisy) {
    Circuit c = route(build_qaoa_circuit(prob.ising(), best, true), cfg.mode.coupling);
    SampleSet raw = simulate_noisy(c, cfg.mode.noise, cfg.final_shots, sample_seed);
    rec.final_counts = relabel_counts(raw, c.layout, prob.n());
  } else {
    rec.final_counts = sample(state, cfg.final_shots, sample_seed);
  }
  bool first = true;
  for (const auto& [bits, cnt] : rec.final_counts.counts) {
    double e = ising_energy(prob.ising(), index_of_bitstring(bits));
    if (first || e < rec.best_sampled_energy) rec.best_sampled_energy = e;
    first = false;
    for (std::uint32_t z : prob.ground().ground_states)
      if (z == index_of_bitstring(bits)) rec.ground_hit = true;
  }
  return rec;
}

inline RunRecord run_qaoa(const IsingProblem& ising, const QaoaRunConfig& cfg,
                          const std::string& instance_id = "",
                          double qubo_constant = 0.0) {
  return run_qaoa(QaoaProblem(ising), cfg, instance_id, qubo_constant);
}

}  // namespace qlslab

#endif  // QLSLAB_QAOA_HPP
