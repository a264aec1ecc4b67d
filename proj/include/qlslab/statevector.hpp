#ifndef QLSLAB_STATEVECTOR_HPP
#define QLSLAB_STATEVECTOR_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "qlslab/circuit.hpp"
#include "qlslab/qubo.hpp"
#include "qlslab/rng.hpp"

namespace qlslab {

inline constexpr int kMaxSimQubits = 20;

/// 2^n complex amplitudes. Bit j of an amplitude's index is qubit j's
/// measured value, matching the bitstring helpers in qubo.hpp.
struct StateVector {
  int n_qubits = 0;
  std::vector<std::complex<double>> amps;

  static StateVector zero_state(int n) {
    if (n < 1 || n > kMaxSimQubits)
      throw std::invalid_argument("statevector qubit budget exceeded");
    StateVector s;
    s.n_qubits = n;
    s.amps.assign(std::size_t{1} << n, {0.0, 0.0});
    s.amps[0] = 1.0;
    return s;
  }

  static StateVector uniform(int n) {
    if (n < 1 || n > kMaxSimQubits)
      throw std::invalid_argument("statevector qubit budget exceeded");
    StateVector s;
    s.n_qubits = n;
    const std::size_t total = std::size_t{1} << n;
    s.amps.assign(total, std::complex<double>(1.0 / std::sqrt(double(total)), 0.0));
    return s;
  }

  double norm_sq() const {
    double t = 0.0;
    for (const auto& a : amps) t += std::norm(a);
    return t;
  }
};

namespace detail {

// applies a general 2x2 matrix to qubit q
inline void apply_1q(StateVector& s, int q, std::complex<double> m00,
                     std::complex<double> m01, std::complex<double> m10,
                     std::complex<double> m11) {
  const std::size_t bit = std::size_t{1} << q;
  const std::size_t total = s.amps.size();
  for (std::size_t base = 0; base < total; ++base) {
    if (base & bit) continue;
    auto& a0 = s.amps[base];
    auto& a1 = s.amps[base | bit];
    auto t0 = m00 * a0 + m01 * a1;
    auto t1 = m10 * a0 + m11 * a1;
    a0 = t0;
    a1 = t1;
  }
}

}  // namespace detail

inline void apply_gate(StateVector& s, const Gate& g) {
  using cd = std::complex<double>;
  const cd i(0.0, 1.0);
  switch (g.kind) {
    case GateKind::H: {
      const double r = 1.0 / std::sqrt(2.0);
      detail::apply_1q(s, g.q0, r, r, r, -r);
      break;
    }
    case GateKind::RX: {
      const double c = std::cos(g.a0 / 2), sn = std::sin(g.a0 / 2);
      detail::apply_1q(s, g.q0, c, -i * sn, -i * sn, c);
      break;
    }
    case GateKind::RZ: {
      const cd e0 = std::exp(-i * (g.a0 / 2)), e1 = std::exp(i * (g.a0 / 2));
      const std::size_t bit = std::size_t{1} << g.q0;
      for (std::size_t z = 0; z < s.amps.size(); ++z) s.amps[z] *= (z & bit) ? e1 : e0;
      break;
    }
    case GateKind::U1: {
      const cd e1 = std::exp(i * g.a0);
      const std::size_t bit = std::size_t{1} << g.q0;
      for (std::size_t z = 0; z < s.amps.size(); ++z)
        if (z & bit) s.amps[z] *= e1;
      break;
    }
    case GateKind::U3: {
      const double c = std::cos(g.a0 / 2), sn = std::sin(g.a0 / 2);
      detail::apply_1q(s, g.q0, c, -std::exp(i * g.a2) * sn, std::exp(i * g.a1) * sn,
                       std::exp(i * (g.a1 + g.a2)) * c);
      break;
    }
    case GateKind::CNOT: {
      const std::size_t cb = std::size_t{1} << g.q0;
      const std::size_t tb = std::size_t{1} << g.q1;
      for (std::size_t z = 0; z < s.amps.size(); ++z)
        if ((z & cb) && !(z & tb)) std::swap(s.amps[z], s.amps[z | tb]);
      break;
    }
    case GateKind::SWAP: {
      const std::size_t ab = std::size_t{1} << g.q0;
      const std::size_t bb = std::size_t{1} << g.q1;
      for (std::size_t z = 0; z < s.amps.size(); ++z)
        if ((z & ab) && !(z & bb)) std::swap(s.amps[z], s.amps[(z & ~ab) | bb]);
      break;
    }
  }
}

/// Exact simulation from |0...0>.
inline StateVector simulate(const Circuit& c) {
  validate(c);
  StateVector s = StateVector::zero_state(c.n_qubits);
  for (const auto& g : c.gates) apply_gate(s, g);
  return s;
}

// ---- fast diagonal QAOA path -----------------------------------------------

/// QAOA state without building a circuit: the cost layer is a diagonal
/// phase e^{-i gamma E(z)} applied per index, the mixer an RX(2 beta) on
/// every qubit. Matches the gate path up to global phase; the gate path
/// splits the same diagonal into per-term RZ rotations.
inline StateVector qaoa_state_fast(const IsingProblem& p_ising, const QaoaParams& params,
                                   const std::vector<double>& energies) {
  const int n = p_ising.n();
  StateVector s = StateVector::uniform(n);
  if (energies.size() != s.amps.size())
    throw std::invalid_argument("energy table size mismatch");
  using cd = std::complex<double>;
  const cd i(0.0, 1.0);
  for (int l = 0; l < params.p(); ++l) {
    const double gamma = params.gamma[l];
    for (std::size_t z = 0; z < s.amps.size(); ++z)
      s.amps[z] *= std::exp(-i * (gamma * energies[z]));
    const double beta2 = 2.0 * params.beta[l];
    for (int q = 0; q < n; ++q) apply_gate(s, Gate::rx(q, beta2));
  }
  return s;
}

inline StateVector qaoa_state_fast(const IsingProblem& p_ising, const QaoaParams& params) {
  return qaoa_state_fast(p_ising, params, energy_table(p_ising));
}

// ---- expectation values ------------------------------------------------------

/// <psi| C |psi> = sum_z |psi_z|^2 E(z); the Ising offset is excluded.
inline double expectation_exact(const std::vector<double>& energies,
                                const StateVector& state) {
  if (energies.size() != state.amps.size())
    throw std::invalid_argument("expectation_exact: dimension mismatch");
  KahanSum acc;
  for (std::size_t z = 0; z < energies.size(); ++z)
    acc.add(std::norm(state.amps[z]) * energies[z]);
  return acc.value();
}

inline double expectation_exact(const IsingProblem& p_ising, const StateVector& state) {
  if ((std::size_t{1} << p_ising.n()) != state.amps.size())
    throw std::invalid_argument("expectation_exact: dimension mismatch");
  return expectation_exact(energy_table(p_ising), state);
}

// ---- sampling ----------------------------------------------------------------

/// Measurement counts keyed by printed bitstring (qubit-1-first).
struct SampleSet {
  std::map<std::string, std::uint64_t> counts;
  std::uint64_t shots = 0;
};

inline nlohmann::json to_json(const SampleSet& s) {
  nlohmann::json j;
  j["shots"] = s.shots;
  j["counts"] = s.counts;
  return j;
}

inline SampleSet sample_set_from_json(const nlohmann::json& j) {
  SampleSet s;
  s.shots = j.at("shots").get<std::uint64_t>();
  for (auto it = j.at("counts").begin(); it != j.at("counts").end(); ++it)
    s.counts[it.key()] = it.value().get<std::uint64_t>();
  return s;
}

namespace detail {

inline std::vector<double> probability_cdf(const StateVector& s) {
  std::vector<double> cdf(s.amps.size());
  double run = 0.0;
  for (std::size_t z = 0; z < s.amps.size(); ++z) {
    run += std::norm(s.amps[z]);
    cdf[z] = run;
  }
  // guard the top against rounding so u in [0,1) always lands
  cdf.back() = std::max(cdf.back(), 1.0);
  return cdf;
}

inline std::uint32_t cdf_draw(const std::vector<double>& cdf, double u) {
  auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
  return static_cast<std::uint32_t>(it - cdf.begin());
}

}  // namespace detail

/// Multinomial draw from |psi_z|^2. Shot s draws from the derived stream
/// (seed, s), so sampling is schedule-independent and a noisy simulation
/// at scale zero consumes randomness identically.
inline SampleSet sample(const StateVector& state, std::uint64_t shots,
                        std::uint64_t rng_seed) {
  if (shots < 1) throw std::invalid_argument("sample: shots must be >= 1");
  auto cdf = detail::probability_cdf(state);
  std::map<std::uint32_t, std::uint64_t> hist;
  for (std::uint64_t s = 0; s < shots; ++s) {
    SplitMix64 rng(derive(rng_seed, s));
    ++hist[detail::cdf_draw(cdf, rng.next_double())];
  }
  SampleSet out;
  out.shots = shots;
  for (const auto& [z, c] : hist) out.counts[bitstring_of_index(z, state.n_qubits)] = c;
  return out;
}

/// Count-weighted mean Ising energy of a sample set.
inline double expectation_from_samples(const IsingProblem& p_ising, const SampleSet& s) {
  if (s.shots == 0 || s.counts.empty())
    throw std::invalid_argument("expectation_from_samples: empty sample set");
  KahanSum acc;
  std::uint64_t total = 0;
  for (const auto& [bits, c] : s.counts) {
    acc.add(static_cast<double>(c) * ising_energy(p_ising, index_of_bitstring(bits)));
    total += c;
  }
  return acc.value() / static_cast<double>(total);
}

/// Reads logical bit j from wire layout[j]; wires beyond n_logical are
/// dropped. Used to undo routing before energies are computed.
inline SampleSet relabel_counts(const SampleSet& s, const std::vector<int>& layout,
                                int n_logical) {
  SampleSet out;
  out.shots = s.shots;
  std::map<std::string, std::uint64_t> merged;
  for (const auto& [bits, c] : s.counts) {
    std::string logical(n_logical, '0');
    for (int j = 0; j < n_logical; ++j) logical[j] = bits.at(layout.at(j));
    merged[logical] += c;
  }
  out.counts = std::move(merged);
  return out;
}

}  // namespace qlslab

#endif  // QLSLAB_STATEVECTOR_HPP
