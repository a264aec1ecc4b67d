#ifndef QLSLAB_NOISE_HPP
#define QLSLAB_NOISE_HPP

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "qlslab/circuit.hpp"
#include "qlslab/rng.hpp"
#include "qlslab/statevector.hpp"

namespace qlslab {

/// Stochastic Pauli + readout-flip noise. After every gate each involved
/// qubit suffers a uniformly random non-identity Pauli with probability
/// p1*scale (single-qubit gates) or p2*scale (two-qubit gates); each
/// measured bit flips with probability p_ro*scale. Base rates default to
/// typical published device magnitudes.
struct NoiseModel {
  double p1 = 0.001;
  double p2 = 0.02;
  double p_ro = 0.02;
  double scale = 1.0;

  double eff_p1() const { return p1 * scale; }
  double eff_p2() const { return p2 * scale; }
  double eff_p_ro() const { return p_ro * scale; }
};

inline void validate(const NoiseModel& nm) {
  if (nm.scale < 0.0) throw std::invalid_argument("noise scale must be >= 0");
  for (double p : {nm.eff_p1(), nm.eff_p2(), nm.eff_p_ro()})
    if (!(p >= 0.0 && p <= 1.0))
      throw std::invalid_argument("effective noise probability outside [0,1]");
}

namespace detail {

inline void apply_pauli(StateVector& s, int q, int which) {
  using cd = std::complex<double>;
  const cd i(0.0, 1.0);
  const std::size_t bit = std::size_t{1} << q;
  switch (which) {
    case 0:  // X
      for (std::size_t z = 0; z < s.amps.size(); ++z)
        if (z & bit) std::swap(s.amps[z], s.amps[z & ~bit]);
      break;
    case 1:  // Y
      for (std::size_t z = 0; z < s.amps.size(); ++z)
        if (z & bit) {
          auto a1 = s.amps[z];
          s.amps[z] = i * s.amps[z & ~bit];
          s.amps[z & ~bit] = -i * a1;
        }
      break;
    default:  // Z
      for (std::size_t z = 0; z < s.amps.size(); ++z)
        if (z & bit) s.amps[z] = -s.amps[z];
      break;
  }
}

}  // namespace detail

/// Per-shot trajectory sampling. Shot s uses the derived stream (seed, s),
/// drawing one uniform per involved qubit per gate (only while the
/// effective rate is positive), then the measurement draw, then one
/// uniform per bit for readout. At scale = 0 no noise draws occur, so the
/// counts equal sample(simulate(c), shots, seed) exactly.
///
/// Shots where no error triggers reuse one precomputed noiseless state, so
/// lightly-noisy simulations cost little more than noiseless sampling.
inline SampleSet simulate_noisy(const Circuit& c, const NoiseModel& nm,
                                std::uint64_t shots, std::uint64_t rng_seed) {
  validate(nm);
  validate(c);
  if (shots < 1) throw std::invalid_argument("simulate_noisy: shots must be >= 1");

  const StateVector clean_state = simulate(c);
  const std::vector<double> clean_cdf = detail::probability_cdf(clean_state);
  const double q1 = nm.eff_p1(), q2 = nm.eff_p2(), qro = nm.eff_p_ro();

  std::map<std::uint32_t, std::uint64_t> hist;
  StateVector work;  // reused buffer for dirty shots
  for (std::uint64_t s = 0; s < shots; ++s) {
    SplitMix64 rng(derive(rng_seed, s));
    bool dirty = false;
    for (std::size_t gi = 0; gi < c.gates.size(); ++gi) {
      const Gate& g = c.gates[gi];
      if (dirty) apply_gate(work, g);
      const double p = g.two_qubit() ? q2 : q1;
      if (p <= 0.0) continue;
      const int nq = g.two_qubit() ? 2 : 1;
      for (int k = 0; k < nq; ++k) {
        if (rng.next_double() >= p) continue;
        int pauli = static_cast<int>(rng.next_below(3));
        if (!dirty) {
          // replay the prefix including this gate, then go trajectory-wise
          work = StateVector::zero_state(c.n_qubits);
          for (std::size_t gj = 0; gj <= gi; ++gj) apply_gate(work, c.gates[gj]);
          dirty = true;
        }
        detail::apply_pauli(work, k == 0 ? g.q0 : g.q1, pauli);
      }
    }
    std::uint32_t z;
    if (dirty) {
      auto cdf = detail::probability_cdf(work);
      z = detail::cdf_draw(cdf, rng.next_double());
    } else {
      z = detail::cdf_draw(clean_cdf, rng.next_double());
    }
    if (qro > 0.0)
      for (int q = 0; q < c.n_qubits; ++q)
        if (rng.next_double() < qro) z ^= (1u << q);
    ++hist[z];
  }

  SampleSet out;
  out.shots = shots;
  for (const auto& [z, cnt] : hist) out.counts[bitstring_of_index(z, c.n_qubits)] = cnt;
  return out;
}

}  // namespace qlslab

#endif  // QLSLAB_NOISE_HPP
