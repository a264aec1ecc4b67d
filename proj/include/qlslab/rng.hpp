#ifndef QLSLAB_RNG_HPP
#define QLSLAB_RNG_HPP

#include <cstdint>
#include <string_view>
#include <vector>

namespace qlslab {

/// SplitMix64 stream generator (Steele, Lea & Flood 2014).
///
/// Used instead of <random> engines + distributions because distribution
/// output is not pinned by the C++ standard across implementations; every
/// helper below produces identical values on every platform for a given
/// seed. Streams are split via derive(), never by sharing a generator.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform double in [0, 1) with 53-bit resolution.
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Uniform double in [lo, hi).
  double next_in(double lo, double hi) { return lo + (hi - lo) * next_double(); }

  /// Uniform integer in [0, n). Lemire multiply-shift; the tiny modulo
  /// bias is irrelevant for n << 2^64 and keeps the draw to one u64.
  std::uint64_t next_below(std::uint64_t n) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
  }

  int next_bit() { return static_cast<int>(next_u64() >> 63); }

 private:
  std::uint64_t state_;
};

namespace detail {
inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}
}  // namespace detail

/// Derives an independent child seed from (seed, id). Nested calls split
/// by tuples: derive(derive(s, a), b) is the canonical (s, a, b) stream.
inline std::uint64_t derive(std::uint64_t seed, std::uint64_t id) {
  return detail::mix64(detail::mix64(seed + 0x9e3779b97f4a7c15ULL) ^
                       detail::mix64(id + 0x7f4a7c159e3779b9ULL));
}

inline std::uint64_t derive(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  return derive(derive(seed, a), b);
}

inline std::uint64_t derive(std::uint64_t seed, std::uint64_t a, std::uint64_t b,
                            std::uint64_t c) {
  return derive(derive(seed, a, b), c);
}

/// FNV-1a, for folding string ids (instance names, mode labels) into seeds.
inline std::uint64_t hash_string(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Fisher-Yates shuffle driven by the stream generator.
template <typename T>
void shuffle(std::vector<T>& v, SplitMix64& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    std::size_t j = static_cast<std::size_t>(rng.next_below(i));
    std::swap(v[i - 1], v[j]);
  }
}

}  // namespace qlslab

#endif  // QLSLAB_RNG_HPP
