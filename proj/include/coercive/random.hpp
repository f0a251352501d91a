#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace coercive {

using Rng = std::mt19937_64;

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Independent stream `stream` derived from `seed`; used to give each trial,
// cell or neuron its own generator so parallel runs stay reproducible.
inline Rng make_rng(std::uint64_t seed, std::uint64_t stream = 0) {
  return Rng(splitmix64(seed ^ splitmix64(stream + 0x632be59bd9b4e019ULL)));
}

inline double standard_normal(Rng& rng) {
  return std::normal_distribution<double>(0.0, 1.0)(rng);
}

inline double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

std::vector<double> gaussian_vector(Rng& rng, std::size_t n, double scale = 1.0);
// Uniform on the unit sphere S^{n-1}.
std::vector<double> random_unit_vector(Rng& rng, std::size_t n);

}  // namespace coercive
