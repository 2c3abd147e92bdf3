#pragma once

#include <cstdint>
#include <random>

namespace htsim {

using Rng = std::mt19937_64;

inline uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Seed for trajectory `index` of a run with base seed `base`. Independent of
// how trajectories are distributed over workers.
inline uint64_t trajectory_seed(uint64_t base, uint64_t index) {
  return splitmix64(base ^ splitmix64(index + 0x632be59bd9b4e019ULL));
}

inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Uniform integer in [0, n) from one draw.
inline int uniform_index(Rng& rng, int n) {
  return static_cast<int>((static_cast<unsigned __int128>(rng()) * n) >> 64);
}

}  // namespace htsim
