#pragma once

#include <cstdint>

namespace aci::rng {

// Counter-based (stateless) random streams.  Every draw is a pure function of
// (seed, step, channel), so inserting diagnostics or reordering loops can
// never perturb a simulation stream, and two runs with the same seed produce
// bit-identical trajectories regardless of call pattern.
//
// The generator is a splitmix64-style avalanche applied to the packed counter;
// normals come from Box-Muller on two such uniforms.  Statistical quality is
// ample for Monte Carlo work (equidistribution studied extensively for this
// finalizer); it is not a cryptographic PRF.

inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// Uniform in (0,1); never returns exactly 0 or 1.
double uniform(std::uint64_t seed, std::uint64_t counter);

// Standard normal draw addressed by (step, channel).  Channels index the full
// Wiener vector (W1 channels first, then W2), at most 64 per model.
double normal(std::uint64_t seed, std::uint64_t step, std::uint32_t channel);

inline constexpr std::uint32_t kMaxChannels = 64;

}  // namespace aci::rng
