#include "aci/rng.hpp"

#include <cmath>

namespace aci::rng {

double uniform(std::uint64_t seed, std::uint64_t counter) {
  // Two rounds of avalanche decorrelate seed and counter contributions.
  std::uint64_t z = mix64(mix64(seed) ^ mix64(counter ^ 0xd1b54a32d192ed03ull));
  // 53 mantissa bits, shifted into (0,1) by the half-ulp offset.
  return (static_cast<double>(z >> 11) + 0.5) * 0x1.0p-53;
}

double normal(std::uint64_t seed, std::uint64_t step, std::uint32_t channel) {
  const std::uint64_t base = (step * kMaxChannels + channel) * 2;
  const double u1 = uniform(seed, base);
  const double u2 = uniform(seed, base + 1);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586477 * u2);
}

}  // namespace aci::rng
