#include "harqmac/random.hpp"

#include <cmath>

namespace harqmac {

std::uint64_t mix_seed(std::uint64_t value) {
  value += 0x9e3779b97f4a7c15ULL;
  value = (value ^ (value >> 30)) * 0xbf58476d1ce4e5b9ULL;
  value = (value ^ (value >> 27)) * 0x94d049bb133111ebULL;
  return value ^ (value >> 31);
}

std::uint64_t stream_id(std::uint64_t point, std::uint64_t policy) {
  return mix_seed(point * 0x100000001b3ULL + policy);
}

Rng::Rng(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(mix_seed(seed)),
                    static_cast<std::uint32_t>(mix_seed(seed) >> 32),
                    static_cast<std::uint32_t>(mix_seed(stream ^ 0xa5a5a5a5a5a5a5a5ULL)),
                    static_cast<std::uint32_t>(mix_seed(stream ^ 0xa5a5a5a5a5a5a5a5ULL) >> 32)};
  engine_.seed(seq);
}

double Rng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

double Rng::exponential() { return -std::log1p(-uniform()); }

}  // namespace harqmac
