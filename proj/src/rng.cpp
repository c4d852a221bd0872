#include "loopfield/rng.hpp"

namespace loopfield {

RandomStream derive_stream(std::uint64_t master_seed, std::uint64_t replica_index) {
  const std::uint64_t key =
      splitmix64_mix(splitmix64_mix(master_seed) ^ splitmix64_mix(~replica_index));
  return RandomStream(key);
}

}  // namespace loopfield
