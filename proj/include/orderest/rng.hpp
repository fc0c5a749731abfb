#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace orderest::rng {

// Named, versioned streams. Changing how a stream's draws are consumed must
// bump its version so old seeds are not silently reinterpreted.
inline constexpr std::string_view kBootstrap = "bootstrap/v1";
inline constexpr std::string_view kEstimationSim = "estimation-sim/v1";
inline constexpr std::string_view kPowerSimData = "power-sim/data/v1";
inline constexpr std::string_view kPowerSimBootstrap = "power-sim/bootstrap/v1";
inline constexpr std::string_view kSeedGeneration = "seed/v1";

using Engine = std::mt19937_64;

std::uint64_t splitmix64(std::uint64_t x);

// Deterministic seed for draw `index` of `stream` under `master`.
std::uint64_t stream_seed(std::uint64_t master, std::string_view stream, std::uint64_t index);

inline Engine make_engine(std::uint64_t master, std::string_view stream, std::uint64_t index) {
  return Engine(stream_seed(master, stream, index));
}

}  // namespace orderest::rng
