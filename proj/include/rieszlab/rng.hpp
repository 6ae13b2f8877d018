#pragma once

#include <cstdint>
#include <random>

namespace rieszlab {

/// (master, replica) names one reproducible random stream.
struct Seed {
  std::uint64_t master = 0;
  std::uint64_t replica = 0;
};

using Engine = std::mt19937_64;

/// Engine seeded from a splitmix64 hash of both seed components, so
/// neighbouring replica indices give unrelated streams.
Engine make_engine(Seed seed);

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace rieszlab
