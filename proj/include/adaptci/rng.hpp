#pragma once

#include <boost/random/mersenne_twister.hpp>

#include <cstdint>

namespace adaptci {

// splitmix64 finalizer; decorrelates nearby seeds
inline std::uint64_t mix64(std::uint64_t z)
{
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

//! Seed of the independent stream (seed, purpose, index). Results depend only on
//! this key, never on which worker thread consumes the stream.
inline std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t purpose, std::uint64_t index)
{
  return mix64(mix64(mix64(seed) ^ purpose) ^ index);
}

using Engine = boost::random::mt19937_64;

inline Engine make_engine(std::uint64_t seed, std::uint64_t purpose, std::uint64_t index)
{
  return Engine(stream_seed(seed, purpose, index));
}

// stream purposes
inline constexpr std::uint64_t kStreamCalibration = 1;
inline constexpr std::uint64_t kStreamSimulation = 2;
inline constexpr std::uint64_t kStreamRateDesign = 3;
inline constexpr std::uint64_t kStreamStandIn = 4;

} // namespace adaptci
