#pragma once

#include <cstdint>

namespace pepsim {

// Counter-keyed SplitMix64 stream.
//
// Every random draw in the simulator comes from a stream derived from
// (master seed, stream label, index). Workers never share a stream: the
// unit of work (sample block, time slice) owns its index, so results are
// bit-identical for any worker count. std::* distributions are avoided on
// purpose; their output is not specified bit-exactly across libraries.
class RngStream {
 public:
  explicit RngStream(std::uint64_t state) : state_(state) {}

  // SplitMix64 finalizer applied to (z + golden gamma); used both as the
  // generator step and as the key-mixing hash for stream derivation.
  static std::uint64_t mix(std::uint64_t z);

  static std::uint64_t derive_key(std::uint64_t seed, std::uint64_t label,
                                  std::uint64_t index = 0);
  static RngStream derive(std::uint64_t seed, std::uint64_t label,
                          std::uint64_t index = 0);

  std::uint64_t next_u64();

  // Uniform on [0,1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi);

  // Box-Muller transform (cosine branch only, one draw per call).
  double gaussian(double mean, double sigma);

  // Exact Poisson sampling: chain-rule inversion below mean 30, Hormann's
  // PTRS transformed rejection above. Throws std::domain_error for
  // negative or non-finite mean.
  std::uint64_t poisson(double mean);

 private:
  std::uint64_t state_;
};

// Stream labels. Values are arbitrary but frozen: changing one changes
// every simulated dataset.
namespace stream {
inline constexpr std::uint64_t kAcceptance = 0x01;
inline constexpr std::uint64_t kSignalSlice = 0x02;
inline constexpr std::uint64_t kBackgroundOnSlice = 0x03;
inline constexpr std::uint64_t kBackgroundOffSlice = 0x04;
inline constexpr std::uint64_t kVetoOnSlice = 0x05;
inline constexpr std::uint64_t kVetoOffSlice = 0x06;
}  // namespace stream

}  // namespace pepsim
