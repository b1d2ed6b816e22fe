#pragma once

#include <cstdint>

#include "pepsim/attenuation.hpp"
#include "pepsim/geometry.hpp"

namespace pepsim {

// Monte Carlo estimate of the emitter -> detector transfer.
//
// solid_angle_fraction: probability that an isotropic X-ray emitted
// uniformly in the strip volume crosses any cell, ignoring absorption.
// acceptance: the same probability weighted by transmission through the
// copper traversed on the way out (self-absorption in the strips).
struct AcceptanceResult {
  double solid_angle_fraction = 0.0;
  double acceptance = 0.0;
  double solid_angle_se = 0.0;  // binomial standard error
  double acceptance_se = 0.0;
  double energy_kev = 0.0;
  std::uint64_t n_samples = 0;
  std::uint64_t seed = 0;
};

// Samples are processed in fixed blocks of kAcceptanceBlock, each with
// its own RNG stream keyed by the block index, and block tallies are
// reduced in block order. The result is therefore bit-identical for any
// worker count (adding workers changes who computes a block, not what
// the block computes).
inline constexpr std::uint64_t kAcceptanceBlock = 65536;

// Full estimate at one photon energy. Throws std::invalid_argument for
// n_samples == 0 or an invalid layout, std::out_of_range if the energy
// is outside the material table.
AcceptanceResult geometric_acceptance(const GeometryLayout& layout,
                                      double energy_kev,
                                      const Material& strip_material,
                                      std::uint64_t n_samples,
                                      std::uint64_t seed);

// Solid-angle-only convenience wrapper (no absorption weighting).
AcceptanceResult solid_angle_fraction(const GeometryLayout& layout,
                                      std::uint64_t n_samples,
                                      std::uint64_t seed);

}  // namespace pepsim
