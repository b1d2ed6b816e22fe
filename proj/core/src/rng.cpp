#include "pepsim/rng.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace pepsim {

namespace {
constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;
}

std::uint64_t RngStream::mix(std::uint64_t z) {
  z += kGamma;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t RngStream::derive_key(std::uint64_t seed, std::uint64_t label,
                                    std::uint64_t index) {
  std::uint64_t k = mix(seed);
  k = mix(k ^ mix(label));
  k = mix(k ^ mix(index));
  return k;
}

RngStream RngStream::derive(std::uint64_t seed, std::uint64_t label,
                            std::uint64_t index) {
  return RngStream(derive_key(seed, label, index));
}

std::uint64_t RngStream::next_u64() {
  state_ += kGamma;
  std::uint64_t z = state_;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double RngStream::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::uniform(double lo, double hi) {
  return lo + (hi - lo) * uniform();
}

double RngStream::gaussian(double mean, double sigma) {
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();  // log(0) guard, p = 2^-53 per retry
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  return mean + sigma * r * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t RngStream::poisson(double mean) {
  if (!(mean >= 0.0) || !std::isfinite(mean)) {
    throw std::domain_error("poisson: mean must be finite and >= 0");
  }
  if (mean == 0.0) return 0;
  if (mean < 30.0) {
    // Inversion by sequential search; at mean < 30 the tail beyond k ~ 150
    // is below double resolution, the loop bound is a safety net.
    double p = std::exp(-mean);
    double cum = p;
    const double u = uniform();
    std::uint64_t k = 0;
    while (u > cum && k < 2000) {
      ++k;
      p *= mean / static_cast<double>(k);
      cum += p;
    }
    return k;
  }
  // PTRS: W. Hormann, "The transformed rejection method for generating
  // Poisson random variables" (1993). Exact for any mean, O(1) draws.
  const double slam = std::sqrt(mean);
  const double llam = std::log(mean);
  const double b = 0.931 + 2.53 * slam;
  const double a = -0.059 + 0.02483 * b;
  const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  const double v_r = 0.9277 - 3.6224 / (b - 2.0);
  for (;;) {
    const double u = uniform() - 0.5;
    const double v = uniform();
    const double us = 0.5 - std::abs(u);
    const double k = std::floor((2.0 * a / us + b) * u + mean + 0.43);
    if (us >= 0.07 && v <= v_r) return static_cast<std::uint64_t>(k);
    if (k < 0.0 || (us < 0.013 && v > us)) continue;
    if (std::log(v) + std::log(inv_alpha) - std::log(a / (us * us) + b) <=
        k * llam - mean - std::lgamma(k + 1.0)) {
      return static_cast<std::uint64_t>(k);
    }
  }
}

}  // namespace pepsim
