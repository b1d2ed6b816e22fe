#pragma once

namespace pepsim::constants {

// Elementary charge [C], exact by SI definition (2019 redefinition).
inline constexpr double kElementaryChargeC = 1.602176634e-19;

// FWHM of a Gaussian = 2*sqrt(2*ln 2) * sigma.
inline constexpr double kFwhmPerSigma = 2.3548200450309493;

inline constexpr double kSecondsPerDay = 86400.0;

// Copper K lines [keV] and the Pauli-forbidden 2p->1s energy, shifted
// down ~350 eV because the 1s shell is already full.
inline constexpr double kCuKAlphaKev = 8.05;
inline constexpr double kCuKBetaKev = 8.905;
inline constexpr double kForbiddenKAlphaKev = 7.70;

inline constexpr double kCopperDensityGCm3 = 8.96;
inline constexpr double kSiliconDensityGCm3 = 2.33;

}  // namespace pepsim::constants
