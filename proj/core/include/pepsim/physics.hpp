#pragma once

#include <cstdint>

namespace pepsim {

enum class Transition {
  kKAlpha,      // normal Cu K-alpha, 2p -> 1s with a 1s vacancy
  kKBeta,       // normal Cu K-beta
  kForbidden,   // Pauli-violating 2p -> 1s into a filled 1s shell
};

// Line energies [keV]; overridable so alternative targets can be modeled.
struct TransitionEnergies {
  double kalpha_kev;
  double kbeta_kev;
  double forbidden_kev;

  static TransitionEnergies copper();
  double energy_kev(Transition t) const;
};

// sigma = FWHM / (2 sqrt(2 ln 2)). Throws std::domain_error for
// fwhm < 0. Unit-agnostic (eV in, eV out; ns in, ns out).
double fwhm_to_sigma(double fwhm);

// Electrons delivered by a DC current: N = I*t/e with e exact.
// Throws std::domain_error for negative current or duration.
double electron_count(double current_a, double duration_s);

// Chance that one "new" conduction electron ends up captured into a
// forbidden 1s state while drifting through the conductor, factored as
// (capture probability per lattice scattering) x (scatterings per
// electron). The second factor is a property of the conductor: roughly
// strip length / electron mean free path. Both are config scalars so a
// different capture convention can be swapped in without touching the
// limit algebra.
struct CaptureModel {
  double probability_per_interaction = 0.1;
  double interactions_per_electron = 1.0;

  double factor() const;
  void validate() const;  // both factors finite and > 0
};

// Current integrated over a data-taking period.
struct ElectronBudget {
  double current_a = 0.0;
  double duration_s = 0.0;

  ElectronBudget() = default;
  ElectronBudget(double current, double duration_s);

  double n_electrons() const;
};

}  // namespace pepsim
