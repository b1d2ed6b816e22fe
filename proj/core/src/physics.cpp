#include "pepsim/physics.hpp"

#include <cmath>
#include <stdexcept>

#include "pepsim/constants.hpp"

namespace pepsim {

TransitionEnergies TransitionEnergies::copper() {
  return {constants::kCuKAlphaKev, constants::kCuKBetaKev,
          constants::kForbiddenKAlphaKev};
}

double TransitionEnergies::energy_kev(Transition t) const {
  switch (t) {
    case Transition::kKAlpha:
      return kalpha_kev;
    case Transition::kKBeta:
      return kbeta_kev;
    case Transition::kForbidden:
      return forbidden_kev;
  }
  throw std::invalid_argument("unknown transition");
}

double fwhm_to_sigma(double fwhm) {
  if (!(fwhm >= 0.0)) {
    throw std::domain_error("fwhm_to_sigma: fwhm must be >= 0");
  }
  return fwhm / constants::kFwhmPerSigma;
}

double electron_count(double current_a, double duration_s) {
  if (!(current_a >= 0.0)) {
    throw std::domain_error("electron_count: current must be >= 0");
  }
  if (!(duration_s >= 0.0)) {
    throw std::domain_error("electron_count: duration must be >= 0");
  }
  return current_a * duration_s / constants::kElementaryChargeC;
}

double CaptureModel::factor() const {
  validate();
  return probability_per_interaction * interactions_per_electron;
}

void CaptureModel::validate() const {
  for (double v : {probability_per_interaction, interactions_per_electron}) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw std::invalid_argument(
          "capture model: factors must be finite and > 0");
    }
  }
}

ElectronBudget::ElectronBudget(double current, double duration)
    : current_a(current), duration_s(duration) {
  (void)electron_count(current_a, duration_s);  // validate
}

double ElectronBudget::n_electrons() const {
  return electron_count(current_a, duration_s);
}

}  // namespace pepsim
