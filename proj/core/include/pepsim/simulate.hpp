#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "pepsim/geometry.hpp"
#include "pepsim/physics.hpp"
#include "pepsim/rng.hpp"

namespace pepsim {

// Data-taking schedule. The limit scheme needs a current-on period (signal
// + background) and a current-off period (background only).
struct RunPlan {
  double current_a = 100.0;
  double days_current = 40.0;
  double days_nocurrent = 70.0;
  // Pauli-violation probability injected into the simulated data; 0 means
  // background-only (the null experiment).
  double injected_beta2_over_2 = 0.0;

  double seconds_current() const;
  double seconds_nocurrent() const;
  void validate() const;
};

struct DetectorResponse {
  double energy_fwhm_ev = 150.0;    // at ~6-8 keV
  double time_fwhm_ns = 400.0;
  double depletion_depth_um = 450.0;
  double threshold_kev = 1.0;       // events below are not recorded

  double energy_sigma_kev() const;
  void validate() const;
};

// A fluorescence line riding on the continuum. rate_per_day counts the
// whole detector, natural_width_ev is the pre-detector FWHM.
struct SpectralLine {
  double energy_kev = 0.0;
  double rate_per_day = 0.0;
  double natural_width_ev = 0.0;
};

// Residual background after shielding. The continuum is flat in
// [e_min, e_max] and scales with detector area; suppression factors
// divide every rate (1 = no suppression).
struct BackgroundModel {
  double continuum_per_kev_day_cm2 = 0.0;
  double e_min_kev = 1.0;
  double e_max_kev = 20.0;
  std::vector<SpectralLine> lines;
  // Fraction of background events accompanied by a scintillator hit in the
  // veto window. External photons cross the scintillators, so underground
  // essentially all of the residual background is correlated.
  double veto_correlated_fraction = 1.0;
  double shielding_suppression = 1.0;
  double rrs_suppression = 1.0;

  void validate() const;
  double suppression() const;
};

// Scintillator veto: an event is dropped when a scintillator hit falls
// inside +-window_halfwidth_ns around it. Underground the correlated
// background is photon-like and is tagged at efficiency_photon; the
// cosmic efficiency is the measured surface value, kept for surface
// configurations. Signal is only lost to accidental coincidences.
struct VetoModel {
  double window_halfwidth_ns = 500.0;
  double efficiency_photon = 0.05;
  double efficiency_cosmic = 0.95;
  double accidental_rate_hz = 0.0;

  void validate() const;
  // P(an unrelated scintillator hit lands in the window).
  double accidental_probability() const;
};

enum class Origin : std::uint8_t { kSignal = 0, kBackground = 1 };

struct EventRecord {
  double time_s = 0.0;
  double energy_kev = 0.0;
  int cell_id = 0;
  Origin origin = Origin::kBackground;
  bool coincident_hit = false;  // scintillator fired in the veto window
  bool vetoed = false;          // always implies coincident_hit
};

// Fraction of photons absorbed in the depletion depth of a silicon cell.
// depletion_um == 0 gives 0; negative throws std::domain_error.
double detection_efficiency(double energy_kev, double depletion_um);

// Mean number of detected forbidden-transition X-rays:
// beta2_over_2 * N_electrons * capture_factor * acceptance * det_eff.
// All factors must be >= 0 and finite.
double expected_signal_count(double beta2_over_2, const ElectronBudget& budget,
                             double capture_factor, double acceptance,
                             double det_eff);

// Gaussian mass inside [lo, hi]. sigma == 0 degenerates to an indicator
// on [lo, hi) at the mean.
double gaussian_window_mass(double mean, double sigma, double lo, double hi);

// Mean background count in [e_lo, e_hi] for one period: clipped flat
// continuum plus the Gaussian mass of each line (natural width convolved
// with the response resolution when a response is given).
double expected_background_count(const BackgroundModel& model,
                                 double exposure_days, double area_cm2,
                                 double e_lo_kev, double e_hi_kev,
                                 const DetectorResponse* response = nullptr);

// Area-weighted alias table for assigning events to cells.
class CellTable {
 public:
  explicit CellTable(const GeometryLayout& layout);
  int pick(RngStream& rng) const;
  double total_area_cm2() const { return total_area_; }

 private:
  std::vector<int> ids_;
  std::vector<double> cum_;  // cumulative area fractions
  double total_area_ = 0.0;
};

// Signal events for the time window [t0_s, t1_s): Poisson(mean_count)
// draws at the forbidden line, Gaussian-smeared by the response, uniform
// in time, cells picked by area. Events below threshold are dropped.
// Output is sorted by time.
std::vector<EventRecord> generate_signal_events(
    double mean_count, double line_energy_kev, const DetectorResponse& response,
    const CellTable& cells, double t0_s, double t1_s, RngStream& rng);

// Background events for [t0_s, t1_s): flat continuum (not smeared; a flat
// spectrum is invariant under smearing) plus each line smeared by natural
// width and response. A veto_correlated_fraction share of the events gets
// coincident_hit set. Output is sorted by time.
std::vector<EventRecord> generate_background_events(
    const BackgroundModel& model, const DetectorResponse& response,
    const CellTable& cells, double t0_s, double t1_s, RngStream& rng);

// Assigns vetoed in place: correlated background is vetoed at
// efficiency_photon; any event can additionally pick up an accidental
// coincidence (which also sets coincident_hit). Exactly two stream
// positions are consumed per event regardless of outcome.
void apply_veto(std::vector<EventRecord>& events, const VetoModel& veto,
                RngStream& rng);

}  // namespace pepsim
