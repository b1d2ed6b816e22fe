#include "pepsim/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "pepsim/attenuation.hpp"
#include "pepsim/constants.hpp"

namespace pepsim {

double RunPlan::seconds_current() const {
  return days_current * constants::kSecondsPerDay;
}

double RunPlan::seconds_nocurrent() const {
  return days_nocurrent * constants::kSecondsPerDay;
}

void RunPlan::validate() const {
  if (!(current_a >= 0.0)) {
    throw std::invalid_argument("run plan: current must be >= 0");
  }
  if (!(days_current >= 0.0) || !(days_nocurrent >= 0.0)) {
    throw std::invalid_argument("run plan: durations must be >= 0");
  }
  if (!(injected_beta2_over_2 >= 0.0) || injected_beta2_over_2 > 1.0) {
    throw std::invalid_argument(
        "run plan: injected beta^2/2 must be in [0, 1]");
  }
}

double DetectorResponse::energy_sigma_kev() const {
  return fwhm_to_sigma(energy_fwhm_ev) / 1000.0;
}

void DetectorResponse::validate() const {
  if (!(energy_fwhm_ev >= 0.0) || !(time_fwhm_ns >= 0.0)) {
    throw std::invalid_argument("response: FWHM values must be >= 0");
  }
  if (!(depletion_depth_um >= 0.0)) {
    throw std::invalid_argument("response: depletion depth must be >= 0");
  }
  if (!(threshold_kev >= 0.0)) {
    throw std::invalid_argument("response: threshold must be >= 0");
  }
}

void BackgroundModel::validate() const {
  if (!(continuum_per_kev_day_cm2 >= 0.0)) {
    throw std::invalid_argument("background: continuum rate must be >= 0");
  }
  if (!(e_min_kev > 0.0) || !(e_max_kev > e_min_kev)) {
    throw std::invalid_argument(
        "background: need 0 < e_min < e_max for the continuum window");
  }
  if (!(veto_correlated_fraction >= 0.0) || !(veto_correlated_fraction <= 1.0)) {
    throw std::invalid_argument(
        "background: veto_correlated_fraction must be in [0,1]");
  }
  if (!(shielding_suppression >= 1.0) || !(rrs_suppression >= 1.0)) {
    throw std::invalid_argument(
        "background: suppression factors must be >= 1");
  }
  for (const auto& l : lines) {
    if (!(l.energy_kev > 0.0) || !(l.rate_per_day >= 0.0) ||
        !(l.natural_width_ev >= 0.0)) {
      throw std::invalid_argument("background: bad spectral line");
    }
  }
}

double BackgroundModel::suppression() const {
  return shielding_suppression * rrs_suppression;
}

void VetoModel::validate() const {
  if (!(window_halfwidth_ns >= 0.0)) {
    throw std::invalid_argument("veto: window halfwidth must be >= 0");
  }
  for (double p : {efficiency_photon, efficiency_cosmic}) {
    if (!(p >= 0.0) || !(p <= 1.0)) {
      throw std::invalid_argument("veto: efficiencies must be in [0,1]");
    }
  }
  if (!(accidental_rate_hz >= 0.0)) {
    throw std::invalid_argument("veto: accidental rate must be >= 0");
  }
}

double VetoModel::accidental_probability() const {
  const double p = accidental_rate_hz * 2.0 * window_halfwidth_ns * 1e-9;
  return std::clamp(p, 0.0, 1.0);
}

double detection_efficiency(double energy_kev, double depletion_um) {
  if (!(depletion_um >= 0.0)) {
    throw std::domain_error("detection_efficiency: depth must be >= 0");
  }
  return absorbed_fraction(energy_kev, Material::silicon(),
                           depletion_um * 1e-4);
}

double expected_signal_count(double beta2_over_2, const ElectronBudget& budget,
                             double capture_factor, double acceptance,
                             double det_eff) {
  for (double v : {beta2_over_2, capture_factor, acceptance, det_eff}) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw std::domain_error(
          "expected_signal_count: factors must be finite and >= 0");
    }
  }
  return beta2_over_2 * budget.n_electrons() * capture_factor * acceptance *
         det_eff;
}

double gaussian_window_mass(double mean, double sigma, double lo, double hi) {
  if (sigma <= 0.0) return (mean >= lo && mean < hi) ? 1.0 : 0.0;
  const double inv = 1.0 / (sigma * std::numbers::sqrt2);
  return 0.5 * (std::erf((hi - mean) * inv) - std::erf((lo - mean) * inv));
}

namespace {

double line_sigma_kev(const SpectralLine& line,
                      const DetectorResponse* response) {
  const double natural = fwhm_to_sigma(line.natural_width_ev) / 1000.0;
  const double det = response ? response->energy_sigma_kev() : 0.0;
  return std::sqrt(natural * natural + det * det);
}

}  // namespace

double expected_background_count(const BackgroundModel& model,
                                 double exposure_days, double area_cm2,
                                 double e_lo_kev, double e_hi_kev,
                                 const DetectorResponse* response) {
  if (!(exposure_days >= 0.0) || !(area_cm2 >= 0.0)) {
    throw std::domain_error(
        "expected_background_count: exposure and area must be >= 0");
  }
  if (!(e_hi_kev > e_lo_kev)) {
    throw std::domain_error("expected_background_count: need e_lo < e_hi");
  }
  const double lo = std::max(e_lo_kev, model.e_min_kev);
  const double hi = std::min(e_hi_kev, model.e_max_kev);
  double mean = 0.0;
  if (hi > lo) {
    mean += model.continuum_per_kev_day_cm2 * (hi - lo) * exposure_days *
            area_cm2;
  }
  for (const auto& line : model.lines) {
    mean += line.rate_per_day * exposure_days *
            gaussian_window_mass(line.energy_kev, line_sigma_kev(line, response),
                                 e_lo_kev, e_hi_kev);
  }
  return mean / model.suppression();
}

CellTable::CellTable(const GeometryLayout& layout) {
  layout.validate();
  for (const auto& c : layout.cells) {
    total_area_ += c.area_cm2();
    ids_.push_back(c.id);
    cum_.push_back(total_area_);
  }
  if (!(total_area_ > 0.0)) {
    throw std::invalid_argument("cell table: zero total area");
  }
  for (auto& c : cum_) c /= total_area_;
  cum_.back() = 1.0;
}

int CellTable::pick(RngStream& rng) const {
  const double u = rng.uniform();
  const auto it = std::upper_bound(cum_.begin(), cum_.end(), u);
  const std::size_t i =
      std::min(static_cast<std::size_t>(it - cum_.begin()), ids_.size() - 1);
  return ids_[i];
}

namespace {

void sort_by_time(std::vector<EventRecord>& events) {
  std::stable_sort(events.begin(), events.end(),
                   [](const EventRecord& a, const EventRecord& b) {
                     return a.time_s < b.time_s;
                   });
}

}  // namespace

std::vector<EventRecord> generate_signal_events(
    double mean_count, double line_energy_kev, const DetectorResponse& response,
    const CellTable& cells, double t0_s, double t1_s, RngStream& rng) {
  if (!(mean_count >= 0.0)) {
    throw std::domain_error("generate_signal_events: mean must be >= 0");
  }
  if (!(t1_s >= t0_s)) {
    throw std::domain_error("generate_signal_events: need t0 <= t1");
  }
  const std::uint64_t n = rng.poisson(mean_count);
  const double sigma = response.energy_sigma_kev();
  std::vector<EventRecord> out;
  out.reserve(n);
  for (std::uint64_t i = 0; i < n; ++i) {
    EventRecord e;
    e.time_s = rng.uniform(t0_s, t1_s);
    e.energy_kev = rng.gaussian(line_energy_kev, sigma);
    e.cell_id = cells.pick(rng);
    e.origin = Origin::kSignal;
    if (e.energy_kev >= response.threshold_kev) out.push_back(e);
  }
  sort_by_time(out);
  return out;
}

std::vector<EventRecord> generate_background_events(
    const BackgroundModel& model, const DetectorResponse& response,
    const CellTable& cells, double t0_s, double t1_s, RngStream& rng) {
  if (!(t1_s >= t0_s)) {
    throw std::domain_error("generate_background_events: need t0 <= t1");
  }
  model.validate();
  const double exposure_days = (t1_s - t0_s) / constants::kSecondsPerDay;
  const double sup = model.suppression();
  std::vector<EventRecord> out;

  const double continuum_mean = model.continuum_per_kev_day_cm2 *
                                (model.e_max_kev - model.e_min_kev) *
                                exposure_days * cells.total_area_cm2() / sup;
  const std::uint64_t n_cont = rng.poisson(continuum_mean);
  out.reserve(n_cont);
  for (std::uint64_t i = 0; i < n_cont; ++i) {
    EventRecord e;
    e.time_s = rng.uniform(t0_s, t1_s);
    e.energy_kev = rng.uniform(model.e_min_kev, model.e_max_kev);
    e.cell_id = cells.pick(rng);
    e.origin = Origin::kBackground;
    e.coincident_hit = rng.uniform() < model.veto_correlated_fraction;
    if (e.energy_kev >= response.threshold_kev) out.push_back(e);
  }

  for (const auto& line : model.lines) {
    const std::uint64_t n_line =
        rng.poisson(line.rate_per_day * exposure_days / sup);
    const double sigma = line_sigma_kev(line, &response);
    for (std::uint64_t i = 0; i < n_line; ++i) {
      EventRecord e;
      e.time_s = rng.uniform(t0_s, t1_s);
      e.energy_kev = rng.gaussian(line.energy_kev, sigma);
      e.cell_id = cells.pick(rng);
      e.origin = Origin::kBackground;
      e.coincident_hit = rng.uniform() < model.veto_correlated_fraction;
      if (e.energy_kev >= response.threshold_kev) out.push_back(e);
    }
  }

  sort_by_time(out);
  return out;
}

void apply_veto(std::vector<EventRecord>& events, const VetoModel& veto,
                RngStream& rng) {
  veto.validate();
  const double p_acc = veto.accidental_probability();
  for (auto& e : events) {
    const double u_tag = rng.uniform();
    const double u_acc = rng.uniform();
    const bool tagged = e.origin == Origin::kBackground && e.coincident_hit &&
                        u_tag < veto.efficiency_photon;
    const bool accidental = u_acc < p_acc;
    if (accidental) e.coincident_hit = true;
    e.vetoed = tagged || accidental;
  }
}

}  // namespace pepsim
