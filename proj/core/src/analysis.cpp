#include "pepsim/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <tuple>

namespace pepsim {

double Spectrum::total_counts() const {
  return std::accumulate(counts.begin(), counts.end(), 0.0);
}

void Spectrum::validate() const {
  if (edges_kev.size() < 2 || counts.size() + 1 != edges_kev.size()) {
    throw std::invalid_argument("spectrum: need n_bins + 1 edges");
  }
  for (std::size_t i = 1; i < edges_kev.size(); ++i) {
    if (!(edges_kev[i] > edges_kev[i - 1])) {
      throw std::invalid_argument("spectrum: edges must be strictly increasing");
    }
  }
  for (double c : counts) {
    if (!(c >= 0.0) || !std::isfinite(c)) {
      throw std::invalid_argument("spectrum: counts must be finite and >= 0");
    }
  }
  // Zero exposure is a valid degenerate spectrum (empty run); the
  // subtraction step is where a positive exposure becomes mandatory.
  if (!(exposure_days >= 0.0) || !(area_cm2 > 0.0)) {
    throw std::invalid_argument(
        "spectrum: exposure must be >= 0 and area > 0");
  }
}

std::vector<double> uniform_edges(double e_min_kev, double bin_width_kev,
                                  std::size_t n_bins) {
  if (!(bin_width_kev > 0.0) || n_bins == 0) {
    throw std::invalid_argument("uniform_edges: need width > 0, n_bins > 0");
  }
  std::vector<double> edges(n_bins + 1);
  for (std::size_t i = 0; i <= n_bins; ++i) {
    edges[i] = e_min_kev + bin_width_kev * static_cast<double>(i);
  }
  return edges;
}

Spectrum histogram(std::span<const EventRecord> events,
                   std::vector<double> edges_kev, bool include_vetoed,
                   double exposure_days, double area_cm2) {
  Spectrum s;
  s.edges_kev = std::move(edges_kev);
  s.counts.assign(s.edges_kev.empty() ? 0 : s.edges_kev.size() - 1, 0.0);
  s.exposure_days = exposure_days;
  s.area_cm2 = area_cm2;
  s.validate();

  const auto& e = s.edges_kev;
  for (const auto& ev : events) {
    if (ev.vetoed && !include_vetoed) continue;
    if (ev.energy_kev < e.front()) {
      ++s.underflow;
      continue;
    }
    if (ev.energy_kev >= e.back()) {
      ++s.overflow;
      continue;
    }
    const auto it = std::upper_bound(e.begin(), e.end(), ev.energy_kev);
    s.counts[static_cast<std::size_t>(it - e.begin()) - 1] += 1.0;
  }
  return s;
}

Spectrum merge_bins(const Spectrum& s, std::size_t factor) {
  s.validate();
  if (factor == 0 || s.n_bins() % factor != 0) {
    throw std::invalid_argument(
        "merge_bins: factor must divide the bin count");
  }
  Spectrum out;
  out.exposure_days = s.exposure_days;
  out.area_cm2 = s.area_cm2;
  out.underflow = s.underflow;
  out.overflow = s.overflow;
  const std::size_t n = s.n_bins() / factor;
  out.counts.assign(n, 0.0);
  out.edges_kev.resize(n + 1);
  for (std::size_t i = 0; i <= n; ++i) out.edges_kev[i] = s.edges_kev[i * factor];
  for (std::size_t i = 0; i < s.n_bins(); ++i) {
    out.counts[i / factor] += s.counts[i];
  }
  return out;
}

SubtractedSpectrum subtract(const Spectrum& on, const Spectrum& off) {
  on.validate();
  off.validate();
  if (on.edges_kev != off.edges_kev) {
    throw std::invalid_argument("subtract: spectra use different binnings");
  }
  if (!(on.exposure_days > 0.0) || !(off.exposure_days > 0.0)) {
    throw std::invalid_argument("subtract: exposures must be > 0");
  }
  SubtractedSpectrum out;
  out.edges_kev = on.edges_kev;
  const double r = on.exposure_days / off.exposure_days;
  out.exposure_ratio = r;
  out.excess.resize(on.n_bins());
  out.sigma.resize(on.n_bins());
  for (std::size_t i = 0; i < on.n_bins(); ++i) {
    out.excess[i] = on.counts[i] - r * off.counts[i];
    out.sigma[i] = std::sqrt(on.counts[i] + r * r * off.counts[i]);
  }
  return out;
}

void RegionOfInterest::validate() const {
  if (!(low_kev < high_kev)) {
    throw std::invalid_argument("roi: need low < high");
  }
}

RoiSum roi_sum(const SubtractedSpectrum& s, const RegionOfInterest& roi) {
  roi.validate();
  RoiSum out;
  double var = 0.0;
  constexpr double kEdgeTol = 1e-9;  // keV
  for (std::size_t i = 0; i + 1 < s.edges_kev.size(); ++i) {
    if (s.edges_kev[i] >= roi.low_kev - kEdgeTol &&
        s.edges_kev[i + 1] <= roi.high_kev + kEdgeTol) {
      out.excess += s.excess[i];
      var += s.sigma[i] * s.sigma[i];
      ++out.n_bins;
    }
  }
  if (out.n_bins == 0) {
    throw std::invalid_argument("roi: no bin fully inside the window");
  }
  out.sigma = std::sqrt(var);
  return out;
}

double upper_limit_counts(double excess, double sigma, double n_sigma) {
  if (!(sigma >= 0.0)) {
    throw std::domain_error("upper_limit_counts: sigma must be >= 0");
  }
  if (!(n_sigma >= 0.0)) {
    throw std::domain_error("upper_limit_counts: n_sigma must be >= 0");
  }
  return std::max(0.0, excess) + n_sigma * sigma;
}

double LimitResult::recompute() const {
  return n_x_upper / (n_electrons * capture_factor * acceptance * det_eff);
}

LimitResult beta_limit(double excess, double sigma, double confidence_sigma,
                       const ElectronBudget& budget, double capture_factor,
                       double acceptance, double det_eff,
                       const RegionOfInterest& roi) {
  roi.validate();
  LimitResult r;
  r.excess = excess;
  r.sigma = sigma;
  r.confidence_sigma = confidence_sigma;
  r.n_x_upper = upper_limit_counts(excess, sigma, confidence_sigma);
  r.n_electrons = budget.n_electrons();
  r.capture_factor = capture_factor;
  r.acceptance = acceptance;
  r.det_eff = det_eff;
  r.roi = roi;
  for (double v : {r.n_electrons, capture_factor, acceptance, det_eff}) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw std::domain_error(
          "beta_limit: every denominator factor must be finite and > 0");
    }
  }
  r.beta2_over_2 = r.recompute();
  return r;
}

GainReport make_gain_report(
    const std::vector<std::tuple<std::string, double, double>>& rows) {
  GainReport rep;
  for (const auto& [label, s, b] : rows) {
    if (!(s > 0.0) || !(b > 0.0)) {
      throw std::invalid_argument("gain report: factors must be > 0 (row '" +
                                  label + "')");
    }
    GainRow row;
    row.label = label;
    row.signal_factor = s;
    row.background_factor = b;
    row.sensitivity_gain = s / std::sqrt(b);
    rep.total_signal_factor *= row.signal_factor;
    rep.total_sensitivity_gain *= row.sensitivity_gain;
    rep.rows.push_back(std::move(row));
  }
  return rep;
}

GainReport vip_to_vip2_gains() {
  // Background is unchanged between the two setups; every row is a pure
  // signal gain.
  return make_gain_report({
      {"acceptance", 0.03 / 0.021, 1.0},
      {"detection efficiency", 0.99 / 0.48, 1.0},
      {"current", 100.0 / 40.0, 1.0},
  });
}

GainReport vip2_upgrade_gains() {
  // Larger array: signal x3 from coverage; background scales with the
  // cell area ratio (23/6) times the wider coincidence window (4/3).
  return make_gain_report({
      {"larger SDD array", 3.0, (23.0 / 6.0) * (4.0 / 3.0)},
      {"passive shielding", 1.0, 1.0 / 20.0},
      {"radon-free environment", 1.0, 1.0 / 3.0},
  });
}

double project_limit(double limit, double sensitivity_gain,
                     double time_ratio) {
  for (double v : {limit, sensitivity_gain, time_ratio}) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw std::domain_error("project_limit: inputs must be finite and > 0");
    }
  }
  return limit / (sensitivity_gain * std::sqrt(time_ratio));
}

}  // namespace pepsim
