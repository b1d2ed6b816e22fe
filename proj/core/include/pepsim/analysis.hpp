#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "pepsim/simulate.hpp"

namespace pepsim {

// Energy spectrum with bin edges in keV. counts[i] covers
// [edges[i], edges[i+1]); events outside the edge range land in the
// under/overflow tallies, never in a bin.
struct Spectrum {
  std::vector<double> edges_kev;  // size n_bins + 1, strictly increasing
  std::vector<double> counts;     // size n_bins
  double exposure_days = 0.0;
  double area_cm2 = 0.0;
  std::uint64_t underflow = 0;
  std::uint64_t overflow = 0;

  std::size_t n_bins() const { return counts.size(); }
  double total_counts() const;
  void validate() const;
};

// Uniform edge grid from e_min to e_min + n*width.
std::vector<double> uniform_edges(double e_min_kev, double bin_width_kev,
                                  std::size_t n_bins);

// Bins events by energy. Vetoed events are skipped unless include_vetoed.
// Throws std::invalid_argument for non-increasing edges or
// exposure/area <= 0.
Spectrum histogram(std::span<const EventRecord> events,
                   std::vector<double> edges_kev, bool include_vetoed,
                   double exposure_days, double area_cm2);

// Merges groups of `factor` adjacent bins; n_bins must be divisible by
// factor. Total counts and overflow tallies are preserved.
Spectrum merge_bins(const Spectrum& s, std::size_t factor);

// Background-subtracted spectrum. With exposure ratio
// r = on.exposure / off.exposure:
//   excess[i] = on[i] - r * off[i],  sigma[i] = sqrt(on[i] + r^2 off[i]).
// Requires identical edge grids and positive exposures on both inputs.
struct SubtractedSpectrum {
  std::vector<double> edges_kev;
  std::vector<double> excess;
  std::vector<double> sigma;
  double exposure_ratio = 0.0;
};

SubtractedSpectrum subtract(const Spectrum& on, const Spectrum& off);

struct RegionOfInterest {
  double low_kev = 0.0;
  double high_kev = 0.0;
  void validate() const;  // requires low < high
};

// Sums excess and sigma (in quadrature) over the bins fully contained in
// the ROI: edges[i] >= low and edges[i+1] <= high, with 1e-9 keV slack so
// a bin edge that differs from the ROI bound only by accumulated rounding
// still counts as aligned. Throws std::invalid_argument when no bin
// qualifies.
struct RoiSum {
  double excess = 0.0;
  double sigma = 0.0;
  std::size_t n_bins = 0;
};

RoiSum roi_sum(const SubtractedSpectrum& s, const RegionOfInterest& roi);

// One-sided upper bound on the signal count:
// max(0, excess) + n_sigma * sigma. Throws std::domain_error for
// sigma < 0 or n_sigma < 0.
double upper_limit_counts(double excess, double sigma, double n_sigma);

// Upper bound on beta^2/2, the probability that an electron-electron
// interaction disobeys the exclusion principle:
//   n_x_upper / (n_electrons * capture_factor * acceptance * det_eff).
// Echoes every input so the quotient can be re-derived from the result
// alone. All denominator factors must be > 0.
struct LimitResult {
  double beta2_over_2 = 0.0;
  double n_x_upper = 0.0;
  double excess = 0.0;
  double sigma = 0.0;
  double confidence_sigma = 0.0;
  double n_electrons = 0.0;
  double capture_factor = 0.0;
  double acceptance = 0.0;
  double det_eff = 0.0;
  RegionOfInterest roi;

  double recompute() const;  // n_x_upper / denominator, bit-identical
};

LimitResult beta_limit(double excess, double sigma, double confidence_sigma,
                       const ElectronBudget& budget, double capture_factor,
                       double acceptance, double det_eff,
                       const RegionOfInterest& roi);

// One multiplicative improvement: sensitivity_gain =
// signal_factor / sqrt(background_factor).
struct GainRow {
  std::string label;
  double signal_factor = 1.0;
  double background_factor = 1.0;
  double sensitivity_gain = 1.0;
};

struct GainReport {
  std::vector<GainRow> rows;
  double total_signal_factor = 1.0;
  double total_sensitivity_gain = 1.0;
};

// Builds a report from (label, signal, background) triples; factors must
// be > 0. Totals are the row products.
GainReport make_gain_report(
    const std::vector<std::tuple<std::string, double, double>>& rows);

// Published improvement factors of the running setup over its
// predecessor: acceptance 0.021 -> 0.03, detection efficiency
// 0.48 -> 0.99 (thin CCDs -> 450 um SDDs), current 40 -> 100 A.
GainReport vip_to_vip2_gains();

// Projected upgrade factors: larger cell array (23 cm^2 vs 6 cm^2, wider
// ROI from the timing change), passive shielding (background / 20), and
// radon-free environment (background / 3).
GainReport vip2_upgrade_gains();

// Scales a limit by a sensitivity gain and a longer exposure:
// projected = limit / (gain * sqrt(time_ratio)). All inputs must be > 0.
double project_limit(double limit, double sensitivity_gain,
                     double time_ratio);

}  // namespace pepsim
