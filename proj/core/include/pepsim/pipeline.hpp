#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include <json.hpp>

#include "pepsim/acceptance.hpp"
#include "pepsim/analysis.hpp"
#include "pepsim/config.hpp"

namespace pepsim {

// The limit denominator, resolved once per run: electron budget from the
// run plan, capture factor, Monte Carlo acceptance (seeded with the
// config seed, so simulate and a later analyze of the same config agree
// bit for bit) and the area-weighted mean detection efficiency at the
// forbidden line.
//
// roi_containment is the mass of the response-smeared forbidden line that
// falls inside the counting window. Event generation thins with det_eff
// alone (absorption happens regardless of where the smeared energy
// lands); the window loss only shows up when counting, so the limit's
// signal efficiency is det_eff * roi_containment. Leaving it out makes
// the clamp-plus-3-sigma rule slightly anti-conservative.
struct RunFactors {
  ElectronBudget budget;
  double capture_factor = 0.0;
  AcceptanceResult acceptance;
  double det_eff = 0.0;
  double roi_containment = 1.0;
};

RunFactors compute_factors(const ExperimentConfig& config);

// Area-weighted mean of detection_efficiency over the layout's cells.
double mean_detection_efficiency(const GeometryLayout& layout,
                                 double energy_kev);

// One simulated experiment: a current-on event list and a current-off
// event list, veto flags applied, sorted by time.
//
// Events are generated in fixed one-day time slices, each from RNG
// streams keyed by (seed, stream label, slice index), and concatenated in
// slice order; like the acceptance blocks, this makes the dataset
// independent of the worker count.
struct SimulatedRun {
  ExperimentConfig config;
  RunFactors factors;
  std::vector<EventRecord> events_on;
  std::vector<EventRecord> events_off;
};

inline constexpr double kSliceSeconds = 86400.0;

SimulatedRun simulate_run(const ExperimentConfig& config);

// Histogram -> subtract -> ROI -> limit for given factors. Vetoed events
// are excluded. Throws std::invalid_argument if either exposure is zero.
struct AnalysisOutput {
  Spectrum spectrum_on;
  Spectrum spectrum_off;
  RoiSum roi;
  LimitResult limit;
};

AnalysisOutput analyze_events(const ExperimentConfig& config,
                              const RunFactors& factors,
                              std::span<const EventRecord> events_on,
                              std::span<const EventRecord> events_off);

// simulate_run + analyze_events + artifact files in out_dir:
//   events_current.csv, events_nocurrent.csv,
//   spectrum_current.csv, spectrum_nocurrent.csv, run_report.json
// The report echoes the resolved config, the factors and the limit.
// With a zero-duration period the spectra files are still written (empty)
// but no limit can be formed and analysis stays empty.
struct RunArtifacts {
  std::filesystem::path events_on;
  std::filesystem::path events_off;
  std::filesystem::path spectrum_on;
  std::filesystem::path spectrum_off;
  std::filesystem::path report;
  std::optional<AnalysisOutput> analysis;
  RunFactors factors;
};

RunArtifacts run_simulate(const ExperimentConfig& config,
                          const std::filesystem::path& out_dir);

// Report fragments shared by the CLI and the run report.
nlohmann::json acceptance_to_json(const AcceptanceResult& a);
nlohmann::json factors_to_json(const RunFactors& f);
nlohmann::json limit_to_json(const LimitResult& l);
nlohmann::json gain_report_to_json(const GainReport& g);

}  // namespace pepsim
