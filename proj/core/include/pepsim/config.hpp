#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>

#include <json.hpp>

#include "pepsim/analysis.hpp"
#include "pepsim/geometry.hpp"
#include "pepsim/physics.hpp"
#include "pepsim/simulate.hpp"

namespace pepsim {

// Binning, ROI and limit settings for the analysis stage.
struct AnalysisSettings {
  RegionOfInterest roi{7.4, 7.9};
  double bin_width_kev = 0.1;
  double e_min_kev = 1.0;
  double e_max_kev = 20.0;
  double confidence_sigma = 3.0;
  std::uint64_t acceptance_samples = 1'000'000;
  // > 0 replaces the Monte Carlo acceptance / the computed detection
  // efficiency; 0 means "compute it".
  double acceptance_override = 0.0;
  double det_eff_override = 0.0;

  void validate() const;
  std::vector<double> edges() const;  // uniform grid over [e_min, e_max]
};

// Config errors carry the source file (when loaded from disk), a best
// effort line number (0 when unknown) and the JSON path of the offending
// field. what() is preformatted as "file:line: message".
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string file, int line, std::string message);

  const std::string& file() const { return file_; }
  int line() const { return line_; }

 private:
  std::string file_;
  int line_ = 0;
};

// Everything a run needs. A config plus the library version reproduces a
// dataset bit for bit; to_json() emits every field (including the full
// geometry) so the echo in a run report is sufficient on its own.
struct ExperimentConfig {
  std::string name = "custom";
  std::uint64_t seed = 1;
  GeometryLayout geometry;
  RunPlan run_plan;
  DetectorResponse response;
  BackgroundModel background;
  VetoModel veto;
  CaptureModel capture;
  TransitionEnergies transitions = TransitionEnergies::copper();
  AnalysisSettings analysis;

  void validate() const;

  // Named baselines: "vip2-2016" (six 1 cm^2 cells, 150 eV FWHM, the
  // published background level) and "vip2-upgrade" (36-cell array,
  // shielding and radon suppression).
  static ExperimentConfig preset(std::string_view name);

  // JSON document with schema 1. A top-level "preset" key bases the
  // config on that preset, with the remaining keys applied as a JSON
  // merge patch. "geometry" accepts either a full layout or
  // {"preset": "<name>"}. Unknown keys are errors.
  static ExperimentConfig load_file(const std::filesystem::path& path);
  static ExperimentConfig from_json(const nlohmann::json& doc,
                                    const std::string& source_name = "<json>",
                                    const std::string& source_text = "");

  nlohmann::json to_json() const;
};

inline constexpr int kConfigSchema = 1;

}  // namespace pepsim
