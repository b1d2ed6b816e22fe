#include "pepsim/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

#include "pepsim/io.hpp"
#include "pepsim/parallel.hpp"
#include "pepsim/version.hpp"

namespace pepsim {

double mean_detection_efficiency(const GeometryLayout& layout,
                                 double energy_kev) {
  double area = 0.0;
  double weighted = 0.0;
  for (const auto& c : layout.cells) {
    area += c.area_cm2();
    weighted += c.area_cm2() * detection_efficiency(energy_kev, c.depletion_um);
  }
  if (!(area > 0.0)) {
    throw std::invalid_argument("mean_detection_efficiency: zero cell area");
  }
  return weighted / area;
}

RunFactors compute_factors(const ExperimentConfig& config) {
  config.validate();
  RunFactors f;
  f.budget = ElectronBudget(config.run_plan.current_a,
                            config.run_plan.seconds_current());
  f.capture_factor = config.capture.factor();
  if (config.analysis.acceptance_override > 0.0) {
    f.acceptance.acceptance = config.analysis.acceptance_override;
    f.acceptance.solid_angle_fraction = config.analysis.acceptance_override;
    f.acceptance.energy_kev = config.transitions.forbidden_kev;
    f.acceptance.seed = config.seed;
  } else {
    f.acceptance = geometric_acceptance(
        config.geometry, config.transitions.forbidden_kev, Material::copper(),
        config.analysis.acceptance_samples, config.seed);
  }
  f.det_eff = config.analysis.det_eff_override > 0.0
                  ? config.analysis.det_eff_override
                  : mean_detection_efficiency(config.geometry,
                                              config.transitions.forbidden_kev);
  f.roi_containment = gaussian_window_mass(
      config.transitions.forbidden_kev, config.response.energy_sigma_kev(),
      config.analysis.roi.low_kev, config.analysis.roi.high_kev);
  return f;
}

namespace {

struct SliceSpan {
  double t0 = 0.0;
  double t1 = 0.0;
};

SliceSpan slice_span(std::uint64_t index, double total_s) {
  SliceSpan s;
  s.t0 = static_cast<double>(index) * kSliceSeconds;
  s.t1 = std::min(s.t0 + kSliceSeconds, total_s);
  return s;
}

std::uint64_t slice_count(double total_s) {
  if (!(total_s > 0.0)) return 0;
  return static_cast<std::uint64_t>(std::ceil(total_s / kSliceSeconds));
}

}  // namespace

SimulatedRun simulate_run(const ExperimentConfig& config) {
  SimulatedRun run;
  run.config = config;
  run.factors = compute_factors(config);

  const CellTable cells(config.geometry);
  const double t_on = config.run_plan.seconds_current();
  const double t_off = config.run_plan.seconds_nocurrent();
  const std::uint64_t n_on = slice_count(t_on);
  const std::uint64_t n_off = slice_count(t_off);

  const double signal_mean_total = expected_signal_count(
      config.run_plan.injected_beta2_over_2, run.factors.budget,
      run.factors.capture_factor, run.factors.acceptance.acceptance,
      run.factors.det_eff);

  std::vector<std::vector<EventRecord>> on_slices(n_on);
  std::vector<std::vector<EventRecord>> off_slices(n_off);

  parallel_for(n_on + n_off, [&](std::uint64_t job) {
    const bool is_on = job < n_on;
    const std::uint64_t idx = is_on ? job : job - n_on;
    const auto span = slice_span(idx, is_on ? t_on : t_off);

    std::vector<EventRecord> events;
    if (is_on) {
      const double frac = (span.t1 - span.t0) / t_on;
      auto sig_rng =
          RngStream::derive(config.seed, stream::kSignalSlice, idx);
      events = generate_signal_events(
          signal_mean_total * frac, config.transitions.forbidden_kev,
          config.response, cells, span.t0, span.t1, sig_rng);
    }
    auto bkg_rng = RngStream::derive(
        config.seed,
        is_on ? stream::kBackgroundOnSlice : stream::kBackgroundOffSlice, idx);
    auto bkg = generate_background_events(config.background, config.response,
                                          cells, span.t0, span.t1, bkg_rng);
    events.insert(events.end(), bkg.begin(), bkg.end());

    auto veto_rng = RngStream::derive(
        config.seed, is_on ? stream::kVetoOnSlice : stream::kVetoOffSlice,
        idx);
    apply_veto(events, config.veto, veto_rng);

    std::stable_sort(events.begin(), events.end(),
                     [](const EventRecord& a, const EventRecord& b) {
                       return a.time_s < b.time_s;
                     });
    (is_on ? on_slices[idx] : off_slices[idx]) = std::move(events);
  });

  for (auto& s : on_slices) {
    run.events_on.insert(run.events_on.end(), s.begin(), s.end());
  }
  for (auto& s : off_slices) {
    run.events_off.insert(run.events_off.end(), s.begin(), s.end());
  }
  return run;
}

AnalysisOutput analyze_events(const ExperimentConfig& config,
                              const RunFactors& factors,
                              std::span<const EventRecord> events_on,
                              std::span<const EventRecord> events_off) {
  if (!(config.run_plan.days_current > 0.0) ||
      !(config.run_plan.days_nocurrent > 0.0)) {
    throw std::invalid_argument(
        "analyze: both the current-on and current-off exposures must be > 0");
  }
  const double area = config.geometry.total_cell_area_cm2();
  AnalysisOutput out;
  out.spectrum_on =
      histogram(events_on, config.analysis.edges(), /*include_vetoed=*/false,
                config.run_plan.days_current, area);
  out.spectrum_off =
      histogram(events_off, config.analysis.edges(), /*include_vetoed=*/false,
                config.run_plan.days_nocurrent, area);
  const auto sub = subtract(out.spectrum_on, out.spectrum_off);
  out.roi = roi_sum(sub, config.analysis.roi);
  out.limit = beta_limit(out.roi.excess, out.roi.sigma,
                         config.analysis.confidence_sigma, factors.budget,
                         factors.capture_factor, factors.acceptance.acceptance,
                         factors.det_eff * factors.roi_containment,
                         config.analysis.roi);
  return out;
}

nlohmann::json acceptance_to_json(const AcceptanceResult& a) {
  return {
      {"solid_angle_fraction", a.solid_angle_fraction},
      {"acceptance", a.acceptance},
      {"solid_angle_se", a.solid_angle_se},
      {"acceptance_se", a.acceptance_se},
      {"energy_kev", a.energy_kev},
      {"n_samples", a.n_samples},
      {"seed", a.seed},
  };
}

nlohmann::json factors_to_json(const RunFactors& f) {
  return {
      {"n_electrons", f.budget.n_electrons()},
      {"current_a", f.budget.current_a},
      {"duration_s", f.budget.duration_s},
      {"capture_factor", f.capture_factor},
      {"acceptance", acceptance_to_json(f.acceptance)},
      {"det_eff", f.det_eff},
      {"roi_containment", f.roi_containment},
  };
}

nlohmann::json limit_to_json(const LimitResult& l) {
  return {
      {"beta2_over_2", l.beta2_over_2},
      {"n_x_upper", l.n_x_upper},
      {"excess", l.excess},
      {"sigma", l.sigma},
      {"confidence_sigma", l.confidence_sigma},
      {"n_electrons", l.n_electrons},
      {"capture_factor", l.capture_factor},
      {"acceptance", l.acceptance},
      {"det_eff", l.det_eff},
      {"roi_low_kev", l.roi.low_kev},
      {"roi_high_kev", l.roi.high_kev},
  };
}

nlohmann::json gain_report_to_json(const GainReport& g) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : g.rows) {
    rows.push_back({{"label", r.label},
                    {"signal_factor", r.signal_factor},
                    {"background_factor", r.background_factor},
                    {"sensitivity_gain", r.sensitivity_gain}});
  }
  return {
      {"rows", std::move(rows)},
      {"total_signal_factor", g.total_signal_factor},
      {"total_sensitivity_gain", g.total_sensitivity_gain},
  };
}

RunArtifacts run_simulate(const ExperimentConfig& config,
                          const std::filesystem::path& out_dir) {
  const auto t_start = std::chrono::steady_clock::now();
  const SimulatedRun run = simulate_run(config);

  RunArtifacts art;
  art.factors = run.factors;
  art.events_on = out_dir / "events_current.csv";
  art.events_off = out_dir / "events_nocurrent.csv";
  art.spectrum_on = out_dir / "spectrum_current.csv";
  art.spectrum_off = out_dir / "spectrum_nocurrent.csv";
  art.report = out_dir / "run_report.json";

  write_events_csv(art.events_on, run.events_on);
  write_events_csv(art.events_off, run.events_off);

  const bool can_analyze = config.run_plan.days_current > 0.0 &&
                           config.run_plan.days_nocurrent > 0.0;
  nlohmann::json limit_json;
  nlohmann::json roi_excess;
  nlohmann::json roi_sigma;
  if (can_analyze) {
    art.analysis =
        analyze_events(config, run.factors, run.events_on, run.events_off);
    write_spectrum_csv(art.spectrum_on, art.analysis->spectrum_on);
    write_spectrum_csv(art.spectrum_off, art.analysis->spectrum_off);
    limit_json = limit_to_json(art.analysis->limit);
    roi_excess = art.analysis->roi.excess;
    roi_sigma = art.analysis->roi.sigma;
  } else {
    // Degenerate plan: still emit well-formed (empty) spectra, but there
    // is no on/off pair to subtract, so the report carries no limit.
    const double area = config.geometry.total_cell_area_cm2();
    write_spectrum_csv(
        art.spectrum_on,
        histogram(run.events_on, config.analysis.edges(), false,
                  config.run_plan.days_current, area));
    write_spectrum_csv(
        art.spectrum_off,
        histogram(run.events_off, config.analysis.edges(), false,
                  config.run_plan.days_nocurrent, area));
  }

  std::uint64_t vetoed_on = 0;
  for (const auto& e : run.events_on) vetoed_on += e.vetoed ? 1 : 0;
  std::uint64_t vetoed_off = 0;
  for (const auto& e : run.events_off) vetoed_off += e.vetoed ? 1 : 0;

  const double elapsed_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start)
          .count();

  nlohmann::json report = {
      {"schema", 1},
      {"version", kVersion},
      {"config", config.to_json()},
      {"factors", factors_to_json(run.factors)},
      {"counts",
       {{"events_current", run.events_on.size()},
        {"events_nocurrent", run.events_off.size()},
        {"vetoed_current", vetoed_on},
        {"vetoed_nocurrent", vetoed_off},
        {"roi_excess", roi_excess},
        {"roi_sigma", roi_sigma}}},
      {"limit", limit_json},
      {"files",
       {{"events_current", art.events_on.filename().string()},
        {"events_nocurrent", art.events_off.filename().string()},
        {"spectrum_current", art.spectrum_on.filename().string()},
        {"spectrum_nocurrent", art.spectrum_off.filename().string()}}},
      {"timing", {{"elapsed_s", elapsed_s}}},
  };
  atomic_write_text(art.report, report.dump(2) + "\n");
  return art;
}

}  // namespace pepsim
