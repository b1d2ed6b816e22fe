// pepsim: simulate an underground Pauli-exclusion test (fresh current
// electrons in copper, SDD X-ray detection) and turn event lists into
// upper limits on the violation probability beta^2/2.

#include <cstdio>
#include <exception>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "pepsim/acceptance.hpp"
#include "pepsim/analysis.hpp"
#include "pepsim/config.hpp"
#include "pepsim/io.hpp"
#include "pepsim/pipeline.hpp"
#include "pepsim/version.hpp"

namespace {

using pepsim::ExperimentConfig;

constexpr int kExitError = 1;
constexpr int kExitConfig = 2;

struct ConfigSource {
  std::string config_file;
  std::string preset;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> samples;

  void add_options(CLI::App& cmd, bool config_required) {
    auto* cfg = cmd.add_option("-c,--config", config_file,
                               "JSON config file (schema 1)");
    auto* pre = cmd.add_option("-p,--preset", preset,
                               "built-in preset (vip2-2016, vip2-upgrade)");
    cfg->excludes(pre);
    pre->excludes(cfg);
    if (config_required) {
      // one of the two must be given
      cmd.callback([this, &cmd] {
        if (config_file.empty() && preset.empty()) {
          throw CLI::RequiredError("--config or --preset");
        }
      });
    }
    cmd.add_option("-s,--seed", seed, "override the master seed");
    cmd.add_option("-n,--samples", samples,
                   "override the acceptance sample count");
  }

  ExperimentConfig resolve() const {
    ExperimentConfig cfg = config_file.empty()
                               ? ExperimentConfig::preset(preset)
                               : ExperimentConfig::load_file(config_file);
    if (seed) cfg.seed = *seed;
    if (samples) {
      cfg.analysis.acceptance_samples = *samples;
      cfg.analysis.acceptance_override = 0.0;  // an explicit count wins
    }
    return cfg;
  }
};

void emit(const nlohmann::json& doc, const std::string& out_file) {
  const std::string text = doc.dump(2) + "\n";
  if (out_file.empty()) {
    std::fputs(text.c_str(), stdout);
  } else {
    pepsim::atomic_write_text(out_file, text);
  }
}

int cmd_simulate(const ConfigSource& src, const std::string& out_dir) {
  const ExperimentConfig cfg = src.resolve();
  const auto art = pepsim::run_simulate(cfg, out_dir);
  std::printf("events: %s (current), %s (no current)\n",
              art.events_on.string().c_str(), art.events_off.string().c_str());
  if (art.analysis) {
    std::printf("beta^2/2 upper limit (%.0f sigma): %.6g\n",
                art.analysis->limit.confidence_sigma,
                art.analysis->limit.beta2_over_2);
  } else {
    std::printf("beta^2/2 upper limit: n/a (a period has zero duration)\n");
  }
  std::printf("report: %s\n", art.report.string().c_str());
  return 0;
}

int cmd_analyze(const ConfigSource& src, const std::string& on_file,
                const std::string& off_file, const std::string& out_file) {
  const ExperimentConfig cfg = src.resolve();
  const auto events_on = pepsim::read_events_csv(on_file);
  const auto events_off = pepsim::read_events_csv(off_file);
  const auto factors = pepsim::compute_factors(cfg);
  const auto out = pepsim::analyze_events(cfg, factors, events_on, events_off);
  nlohmann::json doc = {
      {"schema", 1},
      {"version", pepsim::kVersion},
      {"factors", pepsim::factors_to_json(factors)},
      {"roi",
       {{"excess", out.roi.excess},
        {"sigma", out.roi.sigma},
        {"n_bins", out.roi.n_bins}}},
      {"limit", pepsim::limit_to_json(out.limit)},
  };
  emit(doc, out_file);
  return 0;
}

int cmd_gains(const std::string& table, const std::string& out_file) {
  nlohmann::json doc;
  if (table == "vip2" || table == "all") {
    doc["vip2"] = pepsim::gain_report_to_json(pepsim::vip_to_vip2_gains());
  }
  if (table == "upgrade" || table == "all") {
    doc["upgrade"] =
        pepsim::gain_report_to_json(pepsim::vip2_upgrade_gains());
  }
  emit(doc, out_file);
  return 0;
}

int cmd_project(double limit, double gain, double time_ratio,
                const std::string& out_file) {
  const double projected = pepsim::project_limit(limit, gain, time_ratio);
  emit({{"limit", limit},
        {"sensitivity_gain", gain},
        {"time_ratio", time_ratio},
        {"projected_limit", projected}},
       out_file);
  return 0;
}

int cmd_solid_angle(const ConfigSource& src, std::optional<double> energy,
                    const std::string& out_file) {
  ExperimentConfig cfg = src.resolve();
  const std::uint64_t n =
      src.samples ? *src.samples : cfg.analysis.acceptance_samples;
  const double e = energy ? *energy : cfg.transitions.forbidden_kev;
  const auto res = pepsim::geometric_acceptance(
      cfg.geometry, e, pepsim::Material::copper(), n, cfg.seed);
  emit(pepsim::acceptance_to_json(res), out_file);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pauli-exclusion violation search simulator"};
  app.set_version_flag("--version", std::string("pepsim ") + pepsim::kVersion);
  app.require_subcommand(1);

  // simulate
  auto* sim = app.add_subcommand("simulate",
                                 "generate event lists and a run report");
  ConfigSource sim_src;
  sim_src.add_options(*sim, true);
  std::string sim_out = "pepsim-out";
  sim->add_option("-o,--out", sim_out, "output directory");

  // analyze
  auto* ana = app.add_subcommand("analyze",
                                 "compute the limit from event CSV files");
  ConfigSource ana_src;
  ana_src.add_options(*ana, true);
  std::string ana_on, ana_off, ana_out;
  ana->add_option("--on", ana_on, "current-on events CSV")->required();
  ana->add_option("--off", ana_off, "current-off events CSV")->required();
  ana->add_option("-o,--out", ana_out, "report file (default: stdout)");

  // gains
  auto* gns = app.add_subcommand("gains", "built-in sensitivity gain tables");
  std::string gains_table = "all";
  gns->add_option("-t,--table", gains_table, "vip2, upgrade or all")
      ->check(CLI::IsMember({"vip2", "upgrade", "all"}));
  std::string gains_out;
  gns->add_option("-o,--out", gains_out, "output file (default: stdout)");

  // project
  auto* prj = app.add_subcommand("project",
                                 "scale a limit by a gain and a longer run");
  double prj_limit = 0.0, prj_gain = 0.0, prj_ratio = 0.0;
  prj->add_option("--limit", prj_limit, "current upper limit")->required();
  prj->add_option("--gain", prj_gain, "sensitivity gain factor")->required();
  prj->add_option("--time-ratio", prj_ratio,
                  "new exposure / old exposure")
      ->required();
  std::string prj_out;
  prj->add_option("-o,--out", prj_out, "output file (default: stdout)");

  // solid-angle
  auto* sol = app.add_subcommand(
      "solid-angle", "Monte Carlo strip-to-cell acceptance for a layout");
  ConfigSource sol_src;
  sol_src.add_options(*sol, true);
  std::optional<double> sol_energy;
  sol->add_option("-e,--energy", sol_energy,
                  "photon energy in keV (default: forbidden line)");
  std::string sol_out;
  sol->add_option("-o,--out", sol_out, "output file (default: stdout)");

  try {
    app.parse(argc, argv);
    if (sim->parsed()) return cmd_simulate(sim_src, sim_out);
    if (ana->parsed()) return cmd_analyze(ana_src, ana_on, ana_off, ana_out);
    if (gns->parsed()) return cmd_gains(gains_table, gains_out);
    if (prj->parsed()) return cmd_project(prj_limit, prj_gain, prj_ratio, prj_out);
    if (sol->parsed()) return cmd_solid_angle(sol_src, sol_energy, sol_out);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const pepsim::ConfigError& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "pepsim: error: %s\n", e.what());
    return kExitError;
  }
  return 0;
}
