#include <stdexcept>

#include <doctest.h>
#include <json.hpp>

#include "pepsim/config.hpp"
#include "test_util.hpp"

using namespace pepsim;
using nlohmann::json;

TEST_CASE("vip2-2016 preset carries the published run parameters") {
  const auto c = ExperimentConfig::preset("vip2-2016");
  CHECK_EQ(c.name, "vip2-2016");
  CHECK_EQ(c.seed, 1);
  CHECK_EQ(c.run_plan.current_a, 100.0);
  CHECK_EQ(c.run_plan.days_current, 40.0);
  CHECK_EQ(c.run_plan.days_nocurrent, 70.0);
  CHECK_EQ(c.run_plan.injected_beta2_over_2, 0.0);
  CHECK_EQ(c.response.energy_fwhm_ev, 150.0);
  CHECK_EQ(c.response.time_fwhm_ns, 400.0);
  CHECK_EQ(c.response.depletion_depth_um, 450.0);
  CHECK_EQ(c.response.threshold_kev, 1.0);
  CHECK_EQ(c.background.continuum_per_kev_day_cm2, 28.0);
  REQUIRE_EQ(c.background.lines.size(), 2);
  CHECK_EQ(c.background.lines[0].energy_kev, 8.05);
  CHECK_EQ(c.background.lines[1].energy_kev, 8.905);
  CHECK_EQ(c.background.veto_correlated_fraction, 1.0);
  CHECK_EQ(c.background.shielding_suppression, 1.0);
  CHECK_EQ(c.background.rrs_suppression, 1.0);
  CHECK_EQ(c.veto.window_halfwidth_ns, 500.0);
  CHECK_EQ(c.veto.efficiency_photon, 0.05);
  CHECK_EQ(c.veto.efficiency_cosmic, 0.95);
  CHECK_EQ(c.veto.accidental_rate_hz, 0.0);
  CHECK_EQ(c.capture.probability_per_interaction, 0.1);
  CHECK(c.capture.factor() == doctest::Approx(233333.33333333337));
  CHECK_EQ(c.transitions.forbidden_kev, 7.70);
  CHECK_EQ(c.analysis.roi.low_kev, 7.4);
  CHECK_EQ(c.analysis.roi.high_kev, 7.9);
  CHECK_EQ(c.analysis.bin_width_kev, 0.1);
  CHECK_EQ(c.analysis.confidence_sigma, 3.0);
  CHECK_EQ(c.analysis.acceptance_samples, 1000000);
  CHECK_EQ(c.geometry.cells.size(), 6);
  CHECK_NOTHROW(c.validate());
  CHECK_EQ(c.analysis.edges().size(), 191);
}

TEST_CASE("vip2-upgrade preset: suppressions and bigger array") {
  const auto c = ExperimentConfig::preset("vip2-upgrade");
  CHECK_EQ(c.response.energy_fwhm_ev, 200.0);
  CHECK_EQ(c.background.shielding_suppression, 20.0);
  CHECK_EQ(c.background.rrs_suppression, 3.0);
  CHECK_EQ(c.geometry.cells.size(), 36);
  CHECK_NOTHROW(c.validate());
  CHECK_THROWS_AS(ExperimentConfig::preset("vip1"), std::invalid_argument);
}

TEST_CASE("json round trip preserves the full config") {
  const auto c = ExperimentConfig::preset("vip2-upgrade");
  const json j = c.to_json();
  const auto back = ExperimentConfig::from_json(j);
  CHECK(back.to_json() == j);
  CHECK_EQ(back.seed, c.seed);
  CHECK_EQ(back.background.shielding_suppression, 20.0);
  CHECK_EQ(back.geometry.cells.size(), 36);
}

TEST_CASE("preset key plus merge patch") {
  const json doc = {
      {"preset", "vip2-2016"},
      {"seed", 9},
      {"run_plan", {{"days_current", 10.0}}},
      {"background", {{"continuum_per_kev_day_cm2", 5.0}}},
  };
  const auto c = ExperimentConfig::from_json(doc);
  CHECK_EQ(c.seed, 9);
  CHECK_EQ(c.run_plan.days_current, 10.0);
  CHECK_EQ(c.run_plan.days_nocurrent, 70.0);  // untouched preset value
  CHECK_EQ(c.background.continuum_per_kev_day_cm2, 5.0);
  CHECK_EQ(c.background.lines.size(), 2);
}

TEST_CASE("geometry accepts a named preset") {
  json doc = ExperimentConfig::preset("vip2-2016").to_json();
  doc["geometry"] = {{"preset", "vip2-upgrade"}};
  const auto c = ExperimentConfig::from_json(doc);
  CHECK_EQ(c.geometry.cells.size(), 36);
  CHECK_EQ(c.response.energy_fwhm_ev, 150.0);  // rest untouched
}

TEST_CASE("unknown keys are rejected with their path") {
  json doc = {{"preset", "vip2-2016"}, {"runplan", {{"days_current", 1.0}}}};
  try {
    ExperimentConfig::from_json(doc);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("unknown key '/runplan'") !=
          std::string::npos);
  }

  json doc2 = {{"preset", "vip2-2016"}, {"run_plan", {{"amps", 100.0}}}};
  try {
    ExperimentConfig::from_json(doc2);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("/run_plan/amps") != std::string::npos);
  }
}

TEST_CASE("schema gate") {
  json doc = {{"preset", "vip2-2016"}, {"schema", 2}};
  CHECK_THROWS_AS(ExperimentConfig::from_json(doc), ConfigError);
  json doc1 = {{"preset", "vip2-2016"}, {"schema", 1}};
  CHECK_NOTHROW(ExperimentConfig::from_json(doc1));
}

TEST_CASE("unknown preset fails cleanly") {
  json doc = {{"preset", "vip9"}};
  CHECK_THROWS_AS(ExperimentConfig::from_json(doc), ConfigError);
}

TEST_CASE("load_file: happy path with comments") {
  testutil::TempDir dir;
  const auto path = dir.file("run.json");
  testutil::write_file(path,
                       "{\n"
                       "  // comments are allowed in config files\n"
                       "  \"preset\": \"vip2-2016\",\n"
                       "  \"seed\": 77\n"
                       "}\n");
  const auto c = ExperimentConfig::load_file(path);
  CHECK_EQ(c.seed, 77);
  CHECK_EQ(c.name, "vip2-2016");
}

TEST_CASE("load_file: parse errors carry file and line") {
  testutil::TempDir dir;
  const auto path = dir.file("broken.json");
  testutil::write_file(path,
                       "{\n"
                       "  \"preset\": \"vip2-2016\",\n"
                       "  \"seed\": ,\n"
                       "}\n");
  try {
    ExperimentConfig::load_file(path);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK_EQ(e.line(), 3);
    CHECK(std::string(e.what()).find("broken.json:3") != std::string::npos);
  }
}

TEST_CASE("load_file: unknown key points at its line") {
  testutil::TempDir dir;
  const auto path = dir.file("typo.json");
  testutil::write_file(path,
                       "{\n"
                       "  \"preset\": \"vip2-2016\",\n"
                       "  \"vetoo\": {}\n"
                       "}\n");
  try {
    ExperimentConfig::load_file(path);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK_EQ(e.line(), 3);
    CHECK(std::string(e.what()).find("typo.json:3") != std::string::npos);
    CHECK(std::string(e.what()).find("vetoo") != std::string::npos);
  }
}

TEST_CASE("load_file: semantic errors point at the failing section") {
  testutil::TempDir dir;
  const auto path = dir.file("bad.json");
  testutil::write_file(path,
                       "{\n"
                       "  \"preset\": \"vip2-2016\",\n"
                       "  \"background\": {\"continuum_per_kev_day_cm2\": -5}\n"
                       "}\n");
  try {
    ExperimentConfig::load_file(path);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("background") != std::string::npos);
    CHECK_EQ(e.line(), 3);
  }
}

TEST_CASE("load_file: missing file") {
  CHECK_THROWS_AS(ExperimentConfig::load_file("/nonexistent/nope.json"),
                  ConfigError);
}

TEST_CASE("analysis settings validation") {
  AnalysisSettings a;
  CHECK_NOTHROW(a.validate());

  a = AnalysisSettings{};
  a.e_max_kev = 20.05;  // 0.1 keV bins cannot tile this
  CHECK_THROWS_AS(a.validate(), std::invalid_argument);

  a = AnalysisSettings{};
  a.roi = {0.5, 0.9};  // outside [e_min, e_max]
  CHECK_THROWS_AS(a.validate(), std::invalid_argument);

  a = AnalysisSettings{};
  a.acceptance_override = 1.5;
  CHECK_THROWS_AS(a.validate(), std::invalid_argument);

  a = AnalysisSettings{};
  a.acceptance_samples = 0;
  CHECK_THROWS_AS(a.validate(), std::invalid_argument);
  a.acceptance_override = 0.03;  // override makes sampling optional
  CHECK_NOTHROW(a.validate());

  a = AnalysisSettings{};
  a.confidence_sigma = -1.0;
  CHECK_THROWS_AS(a.validate(), std::invalid_argument);
}

TEST_CASE("config error formatting") {
  const ConfigError e("cfg.json", 12, "bad things");
  CHECK_EQ(std::string(e.what()), "cfg.json:12: bad things");
  CHECK_EQ(e.file(), "cfg.json");
  CHECK_EQ(e.line(), 12);
  const ConfigError no_line("cfg.json", 0, "zap");
  CHECK_EQ(std::string(no_line.what()), "cfg.json: zap");
}
