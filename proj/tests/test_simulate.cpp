#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <doctest.h>

#include "pepsim/constants.hpp"
#include "pepsim/rng.hpp"
#include "pepsim/simulate.hpp"

using namespace pepsim;

namespace {

GeometryLayout one_cell(double width_mm = 10.0) {
  GeometryLayout g;
  g.name = "one";
  TargetStrip s;
  s.size_mm = {10.0, 10.0, 0.018};
  g.strips.push_back(s);
  DetectorCell c;
  c.id = 0;
  c.center_mm = {0.0, 0.0, 10.0};
  c.width_mm = width_mm;
  c.height_mm = 10.0;
  c.depletion_um = 450.0;
  c.normal = {0.0, 0.0, -1.0};
  c.u_axis = {1.0, 0.0, 0.0};
  g.cells.push_back(c);
  return g;
}

BackgroundModel flat_background(double rate) {
  BackgroundModel m;
  m.continuum_per_kev_day_cm2 = rate;
  return m;
}

}  // namespace

TEST_CASE("detection efficiency against the silicon oracle") {
  CHECK_EQ(detection_efficiency(8.05, 0.0), 0.0);
  CHECK(detection_efficiency(8.05, 450.0) ==
        doctest::Approx(0.99871937684871803).epsilon(1e-12));
  CHECK(detection_efficiency(8.05, 30.0) ==
        doctest::Approx(0.35855204743142677).epsilon(1e-12));
  CHECK(detection_efficiency(7.7, 450.0) ==
        doctest::Approx(0.99948082014790085).epsilon(1e-12));
  CHECK(detection_efficiency(6.0, 450.0) ==
        doctest::Approx(0.99999979758585189).epsilon(1e-12));
  // The 450 um depletion keeps more than double what a 30 um layer stops.
  CHECK(detection_efficiency(8.05, 450.0) /
            detection_efficiency(8.05, 30.0) >
        2.0);
  CHECK_THROWS_AS(detection_efficiency(8.05, -1.0), std::domain_error);
  CHECK_THROWS_AS(detection_efficiency(0.2, 450.0), std::out_of_range);
}

TEST_CASE("expected signal count") {
  const ElectronBudget b(100.0, 40.0 * constants::kSecondsPerDay);
  CHECK_EQ(expected_signal_count(0.0, b, 0.1, 0.03, 0.99), 0.0);
  CHECK(expected_signal_count(1e-29, b, 0.1, 0.03, 0.99) ==
        doctest::Approx(6.4064846423169091e-05).epsilon(1e-12));
  CHECK_EQ(expected_signal_count(1e-29, b, 0.1, 0.06, 0.99),
           2.0 * expected_signal_count(1e-29, b, 0.1, 0.03, 0.99));
  CHECK_THROWS_AS(expected_signal_count(-1e-29, b, 0.1, 0.03, 0.99),
                  std::domain_error);
}

TEST_CASE("expected background count: continuum window arithmetic") {
  auto m = flat_background(3.0);
  // r * width * days * area.
  CHECK_EQ(expected_background_count(m, 30.0, 6.0, 7.4, 7.9),
           3.0 * 0.5 * 30.0 * 6.0);
  // Window clipped to the model range.
  CHECK_EQ(expected_background_count(m, 1.0, 1.0, 19.0, 25.0), 3.0);
  CHECK_EQ(expected_background_count(m, 1.0, 1.0, 21.0, 25.0), 0.0);
  m.shielding_suppression = 20.0;
  CHECK_EQ(expected_background_count(m, 30.0, 6.0, 7.4, 7.9),
           3.0 * 0.5 * 30.0 * 6.0 / 20.0);
  CHECK_THROWS_AS(expected_background_count(m, -1.0, 6.0, 7.4, 7.9),
                  std::domain_error);
}

TEST_CASE("expected background count: line masses") {
  BackgroundModel m;
  m.lines.push_back({8.05, 10.0, 0.0});
  // The whole line lands inside a wide window.
  CHECK(expected_background_count(m, 5.0, 6.0, 1.0, 20.0) ==
        doctest::Approx(50.0).epsilon(1e-9));
  // A zero-width line with no response smearing is a delta.
  CHECK(expected_background_count(m, 5.0, 6.0, 8.0, 8.1) ==
        doctest::Approx(50.0).epsilon(1e-9));
  CHECK_EQ(expected_background_count(m, 5.0, 6.0, 7.4, 7.9), 0.0);
  // Response smearing spills some of it out of a narrow window.
  DetectorResponse resp;
  const double in_window =
      expected_background_count(m, 5.0, 6.0, 8.0, 8.1, &resp);
  CHECK(in_window < 50.0);
  CHECK(in_window > 25.0);
}

TEST_CASE("cell table picks proportionally to area") {
  GeometryLayout g = one_cell(10.0);
  DetectorCell c = g.cells[0];
  c.id = 1;
  c.center_mm = {25.0, 0.0, 10.0};
  c.width_mm = 30.0;  // 3x the area of cell 0
  g.cells.push_back(c);
  const CellTable table(g);
  CHECK(table.total_area_cm2() == doctest::Approx(4.0));

  auto rng = RngStream::derive(21, 1, 0);
  int hits1 = 0;
  const int n = 40000;
  for (int i = 0; i < n; ++i) {
    if (table.pick(rng) == 1) ++hits1;
  }
  CHECK(static_cast<double>(hits1) / n == doctest::Approx(0.75).epsilon(0.02));
}

TEST_CASE("signal generation: poisson count closure") {
  const CellTable cells(one_cell());
  DetectorResponse resp;
  double total = 0.0;
  const int n_streams = 200;
  for (int i = 0; i < n_streams; ++i) {
    auto rng = RngStream::derive(100, 2, static_cast<std::uint64_t>(i));
    const auto ev =
        generate_signal_events(100.0, 7.70, resp, cells, 0.0, 86400.0, rng);
    total += static_cast<double>(ev.size());
  }
  const double mean = total / n_streams;
  // 3 sigma of a Poisson(100) sample mean over 200 draws.
  CHECK(mean > 97.0);
  CHECK(mean < 103.0);
}

TEST_CASE("signal generation: smearing width and bookkeeping") {
  const CellTable cells(one_cell());
  DetectorResponse resp;  // 150 eV FWHM
  auto rng = RngStream::derive(7, 2, 0);
  const auto ev =
      generate_signal_events(20000.0, 7.70, resp, cells, 10.0, 400.0, rng);
  REQUIRE(ev.size() > 15000);
  double sum = 0.0, sum2 = 0.0;
  for (std::size_t i = 0; i < ev.size(); ++i) {
    const auto& e = ev[i];
    CHECK_EQ(e.origin, Origin::kSignal);
    CHECK(!e.vetoed);
    CHECK(e.time_s >= 10.0);
    CHECK(e.time_s < 400.0);
    if (i > 0) CHECK(ev[i].time_s >= ev[i - 1].time_s);
    sum += e.energy_kev;
    sum2 += e.energy_kev * e.energy_kev;
  }
  const double n = static_cast<double>(ev.size());
  const double mean = sum / n;
  const double sd_ev = std::sqrt(sum2 / n - mean * mean) * 1000.0;
  CHECK(mean == doctest::Approx(7.70).epsilon(0.001));
  CHECK(sd_ev == doctest::Approx(63.7).epsilon(0.05));
}

TEST_CASE("signal generation: zero mean and threshold") {
  const CellTable cells(one_cell());
  DetectorResponse resp;
  auto rng = RngStream::derive(7, 2, 1);
  CHECK(generate_signal_events(0.0, 7.70, resp, cells, 0.0, 1.0, rng).empty());

  resp.threshold_kev = 7.7;
  auto rng2 = RngStream::derive(7, 2, 2);
  const auto ev =
      generate_signal_events(5000.0, 7.70, resp, cells, 0.0, 1.0, rng2);
  for (const auto& e : ev) CHECK(e.energy_kev >= 7.7);
  // Half the Gaussian is below the cut.
  CHECK(static_cast<double>(ev.size()) ==
        doctest::Approx(2500.0).epsilon(0.05));
  CHECK_THROWS_AS(
      generate_signal_events(-1.0, 7.70, resp, cells, 0.0, 1.0, rng2),
      std::domain_error);
}

TEST_CASE("background generation: mean count closure in a window") {
  const CellTable cells(one_cell());  // 1 cm^2
  DetectorResponse resp;
  auto m = flat_background(28.0);
  const double days = 30.0;
  double roi_total = 0.0;
  const int n_streams = 20;
  for (int i = 0; i < n_streams; ++i) {
    auto rng = RngStream::derive(55, 3, static_cast<std::uint64_t>(i));
    const auto ev = generate_background_events(
        m, resp, cells, 0.0, days * constants::kSecondsPerDay, rng);
    for (const auto& e : ev) {
      if (e.energy_kev >= 7.4 && e.energy_kev < 7.9) roi_total += 1.0;
    }
  }
  const double mean = roi_total / n_streams;
  const double expected = 28.0 * 0.5 * days * 1.0;  // 420 per stream
  const double sigma_of_mean = std::sqrt(expected / n_streams);
  CHECK(std::abs(mean - expected) < 3.0 * sigma_of_mean);
}

TEST_CASE("background generation: suppression scales counts down") {
  const CellTable cells(one_cell());
  DetectorResponse resp;
  auto loud = flat_background(100.0);
  auto quiet = loud;
  quiet.shielding_suppression = 20.0;
  double n_loud = 0.0, n_quiet = 0.0;
  for (int i = 0; i < 10; ++i) {
    auto r1 = RngStream::derive(66, 3, static_cast<std::uint64_t>(i));
    auto r2 = RngStream::derive(67, 3, static_cast<std::uint64_t>(i));
    n_loud += static_cast<double>(
        generate_background_events(loud, resp, cells, 0.0, 864000.0, r1)
            .size());
    n_quiet += static_cast<double>(
        generate_background_events(quiet, resp, cells, 0.0, 864000.0, r2)
            .size());
  }
  CHECK(n_loud / n_quiet == doctest::Approx(20.0).epsilon(0.05));
}

TEST_CASE("background generation: correlated fraction flags events") {
  const CellTable cells(one_cell());
  DetectorResponse resp;
  auto m = flat_background(200.0);

  m.veto_correlated_fraction = 0.0;
  auto r0 = RngStream::derive(70, 3, 0);
  for (const auto& e :
       generate_background_events(m, resp, cells, 0.0, 864000.0, r0)) {
    CHECK(!e.coincident_hit);
  }

  m.veto_correlated_fraction = 1.0;
  auto r1 = RngStream::derive(70, 3, 1);
  for (const auto& e :
       generate_background_events(m, resp, cells, 0.0, 864000.0, r1)) {
    CHECK(e.coincident_hit);
  }

  m.veto_correlated_fraction = 0.3;
  auto r2 = RngStream::derive(70, 3, 2);
  const auto ev = generate_background_events(m, resp, cells, 0.0, 8640000.0, r2);
  REQUIRE(ev.size() > 10000);
  double flagged = 0.0;
  for (const auto& e : ev) flagged += e.coincident_hit ? 1.0 : 0.0;
  CHECK(flagged / static_cast<double>(ev.size()) ==
        doctest::Approx(0.3).epsilon(0.05));
}

TEST_CASE("background generation: zero rates give an empty stream") {
  const CellTable cells(one_cell());
  DetectorResponse resp;
  BackgroundModel m;  // all rates zero
  auto rng = RngStream::derive(71, 3, 0);
  CHECK(generate_background_events(m, resp, cells, 0.0, 864000.0, rng).empty());
}

TEST_CASE("background rate is invariant under splitting a cell in four") {
  DetectorResponse resp;
  const auto m = flat_background(50.0);
  GeometryLayout quarters;
  quarters.name = "quarters";
  TargetStrip s;
  s.size_mm = {10.0, 10.0, 0.018};
  quarters.strips.push_back(s);
  int id = 0;
  for (double dx : {-2.5, 2.5}) {
    for (double dy : {-2.5, 2.5}) {
      DetectorCell c;
      c.id = id++;
      c.center_mm = {dx, dy, 10.0};
      c.width_mm = 5.0;
      c.height_mm = 5.0;
      c.depletion_um = 450.0;
      c.normal = {0.0, 0.0, -1.0};
      c.u_axis = {1.0, 0.0, 0.0};
      quarters.cells.push_back(c);
    }
  }
  const CellTable whole(one_cell());
  const CellTable split(quarters);
  CHECK_EQ(whole.total_area_cm2(), split.total_area_cm2());

  auto r1 = RngStream::derive(80, 3, 0);
  auto r2 = RngStream::derive(80, 3, 0);
  const auto ev1 =
      generate_background_events(m, resp, whole, 0.0, 864000.0, r1);
  const auto ev2 =
      generate_background_events(m, resp, split, 0.0, 864000.0, r2);
  // Same total area, same stream: identical events except cell labels.
  REQUIRE_EQ(ev1.size(), ev2.size());
  for (std::size_t i = 0; i < ev1.size(); ++i) {
    CHECK_EQ(ev1[i].time_s, ev2[i].time_s);
    CHECK_EQ(ev1[i].energy_kev, ev2[i].energy_kev);
  }
}

TEST_CASE("veto: limiting cases") {
  const CellTable cells(one_cell());
  DetectorResponse resp;
  auto m = flat_background(100.0);
  auto rng = RngStream::derive(90, 3, 0);
  auto events = generate_background_events(m, resp, cells, 0.0, 864000.0, rng);
  auto srng = RngStream::derive(90, 2, 0);
  auto signal =
      generate_signal_events(2000.0, 7.70, resp, cells, 0.0, 864000.0, srng);
  events.insert(events.end(), signal.begin(), signal.end());

  VetoModel veto;
  veto.efficiency_photon = 1.0;
  auto vrng = RngStream::derive(90, 5, 0);
  apply_veto(events, veto, vrng);
  for (const auto& e : events) {
    if (e.origin == Origin::kBackground) {
      CHECK(e.vetoed);
    } else {
      CHECK(!e.vetoed);  // no accidentals configured
    }
    if (e.vetoed) CHECK(e.coincident_hit);
  }
}

TEST_CASE("veto: five percent photon efficiency") {
  const CellTable cells(one_cell());
  DetectorResponse resp;
  auto m = flat_background(300.0);
  auto rng = RngStream::derive(91, 3, 0);
  auto events =
      generate_background_events(m, resp, cells, 0.0, 8640000.0, rng);
  REQUIRE(events.size() > 20000);

  VetoModel veto;  // efficiency_photon = 0.05
  auto vrng = RngStream::derive(91, 5, 0);
  apply_veto(events, veto, vrng);
  double vetoed = 0.0;
  for (const auto& e : events) vetoed += e.vetoed ? 1.0 : 0.0;
  const double n = static_cast<double>(events.size());
  const double frac = vetoed / n;
  const double binom_sigma = std::sqrt(0.05 * 0.95 / n);
  CHECK(std::abs(frac - 0.05) < 4.0 * binom_sigma);
}

TEST_CASE("veto: accidentals hit signal at rate x window") {
  const CellTable cells(one_cell());
  DetectorResponse resp;
  auto srng = RngStream::derive(92, 2, 0);
  auto events =
      generate_signal_events(20000.0, 7.70, resp, cells, 0.0, 864000.0, srng);

  VetoModel veto;
  veto.accidental_rate_hz = 1e5;  // p = 1e5 * 2 * 500 ns = 0.1
  CHECK(veto.accidental_probability() == doctest::Approx(0.1).epsilon(1e-12));
  auto vrng = RngStream::derive(92, 5, 0);
  apply_veto(events, veto, vrng);
  double vetoed = 0.0;
  for (const auto& e : events) {
    vetoed += e.vetoed ? 1.0 : 0.0;
    if (e.vetoed) CHECK(e.coincident_hit);
  }
  CHECK(vetoed / static_cast<double>(events.size()) ==
        doctest::Approx(0.1).epsilon(0.1));

  VetoModel saturated;
  saturated.accidental_rate_hz = 1e10;
  CHECK_EQ(saturated.accidental_probability(), 1.0);
}

TEST_CASE("model validation") {
  RunPlan plan;
  CHECK_NOTHROW(plan.validate());
  CHECK_EQ(plan.seconds_current(), 40.0 * constants::kSecondsPerDay);
  plan.current_a = -1.0;
  CHECK_THROWS_AS(plan.validate(), std::invalid_argument);
  plan = RunPlan{};
  plan.injected_beta2_over_2 = 1.5;
  CHECK_THROWS_AS(plan.validate(), std::invalid_argument);

  DetectorResponse resp;
  CHECK(resp.energy_sigma_kev() ==
        doctest::Approx(0.063699135021601428).epsilon(1e-12));
  resp.depletion_depth_um = -1.0;
  CHECK_THROWS_AS(resp.validate(), std::invalid_argument);

  BackgroundModel bg;
  bg.veto_correlated_fraction = 1.5;
  CHECK_THROWS_AS(bg.validate(), std::invalid_argument);
  bg = BackgroundModel{};
  bg.shielding_suppression = 0.5;
  CHECK_THROWS_AS(bg.validate(), std::invalid_argument);
  bg = BackgroundModel{};
  bg.e_min_kev = 0.0;
  CHECK_THROWS_AS(bg.validate(), std::invalid_argument);

  VetoModel veto;
  veto.efficiency_photon = 1.5;
  CHECK_THROWS_AS(veto.validate(), std::invalid_argument);
  veto = VetoModel{};
  veto.accidental_rate_hz = -1.0;
  CHECK_THROWS_AS(veto.validate(), std::invalid_argument);
}

TEST_CASE("poisson dispersion of window counts across streams") {
  const CellTable cells(one_cell());
  DetectorResponse resp;
  const auto m = flat_background(28.0);
  double sum = 0.0, sum2 = 0.0;
  const int n_streams = 200;
  for (int i = 0; i < n_streams; ++i) {
    auto rng = RngStream::derive(123, 3, static_cast<std::uint64_t>(i));
    const auto ev = generate_background_events(
        m, resp, cells, 0.0, constants::kSecondsPerDay, rng);
    double roi = 0.0;
    for (const auto& e : ev) {
      if (e.energy_kev >= 7.4 && e.energy_kev < 7.9) roi += 1.0;
    }
    sum += roi;
    sum2 += roi * roi;
  }
  const double mean = sum / n_streams;
  const double var = sum2 / n_streams - mean * mean;
  CHECK(var / mean > 0.8);
  CHECK(var / mean < 1.25);
}
