#include "pepsim/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <utility>

namespace pepsim {

void AnalysisSettings::validate() const {
  roi.validate();
  if (!(bin_width_kev > 0.0)) {
    throw std::invalid_argument("analysis: bin width must be > 0");
  }
  if (!(e_min_kev > 0.0) || !(e_max_kev > e_min_kev)) {
    throw std::invalid_argument("analysis: need 0 < e_min < e_max");
  }
  const double span = e_max_kev - e_min_kev;
  const double n = std::round(span / bin_width_kev);
  if (n < 1.0 || std::abs(n * bin_width_kev - span) > 1e-9) {
    throw std::invalid_argument(
        "analysis: bin width must tile [e_min, e_max] exactly");
  }
  if (!(confidence_sigma >= 0.0)) {
    throw std::invalid_argument("analysis: confidence_sigma must be >= 0");
  }
  if (acceptance_samples == 0 && !(acceptance_override > 0.0)) {
    throw std::invalid_argument(
        "analysis: acceptance_samples must be > 0 unless an override is set");
  }
  if (acceptance_override < 0.0 || acceptance_override > 1.0) {
    throw std::invalid_argument(
        "analysis: acceptance_override must be in [0, 1]");
  }
  if (det_eff_override < 0.0 || det_eff_override > 1.0) {
    throw std::invalid_argument("analysis: det_eff_override must be in [0, 1]");
  }
  if (roi.low_kev < e_min_kev - 1e-9 || roi.high_kev > e_max_kev + 1e-9) {
    throw std::invalid_argument("analysis: roi must lie inside [e_min, e_max]");
  }
}

std::vector<double> AnalysisSettings::edges() const {
  validate();
  const auto n = static_cast<std::size_t>(
      std::llround((e_max_kev - e_min_kev) / bin_width_kev));
  return uniform_edges(e_min_kev, bin_width_kev, n);
}

namespace {

std::string format_error(const std::string& file, int line,
                         const std::string& message) {
  std::string out = file.empty() ? std::string("<config>") : file;
  if (line > 0) out += ":" + std::to_string(line);
  out += ": " + message;
  return out;
}

}  // namespace

ConfigError::ConfigError(std::string file, int line, std::string message)
    : std::runtime_error(format_error(file, line, message)),
      file_(std::move(file)),
      line_(line) {}

void ExperimentConfig::validate() const {
  geometry.validate();
  run_plan.validate();
  response.validate();
  background.validate();
  veto.validate();
  capture.validate();
  for (double e :
       {transitions.kalpha_kev, transitions.kbeta_kev, transitions.forbidden_kev}) {
    if (!(e > 0.0)) {
      throw std::invalid_argument("transitions: line energies must be > 0");
    }
  }
  analysis.validate();
}

ExperimentConfig ExperimentConfig::preset(std::string_view name) {
  ExperimentConfig c;
  if (name == "vip2-2016") {
    c.name = "vip2-2016";
    c.geometry = layout_vip2_2016();
    c.response = {150.0, 400.0, 450.0, 1.0};
  } else if (name == "vip2-upgrade") {
    c.name = "vip2-upgrade";
    c.geometry = layout_vip2_upgrade();
    // Bigger cells trade some energy resolution for coverage.
    c.response = {200.0, 400.0, 450.0, 1.0};
    c.background.shielding_suppression = 20.0;
    c.background.rrs_suppression = 3.0;
  } else {
    throw std::invalid_argument("unknown preset '" + std::string(name) +
                                "' (known: vip2-2016, vip2-upgrade)");
  }
  c.run_plan = {100.0, 40.0, 70.0, 0.0};
  // Residual gamma continuum underground after the 2016 shielding, plus
  // copper fluorescence excited by the ambient flux.
  c.background.continuum_per_kev_day_cm2 = 28.0;
  c.background.lines = {{8.05, 10.0, 0.0}, {8.905, 1.4, 0.0}};
  // One capture chance per lattice scattering: strip length 9.1 cm over
  // a conduction-electron mean free path of ~3.9e-6 cm.
  c.capture = {0.1, 9.1 / 3.9e-6};
  c.validate();
  return c;
}

namespace {

using nlohmann::json;

int line_of_offset(const std::string& text, std::size_t byte) {
  int line = 1;
  const std::size_t end = std::min(byte, text.size());
  for (std::size_t i = 0; i < end; ++i) {
    if (text[i] == '\n') ++line;
  }
  return line;
}

// Best-effort line of a key: first occurrence of "key" (quoted).
int find_key_line(const std::string& text, const std::string& key) {
  if (text.empty() || key.empty()) return 0;
  const std::string needle = "\"" + key + "\"";
  const auto pos = text.find(needle);
  if (pos == std::string::npos) return 0;
  return line_of_offset(text, pos);
}

[[noreturn]] void fail(const std::string& src, const std::string& text,
                       const std::string& key_hint, const std::string& msg) {
  throw ConfigError(src, find_key_line(text, key_hint), msg);
}

// Maps a validation message prefix ("background: ...") to the config key
// whose line we point at.
std::string section_key(const std::string& msg) {
  const auto colon = msg.find(':');
  if (colon == std::string::npos) return "";
  std::string head = msg.substr(0, colon);
  if (head == "geometry") return "geometry";
  if (head == "run plan") return "run_plan";
  if (head == "response") return "response";
  if (head == "background") return "background";
  if (head == "veto") return "veto";
  if (head == "capture model") return "capture";
  if (head == "transitions") return "transitions";
  if (head == "analysis" || head == "roi") return "analysis";
  return "";
}

// Recursively rejects keys present in the user document but absent from
// the echo of the parsed config (typo detection).
void check_unknown_keys(const json& user, const json& echo,
                        const std::string& path, const std::string& src,
                        const std::string& text) {
  if (user.is_object()) {
    if (!echo.is_object()) return;
    for (const auto& [key, value] : user.items()) {
      if (!echo.contains(key)) {
        fail(src, text, key, "unknown key '" + path + "/" + key + "'");
      }
      check_unknown_keys(value, echo.at(key), path + "/" + key, src, text);
    }
  } else if (user.is_array() && echo.is_array()) {
    const std::size_t n = std::min(user.size(), echo.size());
    for (std::size_t i = 0; i < n; ++i) {
      check_unknown_keys(user[i], echo[i], path + "/" + std::to_string(i), src,
                         text);
    }
  }
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& doc,
                                             const std::string& source_name,
                                             const std::string& source_text) {
  if (!doc.is_object()) {
    throw ConfigError(source_name, 0, "top level must be a JSON object");
  }

  ExperimentConfig base;
  json patch = doc;
  if (doc.contains("preset")) {
    std::string preset_name;
    try {
      preset_name = doc.at("preset").get<std::string>();
      base = preset(preset_name);
    } catch (const std::exception& e) {
      fail(source_name, source_text, "preset", e.what());
    }
    patch.erase("preset");
  }

  json merged = base.to_json();
  json user_patch = patch;  // kept for unknown-key reporting
  merged.merge_patch(patch);

  // Geometry may be {"preset": "<name>"} instead of a full layout.
  if (merged.contains("geometry") && merged["geometry"].is_object() &&
      merged["geometry"].contains("preset")) {
    try {
      const auto gname = merged["geometry"]["preset"].get<std::string>();
      merged["geometry"] = layout_preset(gname);
    } catch (const std::exception& e) {
      fail(source_name, source_text, "geometry", e.what());
    }
    if (user_patch.contains("geometry")) user_patch.erase("geometry");
  }

  if (merged.contains("schema")) {
    int schema = -1;
    try {
      schema = merged.at("schema").get<int>();
    } catch (const std::exception&) {
      fail(source_name, source_text, "schema", "schema must be an integer");
    }
    if (schema != kConfigSchema) {
      fail(source_name, source_text, "schema",
           "unsupported schema " + std::to_string(schema) + " (expected " +
               std::to_string(kConfigSchema) + ")");
    }
  }

  ExperimentConfig cfg;
  auto section = [&](const char* key, auto&& parse) {
    try {
      parse(merged.at(key));
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& e) {
      fail(source_name, source_text, key,
           std::string("in '") + key + "': " + e.what());
    }
  };

  section("name", [&](const json& j) { cfg.name = j.get<std::string>(); });
  section("seed", [&](const json& j) { cfg.seed = j.get<std::uint64_t>(); });
  section("geometry",
          [&](const json& j) { cfg.geometry = j.get<GeometryLayout>(); });
  section("run_plan", [&](const json& j) {
    cfg.run_plan.current_a = j.at("current_a").get<double>();
    cfg.run_plan.days_current = j.at("days_current").get<double>();
    cfg.run_plan.days_nocurrent = j.at("days_nocurrent").get<double>();
    cfg.run_plan.injected_beta2_over_2 =
        j.at("injected_beta2_over_2").get<double>();
  });
  section("response", [&](const json& j) {
    cfg.response.energy_fwhm_ev = j.at("energy_fwhm_ev").get<double>();
    cfg.response.time_fwhm_ns = j.at("time_fwhm_ns").get<double>();
    cfg.response.depletion_depth_um = j.at("depletion_depth_um").get<double>();
    cfg.response.threshold_kev = j.at("threshold_kev").get<double>();
  });
  section("background", [&](const json& j) {
    auto& b = cfg.background;
    b.continuum_per_kev_day_cm2 =
        j.at("continuum_per_kev_day_cm2").get<double>();
    b.e_min_kev = j.at("e_min_kev").get<double>();
    b.e_max_kev = j.at("e_max_kev").get<double>();
    b.veto_correlated_fraction = j.at("veto_correlated_fraction").get<double>();
    b.shielding_suppression = j.at("shielding_suppression").get<double>();
    b.rrs_suppression = j.at("rrs_suppression").get<double>();
    b.lines.clear();
    for (const auto& jl : j.at("lines")) {
      SpectralLine l;
      l.energy_kev = jl.at("energy_kev").get<double>();
      l.rate_per_day = jl.at("rate_per_day").get<double>();
      l.natural_width_ev = jl.at("natural_width_ev").get<double>();
      b.lines.push_back(l);
    }
  });
  section("veto", [&](const json& j) {
    cfg.veto.window_halfwidth_ns = j.at("window_halfwidth_ns").get<double>();
    cfg.veto.efficiency_photon = j.at("efficiency_photon").get<double>();
    cfg.veto.efficiency_cosmic = j.at("efficiency_cosmic").get<double>();
    cfg.veto.accidental_rate_hz = j.at("accidental_rate_hz").get<double>();
  });
  section("capture", [&](const json& j) {
    cfg.capture.probability_per_interaction =
        j.at("probability_per_interaction").get<double>();
    cfg.capture.interactions_per_electron =
        j.at("interactions_per_electron").get<double>();
  });
  section("transitions", [&](const json& j) {
    cfg.transitions.kalpha_kev = j.at("kalpha_kev").get<double>();
    cfg.transitions.kbeta_kev = j.at("kbeta_kev").get<double>();
    cfg.transitions.forbidden_kev = j.at("forbidden_kev").get<double>();
  });
  section("analysis", [&](const json& j) {
    auto& a = cfg.analysis;
    a.roi.low_kev = j.at("roi_low_kev").get<double>();
    a.roi.high_kev = j.at("roi_high_kev").get<double>();
    a.bin_width_kev = j.at("bin_width_kev").get<double>();
    a.e_min_kev = j.at("e_min_kev").get<double>();
    a.e_max_kev = j.at("e_max_kev").get<double>();
    a.confidence_sigma = j.at("confidence_sigma").get<double>();
    a.acceptance_samples = j.at("acceptance_samples").get<std::uint64_t>();
    a.acceptance_override = j.at("acceptance_override").get<double>();
    a.det_eff_override = j.at("det_eff_override").get<double>();
  });

  check_unknown_keys(user_patch, cfg.to_json(), "", source_name, source_text);

  try {
    cfg.validate();
  } catch (const std::exception& e) {
    const std::string msg = e.what();
    fail(source_name, source_text, section_key(msg), msg);
  }
  return cfg;
}

ExperimentConfig ExperimentConfig::load_file(
    const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ConfigError(path.string(), 0, "cannot open file");
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();

  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text, nullptr, true, /*ignore_comments=*/true);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(path.string(), line_of_offset(text, e.byte),
                      std::string("JSON parse error: ") + e.what());
  }
  return from_json(doc, path.string(), text);
}

nlohmann::json ExperimentConfig::to_json() const {
  nlohmann::json j;
  j["schema"] = kConfigSchema;
  j["name"] = name;
  j["seed"] = seed;
  j["geometry"] = geometry;
  j["run_plan"] = {
      {"current_a", run_plan.current_a},
      {"days_current", run_plan.days_current},
      {"days_nocurrent", run_plan.days_nocurrent},
      {"injected_beta2_over_2", run_plan.injected_beta2_over_2},
  };
  j["response"] = {
      {"energy_fwhm_ev", response.energy_fwhm_ev},
      {"time_fwhm_ns", response.time_fwhm_ns},
      {"depletion_depth_um", response.depletion_depth_um},
      {"threshold_kev", response.threshold_kev},
  };
  nlohmann::json lines = nlohmann::json::array();
  for (const auto& l : background.lines) {
    lines.push_back({{"energy_kev", l.energy_kev},
                     {"rate_per_day", l.rate_per_day},
                     {"natural_width_ev", l.natural_width_ev}});
  }
  j["background"] = {
      {"continuum_per_kev_day_cm2", background.continuum_per_kev_day_cm2},
      {"e_min_kev", background.e_min_kev},
      {"e_max_kev", background.e_max_kev},
      {"veto_correlated_fraction", background.veto_correlated_fraction},
      {"shielding_suppression", background.shielding_suppression},
      {"rrs_suppression", background.rrs_suppression},
      {"lines", std::move(lines)},
  };
  j["veto"] = {
      {"window_halfwidth_ns", veto.window_halfwidth_ns},
      {"efficiency_photon", veto.efficiency_photon},
      {"efficiency_cosmic", veto.efficiency_cosmic},
      {"accidental_rate_hz", veto.accidental_rate_hz},
  };
  j["capture"] = {
      {"probability_per_interaction", capture.probability_per_interaction},
      {"interactions_per_electron", capture.interactions_per_electron},
  };
  j["transitions"] = {
      {"kalpha_kev", transitions.kalpha_kev},
      {"kbeta_kev", transitions.kbeta_kev},
      {"forbidden_kev", transitions.forbidden_kev},
  };
  j["analysis"] = {
      {"roi_low_kev", analysis.roi.low_kev},
      {"roi_high_kev", analysis.roi.high_kev},
      {"bin_width_kev", analysis.bin_width_kev},
      {"e_min_kev", analysis.e_min_kev},
      {"e_max_kev", analysis.e_max_kev},
      {"confidence_sigma", analysis.confidence_sigma},
      {"acceptance_samples", analysis.acceptance_samples},
      {"acceptance_override", analysis.acceptance_override},
      {"det_eff_override", analysis.det_eff_override},
  };
  return j;
}

}  // namespace pepsim
