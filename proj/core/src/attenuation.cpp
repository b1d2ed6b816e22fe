#include "pepsim/attenuation.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <utility>

namespace pepsim {

Material::Material(std::string name, double density_g_cm3,
                   std::vector<double> energies_kev,
                   std::vector<double> mu_over_rho_cm2_g)
    : name_(std::move(name)),
      density_(density_g_cm3),
      energies_(std::move(energies_kev)),
      mu_(std::move(mu_over_rho_cm2_g)) {
  if (name_.empty()) throw std::invalid_argument("material: empty name");
  if (!(density_ > 0.0)) {
    throw std::invalid_argument("material " + name_ + ": density must be > 0");
  }
  if (energies_.size() < 2 || energies_.size() != mu_.size()) {
    throw std::invalid_argument("material " + name_ +
                                ": need >= 2 (energy, mu/rho) pairs");
  }
  for (std::size_t i = 0; i < energies_.size(); ++i) {
    if (!(mu_[i] > 0.0) || !std::isfinite(mu_[i])) {
      throw std::invalid_argument("material " + name_ +
                                  ": mu/rho values must be finite and > 0");
    }
    if (i > 0 && !(energies_[i] > energies_[i - 1])) {
      throw std::invalid_argument("material " + name_ +
                                  ": energies must be strictly increasing");
    }
  }
  if (energies_.front() > 1.0 || energies_.back() < 100.0) {
    throw std::invalid_argument(
        "material " + name_ + ": table must span at least [1, 100] keV");
  }
  log_e_.reserve(energies_.size());
  log_mu_.reserve(mu_.size());
  for (double e : energies_) log_e_.push_back(std::log(e));
  for (double m : mu_) log_mu_.push_back(std::log(m));
}

double Material::mu_over_rho_cm2_g(double energy_kev) const {
  if (!(energy_kev >= energies_.front()) ||
      !(energy_kev <= energies_.back())) {
    throw std::out_of_range("material " + name_ + ": energy " +
                            std::to_string(energy_kev) +
                            " keV outside table range");
  }
  // upper_bound - 1 gives the left grid point; the top point belongs to
  // the last interval.
  auto it = std::upper_bound(energies_.begin(), energies_.end(), energy_kev);
  std::size_t i = static_cast<std::size_t>(it - energies_.begin());
  if (i == energies_.size()) --i;
  --i;
  const double x = std::log(energy_kev);
  const double t = (x - log_e_[i]) / (log_e_[i + 1] - log_e_[i]);
  return std::exp(log_mu_[i] + t * (log_mu_[i + 1] - log_mu_[i]));
}

double Material::mu_linear_per_cm(double energy_kev) const {
  return mu_over_rho_cm2_g(energy_kev) * density_;
}

Material Material::load(const std::filesystem::path& file, std::string name,
                        double density_g_cm3) {
  std::ifstream in(file);
  if (!in) {
    throw std::runtime_error(file.string() + ": cannot open");
  }
  std::vector<double> energies;
  std::vector<double> mus;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ss(line);
    double e = 0.0;
    double m = 0.0;
    if (!(ss >> e)) continue;  // blank or comment-only line
    if (!(ss >> m)) {
      throw std::runtime_error(file.string() + ":" + std::to_string(lineno) +
                               ": expected two columns (keV, cm^2/g)");
    }
    std::string extra;
    if (ss >> extra) {
      throw std::runtime_error(file.string() + ":" + std::to_string(lineno) +
                               ": trailing junk '" + extra + "'");
    }
    if (!energies.empty() && !(e > energies.back())) {
      throw std::runtime_error(file.string() + ":" + std::to_string(lineno) +
                               ": energies must be strictly increasing");
    }
    energies.push_back(e);
    mus.push_back(m);
  }
  try {
    return Material(std::move(name), density_g_cm3, std::move(energies),
                    std::move(mus));
  } catch (const std::invalid_argument& err) {
    throw std::runtime_error(file.string() + ": " + err.what());
  }
}

double attenuation_fraction(double energy_kev, const Material& material,
                            double path_cm) {
  if (!(path_cm >= 0.0)) {
    throw std::domain_error("attenuation_fraction: path must be >= 0");
  }
  return std::exp(-material.mu_linear_per_cm(energy_kev) * path_cm);
}

double absorbed_fraction(double energy_kev, const Material& material,
                         double path_cm) {
  return 1.0 - attenuation_fraction(energy_kev, material, path_cm);
}

}  // namespace pepsim
