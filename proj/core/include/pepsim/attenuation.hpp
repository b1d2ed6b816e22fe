#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace pepsim {

// X-ray mass attenuation table for one material.
//
// Tables are (energy [keV], mu/rho [cm^2/g]) grids from the NIST XCOM /
// Hubbell-Seltzer compilation; lookups interpolate log-log, which is the
// convention those tables are built for (photoelectric cross sections are
// near power laws between edges). Absorption edges appear as two grid
// points 0.1 eV apart so the grid stays strictly increasing.
class Material {
 public:
  // Throws std::invalid_argument unless: name nonempty, density > 0, at
  // least two grid points, energies strictly increasing and spanning at
  // least [1, 100] keV, all coefficients > 0.
  Material(std::string name, double density_g_cm3,
           std::vector<double> energies_kev,
           std::vector<double> mu_over_rho_cm2_g);

  // Built-in grids, 1 keV to 100 keV.
  static const Material& copper();
  static const Material& silicon();

  // Two-column text file: energy_keV mu_over_rho_cm2_per_g, '#' comments
  // and blank lines ignored. Throws std::runtime_error with a
  // "<file>:<line>:" prefix on malformed input.
  static Material load(const std::filesystem::path& file, std::string name,
                       double density_g_cm3);

  const std::string& name() const { return name_; }
  double density_g_cm3() const { return density_; }
  double min_energy_kev() const { return energies_.front(); }
  double max_energy_kev() const { return energies_.back(); }

  // Mass attenuation coefficient [cm^2/g], log-log interpolated. Throws
  // std::out_of_range outside the table.
  double mu_over_rho_cm2_g(double energy_kev) const;

  // Linear attenuation coefficient [1/cm] = (mu/rho) * rho.
  double mu_linear_per_cm(double energy_kev) const;

 private:
  std::string name_;
  double density_;
  std::vector<double> energies_;
  std::vector<double> mu_;
  std::vector<double> log_e_;
  std::vector<double> log_mu_;
};

// Fraction of a photon beam surviving path_cm of material
// (Beer-Lambert): exp(-mu * x). Multiplicative in path:
// f(a + b) = f(a) * f(b). Throws std::domain_error for path_cm < 0;
// returns 1 for path_cm == 0.
double attenuation_fraction(double energy_kev, const Material& material,
                            double path_cm);

// Absorbed complement 1 - exp(-mu * x); what a detector of that
// thickness stops.
double absorbed_fraction(double energy_kev, const Material& material,
                         double path_cm);

}  // namespace pepsim
