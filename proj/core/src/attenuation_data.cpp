// Built-in mass attenuation grids (NIST XCOM / Hubbell-Seltzer, total
// attenuation with coherent scattering, cm^2/g). Same numbers as
// core/data/{cu,si}_attenuation.txt; compiled in so the library works
// without a data directory. Edge rows are split by 0.1 eV to keep the
// grid strictly increasing.

#include "pepsim/attenuation.hpp"
#include "pepsim/constants.hpp"

namespace pepsim {

const Material& Material::copper() {
  static const Material cu(
      "copper", constants::kCopperDensityGCm3,
      {1.0, 1.0961, 1.0962, 1.5, 2.0, 3.0, 4.0, 5.0, 6.0, 8.0, 8.9789,
       8.9790, 10.0, 15.0, 20.0, 30.0, 40.0, 50.0, 60.0, 80.0, 100.0},
      {1.057e4, 8.242e3, 9.347e3, 4.418e3, 2.154e3, 7.488e2, 3.473e2,
       1.899e2, 1.156e2, 5.255e1, 3.829e1, 2.784e2, 2.160e2, 7.405e1,
       3.379e1, 1.092e1, 4.862e0, 2.613e0, 1.593e0, 7.630e-1, 4.584e-1});
  return cu;
}

const Material& Material::silicon() {
  static const Material si(
      "silicon", constants::kSiliconDensityGCm3,
      {1.0, 1.5, 1.8389, 1.8390, 2.0, 3.0, 4.0, 5.0, 6.0, 8.0, 10.0, 15.0,
       20.0, 30.0, 40.0, 50.0, 60.0, 80.0, 100.0},
      {1.570e3, 5.355e2, 3.092e2, 3.192e3, 2.777e3, 9.784e2, 4.529e2,
       2.450e2, 1.470e2, 6.468e1, 3.389e1, 1.034e1, 4.464e0, 1.436e0,
       7.012e-1, 4.385e-1, 3.207e-1, 2.228e-1, 1.835e-1});
  return si;
}

}  // namespace pepsim
