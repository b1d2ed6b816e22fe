#include "pepsim/geometry.hpp"

#include <cmath>
#include <set>
#include <stdexcept>

namespace pepsim {

namespace {

// vip2-2016 / vip2-upgrade shared dimensions [mm].
constexpr double kStripLength = 91.0;
constexpr double kStripWidth = 20.0;
constexpr double kStripThickness = 0.018;   // 18 um rolled copper
constexpr double kStripSeparation = 16.0;   // inner face to inner face
constexpr double kStripToCellGap = 6.0;     // strip outer face to cell plane

constexpr double kCellSize2016 = 10.0;      // 1 cm^2 cells
constexpr double kCellPitch2016 = 12.0;
constexpr double kCellSizeUpgrade = 8.0;    // 0.64 cm^2 cells
constexpr double kCellPitchUpgrade = 8.7;
constexpr double kUnitPitchUpgrade = 27.0;  // 3x3 unit center spacing
constexpr double kDepletionUm = 450.0;

constexpr double kAxisTol = 1e-9;

void check_unit(const Vec3& v, const char* what) {
  if (std::abs(v.norm() - 1.0) > kAxisTol) {
    throw std::invalid_argument(std::string("geometry: ") + what +
                                " must be a unit vector");
  }
}

// Separating-axis test for two coplanar rectangles; axes are the four
// in-plane edge directions.
bool coplanar_rects_overlap(const DetectorCell& a, const DetectorCell& b) {
  const Vec3 d = b.center_mm - a.center_mm;
  const Vec3 axes[4] = {a.u_axis, a.v_axis(), b.u_axis, b.v_axis()};
  const double ea[2] = {a.width_mm / 2.0, a.height_mm / 2.0};
  const double eb[2] = {b.width_mm / 2.0, b.height_mm / 2.0};
  const Vec3 au = a.u_axis;
  const Vec3 av = a.v_axis();
  const Vec3 bu = b.u_axis;
  const Vec3 bv = b.v_axis();
  for (const Vec3& ax : axes) {
    const double ra = ea[0] * std::abs(au.dot(ax)) + ea[1] * std::abs(av.dot(ax));
    const double rb = eb[0] * std::abs(bu.dot(ax)) + eb[1] * std::abs(bv.dot(ax));
    if (std::abs(d.dot(ax)) >= ra + rb - 1e-12) return false;
  }
  return true;
}

void add_strips(GeometryLayout& g) {
  const double zs = kStripSeparation / 2.0 + kStripThickness / 2.0;
  for (double sz : {+zs, -zs}) {
    TargetStrip s;
    s.center_mm = {0.0, 0.0, sz};
    s.size_mm = {kStripLength, kStripWidth, kStripThickness};
    g.strips.push_back(s);
  }
}

DetectorCell make_cell(int id, double cx, double cy, double cz, double size,
                       double facing) {
  DetectorCell c;
  c.id = id;
  c.center_mm = {cx, cy, cz};
  c.width_mm = size;
  c.height_mm = size;
  c.depletion_um = kDepletionUm;
  c.normal = {0.0, 0.0, facing};  // faces the strips
  c.u_axis = {1.0, 0.0, 0.0};
  return c;
}

}  // namespace

void GeometryLayout::validate() const {
  if (name.empty()) throw std::invalid_argument("geometry: empty name");
  if (strips.empty()) throw std::invalid_argument("geometry: no strips");
  if (cells.empty()) throw std::invalid_argument("geometry: no cells");

  for (const auto& s : strips) {
    if (!(s.size_mm.x > 0.0) || !(s.size_mm.y > 0.0) || !(s.size_mm.z >= 0.0)) {
      throw std::invalid_argument(
          "geometry: strip extents must be > 0 (thickness >= 0)");
    }
    check_unit(s.u_axis, "strip u_axis");
    check_unit(s.v_axis, "strip v_axis");
    if (std::abs(s.u_axis.dot(s.v_axis)) > kAxisTol) {
      throw std::invalid_argument("geometry: strip axes must be orthogonal");
    }
  }

  std::set<int> ids;
  for (const auto& c : cells) {
    if (!(c.width_mm > 0.0) || !(c.height_mm > 0.0)) {
      throw std::invalid_argument("geometry: cell extents must be > 0");
    }
    if (!(c.depletion_um > 0.0)) {
      throw std::invalid_argument("geometry: cell depletion must be > 0");
    }
    check_unit(c.normal, "cell normal");
    check_unit(c.u_axis, "cell u_axis");
    if (std::abs(c.normal.dot(c.u_axis)) > kAxisTol) {
      throw std::invalid_argument(
          "geometry: cell normal and u_axis must be orthogonal");
    }
    if (!ids.insert(c.id).second) {
      throw std::invalid_argument("geometry: duplicate cell id " +
                                  std::to_string(c.id));
    }
  }

  for (std::size_t i = 0; i < cells.size(); ++i) {
    for (std::size_t j = i + 1; j < cells.size(); ++j) {
      const auto& a = cells[i];
      const auto& b = cells[j];
      if (std::abs(a.normal.cross(b.normal).norm()) > kAxisTol) continue;
      if (std::abs((b.center_mm - a.center_mm).dot(a.normal)) > kAxisTol) {
        continue;
      }
      if (coplanar_rects_overlap(a, b)) {
        throw std::invalid_argument("geometry: cells " + std::to_string(a.id) +
                                    " and " + std::to_string(b.id) +
                                    " overlap");
      }
    }
  }
}

double GeometryLayout::total_cell_area_cm2() const {
  double a = 0.0;
  for (const auto& c : cells) a += c.area_cm2();
  return a;
}

double GeometryLayout::total_strip_volume_mm3() const {
  double v = 0.0;
  for (const auto& s : strips) v += s.volume_mm3();
  return v;
}

GeometryLayout layout_vip2_2016() {
  GeometryLayout g;
  g.name = "vip2-2016";
  add_strips(g);
  const double zc =
      kStripSeparation / 2.0 + kStripThickness + kStripToCellGap;
  int id = 0;
  for (double facing : {-1.0, +1.0}) {
    const double cz = -facing * zc;  // normal points back at the strips
    for (int k = -1; k <= 1; ++k) {
      g.cells.push_back(
          make_cell(id++, k * kCellPitch2016, 0.0, cz, kCellSize2016, facing));
    }
  }
  g.validate();
  return g;
}

GeometryLayout layout_vip2_upgrade() {
  GeometryLayout g;
  g.name = "vip2-upgrade";
  add_strips(g);
  const double zc =
      kStripSeparation / 2.0 + kStripThickness + kStripToCellGap;
  int id = 0;
  for (double facing : {-1.0, +1.0}) {
    const double cz = -facing * zc;
    for (double ux : {-kUnitPitchUpgrade / 2.0, +kUnitPitchUpgrade / 2.0}) {
      for (int i = -1; i <= 1; ++i) {
        for (int j = -1; j <= 1; ++j) {
          g.cells.push_back(make_cell(id++, ux + i * kCellPitchUpgrade,
                                      j * kCellPitchUpgrade, cz,
                                      kCellSizeUpgrade, facing));
        }
      }
    }
  }
  g.validate();
  return g;
}

double rectangle_solid_angle_sr(double a_mm, double b_mm, double dist_mm) {
  if (!(a_mm > 0.0) || !(b_mm > 0.0) || !(dist_mm > 0.0)) {
    throw std::domain_error(
        "rectangle_solid_angle: sides and distance must be > 0");
  }
  const double alpha = a_mm / (2.0 * dist_mm);
  const double beta = b_mm / (2.0 * dist_mm);
  return 4.0 * std::atan(alpha * beta /
                         std::sqrt(1.0 + alpha * alpha + beta * beta));
}

GeometryLayout layout_preset(std::string_view name) {
  if (name == "vip2-2016") return layout_vip2_2016();
  if (name == "vip2-upgrade") return layout_vip2_upgrade();
  throw std::invalid_argument("unknown geometry preset '" + std::string(name) +
                              "' (known: vip2-2016, vip2-upgrade)");
}

namespace {

nlohmann::json vec_to_json(const Vec3& v) {
  return nlohmann::json::array({v.x, v.y, v.z});
}

Vec3 vec_from_json(const nlohmann::json& j, const char* what) {
  if (!j.is_array() || j.size() != 3) {
    throw std::invalid_argument(std::string("geometry: ") + what +
                                " must be an array of 3 numbers");
  }
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

}  // namespace

void to_json(nlohmann::json& j, const GeometryLayout& layout) {
  j = nlohmann::json::object();
  j["name"] = layout.name;
  auto strips = nlohmann::json::array();
  for (const auto& s : layout.strips) {
    strips.push_back({{"center_mm", vec_to_json(s.center_mm)},
                      {"size_mm", vec_to_json(s.size_mm)},
                      {"u_axis", vec_to_json(s.u_axis)},
                      {"v_axis", vec_to_json(s.v_axis)}});
  }
  j["strips"] = std::move(strips);
  auto cells = nlohmann::json::array();
  for (const auto& c : layout.cells) {
    cells.push_back({{"id", c.id},
                     {"center_mm", vec_to_json(c.center_mm)},
                     {"width_mm", c.width_mm},
                     {"height_mm", c.height_mm},
                     {"depletion_um", c.depletion_um},
                     {"normal", vec_to_json(c.normal)},
                     {"u_axis", vec_to_json(c.u_axis)}});
  }
  j["cells"] = std::move(cells);
}

void from_json(const nlohmann::json& j, GeometryLayout& layout) {
  layout = GeometryLayout{};
  layout.name = j.at("name").get<std::string>();
  for (const auto& js : j.at("strips")) {
    TargetStrip s;
    s.center_mm = vec_from_json(js.at("center_mm"), "strip center_mm");
    s.size_mm = vec_from_json(js.at("size_mm"), "strip size_mm");
    if (js.contains("u_axis")) s.u_axis = vec_from_json(js.at("u_axis"), "strip u_axis");
    if (js.contains("v_axis")) s.v_axis = vec_from_json(js.at("v_axis"), "strip v_axis");
    layout.strips.push_back(s);
  }
  for (const auto& jc : j.at("cells")) {
    DetectorCell c;
    c.id = jc.at("id").get<int>();
    c.center_mm = vec_from_json(jc.at("center_mm"), "cell center_mm");
    c.width_mm = jc.at("width_mm").get<double>();
    c.height_mm = jc.at("height_mm").get<double>();
    c.depletion_um = jc.at("depletion_um").get<double>();
    c.normal = vec_from_json(jc.at("normal"), "cell normal");
    if (jc.contains("u_axis")) c.u_axis = vec_from_json(jc.at("u_axis"), "cell u_axis");
    layout.cells.push_back(c);
  }
  layout.validate();
}

}  // namespace pepsim
