#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace pepsim {

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
  Vec3 cross(const Vec3& o) const {
    return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
  }
  double norm() const { return std::sqrt(dot(*this)); }
};

// One SDD rectangle: a sensitive plane patch with its depletion depth.
// v_axis is implied: v = normal x u_axis (all three unit, orthogonal).
struct DetectorCell {
  int id = 0;
  Vec3 center_mm;
  double width_mm = 0.0;    // extent along u_axis
  double height_mm = 0.0;   // extent along v_axis
  double depletion_um = 0.0;
  Vec3 normal{0, 0, 1};
  Vec3 u_axis{1, 0, 0};

  Vec3 v_axis() const { return normal.cross(u_axis); }
  double area_cm2() const { return width_mm * height_mm / 100.0; }
};

// Copper conductor bar carrying the test current. X-rays are emitted
// uniformly in its volume; thickness 0 degenerates to a foil (surface
// emission, no self-absorption), which is allowed.
struct TargetStrip {
  Vec3 center_mm;
  Vec3 size_mm;             // full extents along (u, v, w)
  Vec3 u_axis{1, 0, 0};
  Vec3 v_axis{0, 1, 0};

  Vec3 w_axis() const { return u_axis.cross(v_axis); }
  double volume_mm3() const { return size_mm.x * size_mm.y * size_mm.z; }
};

// Full emitter + detector arrangement.
//
// validate() throws std::invalid_argument on: empty name, no strips or
// cells, non-positive cell extents or depletion, non-positive strip
// length/width (thickness may be 0), non-unit or non-orthogonal axes,
// duplicate cell ids, or overlapping coplanar cells. Cells on different
// planes are not checked against each other.
struct GeometryLayout {
  std::string name;
  std::vector<TargetStrip> strips;
  std::vector<DetectorCell> cells;

  void validate() const;
  double total_cell_area_cm2() const;
  double total_strip_volume_mm3() const;
};

// Built-in layouts. "vip2-2016": two 91 x 20 mm copper strips, six
// 10 x 10 mm cells in a row of three per side. "vip2-upgrade": same
// strips, four 3 x 3 units of 8 x 8 mm cells (36 cells, 23 cm^2).
// Throws std::invalid_argument for an unknown name.
GeometryLayout layout_vip2_2016();
GeometryLayout layout_vip2_upgrade();
GeometryLayout layout_preset(std::string_view name);

// Solid angle [sr] of an a x b rectangle seen from a point on its central
// axis at distance d: Omega = 4 atan(alpha*beta / sqrt(1+alpha^2+beta^2)),
// alpha = a/2d, beta = b/2d. Closed form used to cross-check the Monte
// Carlo. Throws std::domain_error unless a, b, d > 0.
double rectangle_solid_angle_sr(double a_mm, double b_mm, double dist_mm);

// JSON round trip; to_json(from_json(j)) reproduces every double bit for
// bit. from_json validates the result before returning it.
void to_json(nlohmann::json& j, const GeometryLayout& layout);
void from_json(const nlohmann::json& j, GeometryLayout& layout);

}  // namespace pepsim
