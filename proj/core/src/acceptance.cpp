#include "pepsim/acceptance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <utility>
#include <vector>

#include "pepsim/parallel.hpp"
#include "pepsim/rng.hpp"

namespace pepsim {

namespace {

struct StripFrame {
  Vec3 c, u, v, w;
  double hu, hv, hw;   // half extents [mm]
  double cum_weight;   // cumulative sampling weight in [0, 1]
};

struct CellFrame {
  Vec3 c, n, u, v;
  double hu, hv;
};

struct BlockTally {
  std::uint64_t hits = 0;
  double sum_w = 0.0;
  double sum_w2 = 0.0;
};

constexpr double kParallelEps = 1e-300;

// Chord length of the segment [0, t_hit] of ray p + t*d inside the strip
// box, slab method in the strip frame.
double strip_chord(const StripFrame& s, const Vec3& p, const Vec3& d,
                   double t_hit) {
  const Vec3 rel = p - s.c;
  const double pl[3] = {rel.dot(s.u), rel.dot(s.v), rel.dot(s.w)};
  const double dl[3] = {d.dot(s.u), d.dot(s.v), d.dot(s.w)};
  const double h[3] = {s.hu, s.hv, s.hw};
  double t0 = 0.0;
  double t1 = t_hit;
  for (int ax = 0; ax < 3; ++ax) {
    if (std::abs(dl[ax]) < kParallelEps) {
      if (std::abs(pl[ax]) > h[ax]) return 0.0;  // parallel, outside slab
      continue;
    }
    const double inv = 1.0 / dl[ax];
    double ta = (-h[ax] - pl[ax]) * inv;
    double tb = (+h[ax] - pl[ax]) * inv;
    if (ta > tb) std::swap(ta, tb);
    if (ta > t0) t0 = ta;
    if (tb < t1) t1 = tb;
    if (t0 >= t1) return 0.0;
  }
  return t1 - t0;
}

}  // namespace

static AcceptanceResult run_acceptance(const GeometryLayout& layout,
                                       double energy_kev,
                                       const Material* strip_material,
                                       std::uint64_t n_samples,
                                       std::uint64_t seed) {
  layout.validate();
  if (n_samples == 0) {
    throw std::invalid_argument("acceptance: n_samples must be > 0");
  }

  // mu in 1/mm; 0 disables absorption weighting.
  const double mu_mm =
      strip_material ? strip_material->mu_linear_per_cm(energy_kev) / 10.0
                     : 0.0;

  std::vector<StripFrame> strips;
  strips.reserve(layout.strips.size());
  double total_weight = 0.0;
  const bool by_volume = layout.total_strip_volume_mm3() > 0.0;
  for (const auto& s : layout.strips) {
    StripFrame f;
    f.c = s.center_mm;
    f.u = s.u_axis;
    f.v = s.v_axis;
    f.w = s.w_axis();
    f.hu = s.size_mm.x / 2.0;
    f.hv = s.size_mm.y / 2.0;
    f.hw = s.size_mm.z / 2.0;
    // Emission scales with copper volume; for all-foil layouts fall back
    // to area weights.
    total_weight += by_volume ? s.volume_mm3() : s.size_mm.x * s.size_mm.y;
    f.cum_weight = total_weight;
    strips.push_back(f);
  }
  if (!(total_weight > 0.0)) {
    throw std::invalid_argument("acceptance: strips have zero extent");
  }
  for (auto& f : strips) f.cum_weight /= total_weight;
  strips.back().cum_weight = 1.0;

  std::vector<CellFrame> cells;
  cells.reserve(layout.cells.size());
  for (const auto& c : layout.cells) {
    cells.push_back({c.center_mm, c.normal, c.u_axis, c.v_axis(),
                     c.width_mm / 2.0, c.height_mm / 2.0});
  }

  const std::uint64_t n_blocks =
      (n_samples + kAcceptanceBlock - 1) / kAcceptanceBlock;
  std::vector<BlockTally> tallies(n_blocks);

  parallel_for(n_blocks, [&](std::uint64_t block) {
    RngStream rng = RngStream::derive(seed, stream::kAcceptance, block);
    const std::uint64_t lo = block * kAcceptanceBlock;
    const std::uint64_t hi = std::min(lo + kAcceptanceBlock, n_samples);
    BlockTally t;
    for (std::uint64_t i = lo; i < hi; ++i) {
      // Emission point: strip by weight, uniform in its box.
      const double us = rng.uniform();
      std::size_t si = 0;
      while (si + 1 < strips.size() && us >= strips[si].cum_weight) ++si;
      const StripFrame& s = strips[si];
      const Vec3 p = s.c + s.u * ((rng.uniform() - 0.5) * 2.0 * s.hu) +
                     s.v * ((rng.uniform() - 0.5) * 2.0 * s.hv) +
                     s.w * ((rng.uniform() - 0.5) * 2.0 * s.hw);
      // Isotropic direction.
      const double cz = 2.0 * rng.uniform() - 1.0;
      const double phi = 2.0 * std::numbers::pi * rng.uniform();
      const double st = std::sqrt(std::max(0.0, 1.0 - cz * cz));
      const Vec3 d = {st * std::cos(phi), st * std::sin(phi), cz};

      // First cell crossing along the ray.
      double t_hit = std::numeric_limits<double>::infinity();
      for (const auto& cf : cells) {
        const double denom = d.dot(cf.n);
        if (std::abs(denom) < kParallelEps) continue;
        const double tc = (cf.c - p).dot(cf.n) / denom;
        if (!(tc > 0.0) || tc >= t_hit) continue;
        const Vec3 q = p + d * tc - cf.c;
        if (std::abs(q.dot(cf.u)) <= cf.hu && std::abs(q.dot(cf.v)) <= cf.hv) {
          t_hit = tc;
        }
      }
      if (!std::isfinite(t_hit)) continue;

      ++t.hits;
      double w = 1.0;
      if (mu_mm > 0.0) {
        double path = 0.0;
        for (const auto& sf : strips) path += strip_chord(sf, p, d, t_hit);
        w = std::exp(-mu_mm * path);
      }
      t.sum_w += w;
      t.sum_w2 += w * w;
    }
    tallies[block] = t;
  });

  // Reduce in block order: the float sums are what make the result
  // worker-count invariant.
  std::uint64_t hits = 0;
  double sum_w = 0.0;
  double sum_w2 = 0.0;
  for (const auto& t : tallies) {
    hits += t.hits;
    sum_w += t.sum_w;
    sum_w2 += t.sum_w2;
  }

  const double n = static_cast<double>(n_samples);
  AcceptanceResult r;
  r.energy_kev = energy_kev;
  r.n_samples = n_samples;
  r.seed = seed;
  r.solid_angle_fraction = static_cast<double>(hits) / n;
  r.acceptance = sum_w / n;
  r.solid_angle_se = std::sqrt(std::max(
      r.solid_angle_fraction * (1.0 - r.solid_angle_fraction) / n, 0.0));
  const double var = std::max(sum_w2 / n - r.acceptance * r.acceptance, 0.0);
  r.acceptance_se = std::sqrt(var / n);
  return r;
}

AcceptanceResult geometric_acceptance(const GeometryLayout& layout,
                                      double energy_kev,
                                      const Material& strip_material,
                                      std::uint64_t n_samples,
                                      std::uint64_t seed) {
  return run_acceptance(layout, energy_kev, &strip_material, n_samples, seed);
}

AcceptanceResult solid_angle_fraction(const GeometryLayout& layout,
                                      std::uint64_t n_samples,
                                      std::uint64_t seed) {
  return run_acceptance(layout, 0.0, nullptr, n_samples, seed);
}

}  // namespace pepsim
