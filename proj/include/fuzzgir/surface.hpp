// Copyright 2026 The fuzzgir Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Possibility surfaces over geographic space: parametric evaluation, alpha-cut
// bounding boxes, gridded fusion across sources and defuzzification to a
// crisp point plus a rectilinear footprint.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <queue>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fuzzgir/error.hpp"
#include "fuzzgir/fuzzy.hpp"
#include "fuzzgir/geo.hpp"
#include "fuzzgir/relation.hpp"

namespace fuzzgir {

using geo::BBox;
using geo::LonLat;

// Angular membership around a preferred bearing: 1 within +-core_half_deg,
// falling linearly to 0 at +-support_half_deg.
struct DirectionalSet {
  double bearing_deg = 0.0;
  double core_half_deg = 30.0;
  double support_half_deg = 60.0;

  double membership(double bearing) const {
    const double dev = geo::angular_difference_deg(bearing, bearing_deg);
    return fuzzy::FuzzySet1D(fuzzy::Trapezoid{-support_half_deg, -core_half_deg, core_half_deg,
                                              support_half_deg})
        .membership(dev);
  }
};

struct PossibilitySurface {
  geo::Footprint anchor;
  fuzzy::FuzzySet1D distance_set;  // km from the anchor boundary
  std::optional<fuzzy::Hedge> hedge;
  std::optional<DirectionalSet> direction;
  fuzzy::TNorm combiner = fuzzy::TNorm::Min;
};

// pi(p) = tnorm(mu_dist(d), mu_dir(bearing)). Inside the footprint d == 0 and
// the direction term is taken as 1 (bearing from the anchor is undefined there).
inline double possibility_at(const PossibilitySurface& s, LonLat p) {
  const double d = s.anchor.distance_km(p);
  const double mu_d = fuzzy::apply_hedge(s.distance_set.membership(d), s.hedge);
  if (!s.direction || d == 0.0) return mu_d;
  const double mu_theta = s.direction->membership(geo::bearing_deg(s.anchor.center, p));
  return fuzzy::tnorm(s.combiner, mu_d, mu_theta);
}

namespace detail {

inline BBox cut_bbox_at_level(const PossibilitySurface& s, double level) {
  const auto reach = s.distance_set.upper_cut(level);
  if (!reach) return BBox::world();
  return geo::buffer_bbox(s.anchor.bbox(), *reach);
}

}  // namespace detail

// Axis-aligned box containing {p : pi(p) >= alpha}. The direction term can only
// lower pi, so the distance set alone bounds the cut. Unbounded cuts (ramp-up
// distance sets) return the whole world.
inline BBox alpha_cut_bbox(const PossibilitySurface& s, double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw RangeError("alpha must lie in (0, 1]");
  return detail::cut_bbox_at_level(s, fuzzy::unhedge_level(alpha, s.hedge));
}

// Box containing every point with pi > 0.
inline BBox support_bbox(const PossibilitySurface& s) { return detail::cut_bbox_at_level(s, 0.0); }

// Centroid of the surface's core. Symmetric surfaces (no direction term) peak
// around the anchor centre; directional surfaces use the centroid of the core
// sector, 2 R sin(w) / (3 w) along the preferred bearing.
inline LonLat representative_point(const PossibilitySurface& s) {
  if (!s.direction) return s.anchor.center;
  const double core = s.distance_set.core_end().value_or(0.0);
  const double radius = s.anchor.extent_radius_km() + core;
  const double w = geo::to_rad(s.direction->core_half_deg);
  const double offset = w > 0.0 ? 2.0 * radius * std::sin(w) / (3.0 * w) : 2.0 * radius / 3.0;
  return geo::destination(s.anchor.center, s.direction->bearing_deg, offset);
}

// Linguistic term parameters (km from the anchor boundary).
struct TermParams {
  fuzzy::FuzzySet1D at = fuzzy::Trapezoid{0, 0, 0, 0.5};
  fuzzy::FuzzySet1D near = fuzzy::Trapezoid{0, 0, 2, 5};
  fuzzy::FuzzySet1D walking = fuzzy::Trapezoid{0, 0, 1.5, 3};
  fuzzy::FuzzySet1D far = fuzzy::RampUp{10, 25};
  fuzzy::FuzzySet1D cardinal_envelope = fuzzy::Trapezoid{0, 0, 10, 50};
  double cardinal_core_deg = 30.0;
  double cardinal_support_deg = 60.0;
  fuzzy::TNorm cardinal_tnorm = fuzzy::TNorm::Product;
};

// Surface for an expression anchored on `anchor`. A missing relation means an
// absolute mention, modelled with the At term.
inline PossibilitySurface surface_for(const std::optional<RelationTerm>& relation,
                                      std::optional<fuzzy::Hedge> hedge, const geo::Footprint& anchor,
                                      const TermParams& params) {
  PossibilitySurface s;
  s.anchor = anchor;
  s.hedge = hedge;
  const auto kind = relation ? relation->kind : RelationKind::At;
  switch (kind) {
    case RelationKind::At: s.distance_set = params.at; break;
    case RelationKind::Near: s.distance_set = params.near; break;
    case RelationKind::WithinWalkingDistance: s.distance_set = params.walking; break;
    case RelationKind::Far: s.distance_set = params.far; break;
    case RelationKind::CardinalOf:
      s.distance_set = params.cardinal_envelope;
      s.direction = DirectionalSet{direction_bearing(relation->direction), params.cardinal_core_deg,
                                   params.cardinal_support_deg};
      s.combiner = params.cardinal_tnorm;
      break;
  }
  return s;
}

struct GridOptions {
  double cell_deg = 0.01;
  int max_cells_per_axis = 512;
  double clip_alpha = 0.05;
};

// Regular lon/lat raster. Cell (ix, iy) spans
// [lon0 + ix*edge, lon0 + (ix+1)*edge) x [lat0 + iy*edge, lat0 + (iy+1)*edge).
struct Grid {
  double lon0 = 0.0;
  double lat0 = 0.0;
  double edge = 0.01;
  int nx = 0;
  int ny = 0;
  std::vector<double> pi;

  std::size_t index(int ix, int iy) const { return static_cast<std::size_t>(iy) * nx + ix; }
  double at(int ix, int iy) const { return pi[index(ix, iy)]; }
  double& at(int ix, int iy) { return pi[index(ix, iy)]; }
  std::size_t size() const { return pi.size(); }

  LonLat cell_center(int ix, int iy) const {
    return {lon0 + (ix + 0.5) * edge, lat0 + (iy + 0.5) * edge};
  }
  BBox cell_bbox(int ix, int iy) const {
    return {lon0 + ix * edge, lat0 + iy * edge, lon0 + (ix + 1) * edge, lat0 + (iy + 1) * edge};
  }
  BBox extent() const { return {lon0, lat0, lon0 + nx * edge, lat0 + ny * edge}; }
};

// Aligned grid covering `box`, coarsened uniformly until both axes fit the cap.
inline Grid make_grid(const BBox& box, const GridOptions& opts = {}) {
  Grid g;
  double edge = opts.cell_deg;
  for (int attempt = 0; attempt < 64; ++attempt) {
    g.edge = edge;
    g.lon0 = std::floor(box.min_lon / edge) * edge;
    g.lat0 = std::floor(box.min_lat / edge) * edge;
    g.nx = static_cast<int>(std::floor((box.max_lon - g.lon0) / edge)) + 1;
    g.ny = static_cast<int>(std::floor((box.max_lat - g.lat0) / edge)) + 1;
    const int worst = std::max(g.nx, g.ny);
    if (worst <= opts.max_cells_per_axis) break;
    edge *= std::ceil(static_cast<double>(worst) / opts.max_cells_per_axis);
  }
  g.pi.assign(static_cast<std::size_t>(g.nx) * g.ny, 0.0);
  return g;
}

inline Grid rasterize(const PossibilitySurface& s, Grid grid) {
  for (int iy = 0; iy < grid.ny; ++iy)
    for (int ix = 0; ix < grid.nx; ++ix) grid.at(ix, iy) = possibility_at(s, grid.cell_center(ix, iy));
  return grid;
}

struct FusionMode {
  enum class Kind { Min, Max, WeightedAverage };
  Kind kind = Kind::WeightedAverage;
  std::vector<double> weights;  // WeightedAverage only; empty means equal weights

  static FusionMode min() { return {Kind::Min, {}}; }
  static FusionMode max() { return {Kind::Max, {}}; }
  static FusionMode weighted(std::vector<double> w = {}) { return {Kind::WeightedAverage, std::move(w)}; }
};

inline std::string_view fusion_name(FusionMode::Kind k) {
  switch (k) {
    case FusionMode::Kind::Min: return "min";
    case FusionMode::Kind::Max: return "max";
    case FusionMode::Kind::WeightedAverage: return "avg";
  }
  return "?";
}

inline FusionMode::Kind parse_fusion(std::string_view s) {
  if (s == "min") return FusionMode::Kind::Min;
  if (s == "max") return FusionMode::Kind::Max;
  if (s == "avg" || s == "weighted_average") return FusionMode::Kind::WeightedAverage;
  throw FormatError("unknown fusion mode '" + std::string(s) + "'");
}

// Grid covering the union of the inputs' clip-alpha cuts.
inline Grid fusion_grid(std::span<const PossibilitySurface> surfaces, const GridOptions& opts = {}) {
  if (surfaces.empty()) throw RangeError("fusion needs at least one surface");
  BBox box = alpha_cut_bbox(surfaces.front(), opts.clip_alpha);
  for (const auto& s : surfaces.subspan(1)) box = box.united(alpha_cut_bbox(s, opts.clip_alpha));
  return make_grid(box, opts);
}

// Combines the inputs cell by cell on `grid` (values in the grid are ignored).
inline Grid fuse_on(std::span<const PossibilitySurface> surfaces, const FusionMode& mode, Grid grid) {
  if (surfaces.empty()) throw RangeError("fusion needs at least one surface");
  std::vector<double> w;
  if (mode.kind == FusionMode::Kind::WeightedAverage) {
    w = mode.weights.empty() ? std::vector<double>(surfaces.size(), 1.0) : mode.weights;
    if (w.size() != surfaces.size()) throw RangeError("one weight per surface is required");
    double total = 0.0;
    for (double x : w) {
      if (!(x >= 0.0) || !std::isfinite(x)) throw RangeError("fusion weights must be non-negative");
      total += x;
    }
    if (!(total > 0.0)) throw RangeError("fusion weights must not sum to zero");
    for (double& x : w) x /= total;
  }

  std::vector<double> vals(surfaces.size());
  for (int iy = 0; iy < grid.ny; ++iy) {
    for (int ix = 0; ix < grid.nx; ++ix) {
      const LonLat c = grid.cell_center(ix, iy);
      for (std::size_t k = 0; k < surfaces.size(); ++k) vals[k] = possibility_at(surfaces[k], c);
      const auto [lo, hi] = std::minmax_element(vals.begin(), vals.end());
      double v = 0.0;
      switch (mode.kind) {
        case FusionMode::Kind::Min: v = *lo; break;
        case FusionMode::Kind::Max: v = *hi; break;
        case FusionMode::Kind::WeightedAverage: {
          for (std::size_t k = 0; k < vals.size(); ++k) v += w[k] * vals[k];
          v = std::clamp(v, *lo, *hi);
          break;
        }
      }
      grid.at(ix, iy) = v;
    }
  }
  return grid;
}

inline Grid fuse(std::span<const PossibilitySurface> surfaces, const FusionMode& mode,
                 const GridOptions& opts = {}) {
  return fuse_on(surfaces, mode, fusion_grid(surfaces, opts));
}

struct Defuzzified {
  LonLat point;
  geo::Ring footprint;  // closed, counter-clockwise
  double max_pi = 0.0;
  double footprint_alpha = 0.5;
};

namespace detail {

struct Vertex {
  int x, y;
  auto operator<=>(const Vertex&) const = default;
};

// Outer boundary of a 4-connected cell set, traced counter-clockwise with the
// cells on the left. At pinch vertices the left-most turn is taken, which keeps
// diagonally touching cells on separate loops.
inline std::vector<Vertex> outer_boundary(const Grid& g, const std::vector<char>& in) {
  auto inside = [&](int ix, int iy) {
    return ix >= 0 && iy >= 0 && ix < g.nx && iy < g.ny && in[g.index(ix, iy)];
  };
  std::multimap<Vertex, Vertex> edges;
  for (int iy = 0; iy < g.ny; ++iy) {
    for (int ix = 0; ix < g.nx; ++ix) {
      if (!inside(ix, iy)) continue;
      if (!inside(ix, iy - 1)) edges.insert({{ix, iy}, {ix + 1, iy}});
      if (!inside(ix + 1, iy)) edges.insert({{ix + 1, iy}, {ix + 1, iy + 1}});
      if (!inside(ix, iy + 1)) edges.insert({{ix + 1, iy + 1}, {ix, iy + 1}});
      if (!inside(ix - 1, iy)) edges.insert({{ix, iy + 1}, {ix, iy}});
    }
  }

  auto turn_rank = [](Vertex a, Vertex b, Vertex c) {
    const int dx1 = b.x - a.x, dy1 = b.y - a.y, dx2 = c.x - b.x, dy2 = c.y - b.y;
    const int cross = dx1 * dy2 - dy1 * dx2;
    if (cross > 0) return 0;                       // left
    if (cross == 0 && dx1 * dx2 + dy1 * dy2 > 0) return 1;  // straight
    return 2;                                      // right
  };

  std::vector<Vertex> best;
  double best_area = -1.0;
  while (!edges.empty()) {
    auto it = edges.begin();
    std::vector<Vertex> loop{it->first};
    Vertex prev = it->first;
    Vertex cur = it->second;
    edges.erase(it);
    while (!(cur == loop.front())) {
      loop.push_back(cur);
      auto [lo, hi] = edges.equal_range(cur);
      if (lo == hi) break;
      auto pick = lo;
      for (auto e = lo; e != hi; ++e)
        if (turn_rank(prev, cur, e->second) < turn_rank(prev, cur, pick->second)) pick = e;
      prev = cur;
      cur = pick->second;
      edges.erase(pick);
    }
    double area = 0.0;
    for (std::size_t i = 0; i < loop.size(); ++i) {
      const auto& a = loop[i];
      const auto& b = loop[(i + 1) % loop.size()];
      area += static_cast<double>(a.x) * b.y - static_cast<double>(b.x) * a.y;
    }
    if (area > best_area) {
      best_area = area;
      best = std::move(loop);
    }
  }

  // Drop collinear vertices.
  std::vector<Vertex> out;
  for (std::size_t i = 0; i < best.size(); ++i) {
    const auto& a = best[(i + best.size() - 1) % best.size()];
    const auto& b = best[i];
    const auto& c = best[(i + 1) % best.size()];
    if ((b.x - a.x) * (c.y - b.y) - (b.y - a.y) * (c.x - b.x) != 0) out.push_back(b);
  }
  return out;
}

}  // namespace detail

// Point: centroid of the cells attaining the maximum. Footprint: outer boundary
// of the 4-connected component of the 0.5-cut that lies closest to that point
// (the cut drops to the maximum when the peak is below 0.5).
inline Defuzzified defuzzify(const Grid& g) {
  if (g.pi.empty()) throw NoLocationError("empty grid");
  const double max_pi = *std::max_element(g.pi.begin(), g.pi.end());
  if (!(max_pi > 0.0)) throw NoLocationError("possibility is zero everywhere");

  constexpr double kTieTolerance = 1e-12;
  double sx = 0.0, sy = 0.0;
  std::size_t n = 0;
  for (int iy = 0; iy < g.ny; ++iy)
    for (int ix = 0; ix < g.nx; ++ix)
      if (g.at(ix, iy) >= max_pi - kTieTolerance) {
        const auto c = g.cell_center(ix, iy);
        sx += c.lon;
        sy += c.lat;
        ++n;
      }
  Defuzzified out;
  out.max_pi = max_pi;
  out.point = {sx / static_cast<double>(n), sy / static_cast<double>(n)};
  out.footprint_alpha = std::min(0.5, max_pi);

  std::vector<char> cut(g.size(), 0);
  for (std::size_t i = 0; i < g.size(); ++i) cut[i] = g.pi[i] >= out.footprint_alpha - kTieTolerance;

  int seed = -1;
  double seed_d = std::numeric_limits<double>::infinity();
  for (int iy = 0; iy < g.ny; ++iy)
    for (int ix = 0; ix < g.nx; ++ix) {
      if (!cut[g.index(ix, iy)]) continue;
      const auto c = g.cell_center(ix, iy);
      const double d = std::hypot(c.lon - out.point.lon, c.lat - out.point.lat);
      if (d < seed_d) {
        seed_d = d;
        seed = static_cast<int>(g.index(ix, iy));
      }
    }

  std::vector<char> comp(g.size(), 0);
  std::queue<int> q;
  q.push(seed);
  comp[seed] = 1;
  while (!q.empty()) {
    const int i = q.front();
    q.pop();
    const int ix = i % g.nx, iy = i / g.nx;
    const int nb[4][2] = {{ix - 1, iy}, {ix + 1, iy}, {ix, iy - 1}, {ix, iy + 1}};
    for (const auto& p : nb) {
      if (p[0] < 0 || p[1] < 0 || p[0] >= g.nx || p[1] >= g.ny) continue;
      const auto j = g.index(p[0], p[1]);
      if (cut[j] && !comp[j]) {
        comp[j] = 1;
        q.push(static_cast<int>(j));
      }
    }
  }

  for (const auto& v : detail::outer_boundary(g, comp))
    out.footprint.push_back({g.lon0 + v.x * g.edge, g.lat0 + v.y * g.edge});
  if (!out.footprint.empty()) out.footprint.push_back(out.footprint.front());
  return out;
}

struct CertaintyRegion {
  std::size_t cells = 0;
  std::optional<BBox> bbox;
};

// Most-certain cells have pi >= high; least-certain cells have 0 < pi < low.
struct CertaintyReport {
  double high = 0.8;
  double low = 0.3;
  CertaintyRegion most_certain;
  CertaintyRegion least_certain;
};

inline CertaintyReport certainty_report(const Grid& g, double high = 0.8, double low = 0.3) {
  CertaintyReport r{high, low, {}, {}};
  auto add = [&](CertaintyRegion& reg, const BBox& cell) {
    ++reg.cells;
    reg.bbox = reg.bbox ? reg.bbox->united(cell) : cell;
  };
  for (int iy = 0; iy < g.ny; ++iy)
    for (int ix = 0; ix < g.nx; ++ix) {
      const double v = g.at(ix, iy);
      if (v >= high) add(r.most_certain, g.cell_bbox(ix, iy));
      else if (v > 0.0 && v < low) add(r.least_certain, g.cell_bbox(ix, iy));
    }
  return r;
}

}  // namespace fuzzgir
