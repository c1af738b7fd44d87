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

// Spherical geometry helpers. Coordinates are always (lon, lat) in degrees.

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <span>
#include <vector>

namespace fuzzgir::geo {

inline constexpr double kEarthRadiusKm = 6371.0088;
inline constexpr double kKmPerDegree = kEarthRadiusKm * std::numbers::pi / 180.0;

inline constexpr double to_rad(double deg) { return deg * std::numbers::pi / 180.0; }
inline constexpr double to_deg(double rad) { return rad * 180.0 / std::numbers::pi; }

struct LonLat {
  double lon = 0.0;
  double lat = 0.0;

  friend bool operator==(const LonLat&, const LonLat&) = default;
};

inline bool in_range(LonLat p) {
  return std::isfinite(p.lon) && std::isfinite(p.lat) && p.lon >= -180.0 && p.lon <= 180.0 &&
         p.lat >= -90.0 && p.lat <= 90.0;
}

struct BBox {
  double min_lon = 0.0;
  double min_lat = 0.0;
  double max_lon = 0.0;
  double max_lat = 0.0;

  static BBox world() { return {-180.0, -90.0, 180.0, 90.0}; }
  static BBox of_point(LonLat p) { return {p.lon, p.lat, p.lon, p.lat}; }

  bool contains(LonLat p) const {
    return p.lon >= min_lon && p.lon <= max_lon && p.lat >= min_lat && p.lat <= max_lat;
  }
  bool contains(const BBox& o) const {
    return o.min_lon >= min_lon && o.max_lon <= max_lon && o.min_lat >= min_lat &&
           o.max_lat <= max_lat;
  }
  bool intersects(const BBox& o) const {
    return !(o.min_lon > max_lon || o.max_lon < min_lon || o.min_lat > max_lat ||
             o.max_lat < min_lat);
  }
  BBox united(const BBox& o) const {
    return {std::min(min_lon, o.min_lon), std::min(min_lat, o.min_lat),
            std::max(max_lon, o.max_lon), std::max(max_lat, o.max_lat)};
  }
  LonLat center() const { return {(min_lon + max_lon) / 2.0, (min_lat + max_lat) / 2.0}; }

  friend bool operator==(const BBox&, const BBox&) = default;
};

inline double haversine_km(LonLat a, LonLat b) {
  const double dlat = to_rad(b.lat - a.lat);
  const double dlon = to_rad(b.lon - a.lon);
  const double s = std::sin(dlat / 2.0);
  const double t = std::sin(dlon / 2.0);
  const double h = s * s + std::cos(to_rad(a.lat)) * std::cos(to_rad(b.lat)) * t * t;
  return 2.0 * kEarthRadiusKm * std::asin(std::min(1.0, std::sqrt(h)));
}

// Initial great-circle bearing from `from` to `to`, clockwise from north, in [0, 360).
inline double bearing_deg(LonLat from, LonLat to) {
  const double phi1 = to_rad(from.lat);
  const double phi2 = to_rad(to.lat);
  const double dlon = to_rad(to.lon - from.lon);
  const double y = std::sin(dlon) * std::cos(phi2);
  const double x = std::cos(phi1) * std::sin(phi2) - std::sin(phi1) * std::cos(phi2) * std::cos(dlon);
  double b = to_deg(std::atan2(y, x));
  if (b < 0.0) b += 360.0;
  if (b >= 360.0) b -= 360.0;
  return b;
}

// Smallest absolute difference between two bearings, in [0, 180].
inline double angular_difference_deg(double a, double b) {
  double d = std::fmod(std::fabs(a - b), 360.0);
  return d > 180.0 ? 360.0 - d : d;
}

inline LonLat destination(LonLat from, double bearing, double km) {
  const double delta = km / kEarthRadiusKm;
  const double theta = to_rad(bearing);
  const double phi1 = to_rad(from.lat);
  const double lambda1 = to_rad(from.lon);
  const double phi2 = std::asin(std::sin(phi1) * std::cos(delta) +
                                std::cos(phi1) * std::sin(delta) * std::cos(theta));
  const double lambda2 =
      lambda1 + std::atan2(std::sin(theta) * std::sin(delta) * std::cos(phi1),
                           std::cos(delta) - std::sin(phi1) * std::sin(phi2));
  double lon = to_deg(lambda2);
  lon = std::fmod(lon + 540.0, 360.0) - 180.0;
  return {lon, to_deg(phi2)};
}

// Smallest lon/lat box containing every point within `km` of `box`.
// Longitude growth is taken at the box latitude farthest from the equator, where
// a spherical cap is widest in degrees; boxes that would cross the antimeridian
// or reach a pole widen to the full longitude range.
inline BBox buffer_bbox(const BBox& box, double km) {
  if (km <= 0.0) return box;
  const double dlat = km / kKmPerDegree;
  BBox out = box;
  out.min_lat = std::max(-90.0, box.min_lat - dlat);
  out.max_lat = std::min(90.0, box.max_lat + dlat);
  const double phi = to_rad(std::max(std::fabs(box.min_lat), std::fabs(box.max_lat)));
  const double delta = km / kEarthRadiusKm;
  const double ratio = std::sin(delta) / std::cos(phi);
  if (delta >= std::numbers::pi / 2.0 - phi || ratio >= 1.0) {
    out.min_lon = -180.0;
    out.max_lon = 180.0;
    return out;
  }
  const double dlon = to_deg(std::asin(ratio));
  out.min_lon = box.min_lon - dlon;
  out.max_lon = box.max_lon + dlon;
  if (out.min_lon < -180.0 || out.max_lon > 180.0) {
    out.min_lon = -180.0;
    out.max_lon = 180.0;
  }
  return out;
}

using Ring = std::vector<LonLat>;

inline BBox ring_bbox(std::span<const LonLat> ring) {
  BBox b{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(),
         -std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  for (const auto& p : ring) b = b.united(BBox::of_point(p));
  return b;
}

// Planar shoelace area in square degrees; positive for counter-clockwise rings.
inline double signed_area(std::span<const LonLat> ring) {
  double a = 0.0;
  for (std::size_t i = 0; i + 1 < ring.size(); ++i)
    a += ring[i].lon * ring[i + 1].lat - ring[i + 1].lon * ring[i].lat;
  return a / 2.0;
}

// Area centroid of a closed ring in lon/lat space. Degenerate rings fall back
// to the vertex mean.
inline LonLat ring_centroid(std::span<const LonLat> ring) {
  const double a = signed_area(ring);
  if (std::fabs(a) < 1e-15) {
    LonLat m{};
    const std::size_t n = ring.size() > 1 ? ring.size() - 1 : ring.size();
    for (std::size_t i = 0; i < n; ++i) {
      m.lon += ring[i].lon;
      m.lat += ring[i].lat;
    }
    return {m.lon / static_cast<double>(n), m.lat / static_cast<double>(n)};
  }
  double cx = 0.0;
  double cy = 0.0;
  for (std::size_t i = 0; i + 1 < ring.size(); ++i) {
    const double cross = ring[i].lon * ring[i + 1].lat - ring[i + 1].lon * ring[i].lat;
    cx += (ring[i].lon + ring[i + 1].lon) * cross;
    cy += (ring[i].lat + ring[i + 1].lat) * cross;
  }
  return {cx / (6.0 * a), cy / (6.0 * a)};
}

// Even-odd ray casting; boundary points count as inside.
inline bool point_in_ring(std::span<const LonLat> ring, LonLat p) {
  bool inside = false;
  for (std::size_t i = 0, j = ring.size() - 1; i < ring.size(); j = i++) {
    const LonLat a = ring[i];
    const LonLat b = ring[j];
    const double cross = (b.lon - a.lon) * (p.lat - a.lat) - (b.lat - a.lat) * (p.lon - a.lon);
    if (std::fabs(cross) < 1e-12 && p.lon >= std::min(a.lon, b.lon) &&
        p.lon <= std::max(a.lon, b.lon) && p.lat >= std::min(a.lat, b.lat) &&
        p.lat <= std::max(a.lat, b.lat))
      return true;
    if ((a.lat > p.lat) != (b.lat > p.lat)) {
      const double x = (b.lon - a.lon) * (p.lat - a.lat) / (b.lat - a.lat) + a.lon;
      if (p.lon < x) inside = !inside;
    }
  }
  return inside;
}

// Distance in km from p to the nearest edge of the ring, using a local
// equirectangular projection centred on p.
inline double distance_to_ring_km(std::span<const LonLat> ring, LonLat p) {
  const double kx = kKmPerDegree * std::cos(to_rad(p.lat));
  const double ky = kKmPerDegree;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < ring.size(); ++i) {
    const double ax = (ring[i].lon - p.lon) * kx;
    const double ay = (ring[i].lat - p.lat) * ky;
    const double bx = (ring[i + 1].lon - p.lon) * kx;
    const double by = (ring[i + 1].lat - p.lat) * ky;
    const double dx = bx - ax;
    const double dy = by - ay;
    const double len2 = dx * dx + dy * dy;
    double t = len2 > 0.0 ? -(ax * dx + ay * dy) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    best = std::min(best, std::hypot(ax + t * dx, ay + t * dy));
  }
  return best;
}

// Spatial extent of a place: a polygon when one is known, otherwise a disc of
// `radius_km` around `center` (radius 0 degenerates to a point).
struct Footprint {
  LonLat center;
  double radius_km = 0.0;
  Ring ring;

  static Footprint point(LonLat p, double radius_km = 0.0) { return {p, radius_km, {}}; }
  static Footprint polygon(Ring r) {
    Footprint f;
    f.center = ring_centroid(r);
    f.ring = std::move(r);
    return f;
  }

  bool is_polygon() const { return !ring.empty(); }

  // 0 inside the footprint, otherwise great-circle distance to its boundary.
  double distance_km(LonLat p) const {
    if (is_polygon()) return point_in_ring(ring, p) ? 0.0 : distance_to_ring_km(ring, p);
    return std::max(0.0, haversine_km(center, p) - radius_km);
  }

  BBox bbox() const {
    if (is_polygon()) return ring_bbox(ring);
    return buffer_bbox(BBox::of_point(center), radius_km);
  }

  // Largest distance from the centre to any point of the footprint.
  double extent_radius_km() const {
    if (!is_polygon()) return radius_km;
    double r = 0.0;
    for (const auto& v : ring) r = std::max(r, haversine_km(center, v));
    return r;
  }
};

}  // namespace fuzzgir::geo
