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

// GeoJSON (RFC 7946) export of a resolved event location, plus a structural
// validator used by the tests and the CLI.

#pragma once

#include <cmath>
#include <string>
#include <vector>

#include <json.hpp>

#include "fuzzgir/retrieval.hpp"

namespace fuzzgir {

struct GeoJsonOptions {
  bool raster = false;     // add one Polygon feature per cell with pi > 0
  int decimals = 6;
};

namespace detail {

inline double round_to(double v, int decimals) {
  const double f = std::pow(10.0, decimals);
  const double r = std::round(v * f) / f;
  return r == 0.0 ? 0.0 : r;  // no "-0"
}

inline nlohmann::json position(LonLat p, int decimals) {
  return {round_to(p.lon, decimals), round_to(p.lat, decimals)};
}

inline nlohmann::json feature(nlohmann::json geometry, nlohmann::json properties) {
  return {{"type", "Feature"}, {"geometry", std::move(geometry)}, {"properties", std::move(properties)}};
}

}  // namespace detail

inline nlohmann::json emit_geojson(const Resolution& r, const GeoJsonOptions& opts = {}) {
  nlohmann::json features = nlohmann::json::array();
  features.push_back(detail::feature({{"type", "Point"}, {"coordinates", detail::position(r.location.point, opts.decimals)}},
                                     {{"kind", "resolved_location"}, {"max_pi", r.location.max_pi}}));

  nlohmann::json ring = nlohmann::json::array();
  for (const auto& v : r.location.footprint) ring.push_back(detail::position(v, opts.decimals));
  features.push_back(detail::feature({{"type", "Polygon"}, {"coordinates", nlohmann::json::array({ring})}},
                                     {{"kind", "footprint"}, {"alpha", r.location.footprint_alpha}}));

  for (const auto& e : r.evidence)
    features.push_back(detail::feature({{"type", "Point"}, {"coordinates", detail::position(e.point, opts.decimals)}},
                                       {{"kind", "mention"},
                                        {"doc_id", e.doc_id},
                                        {"key", e.mention.term_key()},
                                        {"score", std::clamp(e.weight, 0.0, 1.0)}}));

  if (opts.raster) {
    for (int iy = 0; iy < r.grid.ny; ++iy)
      for (int ix = 0; ix < r.grid.nx; ++ix) {
        const double pi = r.grid.at(ix, iy);
        if (!(pi > 0.0)) continue;
        const auto b = r.grid.cell_bbox(ix, iy);
        nlohmann::json cell = nlohmann::json::array({detail::position({b.min_lon, b.min_lat}, opts.decimals),
                                                     detail::position({b.max_lon, b.min_lat}, opts.decimals),
                                                     detail::position({b.max_lon, b.max_lat}, opts.decimals),
                                                     detail::position({b.min_lon, b.max_lat}, opts.decimals),
                                                     detail::position({b.min_lon, b.min_lat}, opts.decimals)});
        features.push_back(detail::feature({{"type", "Polygon"}, {"coordinates", nlohmann::json::array({cell})}},
                                           {{"kind", "cell"}, {"pi", std::clamp(pi, 0.0, 1.0)}}));
      }
  }
  return {{"type", "FeatureCollection"}, {"features", features}};
}

namespace detail {

inline void check_position(const nlohmann::json& p, const std::string& where, std::vector<std::string>& errs) {
  if (!p.is_array() || p.size() < 2 || p.size() > 3) {
    errs.push_back(where + ": position must be an array of 2 or 3 numbers");
    return;
  }
  for (const auto& c : p)
    if (!c.is_number()) {
      errs.push_back(where + ": non-numeric coordinate");
      return;
    }
  const double lon = p[0].get<double>(), lat = p[1].get<double>();
  if (!(lon >= -180.0 && lon <= 180.0 && lat >= -90.0 && lat <= 90.0))
    errs.push_back(where + ": coordinate out of lon/lat range");
}

inline void check_ring(const nlohmann::json& ring, const std::string& where, bool exterior,
                       std::vector<std::string>& errs) {
  if (!ring.is_array() || ring.size() < 4) {
    errs.push_back(where + ": linear ring needs at least 4 positions");
    return;
  }
  for (std::size_t i = 0; i < ring.size(); ++i) check_position(ring[i], where + "[" + std::to_string(i) + "]", errs);
  if (ring.front() != ring.back()) errs.push_back(where + ": linear ring is not closed");
  double area = 0.0;
  for (std::size_t i = 0; i + 1 < ring.size(); ++i) {
    if (!ring[i].is_array() || !ring[i + 1].is_array() || ring[i].size() < 2 || ring[i + 1].size() < 2) return;
    if (!ring[i][0].is_number() || !ring[i][1].is_number() || !ring[i + 1][0].is_number() ||
        !ring[i + 1][1].is_number())
      return;
    area += ring[i][0].get<double>() * ring[i + 1][1].get<double>() -
            ring[i + 1][0].get<double>() * ring[i][1].get<double>();
  }
  if (exterior && !(area > 0.0)) errs.push_back(where + ": exterior ring must be counter-clockwise");
  if (!exterior && !(area < 0.0)) errs.push_back(where + ": interior ring must be clockwise");
}

inline void check_geometry(const nlohmann::json& g, const std::string& where, std::vector<std::string>& errs) {
  if (g.is_null()) return;
  if (!g.is_object() || !g.contains("type") || !g["type"].is_string()) {
    errs.push_back(where + ": geometry needs a string type");
    return;
  }
  const auto type = g["type"].get<std::string>();
  if (type == "GeometryCollection") {
    if (!g.contains("geometries") || !g["geometries"].is_array()) {
      errs.push_back(where + ": GeometryCollection needs geometries");
      return;
    }
    for (std::size_t i = 0; i < g["geometries"].size(); ++i)
      check_geometry(g["geometries"][i], where + ".geometries[" + std::to_string(i) + "]", errs);
    return;
  }
  if (!g.contains("coordinates") || !g["coordinates"].is_array()) {
    errs.push_back(where + ": geometry needs coordinates");
    return;
  }
  const auto& c = g["coordinates"];
  auto polygon = [&](const nlohmann::json& rings, const std::string& w) {
    if (!rings.is_array() || rings.empty()) {
      errs.push_back(w + ": polygon needs at least one ring");
      return;
    }
    for (std::size_t i = 0; i < rings.size(); ++i) check_ring(rings[i], w + "[" + std::to_string(i) + "]", i == 0, errs);
  };
  if (type == "Point") {
    check_position(c, where, errs);
  } else if (type == "MultiPoint" || type == "LineString") {
    if (type == "LineString" && c.size() < 2) errs.push_back(where + ": LineString needs 2 positions");
    for (std::size_t i = 0; i < c.size(); ++i) check_position(c[i], where + "[" + std::to_string(i) + "]", errs);
  } else if (type == "MultiLineString") {
    for (std::size_t i = 0; i < c.size(); ++i) {
      if (!c[i].is_array() || c[i].size() < 2) errs.push_back(where + ": LineString needs 2 positions");
      else
        for (std::size_t k = 0; k < c[i].size(); ++k) check_position(c[i][k], where, errs);
    }
  } else if (type == "Polygon") {
    polygon(c, where);
  } else if (type == "MultiPolygon") {
    for (std::size_t i = 0; i < c.size(); ++i) polygon(c[i], where + "[" + std::to_string(i) + "]");
  } else {
    errs.push_back(where + ": unknown geometry type '" + type + "'");
  }
}

}  // namespace detail

// Structural RFC 7946 checks; empty result means valid. Also enforces that
// "pi" and "score" properties lie in [0, 1].
inline std::vector<std::string> validate_geojson(const nlohmann::json& doc) {
  std::vector<std::string> errs;
  if (!doc.is_object() || doc.value("type", "") != "FeatureCollection") {
    errs.push_back("root must be a FeatureCollection");
    return errs;
  }
  if (!doc.contains("features") || !doc["features"].is_array()) {
    errs.push_back("FeatureCollection needs a features array");
    return errs;
  }
  const auto& fs = doc["features"];
  for (std::size_t i = 0; i < fs.size(); ++i) {
    const std::string where = "features[" + std::to_string(i) + "]";
    const auto& f = fs[i];
    if (!f.is_object() || f.value("type", "") != "Feature") {
      errs.push_back(where + ": not a Feature");
      continue;
    }
    if (!f.contains("geometry")) errs.push_back(where + ": missing geometry member");
    else detail::check_geometry(f["geometry"], where + ".geometry", errs);
    if (!f.contains("properties") || !(f["properties"].is_object() || f["properties"].is_null())) {
      errs.push_back(where + ": properties must be an object or null");
      continue;
    }
    if (f["properties"].is_object())
      for (const char* key : {"pi", "score"})
        if (f["properties"].contains(key)) {
          const auto& v = f["properties"][key];
          if (!v.is_number() || v.get<double>() < 0.0 || v.get<double>() > 1.0)
            errs.push_back(where + ": property '" + key + "' must lie in [0, 1]");
        }
  }
  return errs;
}

}  // namespace fuzzgir
