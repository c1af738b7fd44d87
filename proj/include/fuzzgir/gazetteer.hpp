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

#pragma once

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "fuzzgir/error.hpp"
#include "fuzzgir/geo.hpp"
#include "fuzzgir/text.hpp"

namespace fuzzgir {

// Coarser levels compare greater.
enum class GranularityLevel : int { Landmark = 0, Neighborhood = 1, City = 2, Region = 3, Country = 4 };

inline constexpr std::array<GranularityLevel, 5> kAllLevels = {
    GranularityLevel::Landmark, GranularityLevel::Neighborhood, GranularityLevel::City,
    GranularityLevel::Region, GranularityLevel::Country};

inline constexpr int level_ordinal(GranularityLevel l) { return static_cast<int>(l); }

inline std::string_view level_name(GranularityLevel l) {
  switch (l) {
    case GranularityLevel::Landmark: return "landmark";
    case GranularityLevel::Neighborhood: return "neighborhood";
    case GranularityLevel::City: return "city";
    case GranularityLevel::Region: return "region";
    case GranularityLevel::Country: return "country";
  }
  return "?";
}

inline std::optional<GranularityLevel> parse_level(std::string_view s) {
  for (auto l : kAllLevels)
    if (level_name(l) == s) return l;
  return std::nullopt;
}

// Per-level values, indexed by level ordinal.
template <typename T>
using PerLevel = std::array<T, kAllLevels.size()>;

struct GazetteerOptions {
  // Extent substituted for places that only carry a point.
  PerLevel<double> default_radius_km = {0.5, 1.0, 10.0, 100.0, 500.0};
  double default_importance = 0.5;
};

struct PlaceEntry {
  std::string place_id;
  std::string primary_name;
  std::vector<std::string> alt_names;
  geo::Footprint footprint;
  GranularityLevel level = GranularityLevel::Landmark;
  std::optional<std::string> parent_id;
  double importance = 0.5;
};

struct GazetteerIssue {
  enum class Kind { Malformed, DuplicateId, CoordinateRange, UnknownParent, LevelOrder, CyclicContainment };
  Kind kind;
  std::size_t line = 0;  // 0 when the entry did not come from a file
  std::string place_id;
  std::string message;
};

// Raised when loading finds invalid rows; carries every violation found.
class GazetteerError : public IntegrityError {
 public:
  explicit GazetteerError(std::vector<GazetteerIssue> issues)
      : IntegrityError(describe(issues)), issues_(std::move(issues)) {}

  const std::vector<GazetteerIssue>& issues() const { return issues_; }
  bool has(GazetteerIssue::Kind k) const {
    return std::any_of(issues_.begin(), issues_.end(), [k](const auto& i) { return i.kind == k; });
  }

 private:
  static std::string describe(const std::vector<GazetteerIssue>& issues) {
    std::string s = "invalid gazetteer (" + std::to_string(issues.size()) + " issue(s))";
    for (const auto& i : issues) {
      s += "\n  ";
      if (i.line) s += "line " + std::to_string(i.line) + ": ";
      if (!i.place_id.empty()) s += "[" + i.place_id + "] ";
      s += i.message;
    }
    return s;
  }

  std::vector<GazetteerIssue> issues_;
};

// Immutable after construction; safe for concurrent reads.
class Gazetteer {
 public:
  Gazetteer() = default;

  // Validates and indexes entries. `lines` optionally maps entries to source
  // line numbers for error reporting.
  static Gazetteer from_entries(std::vector<PlaceEntry> entries,
                                const std::vector<std::size_t>& lines = {}) {
    Gazetteer g;
    std::vector<GazetteerIssue> issues;
    auto line_of = [&](std::size_t i) { return i < lines.size() ? lines[i] : std::size_t{0}; };

    for (std::size_t i = 0; i < entries.size(); ++i) {
      auto& e = entries[i];
      bool coords_ok = geo::in_range(e.footprint.center);
      for (const auto& v : e.footprint.ring) coords_ok = coords_ok && geo::in_range(v);
      if (!coords_ok)
        issues.push_back({GazetteerIssue::Kind::CoordinateRange, line_of(i), e.place_id,
                          "coordinate out of range"});
      if (g.entries_.count(e.place_id)) {
        issues.push_back({GazetteerIssue::Kind::DuplicateId, line_of(i), e.place_id, "duplicate place_id"});
        continue;
      }
      g.lines_[e.place_id] = line_of(i);
      g.entries_.emplace(e.place_id, std::move(e));
    }

    for (const auto& [id, e] : g.entries_) {
      if (!e.parent_id) continue;
      auto p = g.entries_.find(*e.parent_id);
      if (p == g.entries_.end()) {
        issues.push_back({GazetteerIssue::Kind::UnknownParent, g.lines_[id], id,
                          "unknown parent_id '" + *e.parent_id + "'"});
        continue;
      }
      if (level_ordinal(p->second.level) <= level_ordinal(e.level))
        issues.push_back({GazetteerIssue::Kind::LevelOrder, g.lines_[id], id,
                          "parent '" + p->first + "' is not coarser than its child"});
    }

    for (const auto& [id, e] : g.entries_) {
      std::set<std::string> seen{id};
      auto cur = e.parent_id;
      while (cur) {
        if (seen.count(*cur)) {
          issues.push_back({GazetteerIssue::Kind::CyclicContainment, g.lines_[id], id,
                            "containment cycle through '" + *cur + "'"});
          break;
        }
        seen.insert(*cur);
        auto it = g.entries_.find(*cur);
        if (it == g.entries_.end()) break;
        cur = it->second.parent_id;
      }
    }

    if (!issues.empty()) throw GazetteerError(std::move(issues));

    for (const auto& [id, e] : g.entries_) {
      g.name_index_[text::normalize_name(e.primary_name)].insert(id);
      for (const auto& a : e.alt_names) g.name_index_[text::normalize_name(a)].insert(id);
    }
    g.name_index_.erase("");
    return g;
  }

  // Reads the tab-separated gazetteer format (header row required):
  // place_id, primary_name, alt_names (|-separated), level, lon, lat,
  // polygon ("lon lat;lon lat;..."), parent_id, importance.
  static Gazetteer load(const std::filesystem::path& path, const GazetteerOptions& opts = {}) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open gazetteer " + path.string());
    std::vector<PlaceEntry> entries;
    std::vector<std::size_t> lines;
    std::vector<GazetteerIssue> issues;
    std::string line;
    std::size_t lineno = 0;
    bool header = true;
    while (std::getline(in, line)) {
      ++lineno;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (header) {
        header = false;
        continue;
      }
      if (line.find_first_not_of(" \t") == std::string::npos) continue;
      std::string why;
      if (auto e = parse_row(line, opts, why)) {
        entries.push_back(std::move(*e));
        lines.push_back(lineno);
      } else {
        issues.push_back({why.rfind("coordinate", 0) == 0 ? GazetteerIssue::Kind::CoordinateRange
                                                          : GazetteerIssue::Kind::Malformed,
                          lineno, first_field(line), why});
      }
    }
    try {
      auto g = from_entries(std::move(entries), lines);
      if (!issues.empty()) throw GazetteerError(std::move(issues));
      return g;
    } catch (const GazetteerError& e) {
      auto all = issues;
      all.insert(all.end(), e.issues().begin(), e.issues().end());
      std::stable_sort(all.begin(), all.end(), [](const auto& a, const auto& b) { return a.line < b.line; });
      throw GazetteerError(std::move(all));
    }
  }

  std::size_t size() const { return entries_.size(); }
  const std::map<std::string, PlaceEntry>& entries() const { return entries_; }
  const std::map<std::string, std::set<std::string>>& name_index() const { return name_index_; }

  const PlaceEntry* find(const std::string& id) const {
    auto it = entries_.find(id);
    return it == entries_.end() ? nullptr : &it->second;
  }
  const PlaceEntry& get(const std::string& id) const {
    if (const auto* e = find(id)) return *e;
    throw UnknownIdError("unknown place_id '" + id + "'");
  }

  bool has_name(const std::string& normalized) const { return name_index_.count(normalized) > 0; }

  // Every entry carrying `name` as primary or alternate name, most important first.
  std::vector<const PlaceEntry*> lookup(std::string_view name) const {
    std::vector<const PlaceEntry*> out;
    auto it = name_index_.find(text::normalize_name(name));
    if (it == name_index_.end()) return out;
    for (const auto& id : it->second) out.push_back(&entries_.at(id));
    std::sort(out.begin(), out.end(), [](const PlaceEntry* a, const PlaceEntry* b) {
      if (a->importance != b->importance) return a->importance > b->importance;
      return a->place_id < b->place_id;
    });
    return out;
  }

  // Reflexive: contains(x, x) is true.
  bool contains(const std::string& ancestor, const std::string& descendant) const {
    get(ancestor);
    const PlaceEntry* cur = &get(descendant);
    while (cur) {
      if (cur->place_id == ancestor) return true;
      cur = cur->parent_id ? find(*cur->parent_id) : nullptr;
    }
    return false;
  }

  bool related(const std::string& a, const std::string& b) const {
    return contains(a, b) || contains(b, a);
  }

  GranularityLevel granularity_of(const std::string& id) const { return get(id).level; }

  // Number of entries on the parent chain, counting the entry itself.
  std::size_t depth(const std::string& id) const {
    std::size_t d = 0;
    for (const PlaceEntry* cur = &get(id); cur; cur = cur->parent_id ? find(*cur->parent_id) : nullptr)
      ++d;
    return d;
  }

 private:
  static std::string first_field(const std::string& line) { return line.substr(0, line.find('\t')); }

  static std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
      auto pos = s.find(sep, start);
      out.emplace_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
      if (pos == std::string_view::npos) break;
      start = pos + 1;
    }
    return out;
  }

  static std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t");
    return std::string(s.substr(b, e - b + 1));
  }

  static std::optional<double> parse_double(const std::string& s) {
    double v = 0.0;
    const auto* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc{} || ptr != end || !std::isfinite(v)) return std::nullopt;
    return v;
  }

  static std::optional<PlaceEntry> parse_row(const std::string& line, const GazetteerOptions& opts,
                                             std::string& why) {
    auto cols = split(line, '\t');
    if (cols.size() < 6 || cols.size() > 9) {
      why = "expected 6 to 9 tab-separated columns, got " + std::to_string(cols.size());
      return std::nullopt;
    }
    cols.resize(9);
    for (auto& c : cols) c = trim(c);
    if (!text::is_valid_utf8(line)) {
      why = "row is not valid UTF-8";
      return std::nullopt;
    }

    PlaceEntry e;
    e.place_id = cols[0];
    e.primary_name = cols[1];
    if (e.place_id.empty() || text::normalize_name(e.primary_name).empty()) {
      why = "place_id and primary_name are required";
      return std::nullopt;
    }
    if (!cols[2].empty())
      for (auto& a : split(cols[2], '|'))
        if (auto t = trim(a); !t.empty()) e.alt_names.push_back(t);
    auto level = parse_level(cols[3]);
    if (!level) {
      why = "unknown level '" + cols[3] + "'";
      return std::nullopt;
    }
    e.level = *level;

    std::optional<geo::LonLat> point;
    if (!cols[4].empty() || !cols[5].empty()) {
      auto lon = parse_double(cols[4]);
      auto lat = parse_double(cols[5]);
      if (!lon || !lat) {
        why = "lon/lat must be numbers";
        return std::nullopt;
      }
      point = geo::LonLat{*lon, *lat};
      if (!geo::in_range(*point)) {
        why = "coordinate out of range";
        return std::nullopt;
      }
    }

    if (!cols[6].empty()) {
      geo::Ring ring;
      for (const auto& v : split(cols[6], ';')) {
        auto t = trim(v);
        auto sp = t.find(' ');
        std::optional<double> lon;
        std::optional<double> lat;
        if (sp != std::string::npos) {
          lon = parse_double(t.substr(0, sp));
          lat = parse_double(trim(t.substr(sp + 1)));
        }
        if (!lon || !lat) {
          why = "malformed polygon vertex '" + t + "'";
          return std::nullopt;
        }
        ring.push_back({*lon, *lat});
        if (!geo::in_range(ring.back())) {
          why = "coordinate out of range in polygon";
          return std::nullopt;
        }
      }
      if (ring.size() < 4 || !(ring.front() == ring.back())) {
        why = "polygon ring must be closed with at least 4 vertices";
        return std::nullopt;
      }
      e.footprint = geo::Footprint::polygon(std::move(ring));
    } else if (point) {
      e.footprint = geo::Footprint::point(*point, opts.default_radius_km[level_ordinal(e.level)]);
    } else {
      why = "either lon/lat or a polygon is required";
      return std::nullopt;
    }

    if (!cols[7].empty()) e.parent_id = cols[7];
    e.importance = opts.default_importance;
    if (!cols[8].empty()) {
      auto imp = parse_double(cols[8]);
      if (!imp || *imp < 0.0 || *imp > 1.0) {
        why = "importance must be a number in [0,1]";
        return std::nullopt;
      }
      e.importance = *imp;
    }
    return e;
  }

  std::map<std::string, PlaceEntry> entries_;
  std::map<std::string, std::set<std::string>> name_index_;
  std::map<std::string, std::size_t> lines_;
};

}  // namespace fuzzgir
