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

// Two-level spatial index.
//
// Level 1 is an inverted index from spatial term keys to (doc, SF) postings.
// Level 2 holds, for every granularity level, a grid of square lon/lat cells
// listing the documents whose mention surfaces reach the cell at the index
// alpha. Mentions whose cut box would cover too many cells at a level are kept
// in a per-level overflow list and tested by box intersection instead.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include <json.hpp>

#include "fuzzgir/corpus.hpp"
#include "fuzzgir/error.hpp"
#include "fuzzgir/extractor.hpp"
#include "fuzzgir/gazetteer.hpp"
#include "fuzzgir/surface.hpp"

namespace fuzzgir {

// sf * (log2(N / n) + 1)
inline double compute_swf(std::int64_t sf, std::int64_t n_docs, std::int64_t df) {
  if (sf < 0) throw InconsistencyError("negative spatial term frequency");
  if (n_docs < 1) throw InconsistencyError("corpus size must be at least 1");
  if (df > n_docs) throw InconsistencyError("document frequency exceeds corpus size");
  if (df < 1) {
    if (sf > 0) throw InconsistencyError("term occurs in a document but has zero document frequency");
    return 0.0;
  }
  return static_cast<double>(sf) *
         (std::log2(static_cast<double>(n_docs) / static_cast<double>(df)) + 1.0);
}

struct SpatialTermVector {
  std::string doc_id;
  std::map<std::string, double> weights;

  double weight(const std::string& key) const {
    auto it = weights.find(key);
    return it == weights.end() ? 0.0 : it->second;
  }
  friend bool operator==(const SpatialTermVector&, const SpatialTermVector&) = default;
};

// Cosine over the union of keys; absent keys count as 0.
inline double spatial_similarity(const SpatialTermVector& a, const SpatialTermVector& b) {
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (const auto& [k, w] : a.weights) {
    na += w * w;
    dot += w * b.weight(k);
  }
  for (const auto& [k, w] : b.weights) nb += w * w;
  if (na <= 0.0 || nb <= 0.0) return 0.0;
  return std::clamp(dot / std::sqrt(na * nb), 0.0, 1.0);
}

struct IndexOptions {
  PerLevel<double> cell_edge_deg = {0.01, 0.05, 0.1, 0.5, 2.0};
  double alpha = 0.5;
  std::size_t overflow_cells = 4096;

  static IndexOptions from_json(const nlohmann::json& j) {
    IndexOptions o;
    try {
      if (j.contains("cell_edge_deg")) {
        for (auto lvl : kAllLevels) {
          const auto name = std::string(level_name(lvl));
          if (j.at("cell_edge_deg").contains(name))
            o.cell_edge_deg[level_ordinal(lvl)] = j.at("cell_edge_deg").at(name).get<double>();
        }
      }
      o.alpha = j.value("alpha", o.alpha);
      o.overflow_cells = j.value("overflow_cells", o.overflow_cells);
    } catch (const nlohmann::json::exception& e) {
      throw FormatError(std::string("bad index config: ") + e.what());
    }
    for (double e : o.cell_edge_deg)
      if (!(e > 0.0)) throw FormatError("cell edges must be positive");
    if (!(o.alpha > 0.0 && o.alpha <= 1.0)) throw FormatError("index alpha must lie in (0, 1]");
    return o;
  }

  nlohmann::json to_json() const {
    nlohmann::json j;
    for (auto lvl : kAllLevels) j["cell_edge_deg"][std::string(level_name(lvl))] = cell_edge_deg[level_ordinal(lvl)];
    j["alpha"] = alpha;
    j["overflow_cells"] = overflow_cells;
    return j;
  }
};

using CellId = std::pair<std::int64_t, std::int64_t>;

struct CellRange {
  std::int64_t x0, y0, x1, y1;
  std::uint64_t count() const {
    return static_cast<std::uint64_t>(x1 - x0 + 1) * static_cast<std::uint64_t>(y1 - y0 + 1);
  }
  bool contains(const CellId& c) const { return c.first >= x0 && c.first <= x1 && c.second >= y0 && c.second <= y1; }
};

inline CellRange cell_range(const geo::BBox& box, double edge) {
  auto f = [edge](double v) { return static_cast<std::int64_t>(std::floor(v / edge)); };
  return {f(box.min_lon), f(box.min_lat), f(box.max_lon), f(box.max_lat)};
}

struct OverflowEntry {
  std::string doc_id;
  geo::BBox bbox;
};

struct CandidateResult {
  std::set<std::string> docs;
  GranularityLevel level = GranularityLevel::Country;
  double cell_edge_deg = 0.0;
  std::uint64_t cells_probed = 0;
  bool level2_consulted = false;
};

class TwoLevelIndex {
 public:
  using Postings = std::map<std::string, std::int64_t>;  // doc_id -> SF

  const IndexOptions& options() const { return options_; }
  std::int64_t n_docs() const { return static_cast<std::int64_t>(doc_ids_.size()); }
  const std::vector<std::string>& doc_ids() const { return doc_ids_; }
  const std::map<std::string, Postings>& level1() const { return level1_; }
  const std::map<CellId, std::set<std::string>>& level2(GranularityLevel l) const {
    return level2_[level_ordinal(l)];
  }
  const std::vector<OverflowEntry>& overflow(GranularityLevel l) const { return overflow_[level_ordinal(l)]; }
  const std::map<std::string, SpatialTermVector>& vectors() const { return vectors_; }
  const std::map<std::string, std::vector<SpatialMention>>& mentions() const { return mentions_; }

  bool has_doc(const std::string& id) const { return vectors_.count(id) > 0; }

  const SpatialTermVector& vector(const std::string& doc_id) const {
    auto it = vectors_.find(doc_id);
    if (it == vectors_.end()) throw UnknownIdError("document not indexed: " + doc_id);
    return it->second;
  }

  const std::vector<SpatialMention>& doc_mentions(const std::string& doc_id) const {
    static const std::vector<SpatialMention> kNone;
    auto it = mentions_.find(doc_id);
    return it == mentions_.end() ? kNone : it->second;
  }

  std::int64_t document_frequency(const std::string& key) const {
    auto it = level1_.find(key);
    return it == level1_.end() ? 0 : static_cast<std::int64_t>(it->second.size());
  }

  std::int64_t vocabulary_size() const { return static_cast<std::int64_t>(level1_.size()); }

  // Level-1 postings for `terms` together with level-2 cells at `level`
  // resolution that intersect `region`.
  CandidateResult candidates(const std::optional<geo::BBox>& region, GranularityLevel level,
                             const std::vector<std::string>& terms) const {
    CandidateResult out;
    out.level = level;
    out.cell_edge_deg = options_.cell_edge_deg[level_ordinal(level)];
    for (const auto& t : terms) {
      auto it = level1_.find(t);
      if (it == level1_.end()) continue;
      for (const auto& [doc, sf] : it->second) out.docs.insert(doc);
    }
    if (!region) return out;

    out.level2_consulted = true;
    const auto& cells = level2_[level_ordinal(level)];
    const auto range = cell_range(*region, out.cell_edge_deg);
    if (range.count() <= cells.size()) {
      for (auto x = range.x0; x <= range.x1; ++x)
        for (auto y = range.y0; y <= range.y1; ++y) {
          ++out.cells_probed;
          auto it = cells.find({x, y});
          if (it != cells.end()) out.docs.insert(it->second.begin(), it->second.end());
        }
    } else {
      for (const auto& [cell, docs] : cells) {
        ++out.cells_probed;
        if (range.contains(cell)) out.docs.insert(docs.begin(), docs.end());
      }
    }
    for (const auto& o : overflow_[level_ordinal(level)])
      if (o.bbox.intersects(*region)) out.docs.insert(o.doc_id);
    return out;
  }

  // Copy with every SWF multiplied by `factor`.
  TwoLevelIndex scaled(double factor) const {
    if (!(factor > 0.0)) throw RangeError("scale factor must be positive");
    TwoLevelIndex c = *this;
    for (auto& [id, v] : c.vectors_)
      for (auto& [k, w] : v.weights) w *= factor;
    return c;
  }

  static TwoLevelIndex build(std::vector<std::string> doc_ids,
                             std::map<std::string, std::vector<SpatialMention>> mentions, const Gazetteer& gaz,
                             const TermParams& terms, const IndexOptions& opts = {}) {
    TwoLevelIndex ix;
    ix.options_ = opts;
    std::sort(doc_ids.begin(), doc_ids.end());
    doc_ids.erase(std::unique(doc_ids.begin(), doc_ids.end()), doc_ids.end());
    ix.doc_ids_ = std::move(doc_ids);
    const std::set<std::string> known(ix.doc_ids_.begin(), ix.doc_ids_.end());

    for (auto& [doc, list] : mentions) {
      if (!known.count(doc)) throw IntegrityError("mentions for unknown document '" + doc + "'");
      for (const auto& m : list) {
        if (m.doc_id != doc) throw IntegrityError("mention filed under the wrong document '" + doc + "'");
        if (!gaz.find(m.place_id)) throw IntegrityError("mention references unknown place '" + m.place_id + "'");
        ++ix.level1_[m.term_key()][doc];
        if (m.is_relative()) ++ix.level1_[m.place_id][doc];

        const auto box = alpha_cut_bbox(mention_surface(m, gaz, terms), opts.alpha);
        for (auto lvl : kAllLevels) {
          const auto o = static_cast<std::size_t>(level_ordinal(lvl));
          const auto r = cell_range(box, opts.cell_edge_deg[o]);
          if (r.count() > opts.overflow_cells) {
            ix.overflow_[o].push_back({doc, box});
            continue;
          }
          for (auto x = r.x0; x <= r.x1; ++x)
            for (auto y = r.y0; y <= r.y1; ++y) ix.level2_[o][{x, y}].insert(doc);
        }
      }
    }
    for (auto& o : ix.overflow_) {
      std::sort(o.begin(), o.end(), [](const OverflowEntry& a, const OverflowEntry& b) {
        return std::tie(a.doc_id, a.bbox.min_lon, a.bbox.min_lat, a.bbox.max_lon, a.bbox.max_lat) <
               std::tie(b.doc_id, b.bbox.min_lon, b.bbox.min_lat, b.bbox.max_lon, b.bbox.max_lat);
      });
      o.erase(std::unique(o.begin(), o.end(),
                          [](const OverflowEntry& a, const OverflowEntry& b) {
                            return a.doc_id == b.doc_id && a.bbox.min_lon == b.bbox.min_lon &&
                                   a.bbox.min_lat == b.bbox.min_lat && a.bbox.max_lon == b.bbox.max_lon &&
                                   a.bbox.max_lat == b.bbox.max_lat;
                          }),
              o.end());
    }

    for (const auto& id : ix.doc_ids_) ix.vectors_[id].doc_id = id;
    for (const auto& [key, postings] : ix.level1_) {
      const auto n = static_cast<std::int64_t>(postings.size());
      for (const auto& [doc, sf] : postings) ix.vectors_[doc].weights[key] = compute_swf(sf, ix.n_docs(), n);
    }
    ix.mentions_ = std::move(mentions);
    return ix;
  }

  // File name -> content for every persisted file. Byte-stable for fixed inputs.
  std::map<std::string, std::string> serialize() const {
    std::map<std::string, std::string> files;
    std::ostringstream l1, l2, vec, men;
    for (const auto& [key, postings] : level1_) {
      nlohmann::json p = nlohmann::json::array();
      for (const auto& [doc, sf] : postings) p.push_back({doc, sf});
      l1 << nlohmann::json{{"key", key}, {"postings", p}}.dump() << '\n';
    }
    for (auto lvl : kAllLevels) {
      const auto o = level_ordinal(lvl);
      for (const auto& [cell, docs] : level2_[o])
        l2 << nlohmann::json{{"level", level_name(lvl)}, {"cell", {cell.first, cell.second}}, {"docs", docs}}.dump()
           << '\n';
      for (const auto& e : overflow_[o])
        l2 << nlohmann::json{{"level", level_name(lvl)},
                             {"overflow", e.doc_id},
                             {"bbox", {e.bbox.min_lon, e.bbox.min_lat, e.bbox.max_lon, e.bbox.max_lat}}}
                  .dump()
           << '\n';
    }
    for (const auto& [id, v] : vectors_) vec << nlohmann::json{{"doc_id", id}, {"weights", v.weights}}.dump() << '\n';
    for (const auto& [id, list] : mentions_)
      for (const auto& m : list) men << mention_to_json(m).dump() << '\n';
    files["level1.jsonl"] = l1.str();
    files["level2.jsonl"] = l2.str();
    files["vectors.jsonl"] = vec.str();
    files["mentions.jsonl"] = men.str();
    files["manifest.json"] =
        nlohmann::json{{"n_docs", n_docs()}, {"doc_ids", doc_ids_}, {"options", options_.to_json()}}.dump(2) + "\n";
    return files;
  }

  void save(const std::filesystem::path& dir) const {
    std::filesystem::create_directories(dir);
    for (const auto& [name, content] : serialize()) {
      std::ofstream out(dir / name, std::ios::binary);
      if (!out) throw Error("cannot write " + (dir / name).string());
      out << content;
    }
  }

  // Rebuilds from the stored mentions and checks every stored file against
  // the rebuilt content.
  static TwoLevelIndex load(const std::filesystem::path& dir, const Gazetteer& gaz, const TermParams& terms) {
    auto read = [&](const std::string& name) {
      std::ifstream in(dir / name, std::ios::binary);
      if (!in) throw IntegrityError("index file missing: " + (dir / name).string());
      std::ostringstream ss;
      ss << in.rdbuf();
      return ss.str();
    };
    TwoLevelIndex ix;
    try {
      const auto manifest = nlohmann::json::parse(read("manifest.json"));
      const auto opts = IndexOptions::from_json(manifest.at("options"));
      auto ids = manifest.at("doc_ids").get<std::vector<std::string>>();
      if (manifest.at("n_docs").get<std::int64_t>() != static_cast<std::int64_t>(ids.size()))
        throw IntegrityError("manifest document count disagrees with its id list");
      std::map<std::string, std::vector<SpatialMention>> mentions;
      std::istringstream men(read("mentions.jsonl"));
      std::string line;
      while (std::getline(men, line)) {
        if (line.empty()) continue;
        auto m = mention_from_json(nlohmann::json::parse(line));
        mentions[m.doc_id].push_back(std::move(m));
      }
      ix = build(std::move(ids), std::move(mentions), gaz, terms, opts);
    } catch (const nlohmann::json::exception& e) {
      throw IntegrityError(std::string("corrupted index: ") + e.what());
    } catch (const FormatError& e) {
      throw IntegrityError(std::string("corrupted index: ") + e.what());
    }
    for (const auto& [name, content] : ix.serialize())
      if (read(name) != content) throw IntegrityError("index file " + name + " does not match its mentions");
    return ix;
  }

 private:
  IndexOptions options_;
  std::vector<std::string> doc_ids_;
  std::map<std::string, Postings> level1_;
  PerLevel<std::map<CellId, std::set<std::string>>> level2_;
  PerLevel<std::vector<OverflowEntry>> overflow_;
  std::map<std::string, SpatialTermVector> vectors_;
  std::map<std::string, std::vector<SpatialMention>> mentions_;
};

inline std::map<std::string, std::vector<SpatialMention>> extract_corpus(const Corpus& corpus, const Gazetteer& gaz,
                                                                         const ExtractionConfig& cfg) {
  std::map<std::string, std::vector<SpatialMention>> out;
  for (const auto& [id, doc] : corpus.documents()) {
    auto m = extract_mentions(doc, gaz, cfg);
    if (!m.empty()) out[id] = std::move(m);
  }
  return out;
}

inline TwoLevelIndex build_index(const Corpus& corpus, std::map<std::string, std::vector<SpatialMention>> mentions,
                                 const Gazetteer& gaz, const TermParams& terms, const IndexOptions& opts = {}) {
  if (!corpus.sealed()) throw StateError("corpus must be sealed before indexing");
  std::vector<std::string> ids;
  for (const auto& [id, d] : corpus.documents()) ids.push_back(id);
  return TwoLevelIndex::build(std::move(ids), std::move(mentions), gaz, terms, opts);
}

}  // namespace fuzzgir
