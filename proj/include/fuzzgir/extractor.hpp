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

// Spatial expression extraction.
//
// A toponym candidate is the longest run of up to four tokens whose joined
// normalized form is a gazetteer name, provided its first token is capitalized
// or a cue word ("in", "near", ...) occurs within the two preceding tokens.
// A relation pattern from the lexicon that ends at most two tokens before the
// toponym turns it into a relative (vague) mention; the "at"/"in" patterns keep
// the mention absolute. Ambiguous toponyms are resolved per document with one
// referent per surface form.

#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "fuzzgir/corpus.hpp"
#include "fuzzgir/error.hpp"
#include "fuzzgir/fuzzy.hpp"
#include "fuzzgir/gazetteer.hpp"
#include "fuzzgir/relation.hpp"
#include "fuzzgir/surface.hpp"
#include "fuzzgir/text.hpp"

namespace fuzzgir {

using fuzzy::Hedge;
using text::ByteSpan;

struct LexiconPattern {
  std::vector<std::string> words;
  RelationTerm relation;
};

struct DisambiguationWeights {
  double importance = 0.5;
  double containment = 0.3;
  double level = 0.2;
};

struct ExtractionConfig {
  std::vector<LexiconPattern> patterns;
  std::map<std::string, Hedge> hedges;
  std::set<RelationKind> hedgeable = {RelationKind::Near, RelationKind::Far};
  std::set<std::string> cue_words = {"in", "at", "near", "from", "of", "to"};
  std::size_t max_toponym_tokens = 4;
  std::size_t cue_window = 2;
  std::size_t max_gap = 2;        // tokens allowed between a relation pattern and its toponym
  std::size_t max_window = 5;
  DisambiguationWeights weights;

  static std::map<std::string, Direction> default_direction_words() {
    return {{"north", Direction::N},     {"south", Direction::S},     {"east", Direction::E},
            {"west", Direction::W},      {"northeast", Direction::NE}, {"north-east", Direction::NE},
            {"northwest", Direction::NW}, {"north-west", Direction::NW}, {"southeast", Direction::SE},
            {"south-east", Direction::SE}, {"southwest", Direction::SW}, {"south-west", Direction::SW}};
  }

  static std::vector<std::pair<std::string, std::string>> default_relation_table() {
    return {{"at", "at"},
            {"in", "at"},
            {"near", "near"},
            {"near to", "near"},
            {"close to", "near"},
            {"beside", "near"},
            {"within walking distance of", "walking"},
            {"far from", "far"},
            {"to the <dir> of", "cardinal"},
            {"<dir> of", "cardinal"}};
  }

  static ExtractionConfig defaults() {
    ExtractionConfig c;
    c.hedges = {{"very", Hedge::Very}, {"somewhat", Hedge::Somewhat}, {"quite", Hedge::Somewhat}};
    c.set_patterns(default_relation_table(), default_direction_words());
    return c;
  }

  // Expands "<dir>" placeholders against the direction words.
  void set_patterns(const std::vector<std::pair<std::string, std::string>>& table,
                    const std::map<std::string, Direction>& directions) {
    patterns.clear();
    for (const auto& [pattern, rel] : table) {
      std::vector<std::string> words;
      for (const auto& t : text::tokenize(pattern)) words.push_back(t.normalized);
      if (pattern.find("<dir>") != std::string::npos) {
        if (rel != "cardinal") throw FormatError("<dir> patterns must map to 'cardinal'");
        for (const auto& [word, dir] : directions) {
          auto w = words;
          for (auto& x : w)
            if (x == "dir") x = word;
          patterns.push_back({w, RelationTerm::cardinal(dir)});
        }
        continue;
      }
      auto term = RelationTerm::from_key(rel);
      if (!term || term->kind == RelationKind::CardinalOf)
        throw FormatError("unknown relation '" + rel + "' for pattern '" + pattern + "'");
      patterns.push_back({words, *term});
    }
  }

  static ExtractionConfig from_json(const nlohmann::json& j) {
    auto c = defaults();
    try {
      if (j.contains("relations") || j.contains("directions")) {
        auto table = default_relation_table();
        if (j.contains("relations")) {
          table.clear();
          for (const auto& r : j.at("relations"))
            table.emplace_back(r.at("pattern").get<std::string>(), r.at("relation").get<std::string>());
        }
        auto dirs = default_direction_words();
        if (j.contains("directions")) {
          dirs.clear();
          for (const auto& [word, code] : j.at("directions").items()) {
            auto d = parse_direction_code(code.get<std::string>());
            if (!d) throw FormatError("unknown direction code for '" + word + "'");
            dirs[word] = *d;
          }
        }
        c.set_patterns(table, dirs);
      }
      if (j.contains("hedges")) {
        c.hedges.clear();
        for (const auto& [word, h] : j.at("hedges").items()) {
          const auto name = h.get<std::string>();
          if (name != "very" && name != "somewhat") throw FormatError("unknown hedge '" + name + "'");
          c.hedges[word] = name == "very" ? Hedge::Very : Hedge::Somewhat;
        }
      }
      if (j.contains("hedgeable")) {
        c.hedgeable.clear();
        for (const auto& k : j.at("hedgeable")) {
          auto r = RelationTerm::from_key(k.get<std::string>());
          if (!r) throw FormatError("unknown hedgeable relation");
          c.hedgeable.insert(r->kind);
        }
      }
      if (j.contains("cue_words")) c.cue_words = j.at("cue_words").get<std::set<std::string>>();
      c.max_toponym_tokens = j.value("max_toponym_tokens", c.max_toponym_tokens);
      c.cue_window = j.value("cue_window", c.cue_window);
      c.max_gap = j.value("max_gap", c.max_gap);
      c.max_window = j.value("max_window", c.max_window);
      if (j.contains("disambiguation")) {
        const auto& w = j.at("disambiguation");
        c.weights.importance = w.value("importance", c.weights.importance);
        c.weights.containment = w.value("containment", c.weights.containment);
        c.weights.level = w.value("level", c.weights.level);
      }
    } catch (const nlohmann::json::exception& e) {
      throw FormatError(std::string("bad extraction config: ") + e.what());
    }
    return c;
  }

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["patterns"] = nlohmann::json::array();
    for (const auto& p : patterns) {
      std::string w;
      for (const auto& x : p.words) w += (w.empty() ? "" : " ") + x;
      j["patterns"].push_back({{"pattern", w}, {"relation", p.relation.key()}});
    }
    for (const auto& [w, h] : hedges) j["hedges"][w] = fuzzy::hedge_name(h);
    j["hedgeable"] = nlohmann::json::array();
    for (auto k : hedgeable) j["hedgeable"].push_back(RelationTerm{k}.key());
    j["cue_words"] = cue_words;
    j["max_toponym_tokens"] = max_toponym_tokens;
    j["cue_window"] = cue_window;
    j["max_gap"] = max_gap;
    j["max_window"] = max_window;
    j["disambiguation"] = {{"importance", weights.importance},
                           {"containment", weights.containment},
                           {"level", weights.level}};
    return j;
  }
};

// Round-trips the expanded pattern list written by ExtractionConfig::to_json.
inline ExtractionConfig extraction_from_snapshot(const nlohmann::json& j) {
  auto c = ExtractionConfig::from_json(j);
  if (j.contains("patterns")) {
    c.patterns.clear();
    for (const auto& p : j.at("patterns")) {
      LexiconPattern lp;
      for (const auto& t : text::tokenize(p.at("pattern").get<std::string>())) lp.words.push_back(t.normalized);
      auto r = RelationTerm::from_key(p.at("relation").get<std::string>());
      if (!r) throw FormatError("unknown relation in pattern snapshot");
      lp.relation = *r;
      c.patterns.push_back(std::move(lp));
    }
  }
  return c;
}

struct SpatialMention {
  std::string doc_id;
  ByteSpan span;           // whole expression, relation words included
  ByteSpan toponym_span;
  std::string surface;     // normalized toponym
  std::string place_id;    // resolved place, or the anchor of a relative mention
  std::optional<RelationTerm> relation;  // nullopt: absolute mention
  std::optional<Hedge> hedge;
  std::string pattern;     // normalized relation words as matched, hedge included
  double confidence = 1.0;
  GranularityLevel granularity = GranularityLevel::Landmark;

  bool is_relative() const { return relation.has_value(); }

  // Index term key: place_id for absolute mentions, relation@anchor otherwise.
  std::string term_key() const { return relation ? relation->key() + "@" + place_id : place_id; }

  friend bool operator==(const SpatialMention&, const SpatialMention&) = default;
};

inline nlohmann::json mention_to_json(const SpatialMention& m) {
  nlohmann::json j;
  j["doc_id"] = m.doc_id;
  j["span"] = {m.span.start, m.span.end};
  j["toponym_span"] = {m.toponym_span.start, m.toponym_span.end};
  j["surface"] = m.surface;
  j["place_id"] = m.place_id;
  j["kind"] = m.relation ? "relative" : "absolute";
  j["relation"] = m.relation ? nlohmann::json(m.relation->key()) : nlohmann::json(nullptr);
  j["hedge"] = m.hedge ? nlohmann::json(fuzzy::hedge_name(*m.hedge)) : nlohmann::json(nullptr);
  j["pattern"] = m.pattern;
  j["confidence"] = m.confidence;
  j["granularity"] = level_name(m.granularity);
  j["key"] = m.term_key();
  return j;
}

inline SpatialMention mention_from_json(const nlohmann::json& j) {
  SpatialMention m;
  m.doc_id = j.at("doc_id").get<std::string>();
  m.span = {j.at("span").at(0).get<std::size_t>(), j.at("span").at(1).get<std::size_t>()};
  m.toponym_span = {j.at("toponym_span").at(0).get<std::size_t>(), j.at("toponym_span").at(1).get<std::size_t>()};
  m.surface = j.at("surface").get<std::string>();
  m.place_id = j.at("place_id").get<std::string>();
  if (!j.at("relation").is_null()) {
    auto r = RelationTerm::from_key(j.at("relation").get<std::string>());
    if (!r) throw IntegrityError("unknown relation in mention record");
    m.relation = *r;
  }
  if (!j.at("hedge").is_null()) m.hedge = j.at("hedge").get<std::string>() == "very" ? Hedge::Very : Hedge::Somewhat;
  m.pattern = j.at("pattern").get<std::string>();
  m.confidence = j.at("confidence").get<double>();
  auto lvl = parse_level(j.at("granularity").get<std::string>());
  if (!lvl) throw IntegrityError("unknown granularity in mention record");
  m.granularity = *lvl;
  return m;
}

inline PossibilitySurface mention_surface(const SpatialMention& m, const Gazetteer& gaz, const TermParams& params) {
  return surface_for(m.relation, m.hedge, gaz.get(m.place_id).footprint, params);
}

struct Classification {
  RelationTerm relation;
  std::optional<Hedge> hedge;
  std::size_t length = 0;  // tokens consumed from the end of the window, hedge included
};

// Longest lexicon pattern that is a suffix of `window`, plus an optional hedge
// word immediately before it.
inline std::optional<Classification> classify_expression(std::span<const std::string> window,
                                                         const ExtractionConfig& cfg) {
  const LexiconPattern* best = nullptr;
  for (const auto& p : cfg.patterns) {
    if (p.words.size() > window.size()) continue;
    if (!std::equal(p.words.begin(), p.words.end(), window.end() - static_cast<std::ptrdiff_t>(p.words.size())))
      continue;
    if (!best || p.words.size() > best->words.size()) best = &p;
  }
  if (!best) return std::nullopt;
  Classification c{best->relation, std::nullopt, best->words.size()};
  if (cfg.hedgeable.count(best->relation.kind) && window.size() > c.length) {
    auto h = cfg.hedges.find(window[window.size() - c.length - 1]);
    if (h != cfg.hedges.end()) {
      c.hedge = h->second;
      ++c.length;
    }
  }
  return c;
}

inline std::optional<Classification> classify_expression(std::span<const Token> window,
                                                         const ExtractionConfig& cfg) {
  std::vector<std::string> words;
  for (const auto& t : window) words.push_back(t.normalized);
  return classify_expression(std::span<const std::string>(words), cfg);
}

struct ToponymCandidate {
  ByteSpan span;
  std::string surface;
  std::vector<const PlaceEntry*> ambiguity;
};

struct ResolvedCandidate {
  std::string place_id;
  double confidence = 1.0;
};

inline double disambiguation_score(const PlaceEntry& e, bool containment_consistent,
                                   const DisambiguationWeights& w) {
  const double level_prior = static_cast<double>(level_ordinal(e.level)) /
                             static_cast<double>(level_ordinal(GranularityLevel::Country));
  return w.importance * e.importance + w.containment * (containment_consistent ? 1.0 : 0.0) +
         w.level * level_prior;
}

// Resolves each candidate to one place. Candidates sharing a surface form get
// the same referent. Unambiguous candidates resolve first and seed the context;
// ambiguous surfaces then resolve in order of first occurrence, each seeing the
// places resolved before it plus `context` (mentions resolved elsewhere).
inline std::vector<ResolvedCandidate> disambiguate(std::span<const ToponymCandidate> candidates,
                                                   const std::vector<std::string>& context,
                                                   const Gazetteer& gaz, const DisambiguationWeights& w) {
  std::map<std::string, ResolvedCandidate> by_surface;
  std::vector<std::string> order;
  std::vector<std::string> resolved = context;
  std::map<std::string, const ToponymCandidate*> first;
  for (const auto& c : candidates) {
    if (c.ambiguity.empty()) throw RangeError("empty ambiguity set for '" + c.surface + "'");
    if (first.emplace(c.surface, &c).second) order.push_back(c.surface);
  }
  for (const auto& s : order) {
    const auto* c = first[s];
    if (c->ambiguity.size() == 1) {
      by_surface[s] = {c->ambiguity.front()->place_id, 1.0};
      resolved.push_back(c->ambiguity.front()->place_id);
    }
  }
  for (const auto& s : order) {
    if (by_surface.count(s)) continue;
    const auto* c = first[s];
    std::vector<const PlaceEntry*> options = c->ambiguity;
    std::sort(options.begin(), options.end(),
              [](const PlaceEntry* a, const PlaceEntry* b) { return a->place_id < b->place_id; });
    double total = 0.0;
    double best_score = -1.0;
    const PlaceEntry* best = nullptr;
    for (const auto* e : options) {
      const bool consistent = std::any_of(resolved.begin(), resolved.end(),
                                          [&](const std::string& r) { return gaz.related(r, e->place_id); });
      const double score = disambiguation_score(*e, consistent, w);
      total += score;
      if (score > best_score) {
        best_score = score;
        best = e;
      }
    }
    const double conf = total > 0.0 ? best_score / total : 1.0 / static_cast<double>(options.size());
    by_surface[s] = {best->place_id, conf};
    resolved.push_back(best->place_id);
  }
  std::vector<ResolvedCandidate> out;
  out.reserve(candidates.size());
  for (const auto& c : candidates) out.push_back(by_surface.at(c.surface));
  return out;
}

namespace detail {

inline bool only_space_between(const std::string& raw, const Token& a, const Token& b) {
  for (std::size_t i = a.byte_end; i < b.byte_start; ++i) {
    const char ch = raw[i];
    if (!(ch == ' ' || ch == '\t' || ch == '\n' || ch == '\r')) return false;
  }
  return true;
}

struct RawCandidate {
  std::size_t first;  // token index
  std::size_t last;   // one past
  std::string surface;
};

inline std::vector<RawCandidate> find_toponyms(const Document& doc, const Gazetteer& gaz,
                                               const ExtractionConfig& cfg) {
  const auto& toks = doc.tokens;
  std::vector<RawCandidate> out;
  std::size_t i = 0;
  while (i < toks.size()) {
    bool cue = false;
    for (std::size_t k = 1; k <= cfg.cue_window && k <= i; ++k) cue = cue || cfg.cue_words.count(toks[i - k].normalized);
    const bool eligible = toks[i].is_capitalized || cue;
    std::size_t matched = 0;
    std::string key;
    if (eligible) {
      std::string acc;
      for (std::size_t len = 1; len <= cfg.max_toponym_tokens && i + len <= toks.size(); ++len) {
        if (len > 1 && !only_space_between(doc.raw_text, toks[i + len - 2], toks[i + len - 1])) break;
        acc += (len > 1 ? " " : "") + toks[i + len - 1].normalized;
        if (gaz.has_name(acc)) {
          matched = len;
          key = acc;
        }
      }
    }
    if (matched) {
      out.push_back({i, i + matched, key});
      i += matched;
    } else {
      ++i;
    }
  }
  return out;
}

}  // namespace detail

inline std::vector<SpatialMention> extract_mentions(const Document& doc, const Gazetteer& gaz,
                                                    const ExtractionConfig& cfg) {
  const auto& toks = doc.tokens;
  const auto raw = detail::find_toponyms(doc, gaz, cfg);

  std::vector<ToponymCandidate> cands;
  for (const auto& r : raw)
    cands.push_back({{toks[r.first].byte_start, toks[r.last - 1].byte_end}, r.surface, gaz.lookup(r.surface)});
  const auto resolved = disambiguate(cands, {}, gaz, cfg.weights);

  std::vector<SpatialMention> out;
  std::size_t floor = 0;  // first token not owned by an earlier mention
  for (std::size_t c = 0; c < raw.size(); ++c) {
    const auto& r = raw[c];
    SpatialMention m;
    m.doc_id = doc.doc_id;
    m.toponym_span = cands[c].span;
    m.span = m.toponym_span;
    m.surface = r.surface;
    m.place_id = resolved[c].place_id;
    m.confidence = resolved[c].confidence;
    m.granularity = gaz.granularity_of(m.place_id);

    for (std::size_t gap = 0; gap <= cfg.max_gap; ++gap) {
      if (r.first < floor + gap + 1) break;
      const std::size_t end = r.first - gap;
      const std::size_t begin = std::max(floor, end > cfg.max_window ? end - cfg.max_window : 0);
      auto cls = classify_expression(std::span<const Token>(toks.data() + begin, end - begin), cfg);
      if (!cls) continue;
      const std::size_t pstart = end - cls->length;
      std::string words;
      for (std::size_t k = pstart; k < end; ++k) words += (words.empty() ? "" : " ") + toks[k].normalized;
      m.pattern = words;
      m.span.start = toks[pstart].byte_start;
      if (cls->relation.kind != RelationKind::At) {
        m.relation = cls->relation;
        m.hedge = cls->hedge;
      }
      break;
    }
    floor = r.last;
    out.push_back(std::move(m));
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const SpatialMention& a, const SpatialMention& b) { return a.span.start < b.span.start; });
  return out;
}

}  // namespace fuzzgir
