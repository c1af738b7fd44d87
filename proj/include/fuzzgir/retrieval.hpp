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

// Query pipeline: parse, pick the granulation level, select candidates, grade
// with the rule base, rank, then fuse the surfaces of the top documents into a
// single event location.

#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "fuzzgir/config.hpp"
#include "fuzzgir/corpus.hpp"
#include "fuzzgir/error.hpp"
#include "fuzzgir/extractor.hpp"
#include "fuzzgir/gazetteer.hpp"
#include "fuzzgir/index.hpp"
#include "fuzzgir/rules.hpp"
#include "fuzzgir/surface.hpp"

namespace fuzzgir {

struct QueryPlan {
  std::string text;
  std::vector<std::string> event_terms;
  std::optional<SpatialMention> spatial_part;
  std::vector<SpatialMention> mentions;  // every spatial expression found in the query
  GranularityLevel level = GranularityLevel::Country;
  std::size_t top_k = 5;
  FusionMode fusion;

  // Keys a document term must carry to count as query-matching.
  std::vector<std::string> spatial_keys() const {
    if (!spatial_part) return {};
    std::vector<std::string> k{spatial_part->term_key()};
    if (spatial_part->is_relative()) k.push_back(spatial_part->place_id);
    return k;
  }
};

inline GranularityLevel detect_granulation(const QueryPlan& plan, GranularityLevel default_level) {
  return plan.spatial_part ? plan.spatial_part->granularity : default_level;
}

// The finest-grained expression becomes the spatial part; tokens outside every
// expression become event terms.
inline QueryPlan parse_query(const std::string& text, const Gazetteer& gaz, const EngineConfig& cfg) {
  Document q;
  q.doc_id = "query";
  q.raw_text = text;
  q.tokens = text::tokenize(text);
  if (q.tokens.empty()) throw RangeError("empty query");

  QueryPlan plan;
  plan.text = text;
  plan.mentions = extract_mentions(q, gaz, cfg.extraction);
  for (const auto& m : plan.mentions)
    if (!plan.spatial_part || level_ordinal(m.granularity) < level_ordinal(plan.spatial_part->granularity))
      plan.spatial_part = m;
  for (const auto& t : q.tokens) {
    const bool covered = std::any_of(plan.mentions.begin(), plan.mentions.end(), [&](const SpatialMention& m) {
      return t.byte_start >= m.span.start && t.byte_end <= m.span.end;
    });
    if (!covered) plan.event_terms.push_back(t.normalized);
  }
  plan.level = detect_granulation(plan, cfg.retrieval.default_level);
  plan.top_k = cfg.retrieval.top_k;
  plan.fusion = FusionMode{cfg.retrieval.fusion, {}};
  return plan;
}

struct RelevanceJudgment {
  std::string doc_id;
  double swf_norm = 0.0;
  double gran_match = 0.0;
  double expr_overlap = 0.0;
  double fuzzy_relevance = 0.0;
  bool rules_fired = false;
  double thematic_cosine = 0.0;
  double final_score = 0.0;
  std::vector<fuzzy::RuleActivation> rule_trace;
};

struct RetrievalResult {
  QueryPlan plan;
  std::vector<RelevanceJudgment> ranked;
  CandidateResult candidates;
  std::size_t graded = 0;
};

struct Evidence {
  std::string doc_id;
  SpatialMention mention;
  double weight = 0.0;
  LonLat point;
};

struct Resolution {
  Grid grid;
  Defuzzified location;
  CertaintyReport certainty;
  std::vector<Evidence> evidence;
  FusionMode mode;
};

// Read-only view over a sealed corpus, its gazetteer and index.
class Engine {
 public:
  Engine(const Corpus& corpus, const Gazetteer& gaz, const TwoLevelIndex& index, EngineConfig cfg)
      : corpus_(corpus), gaz_(gaz), index_(index), cfg_(std::move(cfg)) {
    std::vector<std::string> ids;
    for (const auto& [id, d] : corpus_.documents()) ids.push_back(id);
    if (ids != index_.doc_ids()) throw IntegrityError("index and corpus cover different documents");
    const auto n = static_cast<double>(corpus_.size());
    for (const auto& [id, d] : corpus_.documents()) {
      double norm = 0.0;
      for (const auto& [term, tf] : d.term_counts()) {
        const double w = static_cast<double>(tf) * idf(term, n);
        norm += w * w;
        postings_[term].insert(id);
      }
      doc_norm_[id] = std::sqrt(norm);
    }
  }

  const EngineConfig& config() const { return cfg_; }
  const TwoLevelIndex& index() const { return index_; }
  const Gazetteer& gazetteer() const { return gaz_; }

  QueryPlan parse_query(const std::string& text) const { return fuzzgir::parse_query(text, gaz_, cfg_); }

  std::optional<PossibilitySurface> query_surface(const QueryPlan& plan) const {
    if (!plan.spatial_part) return std::nullopt;
    return mention_surface(*plan.spatial_part, gaz_, cfg_.terms);
  }

  double gran_match(const QueryPlan& plan, const std::vector<SpatialMention>& mentions) const {
    double best = 0.0;
    const auto& table = cfg_.retrieval.gran_table;
    for (const auto& m : mentions) {
      const auto diff = static_cast<std::size_t>(std::abs(level_ordinal(m.granularity) - level_ordinal(plan.level)));
      double v = table[std::min(diff, table.size() - 1)];
      if (plan.spatial_part && gaz_.related(m.place_id, plan.spatial_part->place_id))
        v = std::max(v, cfg_.retrieval.containment_floor);
      best = std::max(best, v);
    }
    return best;
  }

  double thematic_cosine(const QueryPlan& plan, const std::string& doc_id) const {
    if (plan.event_terms.empty()) return 0.0;
    const auto n = static_cast<double>(corpus_.size());
    std::map<std::string, double> q;
    for (const auto& t : plan.event_terms)
      if (corpus_.document_frequency(t) > 0) q[t] += 1.0;
    double qn = 0.0;
    for (auto& [t, w] : q) {
      w *= idf(t, n);
      qn += w * w;
    }
    const double dn = doc_norm_.at(doc_id);
    if (qn <= 0.0 || dn <= 0.0) return 0.0;
    const auto tf = corpus_.get(doc_id).term_counts();
    double dot = 0.0;
    for (const auto& [t, w] : q) {
      auto it = tf.find(t);
      if (it != tf.end()) dot += w * static_cast<double>(it->second) * idf(t, n);
    }
    return std::clamp(dot / (std::sqrt(qn) * dn), 0.0, 1.0);
  }

  RelevanceJudgment grade_document(const QueryPlan& plan, const std::string& doc_id) const {
    if (!index_.has_doc(doc_id)) throw UnknownIdError("document not indexed: " + doc_id);
    RelevanceJudgment j;
    j.doc_id = doc_id;
    const auto& mentions = index_.doc_mentions(doc_id);

    const auto keys = plan.spatial_keys();
    double doc_max = 0.0, corpus_max = 0.0;
    for (const auto& k : keys) {
      doc_max = std::max(doc_max, index_.vector(doc_id).weight(k));
      auto it = index_.level1().find(k);
      if (it == index_.level1().end()) continue;
      for (const auto& [d, sf] : it->second) corpus_max = std::max(corpus_max, index_.vector(d).weight(k));
    }
    j.swf_norm = corpus_max > 0.0 ? std::clamp(doc_max / corpus_max, 0.0, 1.0) : 0.0;
    j.gran_match = gran_match(plan, mentions);
    if (const auto qs = query_surface(plan)) {
      const auto key = plan.spatial_part->term_key();
      for (const auto& m : mentions) {
        const double v = m.term_key() == key
                             ? 1.0
                             : possibility_at(*qs, representative_point(mention_surface(m, gaz_, cfg_.terms)));
        j.expr_overlap = std::max(j.expr_overlap, v);
      }
    }
    const auto inf = cfg_.rules.infer({{"swf", j.swf_norm}, {"gran", j.gran_match}, {"overlap", j.expr_overlap}});
    j.rules_fired = inf.value.has_value();
    j.fuzzy_relevance = inf.value.value_or(0.0);
    j.rule_trace = inf.trace;
    j.thematic_cosine = thematic_cosine(plan, doc_id);
    const double beta = cfg_.retrieval.beta;
    j.final_score = std::clamp(beta * j.fuzzy_relevance + (1.0 - beta) * j.thematic_cosine, 0.0, 1.0);
    return j;
  }

  // A document is a match when it shares a spatial key with the query, carries
  // a mention the query surface reaches, or contains an event term.
  static bool is_match(const RelevanceJudgment& j) {
    return j.swf_norm > 0.0 || j.expr_overlap > 0.0 || j.thematic_cosine > 0.0;
  }

  CandidateResult candidates(const QueryPlan& plan) const {
    std::optional<BBox> region;
    if (const auto qs = query_surface(plan)) region = support_bbox(*qs);
    auto c = index_.candidates(region, plan.level, plan.spatial_keys());
    for (const auto& t : plan.event_terms) {
      auto it = postings_.find(t);
      if (it != postings_.end()) c.docs.insert(it->second.begin(), it->second.end());
    }
    return c;
  }

  // With `prune` off every document is graded; the ranking must not change.
  RetrievalResult retrieve(const QueryPlan& plan, bool prune = true) const {
    RetrievalResult r;
    r.plan = plan;
    r.candidates = candidates(plan);
    std::vector<std::string> pool;
    if (prune) pool.assign(r.candidates.docs.begin(), r.candidates.docs.end());
    else pool = index_.doc_ids();
    for (const auto& id : pool) {
      auto j = grade_document(plan, id);
      ++r.graded;
      if (is_match(j)) r.ranked.push_back(std::move(j));
    }
    std::sort(r.ranked.begin(), r.ranked.end(), [](const RelevanceJudgment& a, const RelevanceJudgment& b) {
      if (a.final_score != b.final_score) return a.final_score > b.final_score;
      return a.doc_id < b.doc_id;
    });
    if (r.ranked.size() > plan.top_k) r.ranked.resize(plan.top_k);
    return r;
  }

  // Mentions of the ranked documents that bear on the query, weighted by the
  // document's final score. Without a spatial part every mention counts.
  std::vector<Evidence> evidence(const RetrievalResult& r) const {
    std::vector<Evidence> out;
    const auto qs = query_surface(r.plan);
    const auto keys = r.plan.spatial_keys();
    for (const auto& j : r.ranked) {
      for (const auto& m : index_.doc_mentions(j.doc_id)) {
        const auto s = mention_surface(m, gaz_, cfg_.terms);
        const auto p = representative_point(s);
        bool use = !qs;
        if (qs) {
          use = std::find(keys.begin(), keys.end(), m.term_key()) != keys.end() ||
                m.place_id == r.plan.spatial_part->place_id || possibility_at(*qs, p) > 0.0;
        }
        if (use) out.push_back({j.doc_id, m, j.final_score, p});
      }
    }
    return out;
  }

  Resolution resolve_event_location(const RetrievalResult& r) const {
    Resolution res;
    res.evidence = evidence(r);
    if (res.evidence.empty()) throw NoLocationError("no spatial evidence among the ranked documents");
    std::vector<PossibilitySurface> surfaces;
    std::vector<double> weights;
    for (const auto& e : res.evidence) {
      surfaces.push_back(mention_surface(e.mention, gaz_, cfg_.terms));
      weights.push_back(e.weight);
    }
    res.mode = r.plan.fusion;
    if (res.mode.kind == FusionMode::Kind::WeightedAverage) {
      res.mode.weights = weights;
      double total = 0.0;
      for (double w : weights) total += w;
      if (!(total > 0.0)) res.mode.weights.assign(weights.size(), 1.0);
    }
    res.grid = fuse(surfaces, res.mode, cfg_.grid);
    res.location = defuzzify(res.grid);
    res.certainty = certainty_report(res.grid, cfg_.retrieval.certainty_high, cfg_.retrieval.certainty_low);
    return res;
  }

 private:
  double idf(const std::string& term, double n) const {
    const auto df = corpus_.document_frequency(term);
    return df > 0 ? std::log2(n / static_cast<double>(df)) + 1.0 : 0.0;
  }

  const Corpus& corpus_;
  const Gazetteer& gaz_;
  const TwoLevelIndex& index_;
  EngineConfig cfg_;
  std::map<std::string, std::set<std::string>> postings_;
  std::map<std::string, double> doc_norm_;
};

inline nlohmann::json bbox_json(const std::optional<BBox>& b) {
  if (!b) return nullptr;
  return {b->min_lon, b->min_lat, b->max_lon, b->max_lat};
}

inline nlohmann::json plan_to_json(const QueryPlan& p) {
  return {{"text", p.text},
          {"event_terms", p.event_terms},
          {"spatial_part", p.spatial_part ? mention_to_json(*p.spatial_part) : nlohmann::json(nullptr)},
          {"level", level_name(p.level)},
          {"top_k", p.top_k},
          {"fusion", fusion_name(p.fusion.kind)}};
}

inline nlohmann::json judgment_to_json(const RelevanceJudgment& j, std::size_t rank) {
  nlohmann::json trace = nlohmann::json::array();
  for (const auto& a : j.rule_trace) trace.push_back({{"rule", a.text}, {"activation", a.activation}});
  return {{"rank", rank},
          {"doc_id", j.doc_id},
          {"swf_norm", j.swf_norm},
          {"gran_match", j.gran_match},
          {"expr_overlap", j.expr_overlap},
          {"fuzzy_relevance", j.fuzzy_relevance},
          {"rules_fired", j.rules_fired},
          {"thematic_cosine", j.thematic_cosine},
          {"final_score", j.final_score},
          {"rule_trace", trace}};
}

inline nlohmann::json resolution_to_json(const Resolution& r) {
  nlohmann::json ring = nlohmann::json::array();
  for (const auto& v : r.location.footprint) ring.push_back({v.lon, v.lat});
  nlohmann::json ev = nlohmann::json::array();
  for (const auto& e : r.evidence)
    ev.push_back({{"doc_id", e.doc_id}, {"key", e.mention.term_key()}, {"weight", e.weight}, {"point", {e.point.lon, e.point.lat}}});
  return {{"point", {r.location.point.lon, r.location.point.lat}},
          {"max_pi", r.location.max_pi},
          {"footprint_alpha", r.location.footprint_alpha},
          {"footprint", ring},
          {"fusion", fusion_name(r.mode.kind)},
          {"grid", {{"cell_deg", r.grid.edge}, {"nx", r.grid.nx}, {"ny", r.grid.ny}}},
          {"evidence", ev},
          {"certainty",
           {{"high", r.certainty.high},
            {"low", r.certainty.low},
            {"most_certain", {{"cells", r.certainty.most_certain.cells}, {"bbox", bbox_json(r.certainty.most_certain.bbox)}}},
            {"least_certain",
             {{"cells", r.certainty.least_certain.cells}, {"bbox", bbox_json(r.certainty.least_certain.bbox)}}}}}};
}

// Full query report. `resolution` is null when no location could be resolved;
// `location_error` then carries the reason.
inline nlohmann::json report_to_json(const RetrievalResult& r, const Resolution* resolution,
                                     const std::string& location_error) {
  nlohmann::json ranked = nlohmann::json::array();
  for (std::size_t i = 0; i < r.ranked.size(); ++i) ranked.push_back(judgment_to_json(r.ranked[i], i + 1));
  return {{"query", plan_to_json(r.plan)},
          {"candidates",
           {{"count", r.candidates.docs.size()},
            {"graded", r.graded},
            {"level", level_name(r.candidates.level)},
            {"cell_edge_deg", r.candidates.cell_edge_deg},
            {"cells_probed", r.candidates.cells_probed},
            {"level2_consulted", r.candidates.level2_consulted}}},
          {"results", ranked},
          {"location", resolution ? resolution_to_json(*resolution) : nlohmann::json(nullptr)},
          {"location_error", resolution ? nlohmann::json(nullptr) : nlohmann::json(location_error)}};
}

}  // namespace fuzzgir
