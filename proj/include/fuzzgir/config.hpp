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

// Engine configuration. A config directory holds fuzzy.json, extraction.json,
// retrieval.json, index.json and gazetteer.json; missing files or keys keep
// the built-in defaults.

#pragma once

#include <array>
#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

#include "fuzzgir/error.hpp"
#include "fuzzgir/extractor.hpp"
#include "fuzzgir/fuzzy.hpp"
#include "fuzzgir/gazetteer.hpp"
#include "fuzzgir/index.hpp"
#include "fuzzgir/rules.hpp"
#include "fuzzgir/surface.hpp"

namespace fuzzgir {

struct RetrievalConfig {
  double beta = 0.6;
  std::size_t top_k = 5;
  FusionMode::Kind fusion = FusionMode::Kind::WeightedAverage;
  GranularityLevel default_level = GranularityLevel::Country;
  std::array<double, 4> gran_table = {1.0, 0.7, 0.4, 0.2};  // by |level difference|, last entry for >= 3
  double containment_floor = 0.7;
  double certainty_high = 0.8;
  double certainty_low = 0.3;

  static RetrievalConfig from_json(const nlohmann::json& j) {
    RetrievalConfig c;
    try {
      c.beta = j.value("beta", c.beta);
      c.top_k = j.value("top_k", c.top_k);
      if (j.contains("fusion")) c.fusion = parse_fusion(j.at("fusion").get<std::string>());
      if (j.contains("default_level")) {
        auto l = parse_level(j.at("default_level").get<std::string>());
        if (!l) throw FormatError("unknown default_level");
        c.default_level = *l;
      }
      if (j.contains("gran_table")) {
        auto v = j.at("gran_table").get<std::vector<double>>();
        if (v.size() != c.gran_table.size()) throw FormatError("gran_table needs 4 entries");
        std::copy(v.begin(), v.end(), c.gran_table.begin());
      }
      c.containment_floor = j.value("containment_floor", c.containment_floor);
      if (j.contains("certainty")) {
        c.certainty_high = j.at("certainty").value("high", c.certainty_high);
        c.certainty_low = j.at("certainty").value("low", c.certainty_low);
      }
    } catch (const nlohmann::json::exception& e) {
      throw FormatError(std::string("bad retrieval config: ") + e.what());
    }
    if (!(c.beta >= 0.0 && c.beta <= 1.0)) throw FormatError("beta must lie in [0, 1]");
    if (c.top_k < 1) throw FormatError("top_k must be at least 1");
    for (double g : c.gran_table)
      if (!(g >= 0.0 && g <= 1.0)) throw FormatError("gran_table entries must lie in [0, 1]");
    return c;
  }

  nlohmann::json to_json() const {
    return {{"beta", beta},
            {"top_k", top_k},
            {"fusion", fusion_name(fusion)},
            {"default_level", level_name(default_level)},
            {"gran_table", gran_table},
            {"containment_floor", containment_floor},
            {"certainty", {{"high", certainty_high}, {"low", certainty_low}}}};
  }
};

inline TermParams term_params_from_json(const nlohmann::json& j) {
  TermParams p;
  try {
    if (j.contains("at")) p.at = fuzzy::set_from_json(j.at("at"));
    if (j.contains("near")) p.near = fuzzy::set_from_json(j.at("near"));
    if (j.contains("walking")) p.walking = fuzzy::set_from_json(j.at("walking"));
    if (j.contains("far")) p.far = fuzzy::set_from_json(j.at("far"));
    if (j.contains("cardinal")) {
      const auto& c = j.at("cardinal");
      if (c.contains("envelope")) p.cardinal_envelope = fuzzy::set_from_json(c.at("envelope"));
      p.cardinal_core_deg = c.value("core_deg", p.cardinal_core_deg);
      p.cardinal_support_deg = c.value("support_deg", p.cardinal_support_deg);
      if (c.contains("tnorm")) p.cardinal_tnorm = fuzzy::parse_tnorm(c.at("tnorm").get<std::string>());
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("bad term parameters: ") + e.what());
  }
  if (!(p.cardinal_core_deg >= 0.0 && p.cardinal_core_deg <= p.cardinal_support_deg && p.cardinal_support_deg <= 180.0))
    throw FormatError("cardinal angles must satisfy 0 <= core <= support <= 180");
  return p;
}

inline nlohmann::json term_params_to_json(const TermParams& p) {
  return {{"at", fuzzy::set_to_json(p.at)},
          {"near", fuzzy::set_to_json(p.near)},
          {"walking", fuzzy::set_to_json(p.walking)},
          {"far", fuzzy::set_to_json(p.far)},
          {"cardinal",
           {{"envelope", fuzzy::set_to_json(p.cardinal_envelope)},
            {"core_deg", p.cardinal_core_deg},
            {"support_deg", p.cardinal_support_deg},
            {"tnorm", fuzzy::tnorm_name(p.cardinal_tnorm)}}}};
}

inline GridOptions grid_options_from_json(const nlohmann::json& j) {
  GridOptions g;
  try {
    g.cell_deg = j.value("cell_deg", g.cell_deg);
    g.max_cells_per_axis = j.value("max_cells_per_axis", g.max_cells_per_axis);
    g.clip_alpha = j.value("clip_alpha", g.clip_alpha);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("bad grid options: ") + e.what());
  }
  if (!(g.cell_deg > 0.0) || g.max_cells_per_axis < 1 || !(g.clip_alpha > 0.0 && g.clip_alpha <= 1.0))
    throw FormatError("grid options out of range");
  return g;
}

inline nlohmann::json grid_options_to_json(const GridOptions& g) {
  return {{"cell_deg", g.cell_deg}, {"max_cells_per_axis", g.max_cells_per_axis}, {"clip_alpha", g.clip_alpha}};
}

inline GazetteerOptions gazetteer_options_from_json(const nlohmann::json& j) {
  GazetteerOptions o;
  try {
    if (j.contains("default_radius_km"))
      for (auto lvl : kAllLevels) {
        const auto name = std::string(level_name(lvl));
        if (j.at("default_radius_km").contains(name))
          o.default_radius_km[level_ordinal(lvl)] = j.at("default_radius_km").at(name).get<double>();
      }
    o.default_importance = j.value("default_importance", o.default_importance);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("bad gazetteer options: ") + e.what());
  }
  return o;
}

inline nlohmann::json gazetteer_options_to_json(const GazetteerOptions& o) {
  nlohmann::json j;
  for (auto lvl : kAllLevels)
    j["default_radius_km"][std::string(level_name(lvl))] = o.default_radius_km[level_ordinal(lvl)];
  j["default_importance"] = o.default_importance;
  return j;
}

struct EngineConfig {
  TermParams terms;
  GridOptions grid;
  fuzzy::FuzzyRuleBase rules = fuzzy::FuzzyRuleBase::relevance_default();
  ExtractionConfig extraction = ExtractionConfig::defaults();
  RetrievalConfig retrieval;
  IndexOptions index;
  GazetteerOptions gazetteer;

  static EngineConfig load_dir(const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir)) throw FormatError("config directory not found: " + dir.string());
    auto read = [&](const char* name) -> nlohmann::json {
      const auto p = dir / name;
      if (!std::filesystem::exists(p)) return nlohmann::json::object();
      std::ifstream in(p);
      try {
        return nlohmann::json::parse(in);
      } catch (const nlohmann::json::exception& e) {
        throw FormatError(p.string() + ": " + e.what());
      }
    };
    EngineConfig c;
    const auto fz = read("fuzzy.json");
    if (fz.contains("terms")) c.terms = term_params_from_json(fz.at("terms"));
    if (fz.contains("grid")) c.grid = grid_options_from_json(fz.at("grid"));
    if (fz.contains("rule_base")) c.rules = fuzzy::FuzzyRuleBase::from_json(fz.at("rule_base"));
    c.extraction = ExtractionConfig::from_json(read("extraction.json"));
    c.retrieval = RetrievalConfig::from_json(read("retrieval.json"));
    c.index = IndexOptions::from_json(read("index.json"));
    c.gazetteer = gazetteer_options_from_json(read("gazetteer.json"));
    return c;
  }

  // Fully resolved snapshot, as stored next to a built index.
  nlohmann::json to_json() const {
    return {{"fuzzy",
             {{"terms", term_params_to_json(terms)},
              {"grid", grid_options_to_json(grid)},
              {"rule_base", rules.to_json()}}},
            {"extraction", extraction.to_json()},
            {"retrieval", retrieval.to_json()},
            {"index", index.to_json()},
            {"gazetteer", gazetteer_options_to_json(gazetteer)}};
  }

  static EngineConfig from_snapshot(const nlohmann::json& j) {
    EngineConfig c;
    try {
      const auto& fz = j.at("fuzzy");
      c.terms = term_params_from_json(fz.at("terms"));
      c.grid = grid_options_from_json(fz.at("grid"));
      c.rules = fuzzy::FuzzyRuleBase::from_json(fz.at("rule_base"));
      c.extraction = extraction_from_snapshot(j.at("extraction"));
      c.retrieval = RetrievalConfig::from_json(j.at("retrieval"));
      c.index = IndexOptions::from_json(j.at("index"));
      c.gazetteer = gazetteer_options_from_json(j.at("gazetteer"));
    } catch (const nlohmann::json::exception& e) {
      throw FormatError(std::string("bad config snapshot: ") + e.what());
    }
    return c;
  }
};

}  // namespace fuzzgir
