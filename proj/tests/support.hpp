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

// Fixture loading and independent oracles shared by the test binaries. The
// oracles re-derive values from first principles and never call into the
// library code they check.

#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>
#include <memory>
#include <numbers>
#include <string>
#include <vector>

#include "fuzzgir/fuzzgir.hpp"

namespace testing {

inline std::filesystem::path data_dir() { return FUZZGIR_DATA_DIR; }
inline std::filesystem::path config_dir() { return FUZZGIR_CONFIG_DIR; }

inline fuzzgir::Corpus load_corpus(const std::string& file) {
  fuzzgir::Corpus c;
  for (const auto& d : fuzzgir::read_corpus_input(data_dir() / file)) c.ingest(d.id, d.text);
  c.seal();
  return c;
}

// Corpus, gazetteer, index and engine built from one fixture corpus.
struct Pipeline {
  fuzzgir::EngineConfig cfg;
  fuzzgir::Gazetteer gaz;
  fuzzgir::Corpus corpus;
  fuzzgir::TwoLevelIndex index;
  std::unique_ptr<fuzzgir::Engine> engine;

  explicit Pipeline(const std::string& corpus_file, fuzzgir::EngineConfig c = fuzzgir::EngineConfig::load_dir(config_dir()))
      : cfg(std::move(c)),
        gaz(fuzzgir::Gazetteer::load(data_dir() / "gazetteer.tsv", cfg.gazetteer)),
        corpus(load_corpus(corpus_file)) {
    index = fuzzgir::build_index(corpus, fuzzgir::extract_corpus(corpus, gaz, cfg.extraction), gaz, cfg.terms,
                                 cfg.index);
    engine = std::make_unique<fuzzgir::Engine>(corpus, gaz, index, cfg);
  }
};

inline const Pipeline& main_pipeline() {
  static const Pipeline p("corpus.jsonl");
  return p;
}

inline const Pipeline& mini_pipeline() {
  static const Pipeline p("mini_corpus.jsonl");
  return p;
}

namespace oracle {

constexpr double kR = 6371.0088;
constexpr double kPi = std::numbers::pi;

// Spherical law of haversines, written out independently.
inline double distance_km(double lon1, double lat1, double lon2, double lat2) {
  const double p1 = lat1 * kPi / 180.0, p2 = lat2 * kPi / 180.0;
  const double dp = p2 - p1, dl = (lon2 - lon1) * kPi / 180.0;
  const double h = std::pow(std::sin(dp / 2), 2) + std::cos(p1) * std::cos(p2) * std::pow(std::sin(dl / 2), 2);
  return 2.0 * kR * std::asin(std::min(1.0, std::sqrt(h)));
}

inline double trapezoid(double a, double b, double c, double d, double x) {
  if (x < a || x > d) return 0.0;
  if (x >= b && x <= c) return 1.0;
  if (x < b) return b > a ? (x - a) / (b - a) : 1.0;
  return d > c ? (d - x) / (d - c) : 1.0;
}

inline double triangle(double center, double half, double x) {
  return std::max(0.0, 1.0 - std::fabs(x - center) / half);
}

// Mamdani with min conjunction, clipping, max aggregation, centroid, on a
// sample grid of `n` points (trapezoid rule).
struct OracleRule {
  std::vector<double> antecedent_mu;  // memberships of each clause
  double center, half;                // triangular consequent
};

inline double mamdani_centroid(const std::vector<OracleRule>& rules, int n) {
  double num = 0.0, den = 0.0;
  for (int k = 0; k < n; ++k) {
    const double x = static_cast<double>(k) / (n - 1);
    const double wgt = (k == 0 || k == n - 1) ? 0.5 : 1.0;
    double agg = 0.0;
    for (const auto& r : rules) {
      const double act = *std::min_element(r.antecedent_mu.begin(), r.antecedent_mu.end());
      agg = std::max(agg, std::min(act, triangle(r.center, r.half, x)));
    }
    num += wgt * x * agg;
    den += wgt * agg;
  }
  return num / den;
}

}  // namespace oracle

}  // namespace testing
