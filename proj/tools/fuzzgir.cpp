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

// fuzzgir command line: ingest, index, query, explain.
//
// Exit codes: 0 success, 1 usage error (bad flags, missing paths),
// 2 data or integrity error.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "fuzzgir/fuzzgir.hpp"

namespace fs = std::filesystem;
using fuzzgir::Engine;
using fuzzgir::EngineConfig;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Everything a query needs, as stored by `index`.
struct Bundle {
  EngineConfig cfg;
  fuzzgir::Gazetteer gaz;
  fuzzgir::Corpus corpus;
  fuzzgir::TwoLevelIndex index;
};

Bundle load_bundle(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw UsageError("index directory not found: " + dir.string());
  Bundle b;
  std::ifstream in(dir / "config.json");
  if (!in) throw fuzzgir::IntegrityError("index is missing config.json");
  try {
    b.cfg = EngineConfig::from_snapshot(nlohmann::json::parse(in));
  } catch (const nlohmann::json::exception& e) {
    throw fuzzgir::IntegrityError(std::string("config.json: ") + e.what());
  }
  b.gaz = fuzzgir::Gazetteer::load(dir / "gazetteer.tsv", b.cfg.gazetteer);
  b.corpus = fuzzgir::Corpus::load(dir / "corpus");
  b.index = fuzzgir::TwoLevelIndex::load(dir, b.gaz, b.cfg.terms);
  return b;
}

int run_ingest(const std::string& corpus_path, const std::string& out) {
  if (!fs::exists(corpus_path)) throw UsageError("corpus input not found: " + corpus_path);
  fuzzgir::Corpus corpus;
  for (const auto& d : fuzzgir::read_corpus_input(corpus_path)) corpus.ingest(d.id, d.text);
  corpus.seal();
  corpus.save(out);
  std::cout << nlohmann::json{{"documents", corpus.size()}, {"vocabulary", corpus.stats().vocabulary_size()}}.dump(2)
            << "\n";
  return 0;
}

int run_index(const std::string& store, const std::string& gazetteer, const std::string& config,
              const std::string& out) {
  if (!fs::is_directory(store)) throw UsageError("corpus store not found: " + store);
  if (!fs::exists(gazetteer)) throw UsageError("gazetteer not found: " + gazetteer);
  if (!fs::is_directory(config)) throw UsageError("config directory not found: " + config);
  const auto cfg = EngineConfig::load_dir(config);
  const auto corpus = fuzzgir::Corpus::load(store);
  const auto gaz = fuzzgir::Gazetteer::load(gazetteer, cfg.gazetteer);
  auto mentions = fuzzgir::extract_corpus(corpus, gaz, cfg.extraction);
  std::size_t n_mentions = 0;
  for (const auto& [id, list] : mentions) n_mentions += list.size();
  const auto index = fuzzgir::build_index(corpus, std::move(mentions), gaz, cfg.terms, cfg.index);

  fs::create_directories(out);
  index.save(out);
  corpus.save(fs::path(out) / "corpus");
  fs::copy_file(gazetteer, fs::path(out) / "gazetteer.tsv", fs::copy_options::overwrite_existing);
  std::ofstream(fs::path(out) / "config.json") << cfg.to_json().dump(2) << "\n";
  std::cout << nlohmann::json{{"documents", index.n_docs()},
                              {"mentions", n_mentions},
                              {"spatial_terms", index.vocabulary_size()},
                              {"places", gaz.size()}}
                   .dump(2)
            << "\n";
  return 0;
}

std::string fmt(double v) {
  std::ostringstream ss;
  ss << std::fixed << std::setprecision(4) << v;
  return ss.str();
}

void write_explanation(std::ostream& os, const fuzzgir::RetrievalResult& r, const fuzzgir::Resolution* res,
                       const std::string& location_error) {
  const auto& p = r.plan;
  os << "query: " << p.text << "\n";
  os << "event terms:";
  for (const auto& t : p.event_terms) os << " " << t;
  os << "\nspatial part: " << (p.spatial_part ? p.spatial_part->term_key() : std::string("none")) << "\n";
  os << "granularity: " << fuzzgir::level_name(p.level) << " (cell " << r.candidates.cell_edge_deg
     << " deg, level2 " << (r.candidates.level2_consulted ? "consulted" : "skipped") << ", "
     << r.candidates.cells_probed << " cells probed)\n";
  os << "candidates: " << r.candidates.docs.size() << ", graded: " << r.graded << "\n";
  for (std::size_t i = 0; i < r.ranked.size(); ++i) {
    const auto& j = r.ranked[i];
    os << "\n#" << i + 1 << " " << j.doc_id << "  final=" << fmt(j.final_score) << "\n";
    os << "  swf_norm=" << fmt(j.swf_norm) << " gran_match=" << fmt(j.gran_match)
       << " expr_overlap=" << fmt(j.expr_overlap) << "\n";
    os << "  fuzzy=" << fmt(j.fuzzy_relevance) << (j.rules_fired ? "" : " (no rule fired)")
       << " thematic=" << fmt(j.thematic_cosine) << "\n";
    for (const auto& a : j.rule_trace)
      if (a.activation > 0.0) os << "    " << fmt(a.activation) << "  " << a.text << "\n";
  }
  os << "\n";
  if (res) {
    os << "location: " << fmt(res->location.point.lon) << ", " << fmt(res->location.point.lat)
       << " (max pi " << fmt(res->location.max_pi) << ", " << res->evidence.size() << " evidence mentions)\n";
    os << "most certain cells: " << res->certainty.most_certain.cells
       << ", least certain cells: " << res->certainty.least_certain.cells << "\n";
  } else {
    os << "location: unresolved (" << location_error << ")\n";
  }
}

struct QueryArgs {
  std::string index;
  std::string text;
  std::optional<std::size_t> top;
  std::optional<std::string> fusion;
  std::string emit;
  bool explain = false;
  bool raster = false;
};

int run_query(const QueryArgs& a, bool explain_mode) {
  const auto b = load_bundle(a.index);
  Engine engine(b.corpus, b.gaz, b.index, b.cfg);
  auto plan = engine.parse_query(a.text);
  if (a.top) {
    if (*a.top < 1) throw UsageError("--top must be at least 1");
    plan.top_k = *a.top;
  }
  if (a.fusion) plan.fusion = fuzzgir::FusionMode{fuzzgir::parse_fusion(*a.fusion), {}};
  const auto result = engine.retrieve(plan);

  std::optional<fuzzgir::Resolution> res;
  std::string location_error;
  try {
    res = engine.resolve_event_location(result);
  } catch (const fuzzgir::NoLocationError& e) {
    location_error = e.what();
  }

  if (explain_mode) {
    write_explanation(std::cout, result, res ? &*res : nullptr, location_error);
    return 0;
  }
  std::cout << fuzzgir::report_to_json(result, res ? &*res : nullptr, location_error).dump(2) << "\n";
  if (a.explain) write_explanation(std::cerr, result, res ? &*res : nullptr, location_error);
  if (!a.emit.empty() && res) {
    std::ofstream out(a.emit, std::ios::binary);
    if (!out) throw fuzzgir::Error("cannot write " + a.emit);
    out << fuzzgir::emit_geojson(*res, {a.raster, 6}).dump(2) << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fuzzgir: fuzzy geographic information retrieval"};
  app.require_subcommand(1);

  std::string corpus_in, store_out;
  auto* ingest = app.add_subcommand("ingest", "Tokenize a corpus into a document store");
  ingest->add_option("--corpus", corpus_in, "Directory of .txt files or a JSONL file of {id, text}")->required();
  ingest->add_option("--out", store_out, "Output store directory")->required();

  std::string store, gazetteer, config, index_out;
  auto* index = app.add_subcommand("index", "Extract spatial mentions and build the index");
  index->add_option("--store", store, "Document store written by ingest")->required();
  index->add_option("--gazetteer", gazetteer, "Gazetteer TSV")->required();
  index->add_option("--config", config, "Config directory")->required();
  index->add_option("--out", index_out, "Output index directory")->required();

  QueryArgs qa;
  auto add_query_opts = [&](CLI::App* sub) {
    sub->add_option("--index", qa.index, "Index directory")->required();
    sub->add_option("text", qa.text, "Query text")->required();
    sub->add_option("--top", qa.top, "Number of ranked documents");
    sub->add_option("--fusion", qa.fusion, "Fusion mode")->check(CLI::IsMember({"min", "max", "avg"}));
  };
  auto* query = app.add_subcommand("query", "Rank documents and resolve the event location");
  add_query_opts(query);
  query->add_option("--emit", qa.emit, "Write the resolved location as GeoJSON");
  query->add_flag("--explain", qa.explain, "Print rule traces and scores to stderr");
  query->add_flag("--raster", qa.raster, "Include the possibility raster in the GeoJSON");
  auto* explain = app.add_subcommand("explain", "Print rule traces and per-component scores");
  add_query_opts(explain);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*ingest) return run_ingest(corpus_in, store_out);
    if (*index) return run_index(store, gazetteer, config, index_out);
    if (*query) return run_query(qa, false);
    if (*explain) return run_query(qa, true);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const fuzzgir::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
