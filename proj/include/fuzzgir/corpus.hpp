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
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "fuzzgir/error.hpp"
#include "fuzzgir/text.hpp"

namespace fuzzgir {

using text::Token;

struct Document {
  std::string doc_id;
  std::string raw_text;
  std::vector<Token> tokens;

  std::size_t length() const { return tokens.size(); }

  std::map<std::string, std::int64_t> term_counts() const {
    std::map<std::string, std::int64_t> tf;
    for (const auto& t : tokens) ++tf[t.normalized];
    return tf;
  }
};

struct CorpusStats {
  std::int64_t n_docs = 0;
  std::map<std::string, std::int64_t> df;

  std::int64_t document_frequency(const std::string& term) const {
    auto it = df.find(term);
    return it == df.end() ? 0 : it->second;
  }
  std::size_t vocabulary_size() const { return df.size(); }

  friend bool operator==(const CorpusStats&, const CorpusStats&) = default;
};

// Document store with incremental corpus statistics. Single writer until
// seal(); afterwards the corpus is read-only and safe to share across threads.
class Corpus {
 public:
  const Document& ingest(const std::string& doc_id, const std::string& raw_text) {
    if (sealed_) throw StateError("corpus is sealed; cannot ingest '" + doc_id + "'");
    if (doc_id.empty()) throw IdentifierError("document id must be non-empty");
    if (!text::is_valid_utf8(raw_text))
      throw EncodingError("document '" + doc_id + "' is not valid UTF-8");

    Document doc{doc_id, raw_text, text::tokenize(raw_text)};
    if (auto it = docs_.find(doc_id); it != docs_.end()) {
      remove_terms(it->second);
      --stats_.n_docs;
    }
    add_terms(doc);
    ++stats_.n_docs;
    auto& stored = docs_[doc_id] = std::move(doc);
    check_stats();
    return stored;
  }

  void seal() { sealed_ = true; }
  bool sealed() const { return sealed_; }

  const Document* find(const std::string& doc_id) const {
    auto it = docs_.find(doc_id);
    return it == docs_.end() ? nullptr : &it->second;
  }
  const Document& get(const std::string& doc_id) const {
    if (const auto* d = find(doc_id)) return *d;
    throw UnknownIdError("unknown document '" + doc_id + "'");
  }

  const std::map<std::string, Document>& documents() const { return docs_; }
  const CorpusStats& stats() const { return stats_; }
  std::int64_t size() const { return stats_.n_docs; }

  std::int64_t document_frequency(const std::string& term) const {
    return stats_.document_frequency(term);
  }

  // Writes <dir>/docs.jsonl and <dir>/stats.json.
  void save(const std::filesystem::path& dir) const {
    std::filesystem::create_directories(dir);
    std::ofstream docs(dir / "docs.jsonl", std::ios::binary);
    for (const auto& [id, d] : docs_) {
      nlohmann::json j;
      j["id"] = id;
      j["text"] = d.raw_text;
      j["length"] = d.length();
      docs << j.dump() << '\n';
    }
    nlohmann::json s;
    s["n_docs"] = stats_.n_docs;
    s["df"] = stats_.df;
    std::ofstream(dir / "stats.json", std::ios::binary) << s.dump(1) << '\n';
    if (!docs) throw Error("failed writing corpus store to " + dir.string());
  }

  // Re-ingests every stored document and checks the result against the stored
  // statistics. The returned corpus is sealed.
  static Corpus load(const std::filesystem::path& dir) {
    Corpus c;
    std::ifstream docs(dir / "docs.jsonl", std::ios::binary);
    if (!docs) throw IntegrityError("missing " + (dir / "docs.jsonl").string());
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(docs, line)) {
      ++lineno;
      if (line.empty()) continue;
      try {
        auto j = nlohmann::json::parse(line);
        const auto& d = c.ingest(j.at("id").get<std::string>(), j.at("text").get<std::string>());
        if (j.contains("length") && j["length"].get<std::size_t>() != d.length())
          throw IntegrityError("token count mismatch for '" + d.doc_id + "'");
      } catch (const nlohmann::json::exception& e) {
        throw IntegrityError((dir / "docs.jsonl").string() + ":" + std::to_string(lineno) + ": " +
                             e.what());
      }
    }
    std::ifstream stats(dir / "stats.json", std::ios::binary);
    if (!stats) throw IntegrityError("missing " + (dir / "stats.json").string());
    try {
      auto s = nlohmann::json::parse(stats);
      CorpusStats stored;
      stored.n_docs = s.at("n_docs").get<std::int64_t>();
      stored.df = s.at("df").get<std::map<std::string, std::int64_t>>();
      if (!(stored == c.stats_))
        throw IntegrityError("stats.json disagrees with docs.jsonl in " + dir.string());
    } catch (const nlohmann::json::exception& e) {
      throw IntegrityError((dir / "stats.json").string() + ": " + e.what());
    }
    c.seal();
    return c;
  }

 private:
  void add_terms(const Document& d) {
    std::set<std::string> seen;
    for (const auto& t : d.tokens)
      if (seen.insert(t.normalized).second) ++stats_.df[t.normalized];
  }
  void remove_terms(const Document& d) {
    std::set<std::string> seen;
    for (const auto& t : d.tokens) {
      if (!seen.insert(t.normalized).second) continue;
      auto it = stats_.df.find(t.normalized);
      if (--it->second == 0) stats_.df.erase(it);
    }
  }
  void check_stats() const {
    for (const auto& [term, n] : stats_.df)
      if (n <= 0 || n > stats_.n_docs)
        throw IntegrityError("document frequency out of range for '" + term + "'");
  }

  std::map<std::string, Document> docs_;
  CorpusStats stats_;
  bool sealed_ = false;
};

struct RawDocument {
  std::string id;
  std::string text;
};

// Reads corpus input: either a directory of .txt files (stem = id) or a
// line-delimited JSON file of {"id": ..., "text": ...} records.
inline std::vector<RawDocument> read_corpus_input(const std::filesystem::path& path) {
  namespace fs = std::filesystem;
  std::vector<RawDocument> out;
  if (fs::is_directory(path)) {
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(path))
      if (e.is_regular_file() && e.path().extension() == ".txt") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    for (const auto& f : files) {
      std::ifstream in(f, std::ios::binary);
      std::stringstream ss;
      ss << in.rdbuf();
      out.push_back({f.stem().string(), ss.str()});
    }
    return out;
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open corpus input " + path.string());
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      auto j = nlohmann::json::parse(line);
      out.push_back({j.at("id").get<std::string>(), j.at("text").get<std::string>()});
    } catch (const nlohmann::json::exception& e) {
      throw FormatError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace fuzzgir
