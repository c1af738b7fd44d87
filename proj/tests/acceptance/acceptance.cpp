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

// Acceptance runner: one PASS/FAIL line per criterion, nonzero exit on any
// failure. The suite-runtime check re-runs every unit binary and times the
// whole process.

#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <numeric>
#include <random>
#include <sstream>

#include "../support.hpp"

using namespace fuzzgir;
namespace fs = std::filesystem;
namespace oracle = testing::oracle;
using Clock = std::chrono::steady_clock;

namespace {

const auto kStart = Clock::now();

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

struct Check {
  std::vector<std::string> failures;
  std::vector<std::string> notes;

  void expect(bool ok, const std::string& what) {
    if (!ok && failures.size() < 5) failures.push_back(what);
    if (!ok && failures.size() == 5) failures.push_back("...");
  }
  void near(double got, double want, double tol, const std::string& what) {
    std::ostringstream ss;
    ss << what << ": got " << got << ", want " << want << " +- " << tol;
    expect(std::fabs(got - want) <= tol, ss.str());
  }
  void note(const std::string& s) { notes.push_back(s); }
};

const LonLat kMarina{80.2825, 13.05};

PossibilitySurface random_surface(std::mt19937& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const LonLat c{kMarina.lon + (u(rng) - 0.5) * 0.2, kMarina.lat + (u(rng) - 0.5) * 0.2};
  const std::vector<RelationTerm> rels = {{RelationKind::At},
                                          {RelationKind::Near},
                                          {RelationKind::WithinWalkingDistance},
                                          {RelationKind::Far},
                                          RelationTerm::cardinal(kAllDirections[rng() % 8])};
  std::optional<fuzzy::Hedge> hedge;
  if (rng() % 3 == 1) hedge = fuzzy::Hedge::Very;
  if (rng() % 3 == 2) hedge = fuzzy::Hedge::Somewhat;
  return surface_for(rels[rng() % rels.size()], hedge, geo::Footprint::point(c, u(rng) * 2.0), TermParams{});
}

std::vector<std::string> ranked_ids(const RetrievalResult& r) {
  std::vector<std::string> out;
  for (const auto& j : r.ranked) out.push_back(j.doc_id);
  return out;
}

// Kendall tau over two rankings of the same items; nullopt if the sets differ.
std::optional<double> kendall_tau(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  if (a.size() != b.size()) return std::nullopt;
  std::map<std::string, std::size_t> pos;
  for (std::size_t i = 0; i < b.size(); ++i) pos[b[i]] = i;
  for (const auto& x : a)
    if (!pos.count(x)) return std::nullopt;
  if (a.size() < 2) return 1.0;
  long concordant = 0, discordant = 0;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = i + 1; j < a.size(); ++j) (pos[a[i]] < pos[a[j]] ? concordant : discordant) += 1;
  return static_cast<double>(concordant - discordant) / static_cast<double>(concordant + discordant);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run(const std::string& cmd) {
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

void ac1(Check& c) {
  struct Case {
    std::int64_t sf, n, df;
    double want;
  };
  for (const auto& k : {Case{2, 8, 2, 6.0}, Case{0, 8, 2, 0.0}, Case{5, 8, 8, 5.0}, Case{3, 16, 2, 12.0}}) {
    std::ostringstream ss;
    ss << "swf(" << k.sf << "," << k.n << "," << k.df << ")";
    c.near(compute_swf(k.sf, k.n, k.df), k.want, 1e-9, ss.str());
  }
}

void ac2(Check& c) {
  auto vec = [](const std::vector<double>& w) {
    SpatialTermVector v;
    for (std::size_t i = 0; i < w.size(); ++i)
      if (w[i] != 0.0) v.weights["k" + std::to_string(i)] = w[i];
    return v;
  };
  std::mt19937 rng(101);
  std::uniform_real_distribution<double> u(0.0, 10.0);
  auto random_vec = [&] {
    std::vector<double> w(8);
    for (auto& x : w) x = rng() % 3 == 0 ? 0.0 : u(rng);
    w[rng() % 8] += 1.0;
    return vec(w);
  };
  std::vector<SpatialTermVector> vs;
  for (int i = 0; i < 100; ++i) vs.push_back(random_vec());
  for (std::size_t i = 0; i < vs.size(); ++i) {
    c.near(spatial_similarity(vs[i], vs[i]), 1.0, 1e-9, "self similarity");
    const auto& o = vs[(i + 1) % vs.size()];
    c.near(spatial_similarity(vs[i], o), spatial_similarity(o, vs[i]), 1e-12, "symmetry");
  }
  c.near(spatial_similarity(vec({3, 4}), vec({4, 3})), 0.96, 1e-9, "(3,4)/(4,3)");

  auto order = [&](const SpatialTermVector& q, const std::vector<SpatialTermVector>& docs) {
    std::vector<std::size_t> idx(docs.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
      return spatial_similarity(q, docs[a]) > spatial_similarity(q, docs[b]);
    });
    return idx;
  };
  auto scaled = vs;
  for (auto& v : scaled)
    for (auto& [k, w] : v.weights) w *= 10.0;
  for (int q = 0; q < 10; ++q) c.expect(order(vs[q], vs) == order(scaled[q], scaled), "vector ranking changed under x10");

  const auto& p = testing::main_pipeline();
  const auto big = p.index.scaled(10.0);
  const Engine e10(p.corpus, p.gaz, big, p.cfg);
  for (const auto* q : {"flood near Marina Beach", "festival in Chennai", "very close to Egmore", "Tokyo"}) {
    auto a = p.engine->parse_query(q), b = e10.parse_query(q);
    a.top_k = b.top_k = 1000;
    c.expect(ranked_ids(p.engine->retrieve(a)) == ranked_ids(e10.retrieve(b)),
             std::string("engine ranking changed under x10: ") + q);
  }
}

void ac3(Check& c) {
  const auto t0 = Clock::now();
  const std::vector<std::string> queries = {
      "flood near Marina Beach", "festival in Chennai",  "festival in Mylapore",       "festival in Tamil Nadu",
      "festival in India",       "rain near Madurai",    "flood",                      "near Marina Beach",
      "Springfield budget",      "very close to Egmore", "park to the north of London", "far from Chennai",
      "temple festival",         "Tokyo",                "nothing matches zzz"};
  std::size_t compared = 0;
  for (const auto* p : {&testing::main_pipeline(), &testing::mini_pipeline()}) {
    c.expect(p->corpus.size() <= 50, "fixture corpus larger than 50 documents");
    for (const auto& q : queries) {
      auto plan = p->engine->parse_query(q);
      plan.top_k = static_cast<std::size_t>(p->corpus.size());
      const auto pruned = ranked_ids(p->engine->retrieve(plan, true));
      const auto brute = ranked_ids(p->engine->retrieve(plan, false));
      const auto tau = kendall_tau(pruned, brute);
      c.expect(tau && *tau == 1.0 && pruned == brute, "pruned ranking differs for: " + q);
      ++compared;
    }
  }
  const double secs = seconds_since(t0);
  c.expect(secs < 5.0, "runtime " + std::to_string(secs) + " s");
  c.note(std::to_string(compared) + " queries, tau=1, " + std::to_string(secs).substr(0, 5) + " s");
}

void ac4(Check& c) {
  std::mt19937 rng(131);
  std::uniform_real_distribution<double> u(-1.0, 1.0), u01(0.0, 1.0);
  for (int i = 0; i < 10000; ++i) {
    const auto s = random_surface(rng);
    const double pi = possibility_at(s, {kMarina.lon + u(rng) * 0.6, kMarina.lat + u(rng) * 0.6});
    c.expect(pi >= 0.0 && pi <= 1.0, "possibility outside [0,1]");
  }
  for (int ray = 0; ray < 100; ++ray) {
    const auto rel = std::vector<RelationKind>{RelationKind::At, RelationKind::Near,
                                               RelationKind::WithinWalkingDistance}[ray % 3];
    const auto s = surface_for(RelationTerm{rel}, std::nullopt, geo::Footprint::point(kMarina, u01(rng)), TermParams{});
    const double theta = u01(rng) * 2.0 * oracle::kPi;
    double prev = 2.0;
    for (int k = 0; k <= 200; ++k) {
      const double step = 0.0005 * k;
      const double pi = possibility_at(s, {kMarina.lon + step * std::cos(theta), kMarina.lat + step * std::sin(theta)});
      c.expect(pi <= prev + 1e-12, "possibility rises along a ray");
      prev = pi;
    }
  }
  auto near = [](std::optional<fuzzy::Hedge> h) {
    return surface_for(RelationTerm{RelationKind::Near}, h, geo::Footprint::point(kMarina), TermParams{});
  };
  const auto very = near(fuzzy::Hedge::Very), plain = near(std::nullopt), somewhat = near(fuzzy::Hedge::Somewhat);
  std::uniform_real_distribution<double> small(-0.06, 0.06);
  for (int i = 0; i < 1000; ++i) {
    const LonLat p{kMarina.lon + small(rng), kMarina.lat + small(rng)};
    const double v = possibility_at(very, p), n = possibility_at(plain, p), s = possibility_at(somewhat, p);
    c.expect(v <= n && n <= s, "hedge ordering violated");
  }
  const double alphas[] = {0.2, 0.5, 0.8, 1.0};
  for (int trial = 0; trial < 50; ++trial) {
    const auto s = random_surface(rng);
    for (int i = 0; i + 1 < 4; ++i)
      c.expect(alpha_cut_bbox(s, alphas[i]).contains(alpha_cut_bbox(s, alphas[i + 1])), "alpha cuts do not nest");
    for (int k = 0; k < 200; ++k) {
      const LonLat p{s.anchor.center.lon + u(rng) * 0.5, s.anchor.center.lat + u(rng) * 0.5};
      const double pi = possibility_at(s, p);
      for (double a : alphas)
        if (pi >= a) c.expect(alpha_cut_bbox(s, a).contains(p), "point above alpha outside its cut");
    }
  }
}

void ac5(Check& c) {
  const auto rb = fuzzy::FuzzyRuleBase::relevance_default();
  auto infer = [&](double s, double g, double o) { return rb.infer({{"swf", s}, {"gran", g}, {"overlap", o}}).value.value(); };
  c.near(infer(1, 1, 0), 0.7, 0.02, "highly relevant");
  c.near(infer(1, 0, 0), 0.5, 0.02, "moderately relevant");
  c.near(infer(0, 1, 0), 0.1, 0.02, "not relevant");

  using namespace fuzzy;
  LinguisticVariable a{"a", {{"lo", Trapezoid{0, 0, 0.3, 0.7}}, {"hi", Trapezoid{0.3, 0.7, 1, 1}}}};
  LinguisticVariable b{"b", {{"lo", Trapezoid{0, 0, 0.2, 0.6}}, {"hi", Trapezoid{0.4, 0.8, 1, 1}}}};
  LinguisticVariable out{"out",
                         {{"L", FuzzySet1D::triangle(0.2, 0.2)},
                          {"M", FuzzySet1D::triangle(0.5, 0.2)},
                          {"H", FuzzySet1D::triangle(0.8, 0.2)}}};
  const FuzzyRuleBase small({a, b}, out,
                            {{{{"a", "hi"}, {"b", "hi"}}, "H"}, {{{"a", "hi"}, {"b", "lo"}}, "M"}, {{{"a", "lo"}}, "L"}});
  std::mt19937 rng(137);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 50; ++i) {
    const double x = u(rng), y = u(rng);
    const double a_lo = oracle::trapezoid(0, 0, 0.3, 0.7, x), a_hi = oracle::trapezoid(0.3, 0.7, 1, 1, x);
    const double b_lo = oracle::trapezoid(0, 0, 0.2, 0.6, y), b_hi = oracle::trapezoid(0.4, 0.8, 1, 1, y);
    const double want =
        oracle::mamdani_centroid({{{a_hi, b_hi}, 0.8, 0.2}, {{a_hi, b_lo}, 0.5, 0.2}, {{a_lo}, 0.2, 0.2}}, 200001);
    c.near(small.infer({{"a", x}, {"b", y}}).value.value(), want, 1e-3, "2-input/3-rule centroid");
  }
}

void ac6(Check& c) {
  std::mt19937 rng(139);
  for (int pair = 0; pair < 20; ++pair) {
    const std::vector<PossibilitySurface> ss = {random_surface(rng), random_surface(rng)};
    GridOptions opts;
    opts.max_cells_per_axis = 96;
    const auto grid = fusion_grid(ss, opts);
    const auto lo = fuse_on(ss, FusionMode::min(), grid), hi = fuse_on(ss, FusionMode::max(), grid);
    for (int iy = 0; iy < grid.ny; ++iy)
      for (int ix = 0; ix < grid.nx; ++ix) {
        const auto p = grid.cell_center(ix, iy);
        const double p0 = possibility_at(ss[0], p), p1 = possibility_at(ss[1], p);
        c.expect(lo.at(ix, iy) <= p0 && lo.at(ix, iy) <= p1, "min fusion above an input");
        c.expect(hi.at(ix, iy) >= p0 && hi.at(ix, iy) >= p1, "max fusion below an input");
      }
  }
  for (int i = 0; i < 10; ++i) {
    const std::vector<PossibilitySurface> one = {random_surface(rng)};
    GridOptions opts;
    opts.max_cells_per_axis = 64;
    const auto grid = fusion_grid(one, opts);
    const auto raster = rasterize(one[0], grid);
    for (const auto& mode : {FusionMode::min(), FusionMode::max(), FusionMode::weighted()})
      c.expect(fuse_on(one, mode, grid).pi == raster.pi, "singleton fusion is not the identity");
  }
}

void ac7(Check& c) {
  const auto& p = testing::main_pipeline();
  const auto& e = *p.engine;
  const std::vector<std::pair<std::string, GranularityLevel>> queries = {
      {"flood near Marina Beach", GranularityLevel::Landmark},
      {"festival in Mylapore", GranularityLevel::Neighborhood},
      {"festival in Chennai", GranularityLevel::City},
      {"festival in Tamil Nadu", GranularityLevel::Region},
      {"festival in India", GranularityLevel::Country}};
  for (const auto& [q, lvl] : queries) {
    const auto r = e.retrieve(e.parse_query(q));
    const double want = p.cfg.index.cell_edge_deg[level_ordinal(lvl)];
    c.expect(r.candidates.level == lvl && r.candidates.level2_consulted && r.candidates.cell_edge_deg == want &&
                 r.candidates.cells_probed > 0,
             "level-2 not consulted at " + std::string(level_name(lvl)) + " resolution for: " + q);
  }
  auto plan = e.parse_query("festival in Chennai");
  plan.top_k = 1000;
  const auto r = e.retrieve(plan);
  for (const std::string d : {"doc06", "doc07"}) {
    bool landmark_only = !p.index.doc_mentions(d).empty();
    for (const auto& m : p.index.doc_mentions(d))
      landmark_only = landmark_only && m.granularity == GranularityLevel::Landmark && p.gaz.contains("chennai", m.place_id);
    c.expect(landmark_only, d + " is not a landmark-only Chennai document");
    const auto it = std::find_if(r.ranked.begin(), r.ranked.end(), [&](const auto& j) { return j.doc_id == d; });
    c.expect(it != r.ranked.end(), d + " not retrieved by the city query");
    if (it != r.ranked.end()) c.near(it->gran_match, 0.7, 1e-12, d + " gran_match");
  }
}

void ac8(Check& c) {
  const auto& p = testing::main_pipeline();
  const std::map<std::string, std::string> expected = {{"doc21", "springfield_il"},
                                                       {"doc22", "springfield_il"},
                                                       {"doc23", "springfield_il"},
                                                       {"doc24", "springfield_ma"},
                                                       {"doc25", "springfield_ma"}};
  for (const auto& [doc, place] : expected) {
    int seen = 0;
    for (const auto& m : extract_mentions(p.corpus.get(doc), p.gaz, p.cfg.extraction))
      if (m.surface == "springfield") {
        c.expect(m.place_id == place, doc + " resolved to " + m.place_id);
        ++seen;
      }
    c.expect(seen > 0, doc + " has no Springfield mention");
  }
  for (const auto& [id, doc] : p.corpus.documents()) {
    std::map<std::string, std::string> ref;
    for (const auto& m : extract_mentions(doc, p.gaz, p.cfg.extraction)) {
      const auto [it, fresh] = ref.emplace(m.surface, m.place_id);
      c.expect(it->second == m.place_id, id + ": '" + m.surface + "' resolves to two places");
    }
  }
}

void ac9(Check& c) {
  const auto dir = fs::temp_directory_path() / ("fuzzgir_accept_" + std::to_string(::getpid()));
  fs::remove_all(dir);
  fs::create_directories(dir);
  const std::string cli = FUZZGIR_CLI;
  const auto data = testing::data_dir(), config = testing::config_dir();
  auto q = [](const fs::path& p) { return "'" + p.string() + "'"; };
  const int a = run(q(cli) + " ingest --corpus " + q(data / "corpus.jsonl") + " --out " + q(dir / "store") + " >/dev/null");
  const int b = run(q(cli) + " index --store " + q(dir / "store") + " --gazetteer " + q(data / "gazetteer.tsv") +
                    " --config " + q(config) + " --out " + q(dir / "index") + " >/dev/null");
  const int d = run(q(cli) + " query --index " + q(dir / "index") + " 'flood near Marina Beach' --emit " +
                    q(dir / "flood.geojson") + " > " + q(dir / "report.json"));
  c.expect(a == 0 && b == 0 && d == 0, "cli pipeline exit codes " + std::to_string(a) + "/" + std::to_string(b) + "/" +
                                           std::to_string(d));
  if (c.failures.empty()) {
    const auto report = nlohmann::json::parse(slurp(dir / "report.json"));
    std::vector<std::string> top;
    for (const auto& j : report.at("results")) top.push_back(j.at("doc_id"));
    for (const std::string doc : {"doc01", "doc02", "doc03", "doc04"})
      c.expect(top.size() <= 5 && std::find(top.begin(), top.end(), doc) != top.end(), doc + " missing from top 5");
    const auto mb = testing::main_pipeline().gaz.get("marina_beach").footprint.center;
    const auto pt = report.at("location").at("point");
    const double km = oracle::distance_km(pt[0].get<double>(), pt[1].get<double>(), mb.lon, mb.lat);
    c.expect(km < 2.0, "resolved point " + std::to_string(km) + " km from Marina Beach");
    const auto errs = validate_geojson(nlohmann::json::parse(slurp(dir / "flood.geojson")));
    c.expect(errs.empty(), errs.empty() ? "" : "geojson: " + errs.front());
    std::ostringstream ss;
    ss << "top5 [";
    for (std::size_t i = 0; i < top.size(); ++i) ss << (i ? " " : "") << top[i];
    ss << "], resolved " << std::fixed << std::setprecision(2) << km << " km from landmark";
    c.note(ss.str());
  }
  fs::remove_all(dir);

  std::istringstream names(FUZZGIR_UNIT_TESTS);
  std::string name;
  int failed_binaries = 0;
  while (names >> name) {
    const auto bin = fs::path(FUZZGIR_TEST_BIN_DIR) / name;
    if (run(q(bin) + " >/dev/null 2>&1") != 0) {
      ++failed_binaries;
      c.expect(false, "unit suite " + name + " failed");
    }
  }
  const double suite = seconds_since(kStart);
  c.expect(failed_binaries == 0, "unit suite has failures");
  c.expect(suite < 60.0, "suite took " + std::to_string(suite) + " s");
  std::ostringstream ss;
  ss << "suite " << std::fixed << std::setprecision(1) << suite << " s";
  c.note(ss.str());
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<void(Check&)>>> criteria = {
      {"AC1", ac1}, {"AC2", ac2}, {"AC3", ac3}, {"AC4", ac4}, {"AC5", ac5},
      {"AC6", ac6}, {"AC7", ac7}, {"AC8", ac8}, {"AC9", ac9}};
  int failed = 0;
  for (const auto& [name, fn] : criteria) {
    Check c;
    try {
      fn(c);
    } catch (const std::exception& e) {
      c.failures.push_back(std::string("exception: ") + e.what());
    }
    const bool ok = c.failures.empty();
    failed += !ok;
    std::cout << name << " " << (ok ? "PASS" : "FAIL");
    for (const auto& n : c.notes) std::cout << "  " << n;
    std::cout << "\n";
    for (const auto& f : c.failures) std::cout << "    " << f << "\n";
  }
  return failed == 0 ? 0 : 1;
}
