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

#include <random>

#include <catch_amalgamated.hpp>

#include "support.hpp"

using namespace fuzzgir::fuzzy;
using Catch::Approx;
namespace oracle = testing::oracle;

namespace {

// Two inputs, three rules, triangular outputs.
FuzzyRuleBase small_base() {
  LinguisticVariable a{"a", {{"lo", Trapezoid{0, 0, 0.3, 0.7}}, {"hi", Trapezoid{0.3, 0.7, 1, 1}}}};
  LinguisticVariable b{"b", {{"lo", Trapezoid{0, 0, 0.2, 0.6}}, {"hi", Trapezoid{0.4, 0.8, 1, 1}}}};
  LinguisticVariable out{"out",
                         {{"L", FuzzySet1D::triangle(0.2, 0.2)},
                          {"M", FuzzySet1D::triangle(0.5, 0.2)},
                          {"H", FuzzySet1D::triangle(0.8, 0.2)}}};
  return FuzzyRuleBase({a, b}, out,
                       {{{{"a", "hi"}, {"b", "hi"}}, "H"}, {{{"a", "hi"}, {"b", "lo"}}, "M"}, {{{"a", "lo"}}, "L"}});
}

double oracle_small(double a, double b) {
  const double a_lo = oracle::trapezoid(0, 0, 0.3, 0.7, a), a_hi = oracle::trapezoid(0.3, 0.7, 1, 1, a);
  const double b_lo = oracle::trapezoid(0, 0, 0.2, 0.6, b), b_hi = oracle::trapezoid(0.4, 0.8, 1, 1, b);
  return oracle::mamdani_centroid({{{a_hi, b_hi}, 0.8, 0.2}, {{a_hi, b_lo}, 0.5, 0.2}, {{a_lo}, 0.2, 0.2}}, 200001);
}

double relevance(const FuzzyRuleBase& rb, double swf, double gran, double overlap) {
  return rb.infer({{"swf", swf}, {"gran", gran}, {"overlap", overlap}}).value.value();
}

}  // namespace

TEST_CASE("single rule at full activation returns the grade centre") {
  const auto rb = FuzzyRuleBase::relevance_default();
  SECTION("highly relevant") {
    const auto inf = rb.infer({{"swf", 1.0}, {"gran", 1.0}, {"overlap", 0.0}});
    int full = 0;
    for (const auto& a : inf.trace) full += a.activation == 1.0;
    CHECK(full == 1);
    CHECK(inf.trace[0].activation == 1.0);
    CHECK(inf.value.value() == Approx(0.7).margin(0.02));
  }
  SECTION("moderately relevant") { CHECK(relevance(rb, 1.0, 0.0, 0.0) == Approx(0.5).margin(0.02)); }
  SECTION("not relevant") { CHECK(relevance(rb, 0.0, 1.0, 0.0) == Approx(0.1).margin(0.02)); }
}

TEST_CASE("default rule base agrees with the oracle") {
  const auto rb = FuzzyRuleBase::relevance_default();
  auto low = [](double x) { return oracle::trapezoid(-1, -1, 0.2, 0.5, x); };
  auto med = [](double x) { return oracle::trapezoid(0.2, 0.5, 0.5, 0.8, x); };
  auto high = [](double x) { return oracle::trapezoid(0.5, 0.8, 2, 2, x); };
  auto poor = [](double x) { return oracle::trapezoid(-1, -1, 0.3, 0.7, x); };
  auto good = [](double x) { return oracle::trapezoid(0.3, 0.7, 2, 2, x); };
  auto olow = [](double x) { return oracle::trapezoid(-1, -1, 0.2, 0.6, x); };
  auto ohigh = [](double x) { return oracle::trapezoid(0.2, 0.6, 2, 2, x); };
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 40; ++i) {
    const double s = u(rng), g = u(rng), o = u(rng);
    const std::vector<oracle::OracleRule> rules = {
        {{high(s), good(g)}, 0.7, 0.2},          {{high(s), poor(g)}, 0.5, 0.2},
        {{med(s), good(g), ohigh(o)}, 0.7, 0.2}, {{med(s), good(g), olow(o)}, 0.5, 0.2},
        {{med(s), poor(g)}, 0.5, 0.2},           {{low(s), ohigh(o)}, 0.5, 0.2},
        {{low(s), olow(o)}, 0.1, 0.2},           {{low(s), poor(g)}, 0.1, 0.2},
        {{ohigh(o), good(g)}, 0.7, 0.2}};
    const double got = relevance(rb, s, g, o);
    CHECK(got >= 0.0);
    CHECK(got <= 1.0);
    CHECK(got == Approx(oracle::mamdani_centroid(rules, 200001)).margin(1e-3));
  }
}

TEST_CASE("two-input three-rule base matches dense sampling") {
  const auto rb = small_base();
  std::mt19937 rng(23);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int compared = 0;
  for (int i = 0; i < 200; ++i) {
    const double a = u(rng), b = u(rng);
    const auto inf = rb.infer({{"a", a}, {"b", b}});
    REQUIRE(inf.value.has_value());
    CHECK(*inf.value == Approx(oracle_small(a, b)).margin(1e-3));
    ++compared;
  }
  CHECK(compared == 200);
  CHECK(rb.infer({{"a", 1.0}, {"b", 1.0}}).value.value() == Approx(0.8).margin(1e-9));
}

TEST_CASE("symmetric outputs at equal activation average to 0.5") {
  LinguisticVariable x{"x", {{"any", Trapezoid{0, 0, 1, 1}}}};
  LinguisticVariable out{"out", {{"lo", FuzzySet1D::triangle(0.3, 0.2)}, {"hi", FuzzySet1D::triangle(0.7, 0.2)}}};
  const FuzzyRuleBase rb({x}, out, {{{{"x", "any"}}, "lo"}, {{{"x", "any"}}, "hi"}});
  CHECK(rb.infer({{"x", 0.4}}).value.value() == Approx(0.5).margin(1e-9));
}

TEST_CASE("no firing rule leaves relevance undefined") {
  LinguisticVariable x{"x", {{"lo", RampDown{0.2, 0.4}}, {"hi", RampUp{0.3, 0.6}}}};
  LinguisticVariable out{"out", {{"H", FuzzySet1D::triangle(0.7, 0.2)}}};
  const FuzzyRuleBase rb({x}, out, {{{{"x", "hi"}}, "H"}});
  const auto inf = rb.infer({{"x", 0.1}});
  CHECK_FALSE(inf.value.has_value());
  REQUIRE(inf.trace.size() == 1);
  CHECK(inf.trace[0].activation == 0.0);
}

TEST_CASE("inference errors") {
  const auto rb = FuzzyRuleBase::relevance_default();
  CHECK_THROWS_AS(rb.infer({{"swf", 0.5}, {"gran", 0.5}}), fuzzgir::MissingInputError);
  CHECK_THROWS_AS(rb.infer({{"swf", 1.5}, {"gran", 0.5}, {"overlap", 0.0}}), fuzzgir::RangeError);
}

TEST_CASE("rule base validation") {
  LinguisticVariable x{"x", {{"lo", Trapezoid{0, 0, 0.5, 1}}}};
  LinguisticVariable out{"out", {{"H", FuzzySet1D::triangle(0.7, 0.2)}}};
  CHECK_THROWS_AS(FuzzyRuleBase({x}, out, {{{{"x", "mid"}}, "H"}}), fuzzgir::FormatError);
  CHECK_THROWS_AS(FuzzyRuleBase({x}, out, {{{{"y", "lo"}}, "H"}}), fuzzgir::FormatError);
  CHECK_THROWS_AS(FuzzyRuleBase({x}, out, {{{{"x", "lo"}}, "Z"}}), fuzzgir::FormatError);
  CHECK_THROWS_AS(FuzzyRuleBase({x}, out, {{{}, "H"}}), fuzzgir::FormatError);
  LinguisticVariable gap{"g", {{"lo", RampDown{0.1, 0.3}}, {"hi", RampUp{0.5, 0.9}}}};
  CHECK_THROWS_AS(FuzzyRuleBase({gap}, out, {{{{"g", "lo"}}, "H"}}), fuzzgir::FormatError);
}

TEST_CASE("rule base json round trip and shipped config") {
  const auto rb = FuzzyRuleBase::relevance_default();
  const auto back = FuzzyRuleBase::from_json(rb.to_json());
  CHECK(back.to_json() == rb.to_json());
  CHECK(back.rules().size() == 9);

  const auto cfg = fuzzgir::EngineConfig::load_dir(testing::config_dir());
  CHECK(cfg.rules.to_json() == rb.to_json());
  CHECK_THROWS_AS(FuzzyRuleBase::from_json(nlohmann::json::parse(R"({"inputs": []})")), fuzzgir::FormatError);
}

TEST_CASE("inferred relevance stays in [0,1] on fuzzed inputs") {
  const auto rb = FuzzyRuleBase::relevance_default();
  std::mt19937 rng(29);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 2000; ++i) {
    const auto inf = rb.infer({{"swf", u(rng)}, {"gran", u(rng)}, {"overlap", u(rng)}});
    REQUIRE(inf.value.has_value());
    CHECK(*inf.value >= 0.0);
    CHECK(*inf.value <= 1.0);
    for (const auto& a : inf.trace) {
      CHECK(a.activation >= 0.0);
      CHECK(a.activation <= 1.0);
    }
  }
}
