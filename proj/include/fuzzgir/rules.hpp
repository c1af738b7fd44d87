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

// Mamdani rule engine over [0,1]-valued inputs: min conjunction, clipping of
// consequent sets, max aggregation, centroid defuzzification.

#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "fuzzgir/error.hpp"
#include "fuzzgir/fuzzy.hpp"

namespace fuzzgir::fuzzy {

struct LinguisticVariable {
  std::string name;
  std::vector<std::pair<std::string, FuzzySet1D>> terms;

  const FuzzySet1D* term(const std::string& label) const {
    for (const auto& [l, s] : terms)
      if (l == label) return &s;
    return nullptr;
  }
};

struct Clause {
  std::string variable;
  std::string label;
};

struct Rule {
  std::vector<Clause> antecedent;
  std::string consequent;

  std::string to_string() const {
    std::string s = "if ";
    for (std::size_t i = 0; i < antecedent.size(); ++i) {
      if (i) s += " and ";
      s += antecedent[i].variable + " is " + antecedent[i].label;
    }
    return s + " then " + consequent;
  }
};

struct RuleActivation {
  std::size_t rule = 0;
  std::string text;
  double activation = 0.0;
};

struct Inference {
  std::optional<double> value;  // nullopt when no rule fired
  std::vector<RuleActivation> trace;
};

class FuzzyRuleBase {
 public:
  static constexpr int kSamples = 1001;

  FuzzyRuleBase(std::vector<LinguisticVariable> inputs, LinguisticVariable output, std::vector<Rule> rules)
      : inputs_(std::move(inputs)), output_(std::move(output)), rules_(std::move(rules)) {
    validate();
  }

  const std::vector<LinguisticVariable>& inputs() const { return inputs_; }
  const LinguisticVariable& output() const { return output_; }
  const std::vector<Rule>& rules() const { return rules_; }

  Inference infer(const std::map<std::string, double>& values) const {
    for (const auto& v : inputs_) {
      auto it = values.find(v.name);
      if (it == values.end()) throw MissingInputError("missing input variable '" + v.name + "'");
      if (!(it->second >= 0.0 && it->second <= 1.0))
        throw RangeError("input '" + v.name + "' must lie in [0,1]");
    }

    Inference out;
    std::vector<std::pair<const FuzzySet1D*, double>> clipped;
    for (std::size_t r = 0; r < rules_.size(); ++r) {
      const auto& rule = rules_[r];
      double act = 1.0;
      for (const auto& c : rule.antecedent)
        act = std::min(act, variable(c.variable).term(c.label)->membership(values.at(c.variable)));
      out.trace.push_back({r, rule.to_string(), act});
      if (act > 0.0) clipped.emplace_back(output_.term(rule.consequent), act);
    }
    if (clipped.empty()) return out;

    double num = 0.0;
    double den = 0.0;
    for (int k = 0; k < kSamples; ++k) {
      const double x = static_cast<double>(k) / (kSamples - 1);
      double agg = 0.0;
      for (const auto& [set, act] : clipped) agg = std::max(agg, std::min(act, set->membership(x)));
      num += x * agg;
      den += agg;
    }
    if (den > 0.0) out.value = std::clamp(num / den, 0.0, 1.0);
    return out;
  }

  // Default grading rule base over swf (low/medium/high), gran (poor/good) and
  // overlap (low/high). Output centres 0.1 / 0.5 / 0.7.
  static FuzzyRuleBase relevance_default() {
    LinguisticVariable swf{"swf",
                           {{"low", RampDown{0.2, 0.5}},
                            {"medium", Trapezoid{0.2, 0.5, 0.5, 0.8}},
                            {"high", RampUp{0.5, 0.8}}}};
    LinguisticVariable gran{"gran", {{"poor", RampDown{0.3, 0.7}}, {"good", RampUp{0.3, 0.7}}}};
    LinguisticVariable overlap{"overlap", {{"low", RampDown{0.2, 0.6}}, {"high", RampUp{0.2, 0.6}}}};
    LinguisticVariable rel{"relevance",
                           {{"NotRelevant", FuzzySet1D::triangle(0.1, 0.2)},
                            {"Moderate", FuzzySet1D::triangle(0.5, 0.2)},
                            {"High", FuzzySet1D::triangle(0.7, 0.2)}}};
    std::vector<Rule> rules = {
        {{{"swf", "high"}, {"gran", "good"}}, "High"},
        {{{"swf", "high"}, {"gran", "poor"}}, "Moderate"},
        {{{"swf", "medium"}, {"gran", "good"}, {"overlap", "high"}}, "High"},
        {{{"swf", "medium"}, {"gran", "good"}, {"overlap", "low"}}, "Moderate"},
        {{{"swf", "medium"}, {"gran", "poor"}}, "Moderate"},
        {{{"swf", "low"}, {"overlap", "high"}}, "Moderate"},
        {{{"swf", "low"}, {"overlap", "low"}}, "NotRelevant"},
        {{{"swf", "low"}, {"gran", "poor"}}, "NotRelevant"},
        {{{"overlap", "high"}, {"gran", "good"}}, "High"},
    };
    return FuzzyRuleBase({swf, gran, overlap}, rel, rules);
  }

  static FuzzyRuleBase from_json(const nlohmann::json& j) {
    auto read_var = [](const nlohmann::json& v) {
      LinguisticVariable out;
      out.name = v.at("name").get<std::string>();
      for (const auto& t : v.at("terms")) out.terms.emplace_back(t.at("label").get<std::string>(), set_from_json(t));
      return out;
    };
    try {
      std::vector<LinguisticVariable> inputs;
      for (const auto& v : j.at("inputs")) inputs.push_back(read_var(v));
      auto output = read_var(j.at("output"));
      std::vector<Rule> rules;
      for (const auto& r : j.at("rules")) {
        Rule rule;
        for (const auto& c : r.at("if"))
          rule.antecedent.push_back({c.at(0).get<std::string>(), c.at(1).get<std::string>()});
        rule.consequent = r.at("then").get<std::string>();
        rules.push_back(std::move(rule));
      }
      return FuzzyRuleBase(std::move(inputs), std::move(output), std::move(rules));
    } catch (const nlohmann::json::exception& e) {
      throw FormatError(std::string("bad rule base: ") + e.what());
    }
  }

  nlohmann::json to_json() const {
    auto write_var = [](const LinguisticVariable& v) {
      nlohmann::json terms = nlohmann::json::array();
      for (const auto& [label, set] : v.terms) {
        auto t = set_to_json(set);
        t["label"] = label;
        terms.push_back(t);
      }
      return nlohmann::json{{"name", v.name}, {"terms", terms}};
    };
    nlohmann::json j;
    j["inputs"] = nlohmann::json::array();
    for (const auto& v : inputs_) j["inputs"].push_back(write_var(v));
    j["output"] = write_var(output_);
    j["rules"] = nlohmann::json::array();
    for (const auto& r : rules_) {
      nlohmann::json cond = nlohmann::json::array();
      for (const auto& c : r.antecedent) cond.push_back({c.variable, c.label});
      j["rules"].push_back({{"if", cond}, {"then", r.consequent}});
    }
    return j;
  }

 private:
  const LinguisticVariable& variable(const std::string& name) const {
    for (const auto& v : inputs_)
      if (v.name == name) return v;
    throw FormatError("rule references unknown variable '" + name + "'");
  }

  void validate() const {
    for (const auto& r : rules_) {
      if (r.antecedent.empty()) throw FormatError("rule without antecedent");
      for (const auto& c : r.antecedent) {
        if (!variable(c.variable).term(c.label))
          throw FormatError("rule references unknown label '" + c.variable + " is " + c.label + "'");
      }
      if (!output_.term(r.consequent))
        throw FormatError("rule references unknown output label '" + r.consequent + "'");
    }
    for (const auto& v : inputs_) {
      if (v.terms.empty()) throw FormatError("variable '" + v.name + "' has no terms");
      for (int k = 0; k < kSamples; ++k) {
        const double x = static_cast<double>(k) / (kSamples - 1);
        bool covered = false;
        for (const auto& [label, set] : v.terms) covered = covered || set.membership(x) > 0.0;
        if (!covered)
          throw FormatError("partition of '" + v.name + "' leaves " + std::to_string(x) + " uncovered");
      }
    }
  }

  std::vector<LinguisticVariable> inputs_;
  LinguisticVariable output_;
  std::vector<Rule> rules_;
};

inline Inference mamdani_infer(const FuzzyRuleBase& rb, const std::map<std::string, double>& inputs) {
  return rb.infer(inputs);
}

}  // namespace fuzzgir::fuzzy
