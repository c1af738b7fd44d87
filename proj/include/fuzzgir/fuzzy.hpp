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

// One-dimensional fuzzy sets, linguistic hedges and t-norms.

#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "fuzzgir/error.hpp"

namespace fuzzgir::fuzzy {

// Membership 1 on [b, c], linear flanks down to 0 at a and d.
struct Trapezoid {
  double a, b, c, d;
  friend bool operator==(const Trapezoid&, const Trapezoid&) = default;
};

// 0 at or below lo, 1 at or above hi.
struct RampUp {
  double lo, hi;
  friend bool operator==(const RampUp&, const RampUp&) = default;
};

// 1 at or below lo, 0 at or above hi.
struct RampDown {
  double lo, hi;
  friend bool operator==(const RampDown&, const RampDown&) = default;
};

class FuzzySet1D {
 public:
  using Shape = std::variant<Trapezoid, RampUp, RampDown>;

  FuzzySet1D() : FuzzySet1D(Trapezoid{0, 0, 0, 0}) {}
  FuzzySet1D(Trapezoid t) : shape_(t) {  // NOLINT(google-explicit-constructor)
    if (!(std::isfinite(t.a) && std::isfinite(t.d) && t.a <= t.b && t.b <= t.c && t.c <= t.d))
      throw RangeError("trapezoid parameters must be finite with a <= b <= c <= d");
  }
  FuzzySet1D(RampUp r) : shape_(r) {  // NOLINT(google-explicit-constructor)
    if (!(std::isfinite(r.lo) && std::isfinite(r.hi) && r.lo <= r.hi))
      throw RangeError("ramp parameters must be finite with lo <= hi");
  }
  FuzzySet1D(RampDown r) : shape_(r) {  // NOLINT(google-explicit-constructor)
    if (!(std::isfinite(r.lo) && std::isfinite(r.hi) && r.lo <= r.hi))
      throw RangeError("ramp parameters must be finite with lo <= hi");
  }

  // Centred triangle of the given half width.
  static FuzzySet1D triangle(double center, double half_width) {
    return Trapezoid{center - half_width, center, center, center + half_width};
  }

  const Shape& shape() const { return shape_; }

  double operator()(double x) const { return membership(x); }

  double membership(double x) const {
    return std::visit(
        [x](const auto& s) -> double {
          using S = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<S, Trapezoid>) {
            if (x >= s.b && x <= s.c) return 1.0;
            if (x <= s.a || x >= s.d) return 0.0;
            if (x < s.b) return (x - s.a) / (s.b - s.a);
            return (s.d - x) / (s.d - s.c);
          } else if constexpr (std::is_same_v<S, RampUp>) {
            if (x <= s.lo) return s.lo == s.hi && x == s.hi ? 1.0 : 0.0;
            if (x >= s.hi) return 1.0;
            return (x - s.lo) / (s.hi - s.lo);
          } else {
            if (x <= s.lo) return 1.0;
            if (x >= s.hi) return 0.0;
            return (s.hi - x) / (s.hi - s.lo);
          }
        },
        shape_);
  }

  // Largest x with membership(x) >= alpha, for alpha in (0, 1]; nullopt when
  // the cut is unbounded above.
  std::optional<double> upper_cut(double alpha) const {
    return std::visit(
        [alpha](const auto& s) -> std::optional<double> {
          using S = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<S, Trapezoid>) {
            return s.d - alpha * (s.d - s.c);
          } else if constexpr (std::is_same_v<S, RampUp>) {
            return std::nullopt;
          } else {
            return s.hi - alpha * (s.hi - s.lo);
          }
        },
        shape_);
  }

  // Right end of the core (membership == 1); nullopt when unbounded.
  std::optional<double> core_end() const { return upper_cut(1.0); }

  // True when membership(0) == 1, i.e. the core reaches the anchor.
  bool core_contains_zero() const { return membership(0.0) == 1.0; }

  friend bool operator==(const FuzzySet1D&, const FuzzySet1D&) = default;

 private:
  Shape shape_;
};

inline double membership(const FuzzySet1D& set, double x) { return set.membership(x); }

enum class Hedge { Very, Somewhat };

inline std::string_view hedge_name(Hedge h) { return h == Hedge::Very ? "very" : "somewhat"; }

// Very concentrates (mu^2), Somewhat dilates (sqrt mu).
inline double apply_hedge(double mu, std::optional<Hedge> h) {
  if (!h) return mu;
  return *h == Hedge::Very ? mu * mu : std::sqrt(mu);
}

// Membership level the unhedged set must reach for the hedged value to reach alpha.
inline double unhedge_level(double alpha, std::optional<Hedge> h) {
  if (!h) return alpha;
  return *h == Hedge::Very ? std::sqrt(alpha) : alpha * alpha;
}

// Hedged membership function over a base set.
class HedgedSet {
 public:
  HedgedSet(FuzzySet1D base, std::optional<Hedge> hedge) : base_(std::move(base)), hedge_(hedge) {}
  double operator()(double x) const { return apply_hedge(base_.membership(x), hedge_); }
  const FuzzySet1D& base() const { return base_; }
  std::optional<Hedge> hedge() const { return hedge_; }

 private:
  FuzzySet1D base_;
  std::optional<Hedge> hedge_;
};

inline HedgedSet apply_hedge(const FuzzySet1D& set, Hedge h) { return HedgedSet(set, h); }

enum class TNorm { Min, Product };

inline double tnorm(TNorm t, double x, double y) { return t == TNorm::Min ? std::min(x, y) : x * y; }

inline std::string_view tnorm_name(TNorm t) { return t == TNorm::Min ? "min" : "product"; }

inline TNorm parse_tnorm(std::string_view s) {
  if (s == "min") return TNorm::Min;
  if (s == "product") return TNorm::Product;
  throw FormatError("unknown t-norm '" + std::string(s) + "'");
}

// JSON forms: {"trapezoid": [a,b,c,d]}, {"ramp_up": [lo,hi]}, {"ramp_down": [lo,hi]},
// {"triangle": [center, half_width]}.
inline FuzzySet1D set_from_json(const nlohmann::json& j) {
  try {
    if (j.contains("trapezoid")) {
      auto v = j.at("trapezoid").get<std::vector<double>>();
      if (v.size() != 4) throw FormatError("trapezoid needs 4 parameters");
      return Trapezoid{v[0], v[1], v[2], v[3]};
    }
    if (j.contains("ramp_up")) {
      auto v = j.at("ramp_up").get<std::vector<double>>();
      if (v.size() != 2) throw FormatError("ramp_up needs 2 parameters");
      return RampUp{v[0], v[1]};
    }
    if (j.contains("ramp_down")) {
      auto v = j.at("ramp_down").get<std::vector<double>>();
      if (v.size() != 2) throw FormatError("ramp_down needs 2 parameters");
      return RampDown{v[0], v[1]};
    }
    if (j.contains("triangle")) {
      auto v = j.at("triangle").get<std::vector<double>>();
      if (v.size() != 2) throw FormatError("triangle needs center and half width");
      return FuzzySet1D::triangle(v[0], v[1]);
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("bad fuzzy set: ") + e.what());
  }
  throw FormatError("unknown fuzzy set shape: " + j.dump());
}

inline nlohmann::json set_to_json(const FuzzySet1D& s) {
  return std::visit(
      [](const auto& v) -> nlohmann::json {
        using S = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<S, Trapezoid>) {
          return {{"trapezoid", {v.a, v.b, v.c, v.d}}};
        } else if constexpr (std::is_same_v<S, RampUp>) {
          return {{"ramp_up", {v.lo, v.hi}}};
        } else {
          return {{"ramp_down", {v.lo, v.hi}}};
        }
      },
      s.shape());
}

}  // namespace fuzzgir::fuzzy
