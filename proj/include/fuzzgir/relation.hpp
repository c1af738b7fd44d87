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

#include <array>
#include <optional>
#include <string>
#include <string_view>

namespace fuzzgir {

enum class Direction { N, NE, E, SE, S, SW, W, NW };

inline constexpr std::array<Direction, 8> kAllDirections = {
    Direction::N, Direction::NE, Direction::E, Direction::SE,
    Direction::S, Direction::SW, Direction::W, Direction::NW};

inline double direction_bearing(Direction d) { return 45.0 * static_cast<int>(d); }

inline std::string_view direction_code(Direction d) {
  static constexpr std::array<std::string_view, 8> codes = {"n", "ne", "e", "se", "s", "sw", "w", "nw"};
  return codes[static_cast<int>(d)];
}

inline std::optional<Direction> parse_direction_code(std::string_view s) {
  for (auto d : kAllDirections)
    if (direction_code(d) == s) return d;
  return std::nullopt;
}

enum class RelationKind { At, Near, WithinWalkingDistance, Far, CardinalOf };

struct RelationTerm {
  RelationKind kind = RelationKind::At;
  Direction direction = Direction::N;  // only meaningful for CardinalOf

  static RelationTerm cardinal(Direction d) { return {RelationKind::CardinalOf, d}; }

  friend bool operator==(const RelationTerm& a, const RelationTerm& b) {
    return a.kind == b.kind && (a.kind != RelationKind::CardinalOf || a.direction == b.direction);
  }

  // Stable identifier used in index term keys ("near", "east_of", ...).
  std::string key() const {
    switch (kind) {
      case RelationKind::At: return "at";
      case RelationKind::Near: return "near";
      case RelationKind::WithinWalkingDistance: return "walking";
      case RelationKind::Far: return "far";
      case RelationKind::CardinalOf: break;
    }
    static constexpr std::array<std::string_view, 8> names = {
        "north", "northeast", "east", "southeast", "south", "southwest", "west", "northwest"};
    return std::string(names[static_cast<int>(direction)]) + "_of";
  }

  static std::optional<RelationTerm> from_key(std::string_view k) {
    for (auto kind : {RelationKind::At, RelationKind::Near, RelationKind::WithinWalkingDistance,
                      RelationKind::Far}) {
      RelationTerm r{kind};
      if (r.key() == k) return r;
    }
    for (auto d : kAllDirections)
      if (cardinal(d).key() == k) return cardinal(d);
    return std::nullopt;
  }
};

}  // namespace fuzzgir
