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

// UTF-8 handling and the tokenizer shared by corpus ingestion, gazetteer name
// normalization and query parsing.
//
// Rules: split on Unicode whitespace, strip leading/trailing punctuation from
// each piece, keep anything internal (hyphens, apostrophes), case-fold for the
// normalized form and record whether the original started with an upper-case
// letter. No stemming, no stopwords.

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fuzzgir/error.hpp"

namespace fuzzgir::text {

struct ByteSpan {
  std::size_t start = 0;
  std::size_t end = 0;

  bool empty() const { return end <= start; }
  friend bool operator==(const ByteSpan&, const ByteSpan&) = default;
};

struct Token {
  std::string surface;
  std::string normalized;
  std::size_t byte_start = 0;
  std::size_t byte_end = 0;
  bool is_capitalized = false;

  friend bool operator==(const Token&, const Token&) = default;
};

namespace detail {

struct Decoded {
  char32_t cp;
  std::size_t len;
};

// Returns nullopt on any malformed, overlong or surrogate sequence.
inline std::optional<Decoded> decode_one(std::string_view s, std::size_t i) {
  const auto b0 = static_cast<unsigned char>(s[i]);
  if (b0 < 0x80) return Decoded{b0, 1};
  std::size_t len = 0;
  char32_t cp = 0;
  char32_t min = 0;
  if ((b0 & 0xE0) == 0xC0) {
    len = 2;
    cp = b0 & 0x1F;
    min = 0x80;
  } else if ((b0 & 0xF0) == 0xE0) {
    len = 3;
    cp = b0 & 0x0F;
    min = 0x800;
  } else if ((b0 & 0xF8) == 0xF0) {
    len = 4;
    cp = b0 & 0x07;
    min = 0x10000;
  } else {
    return std::nullopt;
  }
  if (i + len > s.size()) return std::nullopt;
  for (std::size_t k = 1; k < len; ++k) {
    const auto b = static_cast<unsigned char>(s[i + k]);
    if ((b & 0xC0) != 0x80) return std::nullopt;
    cp = (cp << 6) | (b & 0x3F);
  }
  if (cp < min || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) return std::nullopt;
  return Decoded{cp, len};
}

inline bool is_space(char32_t c) {
  switch (c) {
    case 0x09: case 0x0A: case 0x0B: case 0x0C: case 0x0D: case 0x20:
    case 0x85: case 0xA0: case 0x1680: case 0x2028: case 0x2029:
    case 0x202F: case 0x205F: case 0x3000:
      return true;
    default:
      return c >= 0x2000 && c <= 0x200A;
  }
}

inline bool is_punct(char32_t c) {
  if (c < 0x80) {
    return (c >= 0x21 && c <= 0x2F) || (c >= 0x3A && c <= 0x40) || (c >= 0x5B && c <= 0x60) ||
           (c >= 0x7B && c <= 0x7E);
  }
  return c == 0xA1 || c == 0xA7 || c == 0xAB || c == 0xB6 || c == 0xB7 || c == 0xBB ||
         c == 0xBF || (c >= 0x2010 && c <= 0x2027) || (c >= 0x2030 && c <= 0x205E) ||
         (c >= 0x3001 && c <= 0x3003) || (c >= 0x3008 && c <= 0x3011);
}

// Upper case: ASCII and the Latin-1 supplement block.
inline bool is_upper(char32_t c) {
  return (c >= U'A' && c <= U'Z') || (c >= 0xC0 && c <= 0xDE && c != 0xD7);
}

inline void append_utf8(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

struct CodePoint {
  char32_t cp;
  std::size_t start;
  std::size_t len;
};

inline std::vector<CodePoint> decode(std::string_view s) {
  std::vector<CodePoint> out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size();) {
    auto d = decode_one(s, i);
    if (!d) throw EncodingError("invalid UTF-8 at byte " + std::to_string(i));
    out.push_back({d->cp, i, d->len});
    i += d->len;
  }
  return out;
}

}  // namespace detail

inline bool is_valid_utf8(std::string_view s) {
  for (std::size_t i = 0; i < s.size();) {
    auto d = detail::decode_one(s, i);
    if (!d) return false;
    i += d->len;
  }
  return true;
}

// Case folding for ASCII and Latin-1 upper-case letters; everything else is
// copied through. Input must be valid UTF-8.
inline std::string fold_case(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (const auto& c : detail::decode(s))
    detail::append_utf8(out, detail::is_upper(c.cp) ? c.cp + 0x20 : c.cp);
  return out;
}

inline std::vector<Token> tokenize(std::string_view raw) {
  const auto cps = detail::decode(raw);
  std::vector<Token> tokens;
  std::size_t i = 0;
  while (i < cps.size()) {
    while (i < cps.size() && detail::is_space(cps[i].cp)) ++i;
    std::size_t j = i;
    while (j < cps.size() && !detail::is_space(cps[j].cp)) ++j;
    std::size_t lo = i;
    std::size_t hi = j;
    while (lo < hi && detail::is_punct(cps[lo].cp)) ++lo;
    while (hi > lo && detail::is_punct(cps[hi - 1].cp)) --hi;
    if (lo < hi) {
      Token t;
      t.byte_start = cps[lo].start;
      t.byte_end = cps[hi - 1].start + cps[hi - 1].len;
      t.surface = std::string(raw.substr(t.byte_start, t.byte_end - t.byte_start));
      t.normalized = fold_case(t.surface);
      t.is_capitalized = detail::is_upper(cps[lo].cp);
      tokens.push_back(std::move(t));
    }
    i = j;
  }
  return tokens;
}

inline std::string join_normalized(std::span<const Token> tokens) {
  std::string out;
  for (const auto& t : tokens) {
    if (!out.empty()) out.push_back(' ');
    out += t.normalized;
  }
  return out;
}

// Canonical lookup key for a place name or query string: tokenized, case-folded,
// single-space joined. Surrounding whitespace and punctuation never matter.
inline std::string normalize_name(std::string_view name) {
  const auto tokens = tokenize(name);
  return join_normalized(tokens);
}

}  // namespace fuzzgir::text
