// Copyright 2026 The Lexjudge Authors.
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

#ifndef LEXJUDGE_TEXT_H_
#define LEXJUDGE_TEXT_H_

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace lexjudge::text {

// Decodes UTF-8. Invalid bytes decode to U+FFFD, one per byte.
std::u32string DecodeUtf8(std::string_view utf8);
std::string EncodeUtf8(std::u32string_view code_points);

std::size_t CodePointLength(std::string_view utf8);

// Substring by code point offsets [start, end). Throws a validation Error
// when the range is out of bounds.
std::string SliceCodePoints(std::string_view utf8, std::size_t start,
                            std::size_t end);

// Unicode simple case folding (status C+S) for Latin, Greek and Cyrillic.
// Length preserving: 'ß' stays 'ß', 'ẞ' folds to 'ß'.
char32_t FoldCase(char32_t c);

bool IsSpace(char32_t c);
// Letters, digits, and the word-internal joiners '-', '_' and '\''.
bool IsWordChar(char32_t c);

std::string Trim(std::string_view s);

// Normalized text together with the origin of every code point, so matches
// found in normalized text map back to spans of the original.
struct NormalizedText {
  std::u32string text;
  // Code point offset in the original text at which text[i] starts.
  std::vector<std::size_t> origin_begin;
  // Code point offset in the original text just after text[i].
  std::vector<std::size_t> origin_end;
};

// Case folds, strips '#' at the start of a token, collapses whitespace runs
// to one space and trims. A stripped '#' is folded into the span of the
// character after it. Idempotent.
NormalizedText Normalize(std::string_view utf8);
std::string NormalizeToString(std::string_view utf8);

}  // namespace lexjudge::text

#endif  // LEXJUDGE_TEXT_H_
