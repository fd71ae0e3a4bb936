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

#include "lexjudge/text.h"

#include <string>

#include "lexjudge/error.h"

namespace lexjudge::text {

namespace {

constexpr char32_t kReplacement = 0xFFFD;

bool InRange(char32_t c, char32_t lo, char32_t hi) {
  return c >= lo && c <= hi;
}

}  // namespace

std::u32string DecodeUtf8(std::string_view utf8) {
  std::u32string out;
  out.reserve(utf8.size());
  std::size_t i = 0;
  while (i < utf8.size()) {
    const auto b0 = static_cast<unsigned char>(utf8[i]);
    int extra = 0;
    char32_t cp = 0;
    if (b0 < 0x80) {
      cp = b0;
    } else if ((b0 & 0xE0) == 0xC0) {
      extra = 1;
      cp = b0 & 0x1F;
    } else if ((b0 & 0xF0) == 0xE0) {
      extra = 2;
      cp = b0 & 0x0F;
    } else if ((b0 & 0xF8) == 0xF0) {
      extra = 3;
      cp = b0 & 0x07;
    } else {
      out.push_back(kReplacement);
      ++i;
      continue;
    }
    if (i + extra >= utf8.size() && extra > 0) {
      // Truncated sequence.
      out.push_back(kReplacement);
      ++i;
      continue;
    }
    bool ok = true;
    for (int k = 1; k <= extra; ++k) {
      const auto b = static_cast<unsigned char>(utf8[i + k]);
      if ((b & 0xC0) != 0x80) {
        ok = false;
        break;
      }
      cp = (cp << 6) | (b & 0x3F);
    }
    // Reject overlong forms and surrogates.
    if (ok && ((extra == 1 && cp < 0x80) || (extra == 2 && cp < 0x800) ||
               (extra == 3 && (cp < 0x10000 || cp > 0x10FFFF)) ||
               InRange(cp, 0xD800, 0xDFFF))) {
      ok = false;
    }
    if (!ok) {
      out.push_back(kReplacement);
      ++i;
      continue;
    }
    out.push_back(cp);
    i += extra + 1;
  }
  return out;
}

std::string EncodeUtf8(std::u32string_view code_points) {
  std::string out;
  out.reserve(code_points.size());
  for (char32_t cp : code_points) {
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
  return out;
}

std::size_t CodePointLength(std::string_view utf8) {
  return DecodeUtf8(utf8).size();
}

std::string SliceCodePoints(std::string_view utf8, std::size_t start,
                            std::size_t end) {
  const std::u32string cps = DecodeUtf8(utf8);
  if (start > end || end > cps.size()) {
    throw ValidationError("span [" + std::to_string(start) + ", " +
                              std::to_string(end) +
                              ") out of bounds for text of length " +
                              std::to_string(cps.size()),
                          "span");
  }
  return EncodeUtf8(std::u32string_view(cps).substr(start, end - start));
}

char32_t FoldCase(char32_t c) {
  if (c < 0x80) return (c >= 'A' && c <= 'Z') ? c + 32 : c;
  if (c == 0xB5) return 0x3BC;
  if (InRange(c, 0xC0, 0xDE) && c != 0xD7) return c + 32;
  if (InRange(c, 0x100, 0x12F) || InRange(c, 0x132, 0x137) ||
      InRange(c, 0x14A, 0x177)) {
    return (c % 2 == 0) ? c + 1 : c;
  }
  if (InRange(c, 0x139, 0x148) || InRange(c, 0x179, 0x17E)) {
    return (c % 2 == 1) ? c + 1 : c;
  }
  if (c == 0x178) return 0xFF;
  if (c == 0x17F) return 's';
  if (c == 0x1E9E) return 0xDF;
  if (InRange(c, 0x391, 0x3A1) || InRange(c, 0x3A3, 0x3AB)) return c + 32;
  if (c == 0x3C2) return 0x3C3;
  if (InRange(c, 0x410, 0x42F)) return c + 32;
  if (InRange(c, 0x400, 0x40F)) return c + 80;
  return c;
}

bool IsSpace(char32_t c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
         c == '\v' || c == 0xA0 || c == 0x1680 || InRange(c, 0x2000, 0x200A) ||
         c == 0x2028 || c == 0x2029 || c == 0x202F || c == 0x205F ||
         c == 0x3000;
}

bool IsWordChar(char32_t c) {
  if (c < 0x80) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
           (c >= '0' && c <= '9') || c == '-' || c == '_';
  }
  if (InRange(c, 0xC0, 0x24F)) return c != 0xD7 && c != 0xF7;
  return InRange(c, 0x370, 0x3FF) || InRange(c, 0x400, 0x52F) ||
         InRange(c, 0x1E00, 0x1FFF) || InRange(c, 0x3040, 0x9FFF) ||
         InRange(c, 0xAC00, 0xD7AF);
}

std::string Trim(std::string_view s) {
  const std::u32string cps = DecodeUtf8(s);
  std::size_t b = 0;
  std::size_t e = cps.size();
  while (b < e && IsSpace(cps[b])) ++b;
  while (e > b && IsSpace(cps[e - 1])) --e;
  return EncodeUtf8(std::u32string_view(cps).substr(b, e - b));
}

NormalizedText Normalize(std::string_view utf8) {
  const std::u32string in = DecodeUtf8(utf8);
  NormalizedText out;
  out.text.reserve(in.size());
  out.origin_begin.reserve(in.size());
  out.origin_end.reserve(in.size());

  auto emit = [&out](char32_t c, std::size_t begin, std::size_t end) {
    out.text.push_back(c);
    out.origin_begin.push_back(begin);
    out.origin_end.push_back(end);
  };

  std::size_t i = 0;
  while (i < in.size()) {
    const char32_t c = in[i];
    if (IsSpace(c)) {
      if (!out.text.empty()) {
        if (out.text.back() == ' ') {
          out.origin_end.back() = i + 1;
        } else {
          emit(' ', i, i + 1);
        }
      }
      ++i;
      continue;
    }
    const bool token_start = (i == 0) || !IsWordChar(in[i - 1]);
    if (c == '#' && token_start) {
      std::size_t j = i;
      while (j < in.size() && in[j] == '#') ++j;
      if (j < in.size() && IsWordChar(in[j])) {
        emit(FoldCase(in[j]), i, j + 1);
        i = j + 1;
        continue;
      }
    }
    emit(FoldCase(c), i, i + 1);
    ++i;
  }
  if (!out.text.empty() && out.text.back() == ' ') {
    out.text.pop_back();
    out.origin_begin.pop_back();
    out.origin_end.pop_back();
  }
  return out;
}

std::string NormalizeToString(std::string_view utf8) {
  return EncodeUtf8(Normalize(utf8).text);
}

}  // namespace lexjudge::text
