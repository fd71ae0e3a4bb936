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

#include <random>
#include <string>

#include "doctest.h"
#include "lexjudge/error.h"

namespace lexjudge::text {
namespace {

TEST_CASE("utf-8 round trip and code point length") {
  const std::string s = "Grüße, Straße! 🙂";
  CHECK(EncodeUtf8(DecodeUtf8(s)) == s);
  CHECK(CodePointLength(s) == 16);
  CHECK(SliceCodePoints(s, 0, 5) == "Grüße");
  CHECK(SliceCodePoints(s, 15, 16) == "🙂");
}

TEST_CASE("invalid bytes decode to the replacement character") {
  const std::u32string d = DecodeUtf8(std::string("a\xff" "b"));
  REQUIRE(d.size() == 3);
  CHECK(d[1] == U'�');
  CHECK(DecodeUtf8(std::string("\xc3")) == U"�");
}

TEST_CASE("slicing out of range is a validation error") {
  CHECK_THROWS_AS(SliceCodePoints("abc", 2, 5), Error);
  CHECK_THROWS_AS(SliceCodePoints("abc", 2, 1), Error);
}

TEST_CASE("simple case folding keeps length") {
  CHECK(FoldCase(U'Ä') == U'ä');
  CHECK(FoldCase(U'Z') == U'z');
  CHECK(FoldCase(U'ß') == U'ß');
  CHECK(FoldCase(U'Σ') == U'σ');
  CHECK(FoldCase(U'7') == U'7');
}

TEST_CASE("normalize folds case, strips leading hashes and collapses space") {
  CHECK(NormalizeToString("  #Muslime \t sind\n\nDA ") == "muslime sind da");
  CHECK(NormalizeToString("##Islamisierung") == "islamisierung");
  CHECK(NormalizeToString("C#") == "c#");
  CHECK(NormalizeToString("a # b") == "a # b");
  CHECK(NormalizeToString("") == "");
}

TEST_CASE("normalized text maps back to original offsets") {
  const NormalizedText n = Normalize("x  #Juden");
  CHECK(EncodeUtf8(n.text) == "x juden");
  REQUIRE(n.text.size() == 7);
  CHECK(n.origin_begin[2] == 3);  // 'j' starts at the '#'
  CHECK(n.origin_end[2] == 5);
  CHECK(n.origin_end[6] == 9);
}

TEST_CASE("normalization is idempotent on random strings") {
  const std::u32string alphabet = U"aBcÄöÜß# \t\n-_.!Zz1";
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 2000; ++trial) {
    std::u32string s;
    const std::size_t len = rng() % 24;
    for (std::size_t i = 0; i < len; ++i) s.push_back(alphabet[rng() % alphabet.size()]);
    const std::string once = NormalizeToString(EncodeUtf8(s));
    CHECK(NormalizeToString(once) == once);
    const NormalizedText n = Normalize(EncodeUtf8(s));
    for (std::size_t i = 0; i < n.text.size(); ++i) {
      CHECK(n.origin_begin[i] < n.origin_end[i]);
      if (i > 0) CHECK(n.origin_begin[i] >= n.origin_end[i - 1]);
    }
  }
}

TEST_CASE("word characters") {
  CHECK(IsWordChar(U'ä'));
  CHECK(IsWordChar(U'-'));
  CHECK(IsWordChar(U'_'));
  CHECK(IsWordChar(U'9'));
  CHECK_FALSE(IsWordChar(U' '));
  CHECK_FALSE(IsWordChar(U'#'));
  CHECK_FALSE(IsWordChar(U'.'));
  CHECK(Trim("  a b \n") == "a b");
}

}  // namespace
}  // namespace lexjudge::text
