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
#include "lexjudge/records.h"

#include <random>

#include "doctest.h"
#include "lexjudge/error.h"
#include "test_util.h"

namespace lexjudge {
namespace {

using legal::GroupCategory;
using testing::Assessment;
using testing::Record;

TEST_CASE("timestamps round trip in UTC") {
  const Timestamp t = ParseTimestamp("2026-03-02T23:59:59Z");
  CHECK(FormatTimestamp(t) == "2026-03-02T23:59:59Z");
  CHECK(UtcDay(t) + 1 == UtcDay(ParseTimestamp("2026-03-03T00:00:00Z")));
  CHECK_THROWS_AS(ParseTimestamp("2026-03-02 10:00"), Error);
}

TEST_CASE("post json round trip and validation") {
  Post p = testing::MakePost("p1", "Hallo Welt");
  p.language = "en";
  CHECK(PostFromJson(ToJson(p)).text == "Hallo Welt");
  CHECK(PostFromJson(ToJson(p)).language == "en");
  CHECK_THROWS_AS(PostFromJson(Json{{"id", "x"}, {"text", "  "}, {"source", "MadeUp"}}),
                  Error);
  CHECK_THROWS_AS(PostFromJson(Json{{"id", "x"}, {"text", "a"}, {"source", "Reddit"}}),
                  Error);
  CHECK(PostFromJson(Json{{"id", "x"}, {"text", "a"}, {"source", "External"}}).language ==
        "de");
}

TEST_CASE("records round trip through json") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<legal::LegalAssessment> as;
    const bool hatred = rng() & 1, violence = rng() & 1;
    const int n = 1 + static_cast<int>(rng() % 3);
    for (int i = 0; i < n; ++i) {
      const bool group = rng() & 1, member = rng() & 1;
      const bool dist = (group || member) && (rng() & 1);
      legal::LegalAssessment a = Assessment(
          group, member, dist, hatred, violence,
          legal::kAllCategories[rng() % legal::kNumCategories]);
      if (dist) a.target.grounds = {legal::kAllGrounds[rng() % 6]};
      if (rng() & 1) {
        a.target.explicit_mention = true;
        a.target.surface_form = legal::SurfaceForm{0, 4, "Text"};
      }
      as.push_back(a);
    }
    AnnotationRecord r = Record("p" + std::to_string(trial), "L1", as,
                                (rng() & 1) ? Role::kExpert : Role::kLayperson);
    r.implicit_mention = rng() & 1;
    ValidateRecord(r, "Text of the post");
    const AnnotationRecord back = RecordFromJson(Json::parse(ToJson(r).dump()));
    CHECK(back == r);
  }
}

TEST_CASE("record validation") {
  AnnotationRecord r = Record("p", "L1", {Assessment(true, false, true, true, false)});
  CHECK_NOTHROW(ValidateRecord(r));
  AnnotationRecord empty = r;
  empty.assessments.clear();
  CHECK_THROWS_AS(ValidateRecord(empty), Error);
  AnnotationRecord no_id = r;
  no_id.annotator_id.clear();
  CHECK_THROWS_AS(ValidateRecord(no_id), Error);
  AnnotationRecord mixed = r;
  mixed.assessments.push_back(Assessment(true, false, false, false, true));
  CHECK_THROWS_AS(ValidateRecord(mixed), Error);
  AnnotationRecord holistic = r;
  holistic.scheme = Scheme::kHolistic;
  CHECK_THROWS_AS(ValidateRecord(holistic), Error);
  holistic.holistic_verdict = false;
  CHECK_NOTHROW(ValidateRecord(holistic));
  CHECK_FALSE(RecordPunishable(holistic));
  AnnotationRecord version = r;
  version.schema_version = 99;
  CHECK_THROWS_AS(ValidateRecord(version), Error);
}

TEST_CASE("multi-group records are punishable if any group is") {
  AnnotationRecord r = Record(
      "p", "L1",
      {Assessment(true, false, false, true, false, GroupCategory::kWomen),
       Assessment(true, false, true, true, false, GroupCategory::kJews)});
  CHECK(RecordPunishable(r));
  const legal::SubLabels s = RecordSubLabels(r);
  CHECK(s.group_of_persons);
  CHECK(s.distinguishable_by_ground);
  CHECK(s.incites_hatred);
  r.assessments.pop_back();
  CHECK_FALSE(RecordPunishable(r));
}

}  // namespace
}  // namespace lexjudge
