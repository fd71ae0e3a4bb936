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
#include "lexjudge/corpus.h"

#include <random>

#include "doctest.h"
#include "lexjudge/error.h"
#include "test_util.h"

namespace lexjudge::corpus {
namespace {

using legal::GroupCategory;
using testing::Assessment;
using testing::MakePost;
using testing::Record;
using testing::TempDir;
using testing::WriteText;

TEST_CASE("ingest well-formed jsonl") {
  TempDir dir;
  WriteText(dir / "p.jsonl",
            "{\"id\":\"a\",\"text\":\"eins\",\"source\":\"MadeUp\"}\n"
            "{\"id\":\"b\",\"text\":\"zwei\",\"source\":\"WebSearch\",\"language\":\"en\"}\n"
            "\n"
            "{\"id\":\"c\",\"text\":\"drei\",\"source\":\"Initiative\"}\n");
  const Corpus c = Ingest(dir / "p.jsonl", Format::kJsonl);
  REQUIRE(c.posts.size() == 3);
  CHECK(c.posts[1].language == "en");
  CHECK(c.posts[2].source == Source::kInitiative);
}

TEST_CASE("duplicate id is a conflict citing its line") {
  TempDir dir;
  WriteText(dir / "p.jsonl",
            "{\"id\":\"a\",\"text\":\"eins\",\"source\":\"MadeUp\"}\n"
            "{\"id\":\"a\",\"text\":\"zwei\",\"source\":\"MadeUp\"}\n");
  try {
    Ingest(dir / "p.jsonl", Format::kJsonl);
    FAIL("expected a conflict");
  } catch (const Error &e) {
    CHECK(e.code() == ErrorCode::kConflict);
    CHECK(e.line() == 2);
  }
}

TEST_CASE("lenient reading reports every bad line") {
  TempDir dir;
  WriteText(dir / "p.jsonl",
            "{\"id\":\"a\",\"text\":\"eins\",\"source\":\"MadeUp\"}\n"
            "not json\n"
            "{\"id\":\"b\",\"text\":\"x\",\"source\":\"Twitter\"}\n"
            "{\"id\":\"c\",\"text\":\"drei\",\"source\":\"MadeUp\"}\n");
  const IngestReport r = ReadPosts(dir / "p.jsonl", Format::kJsonl);
  CHECK(r.posts.size() == 2);
  REQUIRE(r.errors.size() == 2);
  CHECK(r.errors[0].line() == 2);
  CHECK(r.errors[1].line() == 3);
  CHECK(r.errors[1].code() == ErrorCode::kValidation);
}

TEST_CASE("csv ingestion") {
  TempDir dir;
  WriteText(dir / "p.csv",
            "id,text,source\n"
            "a,\"Hallo, \"\"Welt\"\"\",MadeUp\n"
            "b,\"zwei\nZeilen\",External\n");
  const Corpus c = Ingest(dir / "p.csv", Format::kCsv);
  REQUIRE(c.posts.size() == 2);
  CHECK(c.posts[0].text == "Hallo, \"Welt\"");
  CHECK(c.posts[1].text == "zwei\nZeilen");

  WriteText(dir / "bad.csv", "id,text,source\na,,MadeUp\n");
  try {
    Ingest(dir / "bad.csv", Format::kCsv);
    FAIL("expected a validation error");
  } catch (const Error &e) {
    CHECK(e.code() == ErrorCode::kValidation);
  }
}

TEST_CASE("missing file is an io error") {
  CHECK_THROWS_AS(Ingest("/nonexistent/posts.jsonl", Format::kJsonl), Error);
}

Corpus RandomCorpus(std::mt19937_64 &rng, std::size_t n) {
  static const char *kWords[] = {"Grüße", "Straße", "sind", "alle", "\"quoted\"",
                                 "a,b", "neu\nzeile", "Muslime", "🙂", "x"};
  Corpus c;
  for (std::size_t i = 0; i < n; ++i) {
    std::string text = "Post";
    for (int w = 0; w < 1 + static_cast<int>(rng() % 6); ++w) {
      text += ' ';
      text += kWords[rng() % 10];
    }
    Post p = MakePost("id-" + std::to_string(rng() % 100000) + "-" + std::to_string(i), text);
    p.source = kAllSources[rng() % kAllSources.size()];
    c.posts.push_back(p);
    if (rng() % 2) {
      AddRecord(c, Record(p.id, "L1", {Assessment(true, false, rng() & 1, rng() & 1, false,
                                                  GroupCategory::kJews)}));
    }
    if (rng() % 3 == 0) {
      AddRecord(c, Record(p.id, "E1", {Assessment(false, false, false, false, true)},
                          Role::kExpert));
    }
  }
  return c;
}

TEST_CASE("export then load round trips") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    TempDir dir;
    const Corpus c = RandomCorpus(rng, 1 + rng() % 12);
    Export(c, dir.path(), true);
    const Corpus back = LoadCorpus(dir.path());
    CHECK(SameContents(c, back));
    CHECK(Fingerprint(c) == Fingerprint(back));
  }
}

TEST_CASE("five-post corpus round trip without annotations") {
  std::mt19937_64 rng(9);
  Corpus c = RandomCorpus(rng, 5);
  TempDir dir;
  WriteText(dir / "annotations.jsonl", "stale\n");
  Export(c, dir.path(), false);
  CHECK_FALSE(std::filesystem::exists(dir / "annotations.jsonl"));
  const Corpus back = Ingest(dir / "posts.jsonl", Format::kJsonl);
  c.annotations.clear();
  c.adjudications.clear();
  CHECK(SameContents(c, back));
}

TEST_CASE("export to an unwritable location is an io error") {
  TempDir dir;
  WriteText(dir / "file", "x");
  Corpus c;
  c.posts.push_back(MakePost("a", "b"));
  try {
    Export(c, dir / "file" / "sub", false);
    FAIL("expected an io error");
  } catch (const Error &e) {
    CHECK(e.code() == ErrorCode::kIo);
    CHECK(std::string(e.what()).find("file") != std::string::npos);
  }
}

TEST_CASE("corpus invariants") {
  Corpus c;
  c.posts.push_back(MakePost("a", "Text"));
  AddRecord(c, Record("a", "L1", {Assessment(true, false, false, false, false)}));
  CHECK_THROWS_AS(AddRecord(c, Record("a", "L1", {Assessment(false, false, false, false, false)})),
                  Error);
  CHECK_THROWS_AS(AddRecord(c, Record("zz", "L2", {Assessment(false, false, false, false, false)})),
                  Error);
  AddRecord(c, Record("a", "E1", {Assessment(false, false, false, false, false)}, Role::kExpert));
  try {
    AddRecord(c, Record("a", "E2", {Assessment(false, false, false, false, false)}, Role::kExpert));
    FAIL("expected a conflict");
  } catch (const Error &e) {
    CHECK(e.code() == ErrorCode::kConflict);
  }
  CHECK(c.annotations.size() == 1);
  CHECK(c.adjudications.size() == 1);
}

TEST_CASE("stats percentages per source") {
  Corpus c;
  for (int i = 0; i < 20; ++i) {
    const std::string id = "m" + std::to_string(i);
    c.posts.push_back(MakePost(id, "Text"));
    AddRecord(c, Record(id, "L1", {Assessment(true, false, i < 2, i < 2, false)}));
  }
  const SourceBreakdown s = Stats(c);
  const SourceRow &made_up = s.sources[0];
  CHECK(made_up.source == Source::kMadeUp);
  CHECK(made_up.count == 20);
  CHECK(made_up.punishable == 2);
  CHECK(made_up.percent_punishable == doctest::Approx(10.0));
  std::size_t sum = 0;
  for (const SourceRow &r : s.sources) {
    sum += r.count;
    CHECK(r.percent_punishable >= 0.0);
    CHECK(r.percent_punishable <= 100.0);
  }
  CHECK(sum == s.total);
}

TEST_CASE("stats of an empty corpus") {
  const SourceBreakdown s = Stats(Corpus{});
  CHECK(s.total == 0);
  CHECK(s.labeled == 0);
  CHECK(s.unlabeled == 0);
  for (const SourceRow &r : s.sources) {
    CHECK(r.count == 0);
    CHECK(r.percent_punishable == 0.0);
  }
}

// Reference category counts for the synthetic corpus. They sum to 1004 while
// the label marginals count 1006 rows.
constexpr std::pair<GroupCategory, int> kReferenceCategories[] = {
    {GroupCategory::kNone, 341},          {GroupCategory::kForeignersMigrants, 155},
    {GroupCategory::kOther, 103},         {GroupCategory::kLeftWingGreen, 93},
    {GroupCategory::kMuslims, 81},        {GroupCategory::kOtherPoliticians, 69},
    {GroupCategory::kNationalityOrigin, 49}, {GroupCategory::kJews, 46},
    {GroupCategory::kWomen, 29},          {GroupCategory::kLGBTQ, 17},
    {GroupCategory::kPeopleOfColor, 15},  {GroupCategory::kDisabledSick, 6},
    {GroupCategory::kRightWing, 0},
};

TEST_CASE("synthetic corpus with reference marginals") {
  // 1006 assessment rows over 1000 posts: rows 900..911 pair up into six
  // two-group posts. Row i has group iff i < 465, member iff 465 <= i < 479,
  // distinguishable iff i < 262, hatred iff i < 14 and violence iff i < 40 or
  // 600 <= i < 680, so exactly rows 0..39 are punishable.
  std::vector<GroupCategory> categories;
  for (const auto &[category, n] : kReferenceCategories) {
    for (int k = 0; k < n; ++k) categories.push_back(category);
  }
  REQUIRE(categories.size() == 1004);
  categories.push_back(GroupCategory::kNone);
  categories.push_back(GroupCategory::kNone);
  std::mt19937_64 rng(1);
  for (std::size_t i = categories.size() - 1; i > 0; --i) {
    std::swap(categories[i], categories[rng() % (i + 1)]);
  }
  auto row = [&](int i) {
    return Assessment(i < 465, i >= 465 && i < 479, i < 262, i < 14,
                      i < 40 || (i >= 600 && i < 680), categories[i]);
  };
  Corpus c;
  int post = 0;
  for (int i = 0; i < 1006; ++i) {
    const std::string id = "s" + std::to_string(post++);
    c.posts.push_back(MakePost(id, "synthetic"));
    std::vector<legal::LegalAssessment> as{row(i)};
    if (i >= 900 && i < 912) as.push_back(row(++i));
    AddRecord(c, Record(id, "L1", as));
  }
  REQUIRE(c.posts.size() == 1000);

  const SourceBreakdown s = Stats(c);
  CHECK(s.assessments == 1006);
  CHECK(s.labeled == 1000);
  const std::map<std::string, std::pair<std::size_t, std::size_t>> expected = {
      {"group_of_persons", {541, 465}},  {"individual_as_member", {992, 14}},
      {"distinguishable_by_ground", {744, 262}}, {"incites_hatred", {992, 14}},
      {"incites_violence", {886, 120}},  {"punishable", {966, 40}},
  };
  REQUIRE(s.labels.size() == expected.size());
  for (const LabelCount &l : s.labels) {
    INFO(l.label);
    CHECK(l.false_count == expected.at(l.label).first);
    CHECK(l.true_count == expected.at(l.label).second);
  }
  for (const auto &[category, n] : kReferenceCategories) {
    const int extra = category == GroupCategory::kNone ? 2 : 0;
    CHECK(s.categories[legal::CategoryIndex(category)] == std::size_t(n + extra));
  }
}

}  // namespace
}  // namespace lexjudge::corpus
