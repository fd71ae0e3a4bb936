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
#include "lexjudge/annotation.h"

#include <atomic>
#include <thread>

#include "doctest.h"
#include "lexjudge/error.h"
#include "test_util.h"

namespace lexjudge::annotation {
namespace {

using legal::GroupCategory;
using legal::ProtectedGround;
using testing::MakePost;
using testing::TempDir;

constexpr QuestionId Q1 = QuestionId::kGroupOfPersons;
constexpr QuestionId Q2 = QuestionId::kIndividualAsMember;
constexpr QuestionId Q3 = QuestionId::kDistinguishable;
constexpr QuestionId Q4 = QuestionId::kCategory;
constexpr QuestionId Q5 = QuestionId::kIncitesHatred;
constexpr QuestionId Q6 = QuestionId::kIncitesViolence;

WizardState Fresh(std::string post = "p1") {
  return WizardState{std::move(post), "L1", {}, {}};
}

ErrorCode CodeOf(auto &&fn) {
  try {
    fn();
  } catch (const Error &e) {
    return e.code();
  }
  return ErrorCode::kInternal;
}

TEST_CASE("skip logic") {
  WizardState s = Fresh();
  CHECK(NextQuestion(s) == Q1);
  s = ApplyAnswer(s, Q1, YesNo{true});
  CHECK(NextQuestion(s) == Q3);
  s = ApplyAnswer(s, Q3, GroundsAnswer{true, {ProtectedGround::kReligion}});
  CHECK(NextQuestion(s) == Q4);
  s = ApplyAnswer(s, Q4, CategoryAnswer{GroupCategory::kMuslims, false, std::nullopt});
  CHECK(NextQuestion(s) == Q5);
  s = ApplyAnswer(s, Q5, YesNo{true});
  CHECK(NextQuestion(s) == Q6);
  s = ApplyAnswer(s, Q6, YesNo{false});
  CHECK(NextQuestion(s) == std::nullopt);

  WizardState no_group = ApplyAnswer(Fresh(), Q1, YesNo{false});
  CHECK(NextQuestion(no_group) == Q2);
  no_group = ApplyAnswer(no_group, Q2, YesNo{false});
  CHECK(NextQuestion(no_group) == Q5);

  WizardState member = ApplyAnswer(ApplyAnswer(Fresh(), Q1, YesNo{false}), Q2, YesNo{true});
  CHECK(NextQuestion(member) == Q3);
}

TEST_CASE("answers out of order are protocol errors") {
  CHECK(CodeOf([] { ApplyAnswer(Fresh(), Q5, YesNo{true}); }) == ErrorCode::kProtocol);
  WizardState s = ApplyAnswer(Fresh(), Q1, YesNo{true});
  CHECK(CodeOf([&] { ApplyAnswer(s, Q2, YesNo{true}); }) == ErrorCode::kProtocol);
  WizardState bad = Fresh();
  bad.answered[Q3] = GroundsAnswer{};
  CHECK(CodeOf([&] { NextQuestion(bad); }) == ErrorCode::kProtocol);
  CHECK(CodeOf([] { ParseQuestionId("Q9"); }) == ErrorCode::kProtocol);
}

TEST_CASE("malformed answers are validation errors") {
  WizardState s = ApplyAnswer(Fresh(), Q1, YesNo{true});
  CHECK(CodeOf([&] { ApplyAnswer(s, Q3, YesNo{true}); }) == ErrorCode::kValidation);
  CHECK(CodeOf([&] {
          ApplyAnswer(s, Q3, GroundsAnswer{false, {ProtectedGround::kRace}});
        }) == ErrorCode::kValidation);
  s = ApplyAnswer(s, Q3, GroundsAnswer{false, {}});
  CHECK(CodeOf([&] {
          ApplyAnswer(s, Q4, CategoryAnswer{GroupCategory::kJews, true, std::nullopt});
        }) == ErrorCode::kValidation);
}

std::vector<WizardEvent> SynagogueAnswers() {
  return {AnswerEvent{Q1, YesNo{true}},
          AnswerEvent{Q3, GroundsAnswer{true, {ProtectedGround::kReligion,
                                               ProtectedGround::kDescent}}},
          AnswerEvent{Q4, CategoryAnswer{GroupCategory::kJews, false, std::nullopt}},
          AnswerEvent{Q5, YesNo{false}},
          AnswerEvent{Q6, YesNo{true}}};
}

TEST_CASE("synagogue example yields a punishable record") {
  const Post post = MakePost("syn", "Es brennen noch zu wenige Synagogen.");
  const WizardState s = Replay("syn", "L1", SynagogueAnswers());
  const AnnotationRecord r = BuildRecord(s, post, Role::kLayperson, Now());
  CHECK(RecordPunishable(r));
  REQUIRE(r.assessments.size() == 1);
  CHECK(r.assessments[0].target.category == GroupCategory::kJews);
}

TEST_CASE("replay is deterministic and equals stepwise application") {
  const WizardState a = Replay("syn", "L1", SynagogueAnswers());
  const WizardState b = Replay("syn", "L1", SynagogueAnswers());
  CHECK(a == b);
  WizardState c = Fresh("syn");
  for (const WizardEvent &e : SynagogueAnswers()) {
    const auto &ev = std::get<AnswerEvent>(e);
    c = ApplyAnswer(c, ev.question, ev.answer);
  }
  CHECK(a == c);
}

TEST_CASE("incomplete sessions cannot be finalized") {
  const Post post = MakePost("p1", "Text");
  const WizardState s = ApplyAnswer(Fresh(), Q1, YesNo{false});
  try {
    BuildRecord(s, post, Role::kLayperson, Now());
    FAIL("expected a validation error");
  } catch (const Error &e) {
    CHECK(e.code() == ErrorCode::kValidation);
    CHECK(e.field() == "Q2");
  }
}

TEST_CASE("two groups give two assessments sharing conduct") {
  const Post post = MakePost("p2", "Juden und Muslime raus");
  WizardState s = Fresh("p2");
  s = ApplyAnswer(s, Q1, YesNo{true});
  s = ApplyAnswer(s, Q3, GroundsAnswer{true, {ProtectedGround::kReligion}});
  s = ApplyAnswer(s, Q4, CategoryAnswer{GroupCategory::kJews, true,
                                        legal::SurfaceForm{0, 5, "Juden"}});
  s = AddGroup(s);
  CHECK(NextQuestion(s) == Q1);
  CHECK(s.completed_groups.size() == 1);
  s = ApplyAnswer(s, Q1, YesNo{true});
  s = ApplyAnswer(s, Q3, GroundsAnswer{true, {ProtectedGround::kReligion}});
  s = ApplyAnswer(s, Q4, CategoryAnswer{GroupCategory::kMuslims, true,
                                        legal::SurfaceForm{10, 17, "Muslime"}});
  s = ApplyAnswer(s, Q5, YesNo{true});
  s = ApplyAnswer(s, Q6, YesNo{false});
  const AnnotationRecord r = BuildRecord(s, post, Role::kLayperson, Now());
  REQUIRE(r.assessments.size() == 2);
  CHECK(r.assessments[0].conduct == r.assessments[1].conduct);
  CHECK(r.assessments[1].target.surface_form->text == "Muslime");
}

TEST_CASE("span must slice the post text") {
  const Post post = MakePost("p1", "Die Juden");
  WizardState s = Fresh();
  s = ApplyAnswer(s, Q1, YesNo{true});
  s = ApplyAnswer(s, Q3, GroundsAnswer{true, {}});
  s = ApplyAnswer(s, Q4, CategoryAnswer{GroupCategory::kJews, true,
                                        legal::SurfaceForm{0, 5, "Juden"}});
  s = ApplyAnswer(s, Q5, YesNo{false});
  s = ApplyAnswer(s, Q6, YesNo{false});
  CHECK(CodeOf([&] { BuildRecord(s, post, Role::kLayperson, Now()); }) ==
        ErrorCode::kValidation);
}

TEST_CASE("wizard json") {
  const Json q = ToJson(GetQuestion(Q4));
  CHECK(q["id"] == "Q4");
  CHECK(q["kind"] == "category_span");
  CHECK(q["options"].size() == legal::kNumCategories);
  const Answer a = CategoryAnswer{GroupCategory::kJews, true, legal::SurfaceForm{0, 5, "Juden"}};
  CHECK(AnswerFromJson(Q4, AnswerToJson(a)) == a);
  CHECK(ToJson(Fresh())["next_question"]["id"] == "Q1");
  CHECK(ToJson(Replay("syn", "L1", SynagogueAnswers()))["next_question"] == "Done");
}

corpus::Corpus SmallCorpus(int n) {
  corpus::Corpus c;
  for (int i = 0; i < n; ++i) c.posts.push_back(MakePost("p" + std::to_string(i), "Text"));
  return c;
}

AnnotationRecord Plain(std::string post, std::string who, Timestamp at) {
  return testing::Record(std::move(post), std::move(who),
                         {testing::Assessment(false, false, false, false, false)},
                         Role::kLayperson, FormatTimestamp(at));
}

TEST_CASE("the 51st record of a day is a quota error") {
  TempDir dir;
  AnnotationStore store(SmallCorpus(60), StoreOptions{50, dir.path()});
  const Timestamp day = ParseTimestamp("2026-05-04T08:00:00Z");
  for (int i = 0; i < 50; ++i) {
    store.Submit(Plain("p" + std::to_string(i), "L1", day + std::chrono::minutes(i)));
  }
  CHECK(store.SubmittedOn("L1", day) == 50);
  CHECK(CodeOf([&] { store.Submit(Plain("p50", "L1", day + std::chrono::hours(10))); }) ==
        ErrorCode::kQuota);
  store.Submit(Plain("p50", "L2", day));
  store.Submit(Plain("p50", "L1", day + std::chrono::hours(24)));
  CHECK(corpus::ReadAnnotations(dir / "annotations.jsonl").size() == 52);
}

TEST_CASE("duplicates conflict and unknown posts are not found") {
  AnnotationStore store(SmallCorpus(2), StoreOptions{});
  store.Submit(Plain("p0", "L1", Now()));
  CHECK(CodeOf([&] { store.Submit(Plain("p0", "L1", Now())); }) == ErrorCode::kConflict);
  CHECK(CodeOf([&] { store.Submit(Plain("zz", "L1", Now())); }) == ErrorCode::kNotFound);
}

TEST_CASE("concurrent submissions respect the cap exactly") {
  TempDir dir;
  AnnotationStore store(SmallCorpus(80), StoreOptions{50, dir.path()});
  const Timestamp day = ParseTimestamp("2026-05-04T08:00:00Z");
  std::atomic<int> accepted = 0, quota = 0;
  std::vector<std::thread> threads;
  for (int t = 0; t < 8; ++t) {
    threads.emplace_back([&, t] {
      for (int i = t; i < 80; i += 8) {
        try {
          store.Submit(Plain("p" + std::to_string(i), "L1", day));
          ++accepted;
        } catch (const Error &e) {
          if (e.code() == ErrorCode::kQuota) ++quota;
        }
      }
    });
  }
  for (std::thread &t : threads) t.join();
  CHECK(accepted == 50);
  CHECK(quota == 30);
  CHECK(corpus::ReadAnnotations(dir / "annotations.jsonl").size() == 50);
}

TEST_CASE("failed persistence leaves the store unchanged") {
  TempDir dir;
  AnnotationStore store(SmallCorpus(2), StoreOptions{50, dir / "missing" / "dir"});
  CHECK(CodeOf([&] { store.Submit(Plain("p0", "L1", Now())); }) == ErrorCode::kIo);
  CHECK(store.Snapshot()->annotations.empty());
}

TEST_CASE("least-annotated posts come first and two annotators cover everything") {
  corpus::Corpus c = SmallCorpus(10);
  AnnotationStore store(c, StoreOptions{100, std::nullopt});
  for (int round = 0; round < 10; ++round) {
    for (const char *who : {"L1", "L2"}) {
      const auto next = NextPostFor(*store.Snapshot(), who);
      REQUIRE(next.has_value());
      store.Submit(Plain(*next, who, Now()));
    }
  }
  const auto snapshot = store.Snapshot();
  for (const Post &p : snapshot->posts) CHECK(snapshot->RecordsFor(p.id).size() == 2);
  CHECK_FALSE(NextPostFor(*snapshot, "L1").has_value());
  const auto first = NextPostFor(SmallCorpus(10), "A");
  CHECK(first == NextPostFor(SmallCorpus(10), "A"));
}

TEST_CASE("consistency hints never block") {
  AnnotationRecord r = testing::Record(
      "p", "L1", {testing::Assessment(true, false, true, false, false, GroupCategory::kJews)});
  r.assessments[0].target.grounds = {ProtectedGround::kRace};
  CHECK_FALSE(ConsistencyHints(r).empty());
}

}  // namespace
}  // namespace lexjudge::annotation
