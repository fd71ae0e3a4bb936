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

// Guided annotation: the legal assessment broken into binary sub-decisions,
// asked one at a time.
//
//   Q1 group of persons?
//   Q2 individual as member of a group?        (only if Q1 = no)
//   Q3 distinguishable by a protected ground?  (only if Q1 or Q2 = yes)
//   Q4 group category, explicit mention, span  (only if Q1 or Q2 = yes)
//   Q5 inciting hatred?                        (always)
//   Q6 inciting violence?                      (always)
//
// The next question is a pure function of the answers given so far, so a
// session can be resumed from its answers alone.

#ifndef LEXJUDGE_ANNOTATION_H_
#define LEXJUDGE_ANNOTATION_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "lexjudge/corpus.h"
#include "lexjudge/legal.h"
#include "lexjudge/records.h"

namespace lexjudge::annotation {

enum class QuestionId {
  kGroupOfPersons = 1,
  kIndividualAsMember = 2,
  kDistinguishable = 3,
  kCategory = 4,
  kIncitesHatred = 5,
  kIncitesViolence = 6,
};

enum class AnswerKind { kYesNo, kGrounds, kCategorySpan };

struct Question {
  QuestionId id;
  std::string_view wire_id;  // "Q1" ... "Q6"
  std::string_view text;
  AnswerKind kind;
};

const Question &GetQuestion(QuestionId id);
// Throws a protocol Error for unknown ids.
QuestionId ParseQuestionId(std::string_view wire_id);

struct YesNo {
  bool value = false;
  friend bool operator==(const YesNo &, const YesNo &) = default;
};

struct GroundsAnswer {
  bool distinguishable = false;
  legal::GroundSet grounds;
  friend bool operator==(const GroundsAnswer &, const GroundsAnswer &) = default;
};

struct CategoryAnswer {
  legal::GroupCategory category = legal::GroupCategory::kNone;
  bool explicit_mention = false;
  std::optional<legal::SurfaceForm> surface_form;
  friend bool operator==(const CategoryAnswer &,
                         const CategoryAnswer &) = default;
};

using Answer = std::variant<YesNo, GroundsAnswer, CategoryAnswer>;

struct WizardState {
  std::string post_id;
  std::string annotator_id;
  std::map<QuestionId, Answer> answered;
  // Target assessments already finished via AddGroup.
  std::vector<legal::TargetGroupAssessment> completed_groups;

  friend bool operator==(const WizardState &, const WizardState &) = default;
};

// The next question to ask, or nullopt when the session is done. Throws a
// protocol Error if `answered` holds answers the skip logic rules out.
std::optional<QuestionId> NextQuestion(const WizardState &state);

// Records the answer to the current question. Answering anything but
// NextQuestion(state) is a protocol error; a malformed answer is a
// validation error.
WizardState ApplyAnswer(WizardState state, QuestionId question, Answer answer);

// Sets the current group aside and reopens Q1-Q4 for another one. Conduct
// answers are kept and shared by all groups.
WizardState AddGroup(WizardState state);

struct AnswerEvent {
  QuestionId question;
  Answer answer;
};
struct AddGroupEvent {};
using WizardEvent = std::variant<AnswerEvent, AddGroupEvent>;

WizardState Replay(std::string post_id, std::string annotator_id,
                   const std::vector<WizardEvent> &events);

// Builds the finished record. Requires NextQuestion(state) == nullopt and
// validates every assessment against the post text.
AnnotationRecord BuildRecord(const WizardState &state, const Post &post,
                             Role role, Timestamp created_at);

// Non-blocking hints, e.g. grounds that differ from DefaultGroundsFor.
std::vector<std::string> ConsistencyHints(const AnnotationRecord &record);

Json ToJson(const Question &question);
Json AnswerToJson(const Answer &answer);
// Decodes the answer form expected by `question`.
Answer AnswerFromJson(QuestionId question, const Json &j);
Json ToJson(const WizardState &state);

// Least-annotated post first among those the annotator has not annotated;
// ties broken by a per-annotator pseudo-random order.
std::optional<std::string> NextPostFor(const corpus::Corpus &corpus,
                                       std::string_view annotator_id);

struct StoreOptions {
  std::size_t daily_cap = 50;
  // When set, annotations.jsonl in this directory is rewritten atomically on
  // every accepted record.
  std::optional<std::filesystem::path> directory;
};

struct Submitted {
  AnnotationRecord record;
  // Derived from the record, never stored.
  bool punishable = false;
  std::vector<std::string> hints;
};

Json ToJson(const Submitted &submitted);

// Owns the live corpus. Readers get immutable snapshots; writers are
// serialized, and the quota check, persistence and publication of a new
// snapshot happen under one lock.
class AnnotationStore {
 public:
  AnnotationStore(corpus::Corpus corpus, StoreOptions options);

  std::shared_ptr<const corpus::Corpus> Snapshot() const;
  std::size_t daily_cap() const { return options_.daily_cap; }

  // Throws Conflict for a duplicate (post, annotator) pair or a second expert
  // record for a post, Quota when the annotator already has daily_cap records
  // on the record's UTC day, Validation/NotFound for bad records and Io when
  // persisting fails (the store is then unchanged).
  Submitted Submit(AnnotationRecord record);

  // Records the annotator has persisted on the UTC day of `at`.
  std::size_t SubmittedOn(std::string_view annotator_id, Timestamp at) const;

 private:
  mutable std::shared_mutex mu_;
  std::shared_ptr<const corpus::Corpus> corpus_;
  StoreOptions options_;
};

// Finishes a wizard session and submits the record.
Submitted Submit(const WizardState &state, AnnotationStore &store, Role role,
                 Timestamp now);

}  // namespace lexjudge::annotation

#endif  // LEXJUDGE_ANNOTATION_H_
