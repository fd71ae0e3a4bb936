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

// Posts and annotation records, plus their JSON wire forms.

#ifndef LEXJUDGE_RECORDS_H_
#define LEXJUDGE_RECORDS_H_

#include <array>
#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "lexjudge/legal.h"

namespace lexjudge {

using Json = nlohmann::json;
using Timestamp = std::chrono::sys_seconds;

// "2026-10-16T08:30:00Z". Parse accepts only this UTC form.
std::string FormatTimestamp(Timestamp ts);
Timestamp ParseTimestamp(std::string_view s);
// Days since the epoch of the UTC calendar day containing ts.
std::int64_t UtcDay(Timestamp ts);
Timestamp Now();

enum class Source {
  kMadeUp,
  kWebSearch,
  kInitiative,
  kGermEvalAbuseInsult,
  kGermEvalOther,
  kExternal,
};

inline constexpr std::array<Source, 6> kAllSources = {
    Source::kMadeUp,          Source::kWebSearch,
    Source::kInitiative,      Source::kGermEvalAbuseInsult,
    Source::kGermEvalOther,   Source::kExternal,
};

std::string_view SourceName(Source source);
Source ParseSource(std::string_view name);

struct Post {
  std::string id;
  std::string text;
  Source source = Source::kExternal;
  std::string language = "de";

  friend bool operator==(const Post &, const Post &) = default;
};

enum class Role { kLayperson, kExpert };

std::string_view RoleName(Role role);
Role ParseRole(std::string_view name);

// Decision-tree records carry the sub-label answers. Holistic records come
// from annotators asked only "is this punishable?" and carry that verdict;
// they exist so scheme comparisons can be rerun on new data.
enum class Scheme { kDecisionTree, kHolistic };

std::string_view SchemeName(Scheme scheme);
Scheme ParseScheme(std::string_view name);

inline constexpr int kSchemaVersion = 1;

struct AnnotationRecord {
  std::string post_id;
  std::string annotator_id;
  Role role = Role::kLayperson;
  // One per group mentioned, all sharing the same conduct; a single all-false
  // assessment when no group is mentioned.
  std::vector<legal::LegalAssessment> assessments;
  Timestamp created_at{};
  int schema_version = kSchemaVersion;
  Scheme scheme = Scheme::kDecisionTree;
  std::optional<bool> holistic_verdict;
  // Gold-data flag: the post targets a group only implicitly or through
  // coreference.
  bool implicit_mention = false;

  friend bool operator==(const AnnotationRecord &,
                         const AnnotationRecord &) = default;
};

// Throws a validation Error naming the offending field. The surface form
// spans are checked against `post_text` when given.
void ValidateRecord(const AnnotationRecord &record,
                    std::optional<std::string_view> post_text = std::nullopt);

// Punishable if any assessment derives punishable; holistic records return
// their stated verdict.
bool RecordPunishable(const AnnotationRecord &record);

// Post-level sub-labels: each is the OR over the record's assessments.
legal::SubLabels RecordSubLabels(const AnnotationRecord &record);

Json ToJson(const Post &post);
Post PostFromJson(const Json &j);

Json ToJson(const legal::LegalAssessment &assessment);
legal::LegalAssessment AssessmentFromJson(const Json &j);

Json ToJson(const AnnotationRecord &record);
AnnotationRecord RecordFromJson(const Json &j);

}  // namespace lexjudge

#endif  // LEXJUDGE_RECORDS_H_
