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

// Executable encoding of the EU minimum standard for punishable hate speech
// (Council Framework Decision 2008/913/JHA).
//
// A post is potentially punishable when it addresses a protected target and
// shows targeting conduct:
//
//   (group of persons OR individual as member)
//     AND distinguishable by race, colour, religion, descent, national or
//         ethnic origin
//     AND (inciting hatred OR inciting violence)
//
// Everything here is a pure value type or a pure function.

#ifndef LEXJUDGE_LEGAL_H_
#define LEXJUDGE_LEGAL_H_

#include <array>
#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace lexjudge::legal {

enum class ProtectedGround {
  kRace,
  kColour,
  kReligion,
  kDescent,
  kNationalOrigin,
  kEthnicOrigin,
};

inline constexpr std::array<ProtectedGround, 6> kAllGrounds = {
    ProtectedGround::kRace,     ProtectedGround::kColour,
    ProtectedGround::kReligion, ProtectedGround::kDescent,
    ProtectedGround::kNationalOrigin, ProtectedGround::kEthnicOrigin,
};

// The short list of frequently attacked groups offered to annotators. The
// enumerator order is the canonical row/column order of confusion matrices.
enum class GroupCategory {
  kNone,
  kForeignersMigrants,
  kOther,
  kLeftWingGreen,
  kMuslims,
  kOtherPoliticians,
  kNationalityOrigin,
  kJews,
  kWomen,
  kLGBTQ,
  kPeopleOfColor,
  kDisabledSick,
  kRightWing,
};

inline constexpr std::size_t kNumCategories = 13;

inline constexpr std::array<GroupCategory, kNumCategories> kAllCategories = {
    GroupCategory::kNone,          GroupCategory::kForeignersMigrants,
    GroupCategory::kOther,         GroupCategory::kLeftWingGreen,
    GroupCategory::kMuslims,       GroupCategory::kOtherPoliticians,
    GroupCategory::kNationalityOrigin, GroupCategory::kJews,
    GroupCategory::kWomen,         GroupCategory::kLGBTQ,
    GroupCategory::kPeopleOfColor, GroupCategory::kDisabledSick,
    GroupCategory::kRightWing,
};

using GroundSet = std::set<ProtectedGround>;
using CategorySet = std::set<GroupCategory>;

// Wire names ("Religion", "PeopleOfColor", ...). Parse* throw a validation
// Error on unknown names.
std::string_view GroundName(ProtectedGround ground);
ProtectedGround ParseGround(std::string_view name);
std::string_view CategoryName(GroupCategory category);
GroupCategory ParseCategory(std::string_view name);
// Human-readable label ("Left Wing/Green Party").
std::string_view CategoryLabel(GroupCategory category);
std::size_t CategoryIndex(GroupCategory category);

// Literal span referring to a group. Offsets are Unicode code point offsets
// into the post text, half-open [start, end).
struct SurfaceForm {
  std::size_t start = 0;
  std::size_t end = 0;
  std::string text;

  friend bool operator==(const SurfaceForm &, const SurfaceForm &) = default;
};

struct TargetGroupAssessment {
  bool group_of_persons = false;
  bool individual_as_member = false;
  bool distinguishable_by_ground = false;
  GroundSet grounds;
  GroupCategory category = GroupCategory::kNone;
  bool explicit_mention = false;
  std::optional<SurfaceForm> surface_form;

  friend bool operator==(const TargetGroupAssessment &,
                         const TargetGroupAssessment &) = default;
};

// Conduct is assessed independently of the target outcome.
struct ConductAssessment {
  bool incites_hatred = false;
  bool incites_violence = false;

  friend bool operator==(const ConductAssessment &,
                         const ConductAssessment &) = default;
};

struct LegalAssessment {
  TargetGroupAssessment target;
  ConductAssessment conduct;

  friend bool operator==(const LegalAssessment &,
                         const LegalAssessment &) = default;
};

// The five boolean sub-labels the verdict depends on.
struct SubLabels {
  bool group_of_persons = false;
  bool individual_as_member = false;
  bool distinguishable_by_ground = false;
  bool incites_hatred = false;
  bool incites_violence = false;

  friend bool operator==(const SubLabels &, const SubLabels &) = default;
};

inline constexpr std::array<std::string_view, 5> kSubLabelNames = {
    "group_of_persons", "individual_as_member", "distinguishable_by_ground",
    "incites_hatred",   "incites_violence",
};

SubLabels ToSubLabels(const LegalAssessment &assessment);
// Minimal assessment carrying only the five sub-labels.
LegalAssessment FromSubLabels(const SubLabels &labels);

// Names of the type invariants, used as the `field` of validation errors.
namespace invariant {
inline constexpr std::string_view kDistinguishableRequiresTarget =
    "distinguishable_by_ground=>group_of_persons|individual_as_member";
inline constexpr std::string_view kGroundsRequireDistinguishable =
    "grounds=>distinguishable_by_ground";
inline constexpr std::string_view kExplicitRequiresSurfaceForm =
    "explicit_mention=>surface_form";
inline constexpr std::string_view kSurfaceFormRequiresExplicit =
    "surface_form=>explicit_mention";
inline constexpr std::string_view kSurfaceFormSpan = "surface_form.span";
}  // namespace invariant

// Returns the first violated invariant, or nullopt. The span check against
// the post text runs only when `post_text` is given.
std::optional<std::string_view> FindViolation(
    const LegalAssessment &assessment,
    std::optional<std::string_view> post_text = std::nullopt);

// Throws a validation Error whose field() names the violated invariant.
void Validate(const LegalAssessment &assessment,
              std::optional<std::string_view> post_text = std::nullopt);

// The decision rule on bare sub-labels, without invariant checks.
bool ApplyRule(const SubLabels &labels);

// Validates and applies the rule.
bool DerivePunishability(const LegalAssessment &assessment);

struct DerivationRow {
  SubLabels labels;
  bool punishable = false;
  bool reachable = true;
  // Set when !reachable.
  std::string violated_invariant;
};

// All 32 sub-label combinations in binary order: row i has
// group_of_persons = bit 4 of i, ..., incites_violence = bit 0 of i.
std::vector<DerivationRow> DerivationTable();

// Consistency hint for annotators; never overrides annotator input.
GroundSet DefaultGroundsFor(GroupCategory category);

struct JurisdictionProfile {
  std::string name;
  CategorySet protected_categories;
  // Optional qualifiers (public order, threatening/abusive conduct). Inert:
  // no shipped profile enables them and ValidateProfile rejects true.
  bool optional_qualifiers_enabled = false;
  std::string notes;
};

JurisdictionProfile EuMinimumProfile();
// Built-in profiles by name ("eu-minimum"). Throws NotFound.
JurisdictionProfile FindProfile(std::string_view name);
std::vector<std::string> ProfileNames();
void ValidateProfile(const JurisdictionProfile &profile);

}  // namespace lexjudge::legal

#endif  // LEXJUDGE_LEGAL_H_
