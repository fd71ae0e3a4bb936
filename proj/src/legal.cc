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

#include "lexjudge/legal.h"

#include <string>

#include "lexjudge/error.h"
#include "lexjudge/text.h"

namespace lexjudge::legal {

namespace {

struct CategoryInfo {
  GroupCategory category;
  std::string_view name;
  std::string_view label;
};

constexpr std::array<CategoryInfo, kNumCategories> kCategoryInfo = {{
    {GroupCategory::kNone, "None", "None"},
    {GroupCategory::kForeignersMigrants, "ForeignersMigrants",
     "Foreigners/Migrants"},
    {GroupCategory::kOther, "Other", "Other"},
    {GroupCategory::kLeftWingGreen, "LeftWingGreen", "Left Wing/Green Party"},
    {GroupCategory::kMuslims, "Muslims", "Muslims"},
    {GroupCategory::kOtherPoliticians, "OtherPoliticians", "Other Politicians"},
    {GroupCategory::kNationalityOrigin, "NationalityOrigin",
     "Nationality/Origin"},
    {GroupCategory::kJews, "Jews", "Jews"},
    {GroupCategory::kWomen, "Women", "Women"},
    {GroupCategory::kLGBTQ, "LGBTQ", "LGBTQ+"},
    {GroupCategory::kPeopleOfColor, "PeopleOfColor", "People of Color"},
    {GroupCategory::kDisabledSick, "DisabledSick", "Disabled/Sick"},
    {GroupCategory::kRightWing, "RightWing", "Right Wing"},
}};

constexpr std::array<std::string_view, 6> kGroundNames = {
    "Race", "Colour", "Religion", "Descent", "NationalOrigin", "EthnicOrigin",
};

}  // namespace

std::string_view GroundName(ProtectedGround ground) {
  return kGroundNames[static_cast<std::size_t>(ground)];
}

ProtectedGround ParseGround(std::string_view name) {
  for (ProtectedGround g : kAllGrounds) {
    if (GroundName(g) == name) return g;
  }
  throw ValidationError("unknown protected ground '" + std::string(name) + "'",
                        "grounds");
}

std::size_t CategoryIndex(GroupCategory category) {
  return static_cast<std::size_t>(category);
}

std::string_view CategoryName(GroupCategory category) {
  return kCategoryInfo[CategoryIndex(category)].name;
}

std::string_view CategoryLabel(GroupCategory category) {
  return kCategoryInfo[CategoryIndex(category)].label;
}

GroupCategory ParseCategory(std::string_view name) {
  for (const CategoryInfo &info : kCategoryInfo) {
    if (info.name == name) return info.category;
  }
  throw ValidationError("unknown group category '" + std::string(name) + "'",
                        "category");
}

SubLabels ToSubLabels(const LegalAssessment &assessment) {
  return SubLabels{
      .group_of_persons = assessment.target.group_of_persons,
      .individual_as_member = assessment.target.individual_as_member,
      .distinguishable_by_ground = assessment.target.distinguishable_by_ground,
      .incites_hatred = assessment.conduct.incites_hatred,
      .incites_violence = assessment.conduct.incites_violence,
  };
}

LegalAssessment FromSubLabels(const SubLabels &labels) {
  LegalAssessment a;
  a.target.group_of_persons = labels.group_of_persons;
  a.target.individual_as_member = labels.individual_as_member;
  a.target.distinguishable_by_ground = labels.distinguishable_by_ground;
  a.conduct.incites_hatred = labels.incites_hatred;
  a.conduct.incites_violence = labels.incites_violence;
  return a;
}

std::optional<std::string_view> FindViolation(
    const LegalAssessment &assessment,
    std::optional<std::string_view> post_text) {
  const TargetGroupAssessment &t = assessment.target;
  if (t.distinguishable_by_ground &&
      !(t.group_of_persons || t.individual_as_member)) {
    return invariant::kDistinguishableRequiresTarget;
  }
  if (!t.grounds.empty() && !t.distinguishable_by_ground) {
    return invariant::kGroundsRequireDistinguishable;
  }
  if (t.explicit_mention && !t.surface_form) {
    return invariant::kExplicitRequiresSurfaceForm;
  }
  if (!t.explicit_mention && t.surface_form) {
    return invariant::kSurfaceFormRequiresExplicit;
  }
  if (t.surface_form) {
    const SurfaceForm &sf = *t.surface_form;
    if (sf.start >= sf.end) return invariant::kSurfaceFormSpan;
    if (post_text) {
      const std::u32string cps = text::DecodeUtf8(*post_text);
      if (sf.end > cps.size()) return invariant::kSurfaceFormSpan;
      const std::string slice = text::EncodeUtf8(
          std::u32string_view(cps).substr(sf.start, sf.end - sf.start));
      if (slice != sf.text) return invariant::kSurfaceFormSpan;
    }
  }
  return std::nullopt;
}

void Validate(const LegalAssessment &assessment,
              std::optional<std::string_view> post_text) {
  if (auto violated = FindViolation(assessment, post_text)) {
    throw ValidationError(
        "assessment violates invariant " + std::string(*violated),
        std::string(*violated));
  }
}

bool ApplyRule(const SubLabels &labels) {
  const bool target = labels.group_of_persons || labels.individual_as_member;
  const bool conduct = labels.incites_hatred || labels.incites_violence;
  return target && labels.distinguishable_by_ground && conduct;
}

bool DerivePunishability(const LegalAssessment &assessment) {
  Validate(assessment);
  return ApplyRule(ToSubLabels(assessment));
}

std::vector<DerivationRow> DerivationTable() {
  std::vector<DerivationRow> rows;
  rows.reserve(32);
  for (unsigned bits = 0; bits < 32; ++bits) {
    DerivationRow row;
    row.labels = SubLabels{
        .group_of_persons = (bits & 16u) != 0,
        .individual_as_member = (bits & 8u) != 0,
        .distinguishable_by_ground = (bits & 4u) != 0,
        .incites_hatred = (bits & 2u) != 0,
        .incites_violence = (bits & 1u) != 0,
    };
    row.punishable = ApplyRule(row.labels);
    if (auto violated = FindViolation(FromSubLabels(row.labels))) {
      row.reachable = false;
      row.violated_invariant = std::string(*violated);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

GroundSet DefaultGroundsFor(GroupCategory category) {
  switch (category) {
    case GroupCategory::kMuslims:
      return {ProtectedGround::kReligion};
    case GroupCategory::kJews:
      return {ProtectedGround::kReligion, ProtectedGround::kDescent};
    case GroupCategory::kPeopleOfColor:
      return {ProtectedGround::kRace, ProtectedGround::kColour};
    case GroupCategory::kNationalityOrigin:
      return {ProtectedGround::kNationalOrigin, ProtectedGround::kEthnicOrigin};
    default:
      return {};
  }
}

JurisdictionProfile EuMinimumProfile() {
  return JurisdictionProfile{
      .name = "eu-minimum",
      .protected_categories = {GroupCategory::kMuslims, GroupCategory::kJews,
                               GroupCategory::kPeopleOfColor,
                               GroupCategory::kNationalityOrigin},
      .optional_qualifiers_enabled = false,
      .notes =
          "Minimum standard: race, colour, religion, descent, "
          "national or ethnic origin. Unspecified references to foreigners "
          "or refugees are too general to be covered. The optional qualifiers "
          "are not operationalized.",
  };
}

std::vector<std::string> ProfileNames() { return {"eu-minimum"}; }

JurisdictionProfile FindProfile(std::string_view name) {
  if (name == "eu-minimum") return EuMinimumProfile();
  throw Error(ErrorCode::kNotFound,
              "unknown jurisdiction profile '" + std::string(name) + "'",
              "profile");
}

void ValidateProfile(const JurisdictionProfile &profile) {
  if (profile.optional_qualifiers_enabled) {
    throw ValidationError(
        "profile '" + profile.name +
            "' enables optional qualifiers, which are not supported",
        "optional_qualifiers_enabled");
  }
  if (profile.protected_categories.count(GroupCategory::kNone) != 0) {
    throw ValidationError("category None cannot be protected",
                          "protected_categories");
  }
}

}  // namespace lexjudge::legal
