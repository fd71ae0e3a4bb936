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

#include "doctest.h"
#include "lexjudge/error.h"
#include "test_util.h"

namespace lexjudge::legal {
namespace {

using testing::Assessment;

// Independent restatement of the rule: the target condition needs a group or
// a member and a protected ground; the conduct condition needs either act.
bool Oracle(int bits) {
  const bool group = bits & 16, member = bits & 8, dist = bits & 4;
  const bool hatred = bits & 2, violence = bits & 1;
  int target = 0;
  if (group) ++target;
  if (member) ++target;
  int conduct = 0;
  if (hatred) ++conduct;
  if (violence) ++conduct;
  return target > 0 && dist && conduct > 0;
}

TEST_CASE("worked example annotations") {
  // Gutmenschen: group of persons, explicit, no conduct.
  LegalAssessment gutmenschen = Assessment(true, false, false, false, false,
                                           GroupCategory::kOther);
  gutmenschen.target.explicit_mention = true;
  gutmenschen.target.surface_form = SurfaceForm{4, 15, "Gutmenschen"};
  CHECK_FALSE(DerivePunishability(gutmenschen));

  LegalAssessment left = Assessment(true, false, false, false, true,
                                    GroupCategory::kLeftWingGreen);
  CHECK_FALSE(DerivePunishability(left));

  LegalAssessment synagogues = Assessment(true, false, true, false, true,
                                          GroupCategory::kJews);
  CHECK(DerivePunishability(synagogues));

  LegalAssessment muslims = Assessment(true, false, true, true, false,
                                       GroupCategory::kMuslims);
  muslims.target.grounds = {ProtectedGround::kReligion};
  CHECK(DerivePunishability(muslims));
}

TEST_CASE("rule matches the oracle on all 32 combinations") {
  const std::vector<DerivationRow> table = DerivationTable();
  REQUIRE(table.size() == 32);
  int reachable = 0;
  for (int bits = 0; bits < 32; ++bits) {
    const DerivationRow &row = table[bits];
    CHECK(row.labels.group_of_persons == bool(bits & 16));
    CHECK(row.labels.individual_as_member == bool(bits & 8));
    CHECK(row.labels.distinguishable_by_ground == bool(bits & 4));
    CHECK(row.labels.incites_hatred == bool(bits & 2));
    CHECK(row.labels.incites_violence == bool(bits & 1));
    CHECK(row.punishable == Oracle(bits));
    CHECK(ApplyRule(row.labels) == Oracle(bits));
    if (row.reachable) {
      ++reachable;
      CHECK(DerivePunishability(FromSubLabels(row.labels)) == Oracle(bits));
    } else {
      CHECK(row.violated_invariant == invariant::kDistinguishableRequiresTarget);
      CHECK_THROWS_AS(DerivePunishability(FromSubLabels(row.labels)), Error);
    }
  }
  CHECK(reachable == 28);
}

TEST_CASE("conduct independence for a protected target") {
  for (int t = 1; t < 4; ++t) {
    for (int c = 0; c < 4; ++c) {
      const SubLabels s{.group_of_persons = bool(t & 1),
                        .individual_as_member = bool(t & 2),
                        .distinguishable_by_ground = true,
                        .incites_hatred = bool(c & 1),
                        .incites_violence = bool(c & 2)};
      CHECK(ApplyRule(s) == (c != 0));
    }
  }
}

TEST_CASE("invariant violations name the invariant") {
  LegalAssessment a = Assessment(false, false, true, true, false);
  try {
    Validate(a);
    FAIL("expected a validation error");
  } catch (const Error &e) {
    CHECK(e.code() == ErrorCode::kValidation);
    CHECK(e.field() == invariant::kDistinguishableRequiresTarget);
  }

  LegalAssessment grounds = Assessment(true, false, false, false, false);
  grounds.target.grounds = {ProtectedGround::kReligion};
  CHECK(FindViolation(grounds) == invariant::kGroundsRequireDistinguishable);

  LegalAssessment explicit_only = Assessment(true, false, false, false, false);
  explicit_only.target.explicit_mention = true;
  CHECK(FindViolation(explicit_only) == invariant::kExplicitRequiresSurfaceForm);

  LegalAssessment span = Assessment(true, false, false, false, false);
  span.target.explicit_mention = true;
  span.target.surface_form = SurfaceForm{0, 5, "Juden"};
  CHECK(FindViolation(span, "Juden raus") == std::nullopt);
  CHECK(FindViolation(span, "Die Juden") == invariant::kSurfaceFormSpan);
  span.target.surface_form = SurfaceForm{5, 50, "x"};
  CHECK(FindViolation(span, "Juden raus") == invariant::kSurfaceFormSpan);
}

TEST_CASE("both target flags may be set together") {
  CHECK(DerivePunishability(Assessment(true, true, true, false, true)));
}

TEST_CASE("names parse back") {
  for (GroupCategory c : kAllCategories) CHECK(ParseCategory(CategoryName(c)) == c);
  for (ProtectedGround g : kAllGrounds) CHECK(ParseGround(GroundName(g)) == g);
  CHECK_THROWS_AS(ParseCategory("Martians"), Error);
  CHECK(CategoryIndex(GroupCategory::kRightWing) == 12);
  CHECK(CategoryLabel(GroupCategory::kLGBTQ) == "LGBTQ+");
}

TEST_CASE("default grounds per category") {
  CHECK(DefaultGroundsFor(GroupCategory::kJews) ==
        GroundSet{ProtectedGround::kReligion, ProtectedGround::kDescent});
  CHECK(DefaultGroundsFor(GroupCategory::kWomen).empty());
}

TEST_CASE("profiles") {
  const JurisdictionProfile eu = FindProfile("eu-minimum");
  CHECK(eu.protected_categories.size() == 4);
  CHECK(eu.protected_categories.contains(GroupCategory::kMuslims));
  CHECK_FALSE(eu.protected_categories.contains(GroupCategory::kForeignersMigrants));
  CHECK_THROWS_AS(FindProfile("nowhere"), Error);
  JurisdictionProfile q = eu;
  q.optional_qualifiers_enabled = true;
  CHECK_THROWS_AS(ValidateProfile(q), Error);
  JurisdictionProfile none = eu;
  none.protected_categories.insert(GroupCategory::kNone);
  CHECK_THROWS_AS(ValidateProfile(none), Error);
}

}  // namespace
}  // namespace lexjudge::legal
