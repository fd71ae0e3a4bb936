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
#include "lexjudge/agreement.h"

#include <cmath>
#include <random>

#include "doctest.h"
#include "lexjudge/error.h"
#include "test_util.h"

namespace lexjudge::agreement {
namespace {

using legal::GroupCategory;
using testing::Assessment;
using testing::MakePost;
using testing::Record;

// Direct transcription of the textbook definition with probabilities.
double OracleKappa(const std::vector<std::pair<int, int>> &pairs, int labels) {
  const double n = static_cast<double>(pairs.size());
  double observed = 0;
  std::vector<double> pa(labels, 0.0), pb(labels, 0.0);
  for (const auto &[a, b] : pairs) {
    if (a == b) observed += 1;
    pa[a] += 1;
    pb[b] += 1;
  }
  observed /= n;
  double expected = 0;
  for (int l = 0; l < labels; ++l) expected += (pa[l] / n) * (pb[l] / n);
  if (expected == 1.0) return 1.0;
  return (observed - expected) / (1.0 - expected);
}

TEST_CASE("kappa matches the oracle on random label vectors") {
  std::mt19937_64 rng(20260501);
  for (int trial = 0; trial < 1000; ++trial) {
    const int labels = trial % 2 == 0 ? 2 : 2 + static_cast<int>(rng() % 12);
    const std::size_t n = 1 + rng() % 50;
    LabelVectorPair pair;
    pair.label_name = "x";
    for (std::size_t i = 0; i < n; ++i) {
      const int a = static_cast<int>(rng() % labels);
      const int b = rng() % 3 == 0 ? a : static_cast<int>(rng() % labels);
      pair.pairs.emplace_back(a, b);
    }
    const double expected = OracleKappa(pair.pairs, labels);
    REQUIRE(std::fabs(CohenKappa(pair) - expected) < 1e-12);
  }
}

TEST_CASE("hand computed kappa") {
  const std::vector<bool> a = {true, true, false, false, true};
  const std::vector<bool> b = {true, false, false, false, true};
  CHECK(CohenKappa(BinaryPair("x", a, b)) == doctest::Approx(0.32 / 0.52).epsilon(1e-12));
  CHECK(CohenKappa(BinaryPair("x", a, b)) == doctest::Approx(0.6154).epsilon(1e-4));
}

TEST_CASE("kappa edge cases") {
  CHECK(CohenKappa(BinaryPair("x", {1, 1, 1}, {1, 1, 1})) == 1.0);
  CHECK(CohenKappa(BinaryPair("x", {0, 0}, {0, 0})) == 1.0);
  CHECK(CohenKappa(BinaryPair("x", {1, 0}, {0, 1})) == doctest::Approx(-1.0));
  CHECK_THROWS_AS(CohenKappa(LabelVectorPair{}), Error);
  CHECK_THROWS_AS(BinaryPair("x", {1}, {1, 0}), Error);
}

corpus::Corpus TwoAnnotatorCorpus() {
  corpus::Corpus c;
  for (int i = 0; i < 4; ++i) c.posts.push_back(MakePost("p" + std::to_string(i), "Text"));
  const auto jews = Assessment(true, false, true, true, false, GroupCategory::kJews);
  const auto muslims = Assessment(true, false, true, true, false, GroupCategory::kMuslims);
  const auto none = Assessment(false, false, false, false, false);
  c.annotations = {Record("p0", "L1", {jews}),    Record("p0", "L2", {jews}),
                   Record("p1", "L1", {jews}),    Record("p1", "L2", {muslims}),
                   Record("p2", "L1", {none}),    Record("p2", "L2", {none}),
                   Record("p3", "L1", {muslims}), Record("p3", "L2", {muslims})};
  return c;
}

TEST_CASE("agreement report and group confusion") {
  const corpus::Corpus c = TwoAnnotatorCorpus();
  CHECK(Annotators(c) == std::vector<std::string>{"L1", "L2"});
  const AgreementReport report = BuildAgreementReport(c, Annotators(c));
  CHECK(report.warnings.empty());
  CHECK(report.entries.size() == kReportLabels.size());
  for (const KappaEntry &e : report.entries) {
    CHECK(e.n == 4);
    if (e.label == "punishable") CHECK(e.kappa == 1.0);
  }
  const ConfusionMatrix m = GroupConfusion(c, "L1", "L2");
  CHECK(m.Total() == 4);
  CHECK(m.Diagonal() == 3);
  CHECK(m.counts[legal::CategoryIndex(GroupCategory::kJews)]
                [legal::CategoryIndex(GroupCategory::kMuslims)] == 1);
  CHECK(m.ObservedAgreement() == doctest::Approx(0.75));

  const AgreementReport one = BuildAgreementReport(c, Annotators(c), "group_category");
  REQUIRE(one.entries.size() == 1);
  CHECK_THROWS_AS(BuildAgreementReport(c, Annotators(c), "nope"), Error);
}

TEST_CASE("annotators without shared posts produce a warning") {
  corpus::Corpus c;
  c.posts = {MakePost("a", "x"), MakePost("b", "y")};
  const auto none = Assessment(false, false, false, false, false);
  c.annotations = {Record("a", "L1", {none}), Record("b", "L2", {none})};
  const AgreementReport report = BuildAgreementReport(c, {"L1", "L2"});
  CHECK(report.entries.empty());
  REQUIRE(report.warnings.size() == 1);
  CHECK(report.warnings[0].find("share no posts") != std::string::npos);
  CHECK_FALSE(BuildAgreementReport(c, {"L1"}).warnings.empty());
}

TEST_CASE("adjudication settles disagreements through experts") {
  corpus::Corpus c = TwoAnnotatorCorpus();
  AdjudicatedLabels without = Adjudicate(c, {});
  CHECK(without.gold.size() == 3);
  REQUIRE(without.queue.size() == 1);
  CHECK(without.queue[0].post_id == "p1");
  CHECK(without.queue[0].disagreeing_fields ==
        std::vector<std::string>{"assessments[0].category"});

  const AnnotationRecord expert =
      Record("p1", "E1", {Assessment(true, false, true, true, false, GroupCategory::kMuslims)},
             Role::kExpert);
  AdjudicatedLabels with = Adjudicate(c, {expert});
  CHECK(with.queue.empty());
  REQUIRE(with.gold.contains("p1"));
  CHECK(with.gold.at("p1").provenance == Provenance::kExpertOverride);
  CHECK(with.gold.at("p1").assessments[0].target.category == GroupCategory::kMuslims);
  CHECK(with.gold.at("p0").provenance == Provenance::kAgreed);
}

TEST_CASE("single annotations become gold with their provenance") {
  corpus::Corpus c;
  c.posts = {MakePost("a", "x")};
  c.annotations = {Record("a", "L1", {Assessment(false, false, false, true, false)})};
  const AdjudicatedLabels labels = ResolveGold(c);
  REQUIRE(labels.gold.contains("a"));
  CHECK(labels.gold.at("a").provenance == Provenance::kSingleAnnotator);
  CHECK(ProvenanceName(Provenance::kSingleAnnotator) == "SingleAnnotator");
}

TEST_CASE("fixture corpus gold") {
  const corpus::Corpus c = corpus::LoadCorpus(testing::DataDir() / "fixtures");
  const AdjudicatedLabels labels = ResolveGold(c);
  CHECK(labels.gold.size() == 39);
  REQUIRE(labels.queue.size() == 1);
  CHECK(labels.queue[0].post_id == "mu-030");
  std::size_t punishable = 0, overrides = 0;
  for (const auto &[id, entry] : labels.gold) {
    punishable += entry.Punishable();
    overrides += entry.provenance == Provenance::kExpertOverride;
  }
  CHECK(punishable == 15);
  CHECK(overrides == 4);
  CHECK(labels.gold.at("mu-026").implicit_mention);
  const Json j = ToJson(labels);
  CHECK(j["gold"].size() == 39);
}

}  // namespace
}  // namespace lexjudge::agreement
