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
#include "lexjudge/evaluation.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "doctest.h"
#include "lexjudge/error.h"
#include "test_util.h"

namespace lexjudge::evaluation {
namespace {

using testing::MakePost;

Metrics OracleMetrics(const std::vector<bool> &predicted, const std::vector<bool> &gold) {
  double tp = 0, pp = 0, gp = 0;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    tp += predicted[i] && gold[i];
    pp += predicted[i];
    gp += gold[i];
  }
  Metrics m;
  m.precision = pp == 0 ? 0.0 : tp / pp;
  m.recall = gp == 0 ? 0.0 : tp / gp;
  m.f1 = m.precision + m.recall == 0 ? 0.0
                                     : 2 * m.precision * m.recall / (m.precision + m.recall);
  return m;
}

TEST_CASE("metrics match the oracle") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = rng() % 60;
    const double rate = static_cast<double>(rng() % 100) / 100.0;
    std::bernoulli_distribution coin(rate);
    std::vector<bool> predicted(n), gold(n);
    Confusion c;
    for (std::size_t i = 0; i < n; ++i) {
      predicted[i] = coin(rng);
      gold[i] = coin(rng);
      c.Add(predicted[i], gold[i]);
    }
    const Metrics got = Score(c);
    const Metrics want = OracleMetrics(predicted, gold);
    REQUIRE(got.precision == doctest::Approx(want.precision).epsilon(1e-12));
    REQUIRE(got.recall == doctest::Approx(want.recall).epsilon(1e-12));
    REQUIRE(got.f1 == doctest::Approx(want.f1).epsilon(1e-12));
    REQUIRE(c.Total() == n);
  }
  const Metrics zero = Score(Confusion{});
  CHECK(zero.precision == 0.0);
  CHECK(zero.recall == 0.0);
  CHECK(zero.f1 == 0.0);
}

std::vector<LabeledItem> Items(std::size_t n, std::size_t positives) {
  std::vector<LabeledItem> items;
  for (std::size_t i = 0; i < n; ++i) {
    items.push_back({"i" + std::to_string(i), i < positives});
  }
  return items;
}

void CheckInvariants(const std::vector<LabeledItem> &items, const FoldPlan &plan) {
  const auto folds = plan.Folds();
  REQUIRE(folds.size() == plan.k);
  std::set<std::string> seen;
  std::size_t min_size = items.size(), max_size = 0, min_pos = items.size(), max_pos = 0;
  std::map<std::string, bool> positive;
  for (const LabeledItem &it : items) positive[it.id] = it.positive;
  for (const auto &fold : folds) {
    std::size_t pos = 0;
    for (const std::string &id : fold) {
      REQUIRE(seen.insert(id).second);
      pos += positive.at(id);
    }
    min_size = std::min(min_size, fold.size());
    max_size = std::max(max_size, fold.size());
    min_pos = std::min(min_pos, pos);
    max_pos = std::max(max_pos, pos);
  }
  CHECK(seen.size() == items.size());
  CHECK(max_size - min_size <= 1);
  CHECK(max_pos - min_pos <= 1);
}

TEST_CASE("stratified folds spread positives evenly") {
  const auto items = Items(100, 40);
  const FoldPlan plan = StratifiedFolds(items, 10, "punishable", 1);
  CheckInvariants(items, plan);
  for (const auto &fold : plan.Folds()) {
    CHECK(fold.size() == 10);
    CHECK(std::count_if(fold.begin(), fold.end(), [](const std::string &id) {
            return std::stoi(id.substr(1)) < 40;
          }) == 4);
  }
  CHECK(plan.warnings.empty());

  const FoldPlan sparse = StratifiedFolds(Items(100, 4), 10, "punishable", 1);
  std::size_t with_positive = 0;
  for (const auto &fold : sparse.Folds()) {
    const auto pos = std::count_if(fold.begin(), fold.end(), [](const std::string &id) {
      return std::stoi(id.substr(1)) < 4;
    });
    CHECK(pos <= 1);
    with_positive += pos == 1;
  }
  CHECK(with_positive == 4);
  CHECK_FALSE(sparse.warnings.empty());
}

TEST_CASE("stratified folds hold their invariants on random configurations") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + rng() % 300;
    const std::size_t positives = rng() % (n + 1);
    const std::size_t k = 2 + rng() % std::min<std::size_t>(n - 1, 20);
    auto items = Items(n, positives);
    std::shuffle(items.begin(), items.end(), rng);
    CheckInvariants(items, StratifiedFolds(items, k, "punishable", rng()));
  }
}

TEST_CASE("fold plans are deterministic and independent of input order") {
  auto items = Items(57, 13);
  const FoldPlan a = StratifiedFolds(items, 5, "punishable", 11);
  std::reverse(items.begin(), items.end());
  const FoldPlan b = StratifiedFolds(items, 5, "punishable", 11);
  CHECK(a.assignments == b.assignments);
  const FoldPlan c = StratifiedFolds(items, 5, "punishable", 12);
  CHECK(a.assignments != c.assignments);
}

TEST_CASE("fold count is validated") {
  CHECK_THROWS_AS(StratifiedFolds(Items(10, 2), 1, "punishable", 0), Error);
  CHECK_THROWS_AS(StratifiedFolds(Items(10, 2), 11, "punishable", 0), Error);
  CHECK_NOTHROW(StratifiedFolds(Items(10, 2), 10, "punishable", 0));
  CHECK_THROWS_AS(CheckLabel("nope"), Error);
}

// Looks up the answer in a fixed table.
class TablePredictor : public detection::Predictor {
 public:
  TablePredictor(std::map<std::string, bool> answers) : answers_(std::move(answers)) {}
  std::string name() const override { return "table"; }
  detection::PredictorKind kind() const override { return detection::PredictorKind::kExternal; }
  detection::SubLabelPrediction Predict(const Post &post,
                                        const detection::FoldContext *) const override {
    detection::SubLabelPrediction p;
    p.punishable = detection::LabelScore{answers_.at(post.id) ? 1.0 : 0.0, {}, "table"};
    return p;
  }

 private:
  std::map<std::string, bool> answers_;
};

struct Setup {
  std::vector<Post> posts;
  GoldMap gold;
  std::map<std::string, bool> truth;
};

Setup MakeSetup(std::size_t n, std::size_t positives) {
  Setup s;
  for (std::size_t i = 0; i < n; ++i) {
    const std::string id = "e" + std::to_string(i);
    s.posts.push_back(MakePost(id, "t"));
    GoldLabels g;
    g.punishable = i < positives;
    s.gold[id] = g;
    s.truth[id] = g.punishable;
  }
  return s;
}

FoldPlan PlanFor(const Setup &s, std::size_t k) {
  std::vector<LabeledItem> items;
  for (const auto &[id, g] : s.gold) items.push_back({id, g.punishable});
  return StratifiedFolds(items, k, "punishable", 3);
}

TEST_CASE("perfect and all-negative predictors") {
  const Setup s = MakeSetup(50, 10);
  const FoldPlan plan = PlanFor(s, 5);
  const EvaluationReport perfect =
      Evaluate(TablePredictor(s.truth), s.posts, s.gold, plan, legal::EuMinimumProfile(), "fp");
  const LabelMetrics *m = perfect.Find("punishable");
  REQUIRE(m != nullptr);
  CHECK(m->average.f1 == 1.0);
  CHECK(m->pooled.precision == 1.0);
  CHECK(m->pooled_confusion.tp == 10);
  CHECK(m->fold_metrics.size() == 5);
  CHECK(perfect.Find("incites_hatred") == nullptr);

  std::map<std::string, bool> negative;
  for (const auto &[id, v] : s.truth) negative[id] = false;
  const EvaluationReport none =
      Evaluate(TablePredictor(negative), s.posts, s.gold, plan, legal::EuMinimumProfile(), "fp");
  CHECK(none.Find("punishable")->average.precision == 0.0);
  CHECK(none.Find("punishable")->average.recall == 0.0);
  CHECK(none.Find("punishable")->pooled_confusion.tn == 40);
}

EvaluationReport Fake(std::string name, double f1, std::string fingerprint = "fp") {
  EvaluationReport r;
  r.predictor = std::move(name);
  r.corpus_fingerprint = std::move(fingerprint);
  r.k = 10;
  LabelMetrics m;
  m.label = "punishable";
  m.average = Metrics{f1, f1, f1};
  m.pooled = m.average;
  r.labels.push_back(m);
  return r;
}

TEST_CASE("comparison deltas are relative to the last report") {
  const Comparison same = Compare({Fake("a", 0.5), Fake("b", 0.5)});
  CHECK(same.rows.at(0).cells.at(0).delta->f1 == 0.0);
  CHECK_FALSE(same.rows.at(0).cells.at(1).delta.has_value());

  const Comparison c = Compare({Fake("new", 0.42), Fake("base", 0.39)});
  CHECK(c.rows.at(0).cells.at(0).delta->f1 == doctest::Approx(0.03));
  CHECK(RenderComparison(c).find("+0.03") != std::string::npos);

  const Comparison single = Compare({Fake("only", 0.4)});
  CHECK(RenderComparison(single).find("dF1") == std::string::npos);
  CHECK_FALSE(single.rows.at(0).cells.at(0).delta.has_value());

  try {
    Compare({Fake("a", 0.4, "x"), Fake("b", 0.4, "y")});
    FAIL("expected a validation error");
  } catch (const Error &e) {
    CHECK(e.field() == "corpus_fingerprint");
  }
  CHECK_THROWS_AS(Compare({}), Error);
}

TEST_CASE("report json round trip") {
  const Setup s = MakeSetup(30, 9);
  const EvaluationReport r = Evaluate(TablePredictor(s.truth), s.posts, s.gold, PlanFor(s, 3),
                                      legal::EuMinimumProfile(), "abc");
  const EvaluationReport back = ReportFromJson(ToJson(r));
  CHECK(ToJson(back) == ToJson(r));
  CHECK(back.corpus_fingerprint == "abc");
  CHECK_FALSE(ReportCsv(r).empty());
  CHECK(RenderReport(r).find("punishable") != std::string::npos);
}

TEST_CASE("fixture corpus results table") {
  const corpus::Corpus c = corpus::LoadCorpus(testing::DataDir() / "fixtures");
  const detection::Resources r =
      detection::LoadResources(testing::DataDir(), legal::EuMinimumProfile());
  const ResultsTable t = BuildResultsTable(c, r, 5, 7);
  REQUIRE(t.rows.size() == 8);
  CHECK(t.rows[5].name == "Punishable (random)");
  CHECK(t.rows[7].name == "Punishable (submodels + decision tree)");
  CHECK(t.rows[7].average.f1 > t.rows[6].average.f1);
  CHECK(t.rows[6].average.f1 > t.rows[5].average.f1);
  const ResultsTable again = BuildResultsTable(c, r, 5, 7);
  CHECK(ToJson(again) == ToJson(t));
}

}  // namespace
}  // namespace lexjudge::evaluation
