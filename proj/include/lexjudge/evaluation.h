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
// Stratified k-fold evaluation of predictors against adjudicated gold
// labels, and side-by-side comparison of the resulting reports.

#ifndef LEXJUDGE_EVALUATION_H_
#define LEXJUDGE_EVALUATION_H_

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lexjudge/corpus.h"
#include "lexjudge/detection.h"
#include "lexjudge/legal.h"
#include "lexjudge/records.h"

namespace lexjudge::evaluation {

// Sub-labels in reporting order, then the verdict.
inline constexpr std::array<std::string_view, 6> kEvalLabels = {
    "group_of_persons", "individual_as_member", "distinguishable_by_ground",
    "incites_hatred",   "incites_violence",     "punishable",
};

// Throws a validation Error for names outside kEvalLabels.
void CheckLabel(std::string_view label);

struct GoldLabels {
  legal::SubLabels sub;
  bool punishable = false;

  bool Get(std::string_view label) const;
};

using GoldMap = std::map<std::string, GoldLabels, std::less<>>;

// Gold labels of every resolved post in the corpus.
GoldMap GoldFromCorpus(const corpus::Corpus &corpus);

struct LabeledItem {
  std::string id;
  bool positive = false;
};

struct FoldPlan {
  std::size_t k = 0;
  std::map<std::string, std::size_t, std::less<>> assignments;
  std::string stratify_label;
  std::uint64_t seed = 0;
  std::vector<std::string> warnings;

  // Post ids per fold, in id order.
  std::vector<std::vector<std::string>> Folds() const;
};

// Shuffles positives and negatives separately and deals them round-robin
// over the folds, positives first, then permutes the fold indices. Throws a
// validation Error for k < 2, k > number of items or duplicate ids.
FoldPlan StratifiedFolds(const std::vector<LabeledItem> &items, std::size_t k,
                         std::string stratify_label, std::uint64_t seed);

// Posts without gold labels are dealt as negatives.
FoldPlan StratifiedFolds(const corpus::Corpus &corpus, std::size_t k,
                         std::string_view label, std::uint64_t seed);

struct Confusion {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::size_t tn = 0;

  void Add(bool predicted, bool gold);
  std::size_t Total() const { return tp + fp + fn + tn; }
  Confusion &operator+=(const Confusion &other);
  friend bool operator==(const Confusion &, const Confusion &) = default;
};

// Precision is 0 without predicted positives, recall 0 without gold
// positives and F1 0 when P + R = 0.
struct Metrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

Metrics Score(const Confusion &confusion);

struct LabelMetrics {
  std::string label;
  std::vector<Confusion> fold_confusion;
  std::vector<Metrics> fold_metrics;
  // Arithmetic mean of the per-fold metrics.
  Metrics average;
  Confusion pooled_confusion;
  // Metrics of the confusion matrix summed over folds.
  Metrics pooled;
};

struct EvaluationReport {
  std::string predictor;
  std::string predictor_kind;
  std::string corpus_fingerprint;
  std::size_t k = 0;
  std::uint64_t seed = 0;
  std::string stratify_label;
  std::size_t evaluated = 0;
  std::size_t excluded_missing_gold = 0;
  std::vector<LabelMetrics> labels;
  std::vector<std::string> warnings;

  const LabelMetrics *Find(std::string_view label) const;
};

// Predicts every held-out post of every fold. Sub-label rows are included
// for the sub-labels the predictor predicts (or that composition infers) on
// every evaluated post; punishable is always reported. Prediction errors
// propagate.
EvaluationReport Evaluate(const detection::Predictor &predictor,
                          const std::vector<Post> &posts, const GoldMap &gold,
                          const FoldPlan &plan,
                          const legal::JurisdictionProfile &profile,
                          std::string corpus_fingerprint);

EvaluationReport Evaluate(const detection::Predictor &predictor,
                          const corpus::Corpus &corpus, const FoldPlan &plan,
                          const legal::JurisdictionProfile &profile);

Json ToJson(const EvaluationReport &report);
EvaluationReport ReportFromJson(const Json &j);
std::string RenderReport(const EvaluationReport &report);
std::string ReportCsv(const EvaluationReport &report);

struct ComparisonCell {
  std::optional<Metrics> metrics;
  // Against the reference report; absent for the reference itself.
  std::optional<Metrics> delta;
};

struct ComparisonRow {
  std::string label;
  std::vector<ComparisonCell> cells;  // one per report
};

// The last report is the reference; every other report gets deltas
// (report - reference) on the average metrics.
struct Comparison {
  std::vector<std::string> predictors;
  std::string corpus_fingerprint;
  std::vector<ComparisonRow> rows;
};

// Throws a validation Error for an empty list or mismatched fingerprints.
Comparison Compare(const std::vector<EvaluationReport> &reports);
std::string RenderComparison(const Comparison &comparison);
std::string ComparisonCsv(const Comparison &comparison);
Json ToJson(const Comparison &comparison);

// Sub-label rows, then random, direct and composed punishability.
struct ResultsRow {
  std::string name;
  std::string label;
  std::string predictor;
  Metrics average;
  Metrics pooled;
};

struct ResultsTable {
  std::string corpus_fingerprint;
  std::size_t k = 0;
  std::uint64_t seed = 0;
  std::vector<ResultsRow> rows;
  std::vector<EvaluationReport> reports;
};

ResultsTable BuildResultsTable(const corpus::Corpus &corpus,
                               const detection::Resources &resources,
                               std::size_t k, std::uint64_t seed,
                               std::string_view composed_spec = "gazetteer+patterns",
                               std::string_view direct_spec = "direct-patterns");
Json ToJson(const ResultsTable &table);
std::string RenderResultsTable(const ResultsTable &table);
std::string ResultsTableCsv(const ResultsTable &table);

}  // namespace lexjudge::evaluation

#endif  // LEXJUDGE_EVALUATION_H_
