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

// Inter-annotator agreement and expert adjudication.

#ifndef LEXJUDGE_AGREEMENT_H_
#define LEXJUDGE_AGREEMENT_H_

#include <array>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "lexjudge/corpus.h"
#include "lexjudge/legal.h"

namespace lexjudge::agreement {

// Paired labels of two annotators over the items both annotated. Values are
// category codes: 0/1 for binary labels, CategoryIndex for group categories.
struct LabelVectorPair {
  std::string label_name;
  std::string annotator_a_id;
  std::string annotator_b_id;
  std::vector<std::pair<int, int>> pairs;
};

// Cohen's kappa (p_o - p_e) / (1 - p_e). When p_e = 1 both annotators used
// one identical constant label and kappa is 1.0. Throws a validation Error
// on empty input.
double CohenKappa(const LabelVectorPair &pair);

LabelVectorPair BinaryPair(std::string label, const std::vector<bool> &a,
                           const std::vector<bool> &b);

// Labels reported per annotator pair, in report order.
inline constexpr std::array<std::string_view, 9> kReportLabels = {
    "group_category",        "group_of_persons",
    "individual_as_member",  "distinguishable_by_ground",
    "any_target_group",      "incites_hatred",
    "incites_violence",      "any_targeting_conduct",
    "punishable",
};

struct KappaEntry {
  std::string label;
  std::string annotator_a;
  std::string annotator_b;
  double kappa = 0.0;
  std::size_t n = 0;
};

struct AgreementReport {
  std::vector<KappaEntry> entries;
  std::vector<std::string> warnings;
};

// Kappa for every label and every pair of the given annotators (layperson
// or expert). Binary labels are compared per post; group_category is
// compared over position-aligned assessments. Pairs without overlap are
// omitted with a warning. `label`, when set, restricts the report to one
// label.
AgreementReport BuildAgreementReport(
    const corpus::Corpus &corpus, const std::vector<std::string> &annotators,
    std::optional<std::string> label = std::nullopt);

// Every annotator id in the corpus, sorted.
std::vector<std::string> Annotators(const corpus::Corpus &corpus);

Json ToJson(const AgreementReport &report);
// Columns: label,annotator_a,annotator_b,kappa,n
std::string AgreementCsv(const AgreementReport &report);
std::string RenderAgreement(const AgreementReport &report);

// Rows: annotator A's category, columns: annotator B's, both in
// GroupCategory enum order.
struct ConfusionMatrix {
  std::array<std::array<std::size_t, legal::kNumCategories>,
             legal::kNumCategories>
      counts{};

  std::size_t Total() const;
  std::size_t Diagonal() const;
  double ObservedAgreement() const;
};

// Assessments of co-annotated posts are aligned by position; an annotator
// with fewer assessments contributes None for the missing ones.
ConfusionMatrix GroupConfusion(const corpus::Corpus &corpus,
                               std::string_view annotator_a,
                               std::string_view annotator_b);

Json ToJson(const ConfusionMatrix &matrix);

enum class Provenance { kAgreed, kExpertOverride, kSingleAnnotator };
std::string_view ProvenanceName(Provenance provenance);

struct GoldEntry {
  std::string post_id;
  std::vector<legal::LegalAssessment> assessments;
  Provenance provenance = Provenance::kAgreed;
  bool implicit_mention = false;

  bool Punishable() const;
  legal::SubLabels SubLabels() const;
};

struct QueueItem {
  std::string post_id;
  std::vector<std::string> annotators;
  std::vector<std::string> disagreeing_fields;
};

struct AdjudicatedLabels {
  std::map<std::string, GoldEntry, std::less<>> gold;
  // Disagreements with no expert record to settle them.
  std::vector<QueueItem> queue;
};

// Gold labels for every post with at least two layperson decision-tree
// records. Agreed sub-labels pass through; disagreeing ones take the expert
// value. If the merged assessment would break an invariant, or assessment
// counts differ, the expert's assessments are taken whole.
AdjudicatedLabels Adjudicate(const corpus::Corpus &corpus,
                             const std::vector<AnnotationRecord> &expert_records);

// Adjudicate(corpus, corpus.adjudications), plus posts with a single
// decision-tree record (layperson or expert) taken as is.
AdjudicatedLabels ResolveGold(const corpus::Corpus &corpus);

// Fields on which the layperson records of a post disagree, e.g.
// "assessments[0].category" or "incites_hatred".
std::vector<std::string> DisagreeingFields(
    const std::vector<const AnnotationRecord *> &records);

Json ToJson(const AdjudicatedLabels &labels);

}  // namespace lexjudge::agreement

#endif  // LEXJUDGE_AGREEMENT_H_
