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

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <set>
#include <sstream>

#include "lexjudge/error.h"

namespace lexjudge::agreement {

namespace {

using legal::LegalAssessment;
using RecordIndex =
    std::map<std::string, std::map<std::string, const AnnotationRecord *>>;

// annotator -> post -> record
RecordIndex IndexByAnnotator(const corpus::Corpus &corpus) {
  RecordIndex index;
  for (const auto *records : {&corpus.annotations, &corpus.adjudications}) {
    for (const AnnotationRecord &r : *records) {
      index[r.annotator_id][r.post_id] = &r;
    }
  }
  return index;
}

bool BinaryLabel(std::string_view label, const AnnotationRecord &r) {
  const legal::SubLabels s = RecordSubLabels(r);
  if (label == "group_of_persons") return s.group_of_persons;
  if (label == "individual_as_member") return s.individual_as_member;
  if (label == "distinguishable_by_ground") return s.distinguishable_by_ground;
  if (label == "any_target_group") {
    return (s.group_of_persons || s.individual_as_member) &&
           s.distinguishable_by_ground;
  }
  if (label == "incites_hatred") return s.incites_hatred;
  if (label == "incites_violence") return s.incites_violence;
  if (label == "any_targeting_conduct") {
    return s.incites_hatred || s.incites_violence;
  }
  return RecordPunishable(r);
}

legal::GroupCategory CategoryAt(const AnnotationRecord &r, std::size_t i) {
  return i < r.assessments.size() ? r.assessments[i].target.category
                                  : legal::GroupCategory::kNone;
}

struct Overlap {
  std::vector<std::pair<const AnnotationRecord *, const AnnotationRecord *>>
      records;
};

Overlap FindOverlap(const RecordIndex &index, std::string_view a,
                    std::string_view b) {
  Overlap out;
  auto ia = index.find(std::string(a));
  auto ib = index.find(std::string(b));
  if (ia == index.end() || ib == index.end()) return out;
  for (const auto &[post, ra] : ia->second) {
    auto it = ib->second.find(post);
    if (it != ib->second.end()) out.records.emplace_back(ra, it->second);
  }
  return out;
}

std::string FormatDouble(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

const std::vector<std::string_view> kTargetFields = {
    "group_of_persons", "individual_as_member", "distinguishable_by_ground",
    "category",         "explicit_mention",
};

bool TargetFieldEqual(std::string_view field, const LegalAssessment &x,
                      const LegalAssessment &y) {
  if (field == "group_of_persons") {
    return x.target.group_of_persons == y.target.group_of_persons;
  }
  if (field == "individual_as_member") {
    return x.target.individual_as_member == y.target.individual_as_member;
  }
  if (field == "distinguishable_by_ground") {
    return x.target.distinguishable_by_ground ==
           y.target.distinguishable_by_ground;
  }
  if (field == "category") return x.target.category == y.target.category;
  return x.target.explicit_mention == y.target.explicit_mention;
}

void CopyTargetField(std::string_view field, const LegalAssessment &from,
                     LegalAssessment &to) {
  if (field == "group_of_persons") {
    to.target.group_of_persons = from.target.group_of_persons;
  } else if (field == "individual_as_member") {
    to.target.individual_as_member = from.target.individual_as_member;
  } else if (field == "distinguishable_by_ground") {
    to.target.distinguishable_by_ground = from.target.distinguishable_by_ground;
    to.target.grounds = from.target.grounds;
  } else if (field == "category") {
    to.target.category = from.target.category;
  } else {
    to.target.explicit_mention = from.target.explicit_mention;
    to.target.surface_form = from.target.surface_form;
  }
}

std::vector<const AnnotationRecord *> LaypersonDecisionTreeRecords(
    const corpus::Corpus &corpus, std::string_view post_id) {
  std::vector<const AnnotationRecord *> out;
  for (const AnnotationRecord &r : corpus.annotations) {
    if (r.post_id == post_id && r.role == Role::kLayperson &&
        r.scheme == Scheme::kDecisionTree) {
      out.push_back(&r);
    }
  }
  return out;
}

// Field-level merge of layperson records with the expert's values for the
// disagreeing fields. Returns nullopt when the expert record must be taken
// whole.
std::optional<std::vector<LegalAssessment>> Merge(
    const std::vector<const AnnotationRecord *> &lay,
    const std::vector<std::string> &fields, const AnnotationRecord &expert) {
  std::vector<LegalAssessment> merged = lay.front()->assessments;
  if (expert.assessments.size() != merged.size()) return std::nullopt;
  for (const std::string &field : fields) {
    if (field == "assessments") return std::nullopt;
    if (field == "incites_hatred" || field == "incites_violence") {
      for (LegalAssessment &a : merged) {
        if (field == "incites_hatred") {
          a.conduct.incites_hatred = expert.assessments.front().conduct.incites_hatred;
        } else {
          a.conduct.incites_violence =
              expert.assessments.front().conduct.incites_violence;
        }
      }
      continue;
    }
    // "assessments[i].name"
    const std::size_t open = field.find('[');
    const std::size_t close = field.find(']');
    const std::size_t i = std::stoul(field.substr(open + 1, close - open - 1));
    CopyTargetField(field.substr(close + 2), expert.assessments[i], merged[i]);
  }
  for (const LegalAssessment &a : merged) {
    if (legal::FindViolation(a)) return std::nullopt;
  }
  return merged;
}

Json GoldToJson(const GoldEntry &g) {
  Json assessments = Json::array();
  for (const LegalAssessment &a : g.assessments) assessments.push_back(lexjudge::ToJson(a));
  Json j{{"post_id", g.post_id},
         {"provenance", ProvenanceName(g.provenance)},
         {"punishable", g.Punishable()},
         {"assessments", std::move(assessments)}};
  if (g.implicit_mention) j["implicit_mention"] = true;
  return j;
}

}  // namespace

double CohenKappa(const LabelVectorPair &pair) {
  const std::size_t n = pair.pairs.size();
  if (n == 0) {
    throw ValidationError("kappa needs at least one label pair for '" +
                              pair.label_name + "'",
                          "pairs");
  }
  std::map<int, std::pair<std::uint64_t, std::uint64_t>> marginals;
  std::uint64_t agree = 0;
  for (const auto &[a, b] : pair.pairs) {
    ++marginals[a].first;
    ++marginals[b].second;
    if (a == b) ++agree;
  }
  std::uint64_t chance = 0;  // n^2 * p_e
  for (const auto &[label, counts] : marginals) {
    chance += counts.first * counts.second;
  }
  const std::uint64_t n2 = static_cast<std::uint64_t>(n) * n;
  if (chance == n2) return 1.0;
  const double num = static_cast<double>(agree * n) - static_cast<double>(chance);
  return num / static_cast<double>(n2 - chance);
}

LabelVectorPair BinaryPair(std::string label, const std::vector<bool> &a,
                           const std::vector<bool> &b) {
  if (a.size() != b.size()) {
    throw ValidationError("label vectors differ in length", "pairs");
  }
  LabelVectorPair out;
  out.label_name = std::move(label);
  for (std::size_t i = 0; i < a.size(); ++i) {
    out.pairs.emplace_back(a[i] ? 1 : 0, b[i] ? 1 : 0);
  }
  return out;
}

std::vector<std::string> Annotators(const corpus::Corpus &corpus) {
  std::set<std::string> ids;
  for (const auto *records : {&corpus.annotations, &corpus.adjudications}) {
    for (const AnnotationRecord &r : *records) ids.insert(r.annotator_id);
  }
  return {ids.begin(), ids.end()};
}

AgreementReport BuildAgreementReport(const corpus::Corpus &corpus,
                                     const std::vector<std::string> &annotators,
                                     std::optional<std::string> label) {
  AgreementReport report;
  if (label && std::find(kReportLabels.begin(), kReportLabels.end(), *label) ==
                   kReportLabels.end()) {
    throw ValidationError("unknown agreement label '" + *label + "'", "label");
  }
  if (annotators.size() < 2) {
    report.warnings.push_back("agreement needs at least two annotators");
    return report;
  }
  const RecordIndex index = IndexByAnnotator(corpus);
  for (std::size_t i = 0; i < annotators.size(); ++i) {
    for (std::size_t j = i + 1; j < annotators.size(); ++j) {
      const std::string &a = annotators[i];
      const std::string &b = annotators[j];
      const Overlap overlap = FindOverlap(index, a, b);
      if (overlap.records.empty()) {
        report.warnings.push_back("annotators '" + a + "' and '" + b +
                                  "' share no posts; pair omitted");
        continue;
      }
      for (std::string_view name : kReportLabels) {
        if (label && name != *label) continue;
        LabelVectorPair pair;
        pair.label_name = std::string(name);
        pair.annotator_a_id = a;
        pair.annotator_b_id = b;
        for (const auto &[ra, rb] : overlap.records) {
          const bool holistic = ra->scheme == Scheme::kHolistic ||
                                rb->scheme == Scheme::kHolistic;
          if (holistic && name != "punishable") continue;
          if (name == "group_category") {
            const std::size_t m =
                std::max(ra->assessments.size(), rb->assessments.size());
            for (std::size_t k = 0; k < m; ++k) {
              pair.pairs.emplace_back(
                  static_cast<int>(legal::CategoryIndex(CategoryAt(*ra, k))),
                  static_cast<int>(legal::CategoryIndex(CategoryAt(*rb, k))));
            }
          } else {
            pair.pairs.emplace_back(BinaryLabel(name, *ra) ? 1 : 0,
                                    BinaryLabel(name, *rb) ? 1 : 0);
          }
        }
        if (pair.pairs.empty()) continue;
        report.entries.push_back(KappaEntry{.label = std::string(name),
                                            .annotator_a = a,
                                            .annotator_b = b,
                                            .kappa = CohenKappa(pair),
                                            .n = pair.pairs.size()});
      }
    }
  }
  return report;
}

Json ToJson(const AgreementReport &report) {
  Json entries = Json::array();
  for (const KappaEntry &e : report.entries) {
    entries.push_back(Json{{"label", e.label},
                           {"annotator_a", e.annotator_a},
                           {"annotator_b", e.annotator_b},
                           {"kappa", e.kappa},
                           {"n", e.n}});
  }
  return Json{{"entries", std::move(entries)}, {"warnings", report.warnings}};
}

std::string AgreementCsv(const AgreementReport &report) {
  std::string out = "label,annotator_a,annotator_b,kappa,n\n";
  for (const KappaEntry &e : report.entries) {
    out += e.label + ',' + e.annotator_a + ',' + e.annotator_b + ',' +
           FormatDouble(e.kappa) + ',' + std::to_string(e.n) + '\n';
  }
  return out;
}

std::string RenderAgreement(const AgreementReport &report) {
  std::ostringstream out;
  char buf[200];
  std::snprintf(buf, sizeof(buf), "%-27s %-24s %8s %6s\n", "Label", "Pair",
                "kappa", "n");
  out << buf;
  for (const KappaEntry &e : report.entries) {
    const std::string pair = e.annotator_a + "/" + e.annotator_b;
    std::snprintf(buf, sizeof(buf), "%-27s %-24s %8.3f %6zu\n", e.label.c_str(),
                  pair.c_str(), e.kappa, e.n);
    out << buf;
  }
  for (const std::string &w : report.warnings) out << "warning: " << w << '\n';
  return out.str();
}

std::size_t ConfusionMatrix::Total() const {
  std::size_t total = 0;
  for (const auto &row : counts) {
    for (std::size_t c : row) total += c;
  }
  return total;
}

std::size_t ConfusionMatrix::Diagonal() const {
  std::size_t d = 0;
  for (std::size_t i = 0; i < legal::kNumCategories; ++i) d += counts[i][i];
  return d;
}

double ConfusionMatrix::ObservedAgreement() const {
  const std::size_t total = Total();
  return total == 0 ? 0.0
                    : static_cast<double>(Diagonal()) / static_cast<double>(total);
}

ConfusionMatrix GroupConfusion(const corpus::Corpus &corpus,
                               std::string_view annotator_a,
                               std::string_view annotator_b) {
  ConfusionMatrix m;
  const RecordIndex index = IndexByAnnotator(corpus);
  for (const auto &[ra, rb] :
       FindOverlap(index, annotator_a, annotator_b).records) {
    const std::size_t n = std::max(ra->assessments.size(), rb->assessments.size());
    for (std::size_t k = 0; k < n; ++k) {
      ++m.counts[legal::CategoryIndex(CategoryAt(*ra, k))]
                [legal::CategoryIndex(CategoryAt(*rb, k))];
    }
  }
  return m;
}

Json ToJson(const ConfusionMatrix &matrix) {
  Json labels = Json::array();
  for (legal::GroupCategory c : legal::kAllCategories) {
    labels.push_back(legal::CategoryName(c));
  }
  Json rows = Json::array();
  for (const auto &row : matrix.counts) rows.push_back(row);
  return Json{{"categories", std::move(labels)},
              {"counts", std::move(rows)},
              {"total", matrix.Total()},
              {"observed_agreement", matrix.ObservedAgreement()}};
}

std::string_view ProvenanceName(Provenance provenance) {
  switch (provenance) {
    case Provenance::kAgreed:
      return "Agreed";
    case Provenance::kExpertOverride:
      return "ExpertOverride";
    case Provenance::kSingleAnnotator:
      return "SingleAnnotator";
  }
  return "Agreed";
}

bool GoldEntry::Punishable() const {
  for (const LegalAssessment &a : assessments) {
    if (legal::ApplyRule(legal::ToSubLabels(a))) return true;
  }
  return false;
}

legal::SubLabels GoldEntry::SubLabels() const {
  AnnotationRecord r;
  r.assessments = assessments;
  return RecordSubLabels(r);
}

std::vector<std::string> DisagreeingFields(
    const std::vector<const AnnotationRecord *> &records) {
  std::vector<std::string> fields;
  if (records.size() < 2) return fields;
  const AnnotationRecord &first = *records.front();
  for (const AnnotationRecord *r : records) {
    if (r->assessments.size() != first.assessments.size()) return {"assessments"};
  }
  for (std::size_t i = 0; i < first.assessments.size(); ++i) {
    for (std::string_view field : kTargetFields) {
      for (const AnnotationRecord *r : records) {
        if (!TargetFieldEqual(field, first.assessments[i], r->assessments[i])) {
          fields.push_back("assessments[" + std::to_string(i) + "]." +
                           std::string(field));
          break;
        }
      }
    }
  }
  const legal::ConductAssessment &c = first.assessments.front().conduct;
  for (const AnnotationRecord *r : records) {
    if (r->assessments.front().conduct.incites_hatred != c.incites_hatred) {
      fields.push_back("incites_hatred");
      break;
    }
  }
  for (const AnnotationRecord *r : records) {
    if (r->assessments.front().conduct.incites_violence != c.incites_violence) {
      fields.push_back("incites_violence");
      break;
    }
  }
  return fields;
}

AdjudicatedLabels Adjudicate(const corpus::Corpus &corpus,
                             const std::vector<AnnotationRecord> &expert_records) {
  AdjudicatedLabels out;
  std::set<std::string> seen;
  for (const Post &post : corpus.posts) {
    if (!seen.insert(post.id).second) continue;
    const auto lay = LaypersonDecisionTreeRecords(corpus, post.id);
    if (lay.size() < 2) continue;

    GoldEntry entry;
    entry.post_id = post.id;
    for (const AnnotationRecord *r : lay) entry.implicit_mention |= r->implicit_mention;

    const std::vector<std::string> fields = DisagreeingFields(lay);
    if (fields.empty()) {
      entry.assessments = lay.front()->assessments;
      entry.provenance = Provenance::kAgreed;
      out.gold.emplace(post.id, std::move(entry));
      continue;
    }
    const AnnotationRecord *expert = nullptr;
    for (const AnnotationRecord &r : expert_records) {
      if (r.post_id == post.id && r.scheme == Scheme::kDecisionTree) {
        expert = &r;
        break;
      }
    }
    if (expert == nullptr) {
      QueueItem item;
      item.post_id = post.id;
      item.disagreeing_fields = fields;
      for (const AnnotationRecord *r : lay) item.annotators.push_back(r->annotator_id);
      out.queue.push_back(std::move(item));
      continue;
    }
    entry.assessments = Merge(lay, fields, *expert).value_or(expert->assessments);
    entry.provenance = Provenance::kExpertOverride;
    entry.implicit_mention |= expert->implicit_mention;
    out.gold.emplace(post.id, std::move(entry));
  }
  return out;
}

AdjudicatedLabels ResolveGold(const corpus::Corpus &corpus) {
  AdjudicatedLabels out = Adjudicate(corpus, corpus.adjudications);
  std::set<std::string> queued;
  for (const QueueItem &q : out.queue) queued.insert(q.post_id);
  for (const Post &post : corpus.posts) {
    if (out.gold.contains(post.id) || queued.contains(post.id)) continue;
    const AnnotationRecord *expert = nullptr;
    for (const AnnotationRecord &r : corpus.adjudications) {
      if (r.post_id == post.id && r.scheme == Scheme::kDecisionTree) expert = &r;
    }
    const auto lay = LaypersonDecisionTreeRecords(corpus, post.id);
    GoldEntry entry;
    entry.post_id = post.id;
    if (expert != nullptr) {
      entry.assessments = expert->assessments;
      entry.provenance = Provenance::kExpertOverride;
      entry.implicit_mention = expert->implicit_mention;
    } else if (lay.size() == 1) {
      entry.assessments = lay.front()->assessments;
      entry.provenance = Provenance::kSingleAnnotator;
      entry.implicit_mention = lay.front()->implicit_mention;
    } else {
      continue;
    }
    out.gold.emplace(post.id, std::move(entry));
  }
  return out;
}

Json ToJson(const AdjudicatedLabels &labels) {
  Json gold = Json::array();
  for (const auto &[id, entry] : labels.gold) gold.push_back(GoldToJson(entry));
  Json queue = Json::array();
  for (const QueueItem &q : labels.queue) {
    queue.push_back(Json{{"post_id", q.post_id},
                         {"annotators", q.annotators},
                         {"disagreeing_fields", q.disagreeing_fields}});
  }
  return Json{{"gold", std::move(gold)}, {"queue", std::move(queue)}};
}

}  // namespace lexjudge::agreement
