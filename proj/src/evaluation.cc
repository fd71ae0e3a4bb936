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
#include <cstdio>
#include <future>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "lexjudge/agreement.h"
#include "lexjudge/error.h"

namespace lexjudge::evaluation {

namespace {

// Unbiased integer in [0, n) by rejection.
std::uint64_t Bounded(std::mt19937_64 &rng, std::uint64_t n) {
  const std::uint64_t threshold = (0 - n) % n;
  while (true) {
    const std::uint64_t r = rng();
    if (r >= threshold) return r % n;
  }
}

template <typename T>
void Shuffle(std::vector<T> &v, std::mt19937_64 &rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    std::swap(v[i - 1], v[Bounded(rng, i)]);
  }
}

std::string Fixed(double v, int digits = 3) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

std::string Signed(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%+.3f", v);
  return buf;
}

std::string Pad(std::string s, std::size_t width) {
  if (s.size() < width) s.append(width - s.size(), ' ');
  return s;
}

Json MetricsJson(const Metrics &m) {
  return Json{{"precision", m.precision}, {"recall", m.recall}, {"f1", m.f1}};
}

Metrics MetricsFromJson(const Json &j) {
  Metrics m;
  m.precision = j.at("precision").get<double>();
  m.recall = j.at("recall").get<double>();
  m.f1 = j.at("f1").get<double>();
  return m;
}

Json ConfusionJson(const Confusion &c) {
  return Json{{"tp", c.tp}, {"fp", c.fp}, {"fn", c.fn}, {"tn", c.tn}};
}

Confusion ConfusionFromJson(const Json &j) {
  Confusion c;
  c.tp = j.at("tp").get<std::size_t>();
  c.fp = j.at("fp").get<std::size_t>();
  c.fn = j.at("fn").get<std::size_t>();
  c.tn = j.at("tn").get<std::size_t>();
  return c;
}

bool SubLabelValue(const legal::SubLabels &s, std::string_view label) {
  if (label == "group_of_persons") return s.group_of_persons;
  if (label == "individual_as_member") return s.individual_as_member;
  if (label == "distinguishable_by_ground") return s.distinguishable_by_ground;
  if (label == "incites_hatred") return s.incites_hatred;
  if (label == "incites_violence") return s.incites_violence;
  throw ValidationError("unknown label '" + std::string(label) + "'", "label");
}

struct FoldResult {
  std::map<std::string, Confusion, std::less<>> confusion;
  // Sub-labels that were not covered on some post of this fold.
  std::set<std::string, std::less<>> uncovered;
  std::size_t evaluated = 0;
  std::size_t excluded = 0;
};

FoldResult EvaluateFold(const detection::Predictor &predictor,
                        const std::vector<const Post *> &held_out,
                        const GoldMap &gold, const detection::FoldContext &ctx,
                        const legal::JurisdictionProfile &profile) {
  FoldResult result;
  for (std::string_view label : kEvalLabels) {
    result.confusion[std::string(label)] = Confusion{};
  }
  for (const Post *post : held_out) {
    const auto it = gold.find(post->id);
    if (it == gold.end()) {
      ++result.excluded;
      continue;
    }
    ++result.evaluated;
    const detection::SubLabelPrediction p = predictor.Predict(*post, &ctx);
    const detection::Verdict v = detection::Decide(p, profile);
    result.confusion["punishable"].Add(v.punishable, it->second.punishable);
    std::map<std::string, bool, std::less<>> covered;
    for (const detection::TraceStep &step : v.trace) {
      for (const detection::TraceItem &item : step.items) {
        if (item.origin != detection::TraceItem::Origin::kDefault) {
          covered[item.sub_label] = item.value;
        }
      }
    }
    for (std::string_view label : legal::kSubLabelNames) {
      const auto c = covered.find(label);
      if (c == covered.end()) {
        result.uncovered.insert(std::string(label));
        continue;
      }
      result.confusion.find(label)->second.Add(c->second, it->second.Get(label));
    }
  }
  return result;
}

}  // namespace

void CheckLabel(std::string_view label) {
  if (std::find(kEvalLabels.begin(), kEvalLabels.end(), label) ==
      kEvalLabels.end()) {
    throw ValidationError("unknown evaluation label '" + std::string(label) + "'",
                          "label");
  }
}

bool GoldLabels::Get(std::string_view label) const {
  if (label == "punishable") return punishable;
  return SubLabelValue(sub, label);
}

GoldMap GoldFromCorpus(const corpus::Corpus &corpus) {
  GoldMap gold;
  for (const auto &[id, entry] : agreement::ResolveGold(corpus).gold) {
    gold[id] = GoldLabels{entry.SubLabels(), entry.Punishable()};
  }
  return gold;
}

std::vector<std::vector<std::string>> FoldPlan::Folds() const {
  std::vector<std::vector<std::string>> folds(k);
  for (const auto &[id, fold] : assignments) folds.at(fold).push_back(id);
  return folds;
}

FoldPlan StratifiedFolds(const std::vector<LabeledItem> &items, std::size_t k,
                         std::string stratify_label, std::uint64_t seed) {
  CheckLabel(stratify_label);
  if (k < 2) throw ValidationError("k must be at least 2", "k");
  if (k > items.size()) {
    throw ValidationError("k = " + std::to_string(k) + " exceeds the " +
                              std::to_string(items.size()) + " posts",
                          "k");
  }
  std::vector<std::string> positives;
  std::vector<std::string> negatives;
  std::set<std::string_view> seen;
  for (const LabeledItem &item : items) {
    if (!seen.insert(item.id).second) {
      throw ValidationError("duplicate post id '" + item.id + "'", "id");
    }
    (item.positive ? positives : negatives).push_back(item.id);
  }
  std::sort(positives.begin(), positives.end());
  std::sort(negatives.begin(), negatives.end());

  std::mt19937_64 rng(seed);
  Shuffle(positives, rng);
  Shuffle(negatives, rng);
  std::vector<std::size_t> fold_ids(k);
  std::iota(fold_ids.begin(), fold_ids.end(), 0);
  Shuffle(fold_ids, rng);

  FoldPlan plan;
  plan.k = k;
  plan.stratify_label = std::move(stratify_label);
  plan.seed = seed;
  std::size_t i = 0;
  for (const std::string &id : positives) plan.assignments[id] = fold_ids[i++ % k];
  for (const std::string &id : negatives) plan.assignments[id] = fold_ids[i++ % k];
  if (positives.size() < k) {
    plan.warnings.push_back(std::to_string(positives.size()) + " positives for " +
                            plan.stratify_label + " over " + std::to_string(k) +
                            " folds: some folds have no positives");
  }
  return plan;
}

FoldPlan StratifiedFolds(const corpus::Corpus &corpus, std::size_t k,
                         std::string_view label, std::uint64_t seed) {
  CheckLabel(label);
  const GoldMap gold = GoldFromCorpus(corpus);
  std::vector<LabeledItem> items;
  std::size_t missing = 0;
  for (const Post &p : corpus.posts) {
    const auto it = gold.find(p.id);
    if (it == gold.end()) ++missing;
    items.push_back(LabeledItem{p.id, it != gold.end() && it->second.Get(label)});
  }
  FoldPlan plan = StratifiedFolds(items, k, std::string(label), seed);
  if (missing > 0) {
    plan.warnings.push_back(std::to_string(missing) +
                            " posts without gold labels dealt as negatives");
  }
  return plan;
}

void Confusion::Add(bool predicted, bool gold) {
  if (predicted && gold) {
    ++tp;
  } else if (predicted) {
    ++fp;
  } else if (gold) {
    ++fn;
  } else {
    ++tn;
  }
}

Confusion &Confusion::operator+=(const Confusion &o) {
  tp += o.tp;
  fp += o.fp;
  fn += o.fn;
  tn += o.tn;
  return *this;
}

Metrics Score(const Confusion &c) {
  Metrics m;
  if (c.tp + c.fp > 0) {
    m.precision = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
  }
  if (c.tp + c.fn > 0) {
    m.recall = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
  }
  if (m.precision + m.recall > 0) {
    m.f1 = 2 * m.precision * m.recall / (m.precision + m.recall);
  }
  return m;
}

const LabelMetrics *EvaluationReport::Find(std::string_view label) const {
  for (const LabelMetrics &m : labels) {
    if (m.label == label) return &m;
  }
  return nullptr;
}

EvaluationReport Evaluate(const detection::Predictor &predictor,
                          const std::vector<Post> &posts, const GoldMap &gold,
                          const FoldPlan &plan,
                          const legal::JurisdictionProfile &profile,
                          std::string corpus_fingerprint) {
  if (plan.k < 2) throw ValidationError("fold plan needs k >= 2", "k");
  std::vector<std::vector<const Post *>> held_out(plan.k);
  for (const Post &p : posts) {
    const auto it = plan.assignments.find(p.id);
    if (it == plan.assignments.end()) {
      throw ValidationError("post '" + p.id + "' has no fold", "assignments");
    }
    held_out.at(it->second).push_back(&p);
  }

  std::vector<std::future<FoldResult>> futures;
  for (std::size_t f = 0; f < plan.k; ++f) {
    const detection::FoldContext ctx{f, plan.k, plan.seed};
    futures.push_back(std::async(std::launch::async, [&, f, ctx] {
      return EvaluateFold(predictor, held_out[f], gold, ctx, profile);
    }));
  }
  std::vector<FoldResult> folds;
  for (auto &f : futures) folds.push_back(f.get());

  EvaluationReport report;
  report.predictor = predictor.name();
  report.predictor_kind = std::string(detection::PredictorKindName(predictor.kind()));
  report.corpus_fingerprint = std::move(corpus_fingerprint);
  report.k = plan.k;
  report.seed = plan.seed;
  report.stratify_label = plan.stratify_label;
  report.warnings = plan.warnings;
  std::set<std::string, std::less<>> uncovered;
  for (const FoldResult &f : folds) {
    report.evaluated += f.evaluated;
    report.excluded_missing_gold += f.excluded;
    uncovered.insert(f.uncovered.begin(), f.uncovered.end());
  }
  if (report.excluded_missing_gold > 0) {
    report.warnings.push_back(std::to_string(report.excluded_missing_gold) +
                              " held-out posts without gold labels excluded");
  }
  for (std::string_view label : kEvalLabels) {
    if (uncovered.contains(label)) continue;
    LabelMetrics m;
    m.label = std::string(label);
    Metrics sum;
    for (const FoldResult &f : folds) {
      const Confusion &c = f.confusion.find(label)->second;
      const Metrics s = Score(c);
      m.fold_confusion.push_back(c);
      m.fold_metrics.push_back(s);
      m.pooled_confusion += c;
      sum.precision += s.precision;
      sum.recall += s.recall;
      sum.f1 += s.f1;
    }
    const double n = static_cast<double>(folds.size());
    m.average = Metrics{sum.precision / n, sum.recall / n, sum.f1 / n};
    m.pooled = Score(m.pooled_confusion);
    report.labels.push_back(std::move(m));
  }
  return report;
}

EvaluationReport Evaluate(const detection::Predictor &predictor,
                          const corpus::Corpus &corpus, const FoldPlan &plan,
                          const legal::JurisdictionProfile &profile) {
  return Evaluate(predictor, corpus.posts, GoldFromCorpus(corpus), plan, profile,
                  corpus::Fingerprint(corpus));
}

Json ToJson(const EvaluationReport &r) {
  Json labels = Json::array();
  for (const LabelMetrics &m : r.labels) {
    Json folds = Json::array();
    for (std::size_t f = 0; f < m.fold_metrics.size(); ++f) {
      Json fold = MetricsJson(m.fold_metrics[f]);
      fold["fold"] = f;
      fold["confusion"] = ConfusionJson(m.fold_confusion[f]);
      folds.push_back(std::move(fold));
    }
    Json pooled = MetricsJson(m.pooled);
    pooled["confusion"] = ConfusionJson(m.pooled_confusion);
    labels.push_back(Json{{"label", m.label},
                          {"average", MetricsJson(m.average)},
                          {"pooled", std::move(pooled)},
                          {"folds", std::move(folds)}});
  }
  return Json{{"predictor", r.predictor},
              {"predictor_kind", r.predictor_kind},
              {"corpus_fingerprint", r.corpus_fingerprint},
              {"k", r.k},
              {"seed", r.seed},
              {"stratify_label", r.stratify_label},
              {"averaging", {{"average", "macro over folds"},
                             {"pooled", "micro over folds (summed confusion)"}}},
              {"evaluated", r.evaluated},
              {"excluded_missing_gold", r.excluded_missing_gold},
              {"labels", std::move(labels)},
              {"warnings", r.warnings}};
}

EvaluationReport ReportFromJson(const Json &j) {
  try {
    EvaluationReport r;
    r.predictor = j.at("predictor").get<std::string>();
    r.predictor_kind = j.value("predictor_kind", "");
    r.corpus_fingerprint = j.at("corpus_fingerprint").get<std::string>();
    r.k = j.at("k").get<std::size_t>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.stratify_label = j.at("stratify_label").get<std::string>();
    r.evaluated = j.value("evaluated", std::size_t{0});
    r.excluded_missing_gold = j.value("excluded_missing_gold", std::size_t{0});
    r.warnings = j.value("warnings", std::vector<std::string>{});
    for (const Json &l : j.at("labels")) {
      LabelMetrics m;
      m.label = l.at("label").get<std::string>();
      m.average = MetricsFromJson(l.at("average"));
      m.pooled = MetricsFromJson(l.at("pooled"));
      m.pooled_confusion = ConfusionFromJson(l.at("pooled").at("confusion"));
      for (const Json &f : l.at("folds")) {
        m.fold_metrics.push_back(MetricsFromJson(f));
        m.fold_confusion.push_back(ConfusionFromJson(f.at("confusion")));
      }
      r.labels.push_back(std::move(m));
    }
    return r;
  } catch (const Json::exception &e) {
    throw ValidationError(std::string("malformed evaluation report: ") + e.what(),
                          "report");
  }
}

std::string RenderReport(const EvaluationReport &r) {
  std::ostringstream out;
  out << "predictor: " << r.predictor << " (" << r.predictor_kind << ")\n"
      << "corpus: " << r.corpus_fingerprint << "  k=" << r.k << "  seed=" << r.seed
      << "  stratified by " << r.stratify_label << '\n'
      << "evaluated: " << r.evaluated
      << "  excluded (no gold): " << r.excluded_missing_gold << "\n\n"
      << Pad("label", 28) << "  avg P  avg R avg F1   pool P pool R pool F1\n";
  for (const LabelMetrics &m : r.labels) {
    out << Pad(m.label, 28) << "  " << Fixed(m.average.precision) << "  "
        << Fixed(m.average.recall) << "  " << Fixed(m.average.f1) << "    "
        << Fixed(m.pooled.precision) << "  " << Fixed(m.pooled.recall) << "  "
        << Fixed(m.pooled.f1) << '\n';
  }
  for (const std::string &w : r.warnings) out << "warning: " << w << '\n';
  return out.str();
}

std::string ReportCsv(const EvaluationReport &r) {
  std::ostringstream out;
  out << "label,scope,fold,precision,recall,f1,tp,fp,fn,tn\n";
  for (const LabelMetrics &m : r.labels) {
    for (std::size_t f = 0; f < m.fold_metrics.size(); ++f) {
      const Metrics &s = m.fold_metrics[f];
      const Confusion &c = m.fold_confusion[f];
      out << m.label << ",fold," << f << ',' << Fixed(s.precision, 6) << ','
          << Fixed(s.recall, 6) << ',' << Fixed(s.f1, 6) << ',' << c.tp << ','
          << c.fp << ',' << c.fn << ',' << c.tn << '\n';
    }
    out << m.label << ",average,," << Fixed(m.average.precision, 6) << ','
        << Fixed(m.average.recall, 6) << ',' << Fixed(m.average.f1, 6) << ",,,,\n";
    const Confusion &c = m.pooled_confusion;
    out << m.label << ",pooled,," << Fixed(m.pooled.precision, 6) << ','
        << Fixed(m.pooled.recall, 6) << ',' << Fixed(m.pooled.f1, 6) << ','
        << c.tp << ',' << c.fp << ',' << c.fn << ',' << c.tn << '\n';
  }
  return out.str();
}

Comparison Compare(const std::vector<EvaluationReport> &reports) {
  if (reports.empty()) throw ValidationError("nothing to compare", "reports");
  Comparison c;
  c.corpus_fingerprint = reports.front().corpus_fingerprint;
  for (const EvaluationReport &r : reports) {
    if (r.corpus_fingerprint != c.corpus_fingerprint) {
      throw ValidationError("reports were computed on different corpora (" +
                                c.corpus_fingerprint + " vs " +
                                r.corpus_fingerprint + ")",
                            "corpus_fingerprint");
    }
    c.predictors.push_back(r.predictor);
  }
  std::vector<std::string> labels;
  for (std::string_view l : kEvalLabels) {
    for (const EvaluationReport &r : reports) {
      if (r.Find(l) != nullptr) {
        labels.emplace_back(l);
        break;
      }
    }
  }
  const EvaluationReport &ref = reports.back();
  for (const std::string &label : labels) {
    ComparisonRow row;
    row.label = label;
    const LabelMetrics *ref_metrics = ref.Find(label);
    for (std::size_t i = 0; i < reports.size(); ++i) {
      ComparisonCell cell;
      if (const LabelMetrics *m = reports[i].Find(label)) {
        cell.metrics = m->average;
        if (i + 1 < reports.size() && ref_metrics != nullptr) {
          cell.delta = Metrics{m->average.precision - ref_metrics->average.precision,
                               m->average.recall - ref_metrics->average.recall,
                               m->average.f1 - ref_metrics->average.f1};
        }
      }
      row.cells.push_back(std::move(cell));
    }
    c.rows.push_back(std::move(row));
  }
  return c;
}

std::string RenderComparison(const Comparison &c) {
  const bool deltas = c.predictors.size() > 1;
  std::vector<std::string> header{"label"};
  for (std::size_t i = 0; i < c.predictors.size(); ++i) {
    const std::string &p = c.predictors[i];
    header.push_back(p + " P");
    header.push_back(p + " R");
    header.push_back(p + " F1");
    if (deltas && i + 1 < c.predictors.size()) header.push_back(p + " dF1");
  }
  std::vector<std::vector<std::string>> table{header};
  for (const ComparisonRow &row : c.rows) {
    std::vector<std::string> line{row.label};
    for (std::size_t i = 0; i < row.cells.size(); ++i) {
      const ComparisonCell &cell = row.cells[i];
      line.push_back(cell.metrics ? Fixed(cell.metrics->precision) : "-");
      line.push_back(cell.metrics ? Fixed(cell.metrics->recall) : "-");
      line.push_back(cell.metrics ? Fixed(cell.metrics->f1) : "-");
      if (deltas && i + 1 < row.cells.size()) {
        line.push_back(cell.delta ? Signed(cell.delta->f1) : "-");
      }
    }
    table.push_back(std::move(line));
  }
  std::vector<std::size_t> width(header.size(), 0);
  for (const auto &line : table) {
    for (std::size_t i = 0; i < line.size(); ++i) {
      width[i] = std::max(width[i], line[i].size());
    }
  }
  std::ostringstream out;
  out << "reference: " << c.predictors.back() << "  corpus: "
      << c.corpus_fingerprint << '\n';
  for (const auto &line : table) {
    std::string text;
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (i > 0) text += "  ";
      text += Pad(line[i], width[i]);
    }
    while (!text.empty() && text.back() == ' ') text.pop_back();
    out << text << '\n';
  }
  return out.str();
}

std::string ComparisonCsv(const Comparison &c) {
  const bool deltas = c.predictors.size() > 1;
  std::ostringstream out;
  out << "label,predictor,precision,recall,f1";
  if (deltas) out << ",delta_precision,delta_recall,delta_f1";
  out << '\n';
  for (const ComparisonRow &row : c.rows) {
    for (std::size_t i = 0; i < row.cells.size(); ++i) {
      const ComparisonCell &cell = row.cells[i];
      if (!cell.metrics) continue;
      out << row.label << ',' << c.predictors[i] << ','
          << Fixed(cell.metrics->precision, 6) << ','
          << Fixed(cell.metrics->recall, 6) << ',' << Fixed(cell.metrics->f1, 6);
      if (deltas) {
        if (cell.delta) {
          out << ',' << Fixed(cell.delta->precision, 6) << ','
              << Fixed(cell.delta->recall, 6) << ',' << Fixed(cell.delta->f1, 6);
        } else {
          out << ",,,";
        }
      }
      out << '\n';
    }
  }
  return out.str();
}

Json ToJson(const Comparison &c) {
  Json rows = Json::array();
  for (const ComparisonRow &row : c.rows) {
    Json cells = Json::array();
    for (std::size_t i = 0; i < row.cells.size(); ++i) {
      const ComparisonCell &cell = row.cells[i];
      Json j{{"predictor", c.predictors[i]}};
      j["metrics"] = cell.metrics ? MetricsJson(*cell.metrics) : Json(nullptr);
      j["delta"] = cell.delta ? MetricsJson(*cell.delta) : Json(nullptr);
      cells.push_back(std::move(j));
    }
    rows.push_back(Json{{"label", row.label}, {"cells", std::move(cells)}});
  }
  return Json{{"reference", c.predictors.back()},
              {"corpus_fingerprint", c.corpus_fingerprint},
              {"predictors", c.predictors},
              {"rows", std::move(rows)}};
}

ResultsTable BuildResultsTable(const corpus::Corpus &corpus,
                               const detection::Resources &resources,
                               std::size_t k, std::uint64_t seed,
                               std::string_view composed_spec,
                               std::string_view direct_spec) {
  const FoldPlan plan = StratifiedFolds(corpus, k, "punishable", seed);
  const GoldMap gold = GoldFromCorpus(corpus);
  const std::string fingerprint = corpus::Fingerprint(corpus);
  detection::Resources r = resources;
  r.seed = seed;

  auto run = [&](std::string_view spec) {
    return Evaluate(*detection::MakePredictor(spec, r), corpus.posts, gold, plan,
                    resources.profile, fingerprint);
  };
  ResultsTable table;
  table.corpus_fingerprint = fingerprint;
  table.k = k;
  table.seed = seed;
  table.reports.push_back(run(composed_spec));
  table.reports.push_back(run("random:0.5"));
  table.reports.push_back(run(direct_spec));

  const EvaluationReport &composed = table.reports[0];
  static constexpr std::pair<std::string_view, std::string_view> kSubRows[] = {
      {"group_of_persons", "Group of persons"},
      {"individual_as_member", "Individual as member of group"},
      {"distinguishable_by_ground", "Distinguishable by protected ground"},
      {"incites_hatred", "Inciting hatred"},
      {"incites_violence", "Inciting violence"},
  };
  for (const auto &[label, name] : kSubRows) {
    if (const LabelMetrics *m = composed.Find(label)) {
      table.rows.push_back(ResultsRow{std::string(name), std::string(label),
                                      composed.predictor, m->average, m->pooled});
    }
  }
  const std::pair<std::string, const EvaluationReport *> verdict_rows[] = {
      {"Punishable (random)", &table.reports[1]},
      {"Punishable (direct)", &table.reports[2]},
      {"Punishable (submodels + decision tree)", &table.reports[0]},
  };
  for (const auto &[name, report] : verdict_rows) {
    const LabelMetrics *m = report->Find("punishable");
    table.rows.push_back(ResultsRow{name, "punishable", report->predictor,
                                    m->average, m->pooled});
  }
  return table;
}

Json ToJson(const ResultsTable &t) {
  Json rows = Json::array();
  for (const ResultsRow &row : t.rows) {
    rows.push_back(Json{{"row", row.name},
                        {"label", row.label},
                        {"predictor", row.predictor},
                        {"average", MetricsJson(row.average)},
                        {"pooled", MetricsJson(row.pooled)}});
  }
  Json reports = Json::array();
  for (const EvaluationReport &r : t.reports) reports.push_back(ToJson(r));
  return Json{{"corpus_fingerprint", t.corpus_fingerprint},
              {"k", t.k},
              {"seed", t.seed},
              {"rows", std::move(rows)},
              {"reports", std::move(reports)}};
}

std::string RenderResultsTable(const ResultsTable &t) {
  std::ostringstream out;
  out << "corpus: " << t.corpus_fingerprint << "  k=" << t.k << "  seed=" << t.seed
      << "  (average over folds; pooled in brackets)\n"
      << Pad("", 40) << "    P      R      F1\n";
  for (const ResultsRow &row : t.rows) {
    if (row.name.starts_with("Punishable (random)")) out << '\n';
    out << Pad(row.name, 40) << "  " << Fixed(row.average.precision, 2) << "   "
        << Fixed(row.average.recall, 2) << "   " << Fixed(row.average.f1, 2)
        << "   [" << Fixed(row.pooled.precision, 2) << ' '
        << Fixed(row.pooled.recall, 2) << ' ' << Fixed(row.pooled.f1, 2) << "]\n";
  }
  return out.str();
}

std::string ResultsTableCsv(const ResultsTable &t) {
  std::ostringstream out;
  out << "row,label,predictor,precision,recall,f1,pooled_precision,pooled_recall,"
         "pooled_f1\n";
  for (const ResultsRow &row : t.rows) {
    out << '"' << row.name << "\"," << row.label << ',' << row.predictor << ','
        << Fixed(row.average.precision, 6) << ',' << Fixed(row.average.recall, 6)
        << ',' << Fixed(row.average.f1, 6) << ',' << Fixed(row.pooled.precision, 6)
        << ',' << Fixed(row.pooled.recall, 6) << ',' << Fixed(row.pooled.f1, 6)
        << '\n';
  }
  return out.str();
}

}  // namespace lexjudge::evaluation
