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

#include "lexjudge/annotation.h"

#include <algorithm>
#include <array>
#include <limits>
#include <set>
#include <tuple>

#include "lexjudge/error.h"

namespace lexjudge::annotation {

namespace {

using legal::GroupCategory;

constexpr std::array<Question, 6> kQuestions = {{
    {QuestionId::kGroupOfPersons, "Q1",
     "Does the post address a group of persons?", AnswerKind::kYesNo},
    {QuestionId::kIndividualAsMember, "Q2",
     "Does the post address an individual as a member of a group?",
     AnswerKind::kYesNo},
    {QuestionId::kDistinguishable, "Q3",
     "Is the group distinguishable by race, colour, religion, descent, or "
     "national or ethnic origin? If so, by which of these grounds?",
     AnswerKind::kGrounds},
    {QuestionId::kCategory, "Q4",
     "Which group category is addressed? Is the group mentioned explicitly, "
     "and if so, by which words?",
     AnswerKind::kCategorySpan},
    {QuestionId::kIncitesHatred, "Q5",
     "Does the post incite hatred, i.e. is it capable of and aimed at "
     "creating or intensifying a hostile attitude beyond mere rejection or "
     "contempt?",
     AnswerKind::kYesNo},
    {QuestionId::kIncitesViolence, "Q6",
     "Does the post incite violence, including violent expulsion or pogroms?",
     AnswerKind::kYesNo},
}};

Error ProtocolError(std::string message, std::string field = {}) {
  return Error(ErrorCode::kProtocol, std::move(message), std::move(field));
}

std::string WireId(QuestionId id) { return std::string(GetQuestion(id).wire_id); }

AnswerKind KindOf(const Answer &answer) {
  if (std::holds_alternative<YesNo>(answer)) return AnswerKind::kYesNo;
  if (std::holds_alternative<GroundsAnswer>(answer)) return AnswerKind::kGrounds;
  return AnswerKind::kCategorySpan;
}

const Answer *Find(const WizardState &state, QuestionId id) {
  auto it = state.answered.find(id);
  if (it == state.answered.end()) return nullptr;
  if (KindOf(it->second) != GetQuestion(id).kind) {
    throw ProtocolError("answer stored for " + WireId(id) + " has the wrong form",
                        WireId(id));
  }
  return &it->second;
}

bool Yes(const Answer *a) { return std::get<YesNo>(*a).value; }

void ValidateAnswer(QuestionId q, const Answer &answer) {
  if (KindOf(answer) != GetQuestion(q).kind) {
    throw ValidationError("answer does not match the form of " + WireId(q),
                          WireId(q));
  }
  if (const auto *g = std::get_if<GroundsAnswer>(&answer)) {
    if (!g->distinguishable && !g->grounds.empty()) {
      throw ValidationError("grounds given for a group that is not "
                            "distinguishable by a protected ground",
                            "grounds");
    }
  }
  if (const auto *c = std::get_if<CategoryAnswer>(&answer)) {
    if (c->explicit_mention && !c->surface_form) {
      throw ValidationError("explicit mention requires a surface form span",
                            "surface_form");
    }
    if (!c->explicit_mention && c->surface_form) {
      throw ValidationError("surface form given without explicit mention",
                            "explicit_mention");
    }
    if (c->surface_form && c->surface_form->start >= c->surface_form->end) {
      throw ValidationError("surface form span is empty", "surface_form");
    }
  }
}

// The target part of the current (unfinished) group, if Q1-Q4 allow it.
legal::TargetGroupAssessment CurrentTarget(const WizardState &state) {
  legal::TargetGroupAssessment t;
  const Answer *q1 = Find(state, QuestionId::kGroupOfPersons);
  const Answer *q2 = Find(state, QuestionId::kIndividualAsMember);
  t.group_of_persons = q1 != nullptr && Yes(q1);
  t.individual_as_member = q2 != nullptr && Yes(q2);
  if (const Answer *q3 = Find(state, QuestionId::kDistinguishable)) {
    const auto &g = std::get<GroundsAnswer>(*q3);
    t.distinguishable_by_ground = g.distinguishable;
    t.grounds = g.grounds;
  }
  if (const Answer *q4 = Find(state, QuestionId::kCategory)) {
    const auto &c = std::get<CategoryAnswer>(*q4);
    t.category = c.category;
    t.explicit_mention = c.explicit_mention;
    t.surface_form = c.surface_form;
  }
  return t;
}

std::uint64_t Mix(std::string_view a, std::string_view b) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (std::string_view s : {a, std::string_view("\0", 1), b}) {
    for (unsigned char c : s) {
      h ^= c;
      h *= 0x100000001b3ULL;
    }
  }
  // splitmix64 finalizer
  h ^= h >> 30;
  h *= 0xbf58476d1ce4e5b9ULL;
  h ^= h >> 27;
  h *= 0x94d049bb133111ebULL;
  h ^= h >> 31;
  return h;
}

bool ParseYesNo(const Json &j, std::string_view field) {
  if (j.is_boolean()) return j.get<bool>();
  if (j.is_object() && j.contains("value") && j.at("value").is_boolean()) {
    return j.at("value").get<bool>();
  }
  throw ValidationError("expected a yes/no answer", std::string(field));
}

}  // namespace

const Question &GetQuestion(QuestionId id) {
  return kQuestions[static_cast<std::size_t>(id) - 1];
}

QuestionId ParseQuestionId(std::string_view wire_id) {
  for (const Question &q : kQuestions) {
    if (q.wire_id == wire_id) return q.id;
  }
  throw ProtocolError("unknown question id '" + std::string(wire_id) + "'",
                      "question");
}

std::optional<QuestionId> NextQuestion(const WizardState &state) {
  const Answer *q1 = Find(state, QuestionId::kGroupOfPersons);
  if (q1 == nullptr) {
    for (const auto &[id, answer] : state.answered) {
      if (id != QuestionId::kIncitesHatred && id != QuestionId::kIncitesViolence) {
        throw ProtocolError(WireId(id) + " answered before Q1", WireId(id));
      }
    }
    return QuestionId::kGroupOfPersons;
  }
  const Answer *q2 = Find(state, QuestionId::kIndividualAsMember);
  bool target = Yes(q1);
  if (target) {
    if (q2 != nullptr) {
      throw ProtocolError("Q2 is only asked when Q1 = no", "Q2");
    }
  } else {
    if (q2 == nullptr) {
      if (state.answered.contains(QuestionId::kDistinguishable) ||
          state.answered.contains(QuestionId::kCategory)) {
        throw ProtocolError("Q3/Q4 answered before Q2", "Q2");
      }
      return QuestionId::kIndividualAsMember;
    }
    target = Yes(q2);
  }
  const bool has_q3 = Find(state, QuestionId::kDistinguishable) != nullptr;
  const bool has_q4 = Find(state, QuestionId::kCategory) != nullptr;
  if (target) {
    if (!has_q3) {
      if (has_q4) throw ProtocolError("Q4 answered before Q3", "Q4");
      return QuestionId::kDistinguishable;
    }
    if (!has_q4) return QuestionId::kCategory;
  } else if (has_q3 || has_q4) {
    throw ProtocolError("Q3/Q4 are only asked when a group is addressed",
                        has_q3 ? "Q3" : "Q4");
  }
  if (Find(state, QuestionId::kIncitesHatred) == nullptr) {
    return QuestionId::kIncitesHatred;
  }
  if (Find(state, QuestionId::kIncitesViolence) == nullptr) {
    return QuestionId::kIncitesViolence;
  }
  return std::nullopt;
}

WizardState ApplyAnswer(WizardState state, QuestionId question, Answer answer) {
  const std::optional<QuestionId> next = NextQuestion(state);
  if (!next) {
    throw ProtocolError("session is complete; no question is open",
                        WireId(question));
  }
  if (*next != question) {
    throw ProtocolError("expected an answer to " + WireId(*next) + ", got " +
                            WireId(question),
                        WireId(question));
  }
  ValidateAnswer(question, answer);
  state.answered[question] = std::move(answer);
  return state;
}

WizardState AddGroup(WizardState state) {
  for (QuestionId q : {QuestionId::kGroupOfPersons, QuestionId::kDistinguishable,
                       QuestionId::kCategory}) {
    if (Find(state, q) == nullptr) {
      throw ValidationError(
          "Q1-Q4 must be completed before adding another group", WireId(q));
    }
  }
  legal::TargetGroupAssessment target = CurrentTarget(state);
  if (!target.group_of_persons && !target.individual_as_member) {
    throw ValidationError("the current assessment addresses no group", "Q1");
  }
  state.completed_groups.push_back(std::move(target));
  for (QuestionId q : {QuestionId::kGroupOfPersons, QuestionId::kIndividualAsMember,
                       QuestionId::kDistinguishable, QuestionId::kCategory}) {
    state.answered.erase(q);
  }
  return state;
}

WizardState Replay(std::string post_id, std::string annotator_id,
                   const std::vector<WizardEvent> &events) {
  WizardState state{.post_id = std::move(post_id),
                    .annotator_id = std::move(annotator_id),
                    .answered = {},
                    .completed_groups = {}};
  for (const WizardEvent &e : events) {
    if (const auto *a = std::get_if<AnswerEvent>(&e)) {
      state = ApplyAnswer(std::move(state), a->question, a->answer);
    } else {
      state = AddGroup(std::move(state));
    }
  }
  return state;
}

AnnotationRecord BuildRecord(const WizardState &state, const Post &post,
                             Role role, Timestamp created_at) {
  if (post.id != state.post_id) {
    throw ValidationError("session belongs to post '" + state.post_id + "'",
                          "post_id");
  }
  if (auto next = NextQuestion(state)) {
    throw ValidationError("session incomplete: " + WireId(*next) +
                              " is unanswered",
                          WireId(*next));
  }
  legal::ConductAssessment conduct{
      .incites_hatred = Yes(Find(state, QuestionId::kIncitesHatred)),
      .incites_violence = Yes(Find(state, QuestionId::kIncitesViolence)),
  };
  legal::TargetGroupAssessment current = CurrentTarget(state);
  if (!state.completed_groups.empty() && !current.group_of_persons &&
      !current.individual_as_member) {
    throw ValidationError("an additional group assessment must address a group",
                          "Q1");
  }
  AnnotationRecord record;
  record.post_id = state.post_id;
  record.annotator_id = state.annotator_id;
  record.role = role;
  record.created_at = created_at;
  for (const legal::TargetGroupAssessment &t : state.completed_groups) {
    record.assessments.push_back({.target = t, .conduct = conduct});
  }
  record.assessments.push_back({.target = std::move(current), .conduct = conduct});
  ValidateRecord(record, post.text);
  return record;
}

std::vector<std::string> ConsistencyHints(const AnnotationRecord &record) {
  std::vector<std::string> hints;
  for (std::size_t i = 0; i < record.assessments.size(); ++i) {
    const legal::TargetGroupAssessment &t = record.assessments[i].target;
    const legal::GroundSet expected = legal::DefaultGroundsFor(t.category);
    if (t.distinguishable_by_ground && !expected.empty() &&
        t.grounds != expected) {
      std::string names;
      for (legal::ProtectedGround g : expected) {
        if (!names.empty()) names += ", ";
        names += legal::GroundName(g);
      }
      hints.push_back("assessment " + std::to_string(i) + ": category " +
                      std::string(legal::CategoryName(t.category)) +
                      " usually maps to grounds {" + names + "}");
    }
    if (t.distinguishable_by_ground && t.grounds.empty()) {
      hints.push_back("assessment " + std::to_string(i) +
                      ": distinguishable group without any ground selected");
    }
  }
  return hints;
}

Json ToJson(const Question &q) {
  Json j{{"id", q.wire_id}, {"text", q.text}};
  switch (q.kind) {
    case AnswerKind::kYesNo:
      j["kind"] = "yes_no";
      break;
    case AnswerKind::kGrounds: {
      j["kind"] = "grounds";
      Json options = Json::array();
      for (legal::ProtectedGround g : legal::kAllGrounds) {
        options.push_back(legal::GroundName(g));
      }
      j["options"] = std::move(options);
      break;
    }
    case AnswerKind::kCategorySpan: {
      j["kind"] = "category_span";
      Json options = Json::array();
      for (GroupCategory c : legal::kAllCategories) {
        options.push_back(legal::CategoryName(c));
      }
      j["options"] = std::move(options);
      break;
    }
  }
  return j;
}

Json AnswerToJson(const Answer &answer) {
  if (const auto *y = std::get_if<YesNo>(&answer)) return y->value;
  if (const auto *g = std::get_if<GroundsAnswer>(&answer)) {
    Json grounds = Json::array();
    for (legal::ProtectedGround ground : g->grounds) {
      grounds.push_back(legal::GroundName(ground));
    }
    return Json{{"distinguishable", g->distinguishable},
                {"grounds", std::move(grounds)}};
  }
  const auto &c = std::get<CategoryAnswer>(answer);
  Json surface = nullptr;
  if (c.surface_form) {
    surface = Json{{"start", c.surface_form->start},
                   {"end", c.surface_form->end},
                   {"text", c.surface_form->text}};
  }
  return Json{{"category", legal::CategoryName(c.category)},
              {"explicit_mention", c.explicit_mention},
              {"surface_form", std::move(surface)}};
}

Answer AnswerFromJson(QuestionId question, const Json &j) {
  const std::string field = WireId(question);
  switch (GetQuestion(question).kind) {
    case AnswerKind::kYesNo:
      return YesNo{ParseYesNo(j, field)};
    case AnswerKind::kGrounds: {
      if (!j.is_object()) {
        throw ValidationError("expected {distinguishable, grounds}", field);
      }
      GroundsAnswer g;
      g.distinguishable = ParseYesNo(j.value("distinguishable", Json()), field);
      if (j.contains("grounds")) {
        if (!j.at("grounds").is_array()) {
          throw ValidationError("grounds must be an array", "grounds");
        }
        for (const Json &name : j.at("grounds")) {
          if (!name.is_string()) {
            throw ValidationError("grounds must be strings", "grounds");
          }
          g.grounds.insert(legal::ParseGround(name.get<std::string>()));
        }
      }
      return g;
    }
    case AnswerKind::kCategorySpan: {
      if (!j.is_object() || !j.contains("category") ||
          !j.at("category").is_string()) {
        throw ValidationError(
            "expected {category, explicit_mention, surface_form}", field);
      }
      CategoryAnswer c;
      c.category = legal::ParseCategory(j.at("category").get<std::string>());
      c.explicit_mention =
          ParseYesNo(j.value("explicit_mention", Json(false)), "explicit_mention");
      if (j.contains("surface_form") && !j.at("surface_form").is_null()) {
        const Json &sf = j.at("surface_form");
        if (!sf.is_object() || !sf.contains("start") || !sf.contains("end") ||
            !sf.contains("text") || !sf.at("start").is_number_unsigned() ||
            !sf.at("end").is_number_unsigned() || !sf.at("text").is_string()) {
          throw ValidationError("surface_form needs start, end and text",
                                "surface_form");
        }
        c.surface_form = legal::SurfaceForm{
            .start = sf.at("start").get<std::size_t>(),
            .end = sf.at("end").get<std::size_t>(),
            .text = sf.at("text").get<std::string>(),
        };
      }
      return c;
    }
  }
  throw ProtocolError("unknown answer kind", field);
}

Json ToJson(const WizardState &state) {
  Json answered = Json::object();
  for (const auto &[id, answer] : state.answered) {
    answered[WireId(id)] = AnswerToJson(answer);
  }
  Json groups = Json::array();
  for (const legal::TargetGroupAssessment &t : state.completed_groups) {
    Json a = lexjudge::ToJson(legal::LegalAssessment{.target = t, .conduct = {}});
    a.erase("incites_hatred");
    a.erase("incites_violence");
    groups.push_back(std::move(a));
  }
  Json j{{"post_id", state.post_id},
         {"annotator_id", state.annotator_id},
         {"answered", std::move(answered)},
         {"completed_groups", std::move(groups)}};
  if (auto next = NextQuestion(state)) {
    j["next_question"] = ToJson(GetQuestion(*next));
  } else {
    j["next_question"] = "Done";
  }
  return j;
}

std::optional<std::string> NextPostFor(const corpus::Corpus &corpus,
                                       std::string_view annotator_id) {
  std::map<std::string, std::size_t, std::less<>> counts;
  std::set<std::string, std::less<>> mine;
  for (const AnnotationRecord &r : corpus.annotations) {
    ++counts[r.post_id];
    if (r.annotator_id == annotator_id) mine.insert(r.post_id);
  }
  for (const AnnotationRecord &r : corpus.adjudications) {
    if (r.annotator_id == annotator_id) mine.insert(r.post_id);
  }
  const Post *best = nullptr;
  std::tuple<std::size_t, std::uint64_t> best_key{
      std::numeric_limits<std::size_t>::max(), 0};
  for (const Post &p : corpus.posts) {
    if (mine.contains(p.id)) continue;
    auto it = counts.find(p.id);
    const std::tuple<std::size_t, std::uint64_t> key{
        it == counts.end() ? 0 : it->second, Mix(annotator_id, p.id)};
    if (best == nullptr || key < best_key) {
      best = &p;
      best_key = key;
    }
  }
  if (best == nullptr) return std::nullopt;
  return best->id;
}

Json ToJson(const Submitted &submitted) {
  return Json{{"record", lexjudge::ToJson(submitted.record)},
              {"punishable", submitted.punishable},
              {"hints", submitted.hints}};
}

AnnotationStore::AnnotationStore(corpus::Corpus corpus, StoreOptions options)
    : options_(std::move(options)) {
  if (options_.daily_cap < 1) {
    throw ValidationError("daily annotation cap must be at least 1",
                          "daily_cap");
  }
  corpus::ValidateCorpus(corpus);
  corpus_ = std::make_shared<const corpus::Corpus>(std::move(corpus));
}

std::shared_ptr<const corpus::Corpus> AnnotationStore::Snapshot() const {
  std::shared_lock lock(mu_);
  return corpus_;
}

std::size_t AnnotationStore::SubmittedOn(std::string_view annotator_id,
                                         Timestamp at) const {
  const auto snapshot = Snapshot();
  const std::int64_t day = UtcDay(at);
  std::size_t n = 0;
  for (const auto *records : {&snapshot->annotations, &snapshot->adjudications}) {
    for (const AnnotationRecord &r : *records) {
      if (r.annotator_id == annotator_id && UtcDay(r.created_at) == day) ++n;
    }
  }
  return n;
}

Submitted AnnotationStore::Submit(AnnotationRecord record) {
  std::unique_lock lock(mu_);
  const Post *post = corpus_->FindPost(record.post_id);
  if (post == nullptr) {
    throw Error(ErrorCode::kNotFound, "unknown post '" + record.post_id + "'",
                "post_id");
  }
  ValidateRecord(record, post->text);
  for (const AnnotationRecord *r : corpus_->RecordsFor(record.post_id)) {
    if (r->annotator_id == record.annotator_id) {
      throw Error(ErrorCode::kConflict,
                  "post '" + record.post_id + "' already annotated by '" +
                      record.annotator_id + "'",
                  "annotator_id");
    }
  }
  const std::int64_t day = UtcDay(record.created_at);
  std::size_t today = 0;
  for (const auto *records : {&corpus_->annotations, &corpus_->adjudications}) {
    for (const AnnotationRecord &r : *records) {
      if (r.annotator_id == record.annotator_id && UtcDay(r.created_at) == day) {
        ++today;
      }
    }
  }
  if (today >= options_.daily_cap) {
    throw Error(ErrorCode::kQuota,
                "annotator '" + record.annotator_id + "' reached the daily cap of " +
                    std::to_string(options_.daily_cap) + " annotations",
                "daily_cap");
  }

  auto next = std::make_shared<corpus::Corpus>(*corpus_);
  corpus::AddRecord(*next, record);
  if (options_.directory) {
    corpus::WriteFileAtomic(*options_.directory / corpus::kAnnotationsFile,
                            corpus::AnnotationsJsonl(*next));
  }
  corpus_ = std::move(next);

  Submitted out;
  out.punishable = RecordPunishable(record);
  out.hints = ConsistencyHints(record);
  out.record = std::move(record);
  return out;
}

Submitted Submit(const WizardState &state, AnnotationStore &store, Role role,
                 Timestamp now) {
  const auto snapshot = store.Snapshot();
  const Post *post = snapshot->FindPost(state.post_id);
  if (post == nullptr) {
    throw Error(ErrorCode::kNotFound, "unknown post '" + state.post_id + "'",
                "post_id");
  }
  return store.Submit(BuildRecord(state, *post, role, now));
}

}  // namespace lexjudge::annotation
