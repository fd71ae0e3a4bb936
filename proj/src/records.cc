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

#include "lexjudge/records.h"

#include <ctime>
#include <cstdio>
#include <string>

#include "lexjudge/error.h"
#include "lexjudge/text.h"

namespace lexjudge {

namespace {

constexpr std::array<std::string_view, 6> kSourceNames = {
    "MadeUp",        "WebSearch", "Initiative", "GermEvalAbuseInsult",
    "GermEvalOther", "External",
};

const Json &Require(const Json &j, std::string_view key) {
  if (!j.is_object()) throw ValidationError("expected a JSON object");
  auto it = j.find(key);
  if (it == j.end()) {
    throw ValidationError("missing field '" + std::string(key) + "'",
                          std::string(key));
  }
  return *it;
}

std::string RequireString(const Json &j, std::string_view key) {
  const Json &v = Require(j, key);
  if (!v.is_string()) {
    throw ValidationError("field '" + std::string(key) + "' must be a string",
                          std::string(key));
  }
  return v.get<std::string>();
}

bool RequireBool(const Json &j, std::string_view key) {
  const Json &v = Require(j, key);
  if (!v.is_boolean()) {
    throw ValidationError("field '" + std::string(key) + "' must be a boolean",
                          std::string(key));
  }
  return v.get<bool>();
}

std::size_t RequireIndex(const Json &j, std::string_view key) {
  const Json &v = Require(j, key);
  if (!v.is_number_unsigned()) {
    throw ValidationError(
        "field '" + std::string(key) + "' must be a non-negative integer",
        std::string(key));
  }
  return v.get<std::size_t>();
}

}  // namespace

std::string FormatTimestamp(Timestamp ts) {
  const std::time_t t = ts.time_since_epoch().count();
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02dZ",
                tm.tm_year + 1900, tm.tm_mon + 1, tm.tm_mday, tm.tm_hour,
                tm.tm_min, tm.tm_sec);
  return buf;
}

Timestamp ParseTimestamp(std::string_view s) {
  int year, mon, day, hour, min, sec;
  char tail = 0;
  const std::string str(s);
  if (str.size() != 20 ||
      std::sscanf(str.c_str(), "%4d-%2d-%2dT%2d:%2d:%2d%c", &year, &mon, &day,
                  &hour, &min, &sec, &tail) != 7 ||
      tail != 'Z' || mon < 1 || mon > 12 || day < 1 || day > 31 || hour > 23 ||
      min > 59 || sec > 60) {
    throw ValidationError("invalid timestamp '" + str +
                              "', expected YYYY-MM-DDTHH:MM:SSZ",
                          "created_at");
  }
  std::tm tm{};
  tm.tm_year = year - 1900;
  tm.tm_mon = mon - 1;
  tm.tm_mday = day;
  tm.tm_hour = hour;
  tm.tm_min = min;
  tm.tm_sec = sec;
  return Timestamp(std::chrono::seconds(timegm(&tm)));
}

std::int64_t UtcDay(Timestamp ts) {
  return std::chrono::floor<std::chrono::days>(ts).time_since_epoch().count();
}

Timestamp Now() {
  return std::chrono::floor<std::chrono::seconds>(
      std::chrono::system_clock::now());
}

std::string_view SourceName(Source source) {
  return kSourceNames[static_cast<std::size_t>(source)];
}

Source ParseSource(std::string_view name) {
  for (Source s : kAllSources) {
    if (SourceName(s) == name) return s;
  }
  throw ValidationError("unknown source tag '" + std::string(name) + "'",
                        "source");
}

std::string_view RoleName(Role role) {
  return role == Role::kExpert ? "Expert" : "Layperson";
}

Role ParseRole(std::string_view name) {
  if (name == "Layperson") return Role::kLayperson;
  if (name == "Expert") return Role::kExpert;
  throw ValidationError("unknown role '" + std::string(name) + "'", "role");
}

std::string_view SchemeName(Scheme scheme) {
  return scheme == Scheme::kHolistic ? "holistic" : "decision_tree";
}

Scheme ParseScheme(std::string_view name) {
  if (name == "decision_tree") return Scheme::kDecisionTree;
  if (name == "holistic") return Scheme::kHolistic;
  throw ValidationError("unknown scheme '" + std::string(name) + "'",
                        "scheme");
}

void ValidateRecord(const AnnotationRecord &record,
                    std::optional<std::string_view> post_text) {
  if (record.post_id.empty()) {
    throw ValidationError("post_id must be non-empty", "post_id");
  }
  if (record.annotator_id.empty()) {
    throw ValidationError("annotator_id must be non-empty", "annotator_id");
  }
  if (record.assessments.empty()) {
    throw ValidationError("a record needs at least one assessment",
                          "assessments");
  }
  if (record.schema_version < 1 || record.schema_version > kSchemaVersion) {
    throw ValidationError(
        "unsupported schema_version " + std::to_string(record.schema_version),
        "schema_version");
  }
  if ((record.scheme == Scheme::kHolistic) != record.holistic_verdict.has_value()) {
    throw ValidationError(
        "holistic_verdict is required exactly for holistic records",
        "holistic_verdict");
  }
  const legal::ConductAssessment &conduct = record.assessments.front().conduct;
  for (const legal::LegalAssessment &a : record.assessments) {
    legal::Validate(a, post_text);
    if (a.conduct != conduct) {
      throw ValidationError(
          "all assessments of a record share one conduct assessment",
          "assessments.conduct");
    }
  }
}

bool RecordPunishable(const AnnotationRecord &record) {
  if (record.holistic_verdict) return *record.holistic_verdict;
  for (const legal::LegalAssessment &a : record.assessments) {
    if (legal::ApplyRule(legal::ToSubLabels(a))) return true;
  }
  return false;
}

legal::SubLabels RecordSubLabels(const AnnotationRecord &record) {
  legal::SubLabels out;
  for (const legal::LegalAssessment &a : record.assessments) {
    const legal::SubLabels s = legal::ToSubLabels(a);
    out.group_of_persons |= s.group_of_persons;
    out.individual_as_member |= s.individual_as_member;
    out.distinguishable_by_ground |= s.distinguishable_by_ground;
    out.incites_hatred |= s.incites_hatred;
    out.incites_violence |= s.incites_violence;
  }
  return out;
}

Json ToJson(const Post &post) {
  return Json{{"id", post.id},
              {"text", post.text},
              {"source", SourceName(post.source)},
              {"language", post.language}};
}

Post PostFromJson(const Json &j) {
  Post p;
  p.id = RequireString(j, "id");
  p.text = RequireString(j, "text");
  p.source = ParseSource(RequireString(j, "source"));
  if (j.contains("language")) p.language = RequireString(j, "language");
  if (p.id.empty()) throw ValidationError("post id must be non-empty", "id");
  if (text::Trim(p.text).empty()) {
    throw ValidationError("post text must be non-empty", "text");
  }
  if (p.language.empty()) {
    throw ValidationError("language must be a BCP-47 tag", "language");
  }
  return p;
}

Json ToJson(const legal::LegalAssessment &a) {
  Json grounds = Json::array();
  for (legal::ProtectedGround g : a.target.grounds) {
    grounds.push_back(legal::GroundName(g));
  }
  Json surface = nullptr;
  if (a.target.surface_form) {
    surface = Json{{"start", a.target.surface_form->start},
                   {"end", a.target.surface_form->end},
                   {"text", a.target.surface_form->text}};
  }
  return Json{
      {"group_of_persons", a.target.group_of_persons},
      {"individual_as_member", a.target.individual_as_member},
      {"distinguishable_by_ground", a.target.distinguishable_by_ground},
      {"grounds", std::move(grounds)},
      {"category", legal::CategoryName(a.target.category)},
      {"explicit_mention", a.target.explicit_mention},
      {"surface_form", std::move(surface)},
      {"incites_hatred", a.conduct.incites_hatred},
      {"incites_violence", a.conduct.incites_violence},
  };
}

legal::LegalAssessment AssessmentFromJson(const Json &j) {
  legal::LegalAssessment a;
  a.target.group_of_persons = RequireBool(j, "group_of_persons");
  a.target.individual_as_member = RequireBool(j, "individual_as_member");
  a.target.distinguishable_by_ground =
      RequireBool(j, "distinguishable_by_ground");
  if (j.contains("grounds")) {
    const Json &grounds = j.at("grounds");
    if (!grounds.is_array()) {
      throw ValidationError("grounds must be an array", "grounds");
    }
    for (const Json &g : grounds) {
      if (!g.is_string()) {
        throw ValidationError("grounds must be strings", "grounds");
      }
      a.target.grounds.insert(legal::ParseGround(g.get<std::string>()));
    }
  }
  a.target.category = legal::ParseCategory(RequireString(j, "category"));
  a.target.explicit_mention = RequireBool(j, "explicit_mention");
  if (j.contains("surface_form") && !j.at("surface_form").is_null()) {
    const Json &sf = j.at("surface_form");
    a.target.surface_form = legal::SurfaceForm{
        .start = RequireIndex(sf, "start"),
        .end = RequireIndex(sf, "end"),
        .text = RequireString(sf, "text"),
    };
  }
  a.conduct.incites_hatred = RequireBool(j, "incites_hatred");
  a.conduct.incites_violence = RequireBool(j, "incites_violence");
  return a;
}

Json ToJson(const AnnotationRecord &r) {
  Json assessments = Json::array();
  for (const legal::LegalAssessment &a : r.assessments) {
    assessments.push_back(ToJson(a));
  }
  Json j{{"post_id", r.post_id},
         {"annotator_id", r.annotator_id},
         {"role", RoleName(r.role)},
         {"assessments", std::move(assessments)},
         {"created_at", FormatTimestamp(r.created_at)},
         {"schema_version", r.schema_version}};
  if (r.scheme != Scheme::kDecisionTree) {
    j["scheme"] = SchemeName(r.scheme);
  }
  if (r.holistic_verdict) j["holistic_verdict"] = *r.holistic_verdict;
  if (r.implicit_mention) j["implicit_mention"] = true;
  return j;
}

AnnotationRecord RecordFromJson(const Json &j) {
  AnnotationRecord r;
  r.post_id = RequireString(j, "post_id");
  r.annotator_id = RequireString(j, "annotator_id");
  r.role = ParseRole(RequireString(j, "role"));
  const Json &assessments = Require(j, "assessments");
  if (!assessments.is_array()) {
    throw ValidationError("assessments must be an array", "assessments");
  }
  for (const Json &a : assessments) {
    r.assessments.push_back(AssessmentFromJson(a));
  }
  r.created_at = ParseTimestamp(RequireString(j, "created_at"));
  const Json &version = Require(j, "schema_version");
  if (!version.is_number_integer()) {
    throw ValidationError("schema_version must be an integer",
                          "schema_version");
  }
  r.schema_version = version.get<int>();
  if (j.contains("scheme")) r.scheme = ParseScheme(RequireString(j, "scheme"));
  if (j.contains("holistic_verdict")) {
    r.holistic_verdict = RequireBool(j, "holistic_verdict");
  }
  if (j.contains("implicit_mention")) {
    r.implicit_mention = RequireBool(j, "implicit_mention");
  }
  ValidateRecord(r);
  return r;
}

}  // namespace lexjudge
