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

#include "lexjudge/detection.h"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <tuple>

#include "lexjudge/error.h"
#include "lexjudge/text.h"

namespace lexjudge::detection {

namespace fs = std::filesystem;

namespace {

std::string ReadFile(const fs::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::kIo, path.string() + ": " + std::strerror(errno),
                "path");
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> SplitTabs(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t tab = line.find('\t', start);
    out.emplace_back(line.substr(start, tab - start));
    if (tab == std::string_view::npos) break;
    start = tab + 1;
  }
  return out;
}

// Calls fn(lineno, fields) for every content line.
template <typename Fn>
void ForEachTsvLine(std::string_view content, Fn fn) {
  std::size_t start = 0;
  int lineno = 0;
  while (start <= content.size()) {
    std::size_t end = content.find('\n', start);
    if (end == std::string_view::npos) end = content.size();
    std::string_view line = content.substr(start, end - start);
    ++lineno;
    start = end + 1;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (text::Trim(line).empty()) {
      if (end == content.size()) break;
      continue;
    }
    if (line.starts_with("# ") || line == "#") continue;
    fn(lineno, SplitTabs(line));
    if (end == content.size()) break;
  }
}

Error LineError(std::string_view origin, int line, const std::string &message,
                std::string field = {}) {
  return Error(ErrorCode::kValidation,
               std::string(origin) + ":" + std::to_string(line) + ": " + message,
               std::move(field), line);
}

// Tokens are maximal runs of word characters in normalized text.
struct Token {
  std::size_t begin = 0;  // normalized code point offsets
  std::size_t end = 0;
};

std::vector<Token> Tokenize(const std::u32string &s) {
  std::vector<Token> tokens;
  std::size_t i = 0;
  while (i < s.size()) {
    if (!text::IsWordChar(s[i])) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < s.size() && text::IsWordChar(s[j])) ++j;
    tokens.push_back(Token{i, j});
    i = j;
  }
  return tokens;
}

bool Matches(const TokenMatcher &m, std::u32string_view token) {
  switch (m.mode) {
    case TokenMatcher::Mode::kAny:
      return true;
    case TokenMatcher::Mode::kExact:
      return token == m.literal;
    case TokenMatcher::Mode::kPrefix:
      return token.size() >= m.literal.size() &&
             token.substr(0, m.literal.size()) == m.literal;
    case TokenMatcher::Mode::kSuffix:
      return token.size() >= m.literal.size() &&
             token.substr(token.size() - m.literal.size()) == m.literal;
  }
  return false;
}

bool MatchesAny(const std::vector<TokenMatcher> &alternatives,
                std::u32string_view token) {
  return std::any_of(alternatives.begin(), alternatives.end(),
                     [&](const TokenMatcher &m) { return Matches(m, token); });
}

std::vector<TokenMatcher> CompileAlternatives(std::string_view spec) {
  std::vector<TokenMatcher> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t bar = spec.find('|', start);
    const std::string alt(spec.substr(start, bar - start));
    if (alt.empty()) {
      throw ValidationError("empty alternative in pattern '" +
                                std::string(spec) + "'",
                            "pattern");
    }
    TokenMatcher m;
    std::string literal = alt;
    if (alt == "*") {
      m.mode = TokenMatcher::Mode::kAny;
      literal.clear();
    } else if (alt.back() == '*') {
      m.mode = TokenMatcher::Mode::kPrefix;
      literal.pop_back();
    } else if (alt.front() == '*') {
      m.mode = TokenMatcher::Mode::kSuffix;
      literal.erase(0, 1);
    }
    m.literal = text::Normalize(literal).text;
    if (m.mode != TokenMatcher::Mode::kAny) {
      if (m.literal.empty() || literal.find('*') != std::string::npos) {
        throw ValidationError("invalid token pattern '" + alt + "'", "pattern");
      }
      for (char32_t c : m.literal) {
        if (!text::IsWordChar(c)) {
          throw ValidationError("token pattern '" + alt +
                                    "' contains a non-word character",
                                "pattern");
        }
      }
    }
    out.push_back(std::move(m));
    if (bar == std::string_view::npos) break;
    start = bar + 1;
  }
  return out;
}

Span OriginalSpan(const text::NormalizedText &n, const std::u32string &original,
                  std::size_t norm_begin, std::size_t norm_end) {
  Span s;
  s.start = n.origin_begin[norm_begin];
  s.end = n.origin_end[norm_end - 1];
  s.text = text::EncodeUtf8(
      std::u32string_view(original).substr(s.start, s.end - s.start));
  return s;
}

std::string FormatScore(double v) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

Json SpanJson(const Span &s) {
  return Json{{"start", s.start}, {"end", s.end}, {"text", s.text}};
}

Span SpanFromJson(const Json &j) {
  if (!j.is_object() || !j.contains("start") || !j.contains("end") ||
      !j.at("start").is_number_unsigned() || !j.at("end").is_number_unsigned()) {
    throw ValidationError("evidence needs integer start and end", "evidence");
  }
  Span s;
  s.start = j.at("start").get<std::size_t>();
  s.end = j.at("end").get<std::size_t>();
  if (j.contains("text") && j.at("text").is_string()) {
    s.text = j.at("text").get<std::string>();
  }
  return s;
}

std::optional<LabelScore> LabelFromJson(const Json &j, std::string_view key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  const Json &v = j.at(key);
  LabelScore out;
  if (v.is_boolean()) {
    out.score = v.get<bool>() ? 1.0 : 0.0;
  } else if (v.is_number()) {
    out.score = v.get<double>();
  } else if (v.is_object() && v.contains("score") && v.at("score").is_number()) {
    out.score = v.at("score").get<double>();
    if (v.contains("evidence") && !v.at("evidence").is_null()) {
      out.evidence = SpanFromJson(v.at("evidence"));
    }
    if (v.contains("source") && v.at("source").is_string()) {
      out.source = v.at("source").get<std::string>();
    }
  } else {
    throw ValidationError("label '" + std::string(key) +
                              "' must be a score, a boolean or {score}",
                          std::string(key));
  }
  return out;
}

Json LabelToJson(const LabelScore &l) {
  Json j{{"score", l.score}};
  if (l.evidence) j["evidence"] = SpanJson(*l.evidence);
  if (!l.source.empty()) j["source"] = l.source;
  return j;
}

TraceItem MakeItem(std::string_view name, const std::optional<LabelScore> &l) {
  TraceItem item;
  item.sub_label = std::string(name);
  if (l) {
    item.value = l->score >= kThreshold;
    item.score = l->score;
    item.origin = TraceItem::Origin::kPredicted;
    item.evidence = l->evidence;
    item.note = l->source;
  } else {
    item.value = false;
    item.origin = TraceItem::Origin::kDefault;
    item.note = "not predicted; defaults to false";
  }
  return item;
}

std::string_view OriginName(TraceItem::Origin o) {
  switch (o) {
    case TraceItem::Origin::kPredicted:
      return "predicted";
    case TraceItem::Origin::kInferred:
      return "inferred";
    case TraceItem::Origin::kDefault:
      return "default";
  }
  return "default";
}

std::uint64_t HashPost(std::uint64_t seed, std::string_view id) {
  std::uint64_t h = 0xcbf29ce484222325ULL ^ seed;
  for (unsigned char c : id) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  h += 0x9e3779b97f4a7c15ULL + seed;
  h ^= h >> 30;
  h *= 0xbf58476d1ce4e5b9ULL;
  h ^= h >> 27;
  h *= 0x94d049bb133111ebULL;
  h ^= h >> 31;
  return h;
}

}  // namespace

bool SubLabelPrediction::HasAnySubLabel() const {
  return group_of_persons || individual_as_member || distinguishable_by_ground ||
         category || incites_hatred || incites_violence;
}

bool SubLabelPrediction::Empty() const {
  return !HasAnySubLabel() && !punishable;
}

void Validate(const SubLabelPrediction &p) {
  if (p.Empty()) {
    throw ValidationError("prediction carries no label", "prediction");
  }
  auto check = [](const std::optional<LabelScore> &l, std::string_view name) {
    if (l && !(l->score >= 0.0 && l->score <= 1.0)) {
      throw ValidationError("score of '" + std::string(name) +
                                "' must lie in [0, 1]",
                            std::string(name));
    }
  };
  check(p.group_of_persons, "group_of_persons");
  check(p.individual_as_member, "individual_as_member");
  check(p.distinguishable_by_ground, "distinguishable_by_ground");
  check(p.incites_hatred, "incites_hatred");
  check(p.incites_violence, "incites_violence");
  check(p.punishable, "punishable");
  if (p.category && !(p.category->confidence >= 0.0 && p.category->confidence <= 1.0)) {
    throw ValidationError("category confidence must lie in [0, 1]", "category");
  }
}

Json ToJson(const SubLabelPrediction &p) {
  Json j = Json::object();
  auto put = [&j](std::string_view key, const std::optional<LabelScore> &l) {
    if (l) j[std::string(key)] = LabelToJson(*l);
  };
  put("group_of_persons", p.group_of_persons);
  put("individual_as_member", p.individual_as_member);
  put("distinguishable_by_ground", p.distinguishable_by_ground);
  if (p.category) {
    Json c{{"label", legal::CategoryName(p.category->category)},
           {"confidence", p.category->confidence}};
    if (p.category->evidence) c["evidence"] = SpanJson(*p.category->evidence);
    j["category"] = std::move(c);
  }
  put("incites_hatred", p.incites_hatred);
  put("incites_violence", p.incites_violence);
  put("punishable", p.punishable);
  return j;
}

SubLabelPrediction PredictionFromJson(const Json &j) {
  if (!j.is_object()) throw ValidationError("prediction must be an object");
  SubLabelPrediction p;
  p.group_of_persons = LabelFromJson(j, "group_of_persons");
  p.individual_as_member = LabelFromJson(j, "individual_as_member");
  p.distinguishable_by_ground = LabelFromJson(j, "distinguishable_by_ground");
  p.incites_hatred = LabelFromJson(j, "incites_hatred");
  p.incites_violence = LabelFromJson(j, "incites_violence");
  p.punishable = LabelFromJson(j, "punishable");
  if (j.contains("category") && !j.at("category").is_null()) {
    const Json &c = j.at("category");
    CategoryScore cs;
    if (c.is_string()) {
      cs.category = legal::ParseCategory(c.get<std::string>());
      cs.confidence = 1.0;
    } else if (c.is_object() && c.contains("label") && c.at("label").is_string()) {
      cs.category = legal::ParseCategory(c.at("label").get<std::string>());
      cs.confidence = c.value("confidence", 1.0);
      if (c.contains("evidence") && !c.at("evidence").is_null()) {
        cs.evidence = SpanFromJson(c.at("evidence"));
      }
    } else {
      throw ValidationError("category must be a name or {label, confidence}",
                            "category");
    }
    p.category = cs;
  }
  Validate(p);
  return p;
}

// ---------------------------------------------------------------------------
// Gazetteer

std::vector<LexiconEntry> ParseLexicon(std::string_view content,
                                       std::string_view origin) {
  std::vector<LexiconEntry> entries;
  ForEachTsvLine(content, [&](int line, const std::vector<std::string> &fields) {
    if (fields.size() < 2 || fields.size() > 3) {
      throw LineError(origin, line,
                      "expected category<TAB>surface_form[<TAB>source]");
    }
    LexiconEntry e;
    try {
      e.category = legal::ParseCategory(text::Trim(fields[0]));
    } catch (const Error &err) {
      throw LineError(origin, line, err.what(), "category");
    }
    e.surface_form = fields[1];
    if (fields.size() == 3) e.source = fields[2];
    entries.push_back(std::move(e));
  });
  return entries;
}

std::vector<LexiconEntry> ReadLexiconFile(const fs::path &path) {
  return ParseLexicon(ReadFile(path), path.string());
}

Gazetteer Gazetteer::FromEntries(const std::vector<LexiconEntry> &entries) {
  Gazetteer g;
  for (const LexiconEntry &e : entries) {
    if (e.category == legal::GroupCategory::kNone) {
      throw ValidationError("lexicon entries cannot use category None",
                            "category");
    }
    text::NormalizedText n = text::Normalize(e.surface_form);
    if (n.text.empty()) {
      throw ValidationError("empty surface form for category " +
                                std::string(legal::CategoryName(e.category)),
                            "surface_form");
    }
    g.entries_[e.category].insert(text::EncodeUtf8(n.text));
    g.forms_[std::move(n.text)].insert(e.category);
  }
  return g;
}

Gazetteer Gazetteer::LoadDirectory(const fs::path &dir) {
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) {
    throw Error(ErrorCode::kIo, dir.string() + ": not a lexicon directory",
                "path");
  }
  std::vector<fs::path> files;
  for (const fs::directory_entry &e : fs::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".tsv") {
      files.push_back(e.path());
    }
  }
  std::sort(files.begin(), files.end());
  std::vector<LexiconEntry> entries;
  for (const fs::path &f : files) {
    std::vector<LexiconEntry> more = ReadLexiconFile(f);
    entries.insert(entries.end(), more.begin(), more.end());
  }
  return FromEntries(entries);
}

std::size_t Gazetteer::size() const {
  std::size_t n = 0;
  for (const auto &[category, forms] : entries_) n += forms.size();
  return n;
}

std::vector<GroupMatch> Gazetteer::Match(std::string_view input) const {
  const text::NormalizedText n = text::Normalize(input);
  const std::u32string original = text::DecodeUtf8(input);
  std::vector<GroupMatch> matches;
  for (const auto &[form, categories] : forms_) {
    std::size_t pos = n.text.find(form);
    while (pos != std::u32string::npos) {
      const std::size_t end = pos + form.size();
      const bool left_ok = pos == 0 || !text::IsWordChar(n.text[pos - 1]);
      const bool right_ok = end == n.text.size() || !text::IsWordChar(n.text[end]);
      if (left_ok && right_ok) {
        const Span span = OriginalSpan(n, original, pos, end);
        for (legal::GroupCategory c : categories) {
          matches.push_back(GroupMatch{c, span, text::EncodeUtf8(form)});
        }
      }
      pos = n.text.find(form, pos + 1);
    }
  }
  std::sort(matches.begin(), matches.end(),
            [](const GroupMatch &a, const GroupMatch &b) {
              return std::tie(a.span.start, a.span.end, a.category, a.form) <
                     std::tie(b.span.start, b.span.end, b.category, b.form);
            });
  return matches;
}

std::vector<GroupMatch> DetectGroups(const Post &post, const Gazetteer &gazetteer) {
  return gazetteer.Match(post.text);
}

// ---------------------------------------------------------------------------
// Conduct patterns

Phrase CompilePhrase(std::string_view pattern) {
  Phrase phrase;
  phrase.source = std::string(pattern);
  std::istringstream in{std::string(pattern)};
  std::string position;
  while (in >> position) phrase.positions.push_back(CompileAlternatives(position));
  if (phrase.positions.empty()) {
    throw ValidationError("empty pattern", "pattern");
  }
  return phrase;
}

ConductPatternSet ConductPatternSet::Parse(std::string_view content,
                                           std::string_view origin) {
  ConductPatternSet set;
  ForEachTsvLine(content, [&](int line, const std::vector<std::string> &fields) {
    try {
      const std::string kind = text::Trim(fields[0]);
      if (kind == "violence") {
        if (fields.size() != 2 && fields.size() != 4) {
          throw ValidationError(
              "expected violence<TAB>phrase[<TAB>target-cues<TAB>window]");
        }
        ViolencePattern p;
        p.action = CompilePhrase(fields[1]);
        if (fields.size() == 4) {
          p.target_cues = CompileAlternatives(text::Trim(fields[2]));
          try {
            p.window = std::stoi(fields[3]);
          } catch (const std::exception &) {
            throw ValidationError("window must be an integer", "window");
          }
          if (p.window < 1) throw ValidationError("window must be >= 1", "window");
        }
        set.AddViolence(std::move(p));
      } else if (kind == "hatred") {
        if (fields.size() != 2) throw ValidationError("expected hatred<TAB>phrase");
        set.AddHatred(HatredPattern{CompilePhrase(fields[1])});
      } else {
        throw ValidationError("unknown pattern kind '" + kind + "'", "kind");
      }
    } catch (const Error &e) {
      throw LineError(origin, line, e.what(), e.field());
    }
  });
  return set;
}

ConductPatternSet ConductPatternSet::LoadFile(const fs::path &path) {
  return Parse(ReadFile(path), path.string());
}

void ConductPatternSet::AddViolence(ViolencePattern pattern) {
  if (pattern.action.positions.empty()) {
    throw ValidationError("violence pattern without action terms", "pattern");
  }
  violence_.push_back(std::move(pattern));
}

void ConductPatternSet::AddHatred(HatredPattern pattern) {
  if (pattern.cue.positions.empty()) {
    throw ValidationError("hatred pattern without cue terms", "pattern");
  }
  hatred_.push_back(std::move(pattern));
}

ConductDetection DetectConduct(const Post &post, const ConductPatternSet &patterns) {
  const text::NormalizedText n = text::Normalize(post.text);
  const std::u32string original = text::DecodeUtf8(post.text);
  const std::vector<Token> tokens = Tokenize(n.text);
  auto token_view = [&](std::size_t i) {
    return std::u32string_view(n.text).substr(tokens[i].begin,
                                               tokens[i].end - tokens[i].begin);
  };
  auto phrase_at = [&](const Phrase &phrase, std::size_t i) {
    if (i + phrase.positions.size() > tokens.size()) return false;
    for (std::size_t k = 0; k < phrase.positions.size(); ++k) {
      if (!MatchesAny(phrase.positions[k], token_view(i + k))) return false;
    }
    return true;
  };

  ConductDetection out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    for (const ViolencePattern &p : patterns.violence()) {
      if (!phrase_at(p.action, i)) continue;
      const std::size_t last = i + p.action.positions.size() - 1;
      if (!p.target_cues.empty()) {
        const std::size_t lo = i >= static_cast<std::size_t>(p.window)
                                   ? i - static_cast<std::size_t>(p.window)
                                   : 0;
        const std::size_t hi =
            std::min(tokens.size() - 1, last + static_cast<std::size_t>(p.window));
        bool cue = false;
        for (std::size_t j = lo; j <= hi && !cue; ++j) {
          if (j >= i && j <= last) continue;
          cue = MatchesAny(p.target_cues, token_view(j));
        }
        if (!cue) continue;
      }
      out.conduct.incites_violence = true;
      out.hits.push_back(ConductHit{
          .violence = true,
          .span = OriginalSpan(n, original, tokens[i].begin, tokens[last].end),
          .pattern = p.action.source});
    }
    for (const HatredPattern &p : patterns.hatred()) {
      if (!phrase_at(p.cue, i)) continue;
      const std::size_t last = i + p.cue.positions.size() - 1;
      out.conduct.incites_hatred = true;
      out.hits.push_back(ConductHit{
          .violence = false,
          .span = OriginalSpan(n, original, tokens[i].begin, tokens[last].end),
          .pattern = p.cue.source});
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Composition

Verdict Compose(const SubLabelPrediction &p,
                const legal::JurisdictionProfile &profile) {
  legal::ValidateProfile(profile);
  Verdict v;
  v.mode = "composed";

  TraceStep target{.name = "target_group",
                   .question = "Is a group of persons, or an individual as a "
                               "member of a group, addressed?",
                   .passed = false,
                   .items = {}};
  target.items.push_back(MakeItem("group_of_persons", p.group_of_persons));
  target.items.push_back(MakeItem("individual_as_member", p.individual_as_member));
  target.passed = target.items[0].value || target.items[1].value;

  TraceStep ground{.name = "protected_ground",
                   .question = "Is the group distinguishable by race, colour, "
                               "religion, descent, or national or ethnic origin?",
                   .passed = false,
                   .items = {}};
  TraceItem dist = MakeItem("distinguishable_by_ground", p.distinguishable_by_ground);
  if (!p.distinguishable_by_ground && p.category) {
    const bool is_protected =
        profile.protected_categories.contains(p.category->category);
    dist.origin = TraceItem::Origin::kInferred;
    dist.value = is_protected && p.category->confidence >= kThreshold;
    dist.score = is_protected ? p.category->confidence : 0.0;
    dist.evidence = p.category->evidence;
    dist.note = "category " + std::string(legal::CategoryName(p.category->category)) +
                (is_protected ? " is" : " is not") + " protected under " +
                profile.name;
  }
  if (dist.value && !target.passed) {
    dist.note += (dist.note.empty() ? "" : "; ") +
                 std::string("inconsistent: no target group was found");
  }
  ground.passed = dist.value;
  ground.items.push_back(std::move(dist));

  TraceStep conduct{.name = "targeting_conduct",
                    .question = "Does the post incite hatred or violence?",
                    .passed = false,
                    .items = {}};
  conduct.items.push_back(MakeItem("incites_hatred", p.incites_hatred));
  conduct.items.push_back(MakeItem("incites_violence", p.incites_violence));
  conduct.passed = conduct.items[0].value || conduct.items[1].value;

  legal::SubLabels labels{
      .group_of_persons = target.items[0].value,
      .individual_as_member = target.items[1].value,
      .distinguishable_by_ground = ground.items[0].value,
      .incites_hatred = conduct.items[0].value,
      .incites_violence = conduct.items[1].value,
  };
  v.assessment = legal::FromSubLabels(labels);
  if (p.category) v.assessment.target.category = p.category->category;
  v.punishable = legal::ApplyRule(labels);

  v.trace = {std::move(target), std::move(ground), std::move(conduct)};
  for (const TraceStep &s : v.trace) {
    if (!s.passed) {
      v.failed_step = s.name;
      break;
    }
  }
  return v;
}

Verdict Decide(const SubLabelPrediction &p,
               const legal::JurisdictionProfile &profile) {
  if (p.HasAnySubLabel() || !p.punishable) return Compose(p, profile);
  legal::ValidateProfile(profile);
  Verdict v;
  v.mode = "direct";
  v.punishable = p.punishable->score >= kThreshold;
  return v;
}

Json ToJson(const Verdict &v) {
  Json steps = Json::array();
  for (const TraceStep &s : v.trace) {
    Json items = Json::array();
    for (const TraceItem &i : s.items) {
      Json item{{"sub_label", i.sub_label},
                {"value", i.value},
                {"origin", OriginName(i.origin)}};
      item["score"] = i.score ? Json(*i.score) : Json(nullptr);
      item["evidence"] = i.evidence ? SpanJson(*i.evidence) : Json(nullptr);
      if (!i.note.empty()) item["note"] = i.note;
      items.push_back(std::move(item));
    }
    steps.push_back(Json{{"step", s.name},
                         {"question", s.question},
                         {"passed", s.passed},
                         {"items", std::move(items)}});
  }
  Json j{{"punishable", v.punishable},
         {"mode", v.mode},
         {"trace", std::move(steps)}};
  j["failed_step"] = v.failed_step.empty() ? Json(nullptr) : Json(v.failed_step);
  if (v.mode == "composed") {
    j["sub_labels"] = Json{
        {"group_of_persons", v.assessment.target.group_of_persons},
        {"individual_as_member", v.assessment.target.individual_as_member},
        {"distinguishable_by_ground", v.assessment.target.distinguishable_by_ground},
        {"category", legal::CategoryName(v.assessment.target.category)},
        {"incites_hatred", v.assessment.conduct.incites_hatred},
        {"incites_violence", v.assessment.conduct.incites_violence},
    };
  }
  return j;
}

std::string RenderTrace(const Verdict &v) {
  std::ostringstream out;
  out << "punishable: " << (v.punishable ? "true" : "false");
  if (v.mode == "direct") {
    out << " (direct prediction, no sub-decisions)\n";
    return out.str();
  }
  out << (v.punishable ? " (potentially punishable under the encoded standard)"
                       : " (not punishable under the encoded standard)");
  if (!v.failed_step.empty()) out << "; failed step: " << v.failed_step;
  out << '\n';
  for (std::size_t k = 0; k < v.trace.size(); ++k) {
    const TraceStep &s = v.trace[k];
    out << "  [" << (k + 1) << "] " << s.name << ": "
        << (s.passed ? "yes" : "no") << "  -- " << s.question << '\n';
    for (const TraceItem &i : s.items) {
      out << "      " << i.sub_label << " = " << (i.value ? "true" : "false")
          << " (" << OriginName(i.origin);
      if (i.score) out << ", score " << FormatScore(*i.score);
      out << ')';
      if (i.evidence) {
        out << " evidence \"" << i.evidence->text << "\" [" << i.evidence->start
            << ", " << i.evidence->end << ')';
      }
      if (!i.note.empty()) out << " " << i.note;
      out << '\n';
    }
  }
  return out.str();
}

// ---------------------------------------------------------------------------
// Predictors

std::string_view PredictorKindName(PredictorKind kind) {
  switch (kind) {
    case PredictorKind::kGroupGazetteer:
      return "GroupGazetteer";
    case PredictorKind::kConductPattern:
      return "ConductPattern";
    case PredictorKind::kExternal:
      return "External";
    case PredictorKind::kRandom:
      return "Random";
    case PredictorKind::kComposite:
      return "Composite";
  }
  return "Composite";
}

GazetteerPredictor::GazetteerPredictor(std::shared_ptr<const Gazetteer> gazetteer,
                                       legal::JurisdictionProfile profile)
    : gazetteer_(std::move(gazetteer)), profile_(std::move(profile)) {
  if (!gazetteer_) throw ValidationError("gazetteer predictor needs a gazetteer");
  legal::ValidateProfile(profile_);
}

SubLabelPrediction GazetteerPredictor::Predict(const Post &post,
                                               const FoldContext *) const {
  const std::vector<GroupMatch> matches = DetectGroups(post, *gazetteer_);
  SubLabelPrediction p;
  p.individual_as_member =
      LabelScore{.score = 0.0, .evidence = {}, .source = "not modeled by gazetteer"};
  if (matches.empty()) {
    p.group_of_persons =
        LabelScore{.score = 0.0, .evidence = {}, .source = "gazetteer: no match"};
    p.distinguishable_by_ground =
        LabelScore{.score = 0.0, .evidence = {}, .source = "gazetteer: no match"};
    return p;
  }
  const GroupMatch *primary = &matches.front();
  for (const GroupMatch &m : matches) {
    if (profile_.protected_categories.contains(m.category)) {
      primary = &m;
      break;
    }
  }
  const bool is_protected = profile_.protected_categories.contains(primary->category);
  p.group_of_persons = LabelScore{.score = 1.0,
                                  .evidence = primary->span,
                                  .source = "gazetteer:" + primary->form};
  p.category = CategoryScore{.category = primary->category,
                             .confidence = 1.0,
                             .evidence = primary->span};
  p.distinguishable_by_ground = LabelScore{
      .score = is_protected ? 1.0 : 0.0,
      .evidence = primary->span,
      .source = "category " + std::string(legal::CategoryName(primary->category)) +
                (is_protected ? " protected under " : " not protected under ") +
                profile_.name};
  return p;
}

ConductPatternPredictor::ConductPatternPredictor(
    std::shared_ptr<const ConductPatternSet> patterns, bool direct)
    : patterns_(std::move(patterns)), direct_(direct) {
  if (!patterns_) throw ValidationError("conduct predictor needs patterns");
}

SubLabelPrediction ConductPatternPredictor::Predict(const Post &post,
                                                    const FoldContext *) const {
  const ConductDetection d = DetectConduct(post, *patterns_);
  auto label = [&d](bool violence) {
    LabelScore l;
    for (const ConductHit &h : d.hits) {
      if (h.violence == violence) {
        l.score = 1.0;
        l.evidence = h.span;
        l.source = std::string(violence ? "violence pattern: " : "hatred pattern: ") +
                   h.pattern;
        return l;
      }
    }
    l.source = "no pattern hit";
    return l;
  };
  SubLabelPrediction p;
  if (direct_) {
    LabelScore any = label(true);
    if (any.score == 0.0) any = label(false);
    any.source = "direct: " + any.source;
    p.punishable = std::move(any);
    return p;
  }
  p.incites_hatred = label(false);
  p.incites_violence = label(true);
  return p;
}

CompositePredictor::CompositePredictor(std::shared_ptr<const Predictor> group,
                                       std::shared_ptr<const Predictor> conduct,
                                       legal::JurisdictionProfile profile)
    : group_(std::move(group)),
      conduct_(std::move(conduct)),
      profile_(std::move(profile)) {
  if (!group_ || !conduct_) {
    throw ValidationError("composite predictor needs two sub-predictors");
  }
  legal::ValidateProfile(profile_);
}

std::string CompositePredictor::name() const {
  return group_->name() + "+" + conduct_->name();
}

SubLabelPrediction CompositePredictor::Predict(const Post &post,
                                               const FoldContext *fold) const {
  const SubLabelPrediction g = group_->Predict(post, fold);
  const SubLabelPrediction c = conduct_->Predict(post, fold);
  SubLabelPrediction p;
  p.group_of_persons = g.group_of_persons ? g.group_of_persons : c.group_of_persons;
  p.individual_as_member =
      g.individual_as_member ? g.individual_as_member : c.individual_as_member;
  p.distinguishable_by_ground = g.distinguishable_by_ground
                                    ? g.distinguishable_by_ground
                                    : c.distinguishable_by_ground;
  p.category = g.category ? g.category : c.category;
  p.incites_hatred = c.incites_hatred ? c.incites_hatred : g.incites_hatred;
  p.incites_violence = c.incites_violence ? c.incites_violence : g.incites_violence;
  const Verdict v = Compose(p, profile_);
  p.punishable = LabelScore{.score = v.punishable ? 1.0 : 0.0,
                            .evidence = {},
                            .source = "decision tree"};
  return p;
}

RandomPredictor::RandomPredictor(double p, std::uint64_t seed) : p_(p), seed_(seed) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw ValidationError("random predictor probability must lie in [0, 1]", "p");
  }
}

std::string RandomPredictor::name() const {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "random:%g", p_);
  return buf;
}

SubLabelPrediction RandomPredictor::Predict(const Post &post,
                                            const FoldContext *) const {
  // Uniform in [0, 1) from the top 53 bits.
  const double u =
      static_cast<double>(HashPost(seed_, post.id) >> 11) * 0x1.0p-53;
  SubLabelPrediction p;
  p.punishable =
      LabelScore{.score = u < p_ ? 1.0 : 0.0, .evidence = {}, .source = name()};
  return p;
}

std::unique_ptr<Predictor> MakeRandomPredictor(double p, std::uint64_t seed) {
  return std::make_unique<RandomPredictor>(p, seed);
}

std::shared_ptr<const Predictor> MakePredictor(std::string_view spec,
                                               const Resources &r) {
  auto need_rules = [&r, spec] {
    if (!r.gazetteer || !r.patterns) {
      throw ValidationError("predictor '" + std::string(spec) +
                                "' needs the bundled lexicon and patterns",
                            "predictor");
    }
  };
  if (spec == "gazetteer+patterns") {
    need_rules();
    return std::make_shared<CompositePredictor>(
        std::make_shared<GazetteerPredictor>(r.gazetteer, r.profile),
        std::make_shared<ConductPatternPredictor>(r.patterns, false), r.profile);
  }
  if (spec == "gazetteer") {
    need_rules();
    return std::make_shared<GazetteerPredictor>(r.gazetteer, r.profile);
  }
  if (spec == "patterns" || spec == "direct-patterns") {
    need_rules();
    return std::make_shared<ConductPatternPredictor>(r.patterns,
                                                     spec == "direct-patterns");
  }
  if (spec.starts_with("random:")) {
    const std::string arg(spec.substr(7));
    double p = 0.0;
    std::size_t used = 0;
    try {
      p = std::stod(arg, &used);
    } catch (const std::exception &) {
      used = 0;
    }
    if (used == 0 || used != arg.size()) {
      throw ValidationError("random predictor needs a probability, e.g. random:0.5",
                            "predictor");
    }
    return std::make_shared<RandomPredictor>(p, r.seed);
  }
  if (spec.starts_with("external:")) {
    return std::make_shared<ExternalPredictor>(std::string(spec.substr(9)),
                                               r.external);
  }
  throw ValidationError("unknown predictor '" + std::string(spec) + "'",
                        "predictor");
}

fs::path LexiconDir(const fs::path &data_dir) { return data_dir / "lexicon"; }

fs::path PatternsFile(const fs::path &data_dir) {
  return data_dir / "patterns" / "conduct.tsv";
}

Resources LoadResources(const fs::path &data_dir,
                        legal::JurisdictionProfile profile) {
  Resources r;
  r.gazetteer = std::make_shared<const Gazetteer>(
      Gazetteer::LoadDirectory(LexiconDir(data_dir)));
  r.patterns = std::make_shared<const ConductPatternSet>(
      ConductPatternSet::LoadFile(PatternsFile(data_dir)));
  r.profile = std::move(profile);
  return r;
}

Json DetectionJson(const Post &post, const Predictor &predictor,
                   const SubLabelPrediction &prediction, const Verdict &verdict) {
  Json j{{"post_id", post.id.empty() ? Json(nullptr) : Json(post.id)},
         {"text", post.text},
         {"predictor", predictor.name()},
         {"prediction", ToJson(prediction)},
         {"verdict", ToJson(verdict)}};
  return j;
}

Json Detect(const Post &post, const Predictor &predictor,
            const legal::JurisdictionProfile &profile) {
  const SubLabelPrediction prediction = predictor.Predict(post);
  return DetectionJson(post, predictor, prediction, Decide(prediction, profile));
}

}  // namespace lexjudge::detection
