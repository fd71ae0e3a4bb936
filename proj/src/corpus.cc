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

#include "lexjudge/corpus.h"

#include <algorithm>
#include <cerrno>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <unistd.h>

#include "lexjudge/agreement.h"
#include "lexjudge/text.h"

namespace lexjudge::corpus {

namespace fs = std::filesystem;

namespace {

Error IoError(const fs::path &path, const std::string &what) {
  return Error(ErrorCode::kIo, path.string() + ": " + what, "path");
}

std::string ReadFile(const fs::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path, std::strerror(errno));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string StripCr(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

// A CSV record with the physical line it started on.
struct CsvRecord {
  int line = 0;
  std::vector<std::string> fields;
};

// RFC 4180: quoted fields may contain separators, doubled quotes and line
// breaks.
std::vector<CsvRecord> ParseCsv(std::string_view data,
                                std::vector<Error> &errors) {
  std::vector<CsvRecord> records;
  CsvRecord current;
  std::string field;
  int line = 1;
  current.line = 1;
  bool in_quotes = false;
  bool field_was_quoted = false;
  bool record_has_content = false;

  auto end_field = [&] {
    current.fields.push_back(std::move(field));
    field.clear();
    field_was_quoted = false;
  };
  auto end_record = [&] {
    end_field();
    if (record_has_content) records.push_back(std::move(current));
    current = CsvRecord{};
    current.line = line;
    record_has_content = false;
  };

  for (std::size_t i = 0; i < data.size(); ++i) {
    const char c = data[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < data.size() && data[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line;
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"':
        if (!field.empty() || field_was_quoted) {
          errors.emplace_back(ErrorCode::kValidation,
                              "line " + std::to_string(line) +
                                  ": stray quote in unquoted CSV field",
                              "csv", line);
        }
        in_quotes = true;
        field_was_quoted = true;
        record_has_content = true;
        break;
      case ',':
        end_field();
        record_has_content = true;
        break;
      case '\r':
        break;
      case '\n':
        ++line;
        end_record();
        break;
      default:
        field.push_back(c);
        record_has_content = true;
    }
  }
  if (in_quotes) {
    errors.emplace_back(ErrorCode::kValidation,
                        "line " + std::to_string(current.line) +
                            ": unterminated quoted CSV field",
                        "csv", current.line);
  } else {
    end_record();
  }
  return records;
}

Error AtLine(const Error &e, int line) {
  return Error(e.code(), "line " + std::to_string(line) + ": " + e.what(),
               e.field(), line);
}

void AddPost(IngestReport &report, std::set<std::string, std::less<>> &seen,
             Post post, int line) {
  if (!seen.insert(post.id).second) {
    report.errors.emplace_back(
        ErrorCode::kConflict,
        "line " + std::to_string(line) + ": duplicate post id '" + post.id + "'",
        "id", line);
    return;
  }
  report.posts.push_back(std::move(post));
}

IngestReport ReadJsonlPosts(const std::string &data) {
  IngestReport report;
  std::set<std::string, std::less<>> seen;
  std::istringstream in(data);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = StripCr(std::move(line));
    if (text::Trim(line).empty()) continue;
    Json j;
    try {
      j = Json::parse(line);
    } catch (const Json::parse_error &e) {
      report.errors.emplace_back(
          ErrorCode::kValidation,
          "line " + std::to_string(lineno) + ": malformed JSON: " + e.what(),
          "json", lineno);
      continue;
    }
    try {
      AddPost(report, seen, PostFromJson(j), lineno);
    } catch (const Error &e) {
      report.errors.push_back(AtLine(e, lineno));
    }
  }
  return report;
}

IngestReport ReadCsvPosts(const std::string &data) {
  IngestReport report;
  std::vector<CsvRecord> records = ParseCsv(data, report.errors);
  if (records.empty()) return report;

  const CsvRecord &header = records.front();
  std::map<std::string, std::size_t, std::less<>> column;
  for (std::size_t i = 0; i < header.fields.size(); ++i) {
    column[text::Trim(header.fields[i])] = i;
  }
  for (std::string_view required : {"id", "text", "source"}) {
    if (!column.contains(required)) {
      report.errors.emplace_back(
          ErrorCode::kValidation,
          "line 1: CSV header lacks column '" + std::string(required) + "'",
          std::string(required), 1);
      return report;
    }
  }

  std::set<std::string, std::less<>> seen;
  for (std::size_t r = 1; r < records.size(); ++r) {
    const CsvRecord &rec = records[r];
    if (rec.fields.size() != header.fields.size()) {
      report.errors.emplace_back(
          ErrorCode::kValidation,
          "line " + std::to_string(rec.line) + ": expected " +
              std::to_string(header.fields.size()) + " fields, got " +
              std::to_string(rec.fields.size()),
          "csv", rec.line);
      continue;
    }
    Json j{{"id", rec.fields[column.at("id")]},
           {"text", rec.fields[column.at("text")]},
           {"source", rec.fields[column.at("source")]}};
    if (auto it = column.find("language"); it != column.end()) {
      if (!rec.fields[it->second].empty()) {
        j["language"] = rec.fields[it->second];
      }
    }
    try {
      AddPost(report, seen, PostFromJson(j), rec.line);
    } catch (const Error &e) {
      report.errors.push_back(AtLine(e, rec.line));
    }
  }
  return report;
}

// FNV-1a, 64 bit.
class Hasher {
 public:
  void Add(std::string_view s) {
    for (unsigned char c : s) {
      state_ ^= c;
      state_ *= 0x100000001b3ULL;
    }
    state_ ^= 0xff;
    state_ *= 0x100000001b3ULL;
  }
  std::string Hex() const {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(state_));
    return buf;
  }

 private:
  std::uint64_t state_ = 0xcbf29ce484222325ULL;
};

std::vector<std::string> SortedRecordLines(const Corpus &c) {
  std::vector<std::string> lines;
  for (const auto *records : {&c.annotations, &c.adjudications}) {
    for (const AnnotationRecord &r : *records) lines.push_back(ToJson(r).dump());
  }
  std::sort(lines.begin(), lines.end());
  return lines;
}

}  // namespace

const Post *Corpus::FindPost(std::string_view id) const {
  for (const Post &p : posts) {
    if (p.id == id) return &p;
  }
  return nullptr;
}

std::vector<const AnnotationRecord *> Corpus::RecordsFor(
    std::string_view post_id) const {
  std::vector<const AnnotationRecord *> out;
  for (const auto *records : {&annotations, &adjudications}) {
    for (const AnnotationRecord &r : *records) {
      if (r.post_id == post_id) out.push_back(&r);
    }
  }
  return out;
}

void ValidateCorpus(const Corpus &corpus) {
  std::map<std::string, const Post *, std::less<>> by_id;
  for (const Post &p : corpus.posts) {
    if (p.id.empty()) throw ValidationError("post id must be non-empty", "id");
    if (text::Trim(p.text).empty()) {
      throw ValidationError("post '" + p.id + "' has empty text", "text");
    }
    if (!by_id.emplace(p.id, &p).second) {
      throw Error(ErrorCode::kConflict, "duplicate post id '" + p.id + "'",
                  "id");
    }
  }
  std::set<std::pair<std::string, std::string>> keys;
  std::set<std::string> adjudicated;
  for (const auto *records : {&corpus.annotations, &corpus.adjudications}) {
    for (const AnnotationRecord &r : *records) {
      auto it = by_id.find(r.post_id);
      if (it == by_id.end()) {
        throw ValidationError(
            "annotation references unknown post '" + r.post_id + "'",
            "post_id");
      }
      ValidateRecord(r, it->second->text);
      if (!keys.emplace(r.post_id, r.annotator_id).second) {
        throw Error(ErrorCode::kConflict,
                    "duplicate annotation for post '" + r.post_id +
                        "' by annotator '" + r.annotator_id + "'",
                    "annotator_id");
      }
    }
  }
  for (const AnnotationRecord &r : corpus.annotations) {
    if (r.role != Role::kLayperson) {
      throw ValidationError("expert record stored among annotations", "role");
    }
  }
  for (const AnnotationRecord &r : corpus.adjudications) {
    if (r.role != Role::kExpert) {
      throw ValidationError("layperson record stored among adjudications",
                            "role");
    }
    if (!adjudicated.insert(r.post_id).second) {
      throw Error(ErrorCode::kConflict,
                  "more than one adjudicated record for post '" + r.post_id +
                      "'",
                  "post_id");
    }
  }
}

void AddRecord(Corpus &corpus, AnnotationRecord record) {
  const Post *post = corpus.FindPost(record.post_id);
  if (post == nullptr) {
    throw Error(ErrorCode::kNotFound,
                "unknown post '" + record.post_id + "'", "post_id");
  }
  ValidateRecord(record, post->text);
  for (const AnnotationRecord *r : corpus.RecordsFor(record.post_id)) {
    if (r->annotator_id == record.annotator_id) {
      throw Error(ErrorCode::kConflict,
                  "post '" + record.post_id + "' already annotated by '" +
                      record.annotator_id + "'",
                  "annotator_id");
    }
    if (record.role == Role::kExpert && r->role == Role::kExpert) {
      throw Error(ErrorCode::kConflict,
                  "post '" + record.post_id + "' already has an expert record",
                  "post_id");
    }
  }
  if (record.role == Role::kExpert) {
    corpus.adjudications.push_back(std::move(record));
  } else {
    corpus.annotations.push_back(std::move(record));
  }
}

bool SameContents(const Corpus &a, const Corpus &b) {
  auto sorted_posts = [](const Corpus &c) {
    std::vector<std::string> v;
    for (const Post &p : c.posts) v.push_back(ToJson(p).dump());
    std::sort(v.begin(), v.end());
    return v;
  };
  return sorted_posts(a) == sorted_posts(b) &&
         SortedRecordLines(a) == SortedRecordLines(b);
}

Format ParseFormat(std::string_view name) {
  if (name == "jsonl") return Format::kJsonl;
  if (name == "csv") return Format::kCsv;
  throw ValidationError("unknown format '" + std::string(name) +
                            "', expected jsonl or csv",
                        "format");
}

IngestReport ReadPosts(const fs::path &path, Format format) {
  const std::string data = ReadFile(path);
  return format == Format::kCsv ? ReadCsvPosts(data) : ReadJsonlPosts(data);
}

Corpus Ingest(const fs::path &path, Format format) {
  IngestReport report = ReadPosts(path, format);
  if (!report.ok()) {
    const Error &first = report.errors.front();
    std::string message = path.string() + ": " + first.what();
    if (report.errors.size() > 1) {
      message += " (" + std::to_string(report.errors.size()) +
                 " lines rejected in total)";
    }
    throw Error(first.code(), message, first.field(), first.line());
  }
  Corpus corpus;
  corpus.posts = std::move(report.posts);
  return corpus;
}

std::vector<AnnotationRecord> ReadAnnotations(const fs::path &path) {
  const std::string data = ReadFile(path);
  std::vector<AnnotationRecord> records;
  std::istringstream in(data);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = StripCr(std::move(line));
    if (text::Trim(line).empty()) continue;
    try {
      records.push_back(RecordFromJson(Json::parse(line)));
    } catch (const Json::parse_error &e) {
      throw Error(ErrorCode::kValidation,
                  path.string() + ": line " + std::to_string(lineno) +
                      ": malformed JSON: " + e.what(),
                  "json", lineno);
    } catch (const Error &e) {
      throw Error(e.code(),
                  path.string() + ": line " + std::to_string(lineno) + ": " +
                      e.what(),
                  e.field(), lineno);
    }
  }
  return records;
}

Corpus LoadCorpus(const fs::path &dir) {
  Corpus corpus = Ingest(dir / kPostsFile, Format::kJsonl);
  const fs::path annotations = dir / kAnnotationsFile;
  if (fs::exists(annotations)) {
    for (AnnotationRecord &r : ReadAnnotations(annotations)) {
      if (r.role == Role::kExpert) {
        corpus.adjudications.push_back(std::move(r));
      } else {
        corpus.annotations.push_back(std::move(r));
      }
    }
  }
  ValidateCorpus(corpus);
  return corpus;
}

std::string PostsJsonl(const Corpus &corpus) {
  std::string out;
  for (const Post &p : corpus.posts) {
    out += ToJson(p).dump();
    out += '\n';
  }
  return out;
}

std::string AnnotationsJsonl(const Corpus &corpus) {
  std::string out;
  for (const auto *records : {&corpus.annotations, &corpus.adjudications}) {
    for (const AnnotationRecord &r : *records) {
      out += ToJson(r).dump();
      out += '\n';
    }
  }
  return out;
}

void WriteFileAtomic(const fs::path &path, std::string_view content) {
  fs::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::FILE *f = std::fopen(tmp.c_str(), "wb");
    if (f == nullptr) throw IoError(path, std::strerror(errno));
    const bool written =
        std::fwrite(content.data(), 1, content.size(), f) == content.size();
    const bool flushed = std::fflush(f) == 0 && ::fsync(::fileno(f)) == 0;
    std::fclose(f);
    if (!written || !flushed) {
      std::error_code ignored;
      fs::remove(tmp, ignored);
      throw IoError(path, "write failed");
    }
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    std::error_code ignored;
    fs::remove(tmp, ignored);
    throw IoError(path, ec.message());
  }
}

void Export(const Corpus &corpus, const fs::path &dir,
            bool include_annotations) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw IoError(dir, ec ? ec.message() : "not a directory");
  }
  WriteFileAtomic(dir / kPostsFile, PostsJsonl(corpus));
  const fs::path annotations = dir / kAnnotationsFile;
  if (include_annotations) {
    WriteFileAtomic(annotations, AnnotationsJsonl(corpus));
  } else {
    fs::remove(annotations, ec);
    if (ec) throw IoError(annotations, ec.message());
  }
}

std::string Fingerprint(const Corpus &corpus) {
  std::vector<std::string> posts;
  for (const Post &p : corpus.posts) posts.push_back(ToJson(p).dump());
  std::sort(posts.begin(), posts.end());
  Hasher h;
  for (const std::string &p : posts) h.Add(p);
  h.Add("--");
  for (const std::string &r : SortedRecordLines(corpus)) h.Add(r);
  return h.Hex();
}

SourceBreakdown Stats(const Corpus &corpus) {
  SourceBreakdown out;
  for (Source s : kAllSources) out.sources.push_back(SourceRow{.source = s});
  const agreement::AdjudicatedLabels gold = agreement::ResolveGold(corpus);

  static constexpr std::array<std::string_view, 6> kLabels = {
      "group_of_persons", "individual_as_member", "distinguishable_by_ground",
      "incites_hatred",   "incites_violence",     "punishable",
  };
  for (std::string_view name : kLabels) {
    out.labels.push_back(LabelCount{.label = std::string(name)});
  }
  auto count = [](LabelCount &c, bool v) { ++(v ? c.true_count : c.false_count); };

  for (const Post &p : corpus.posts) {
    SourceRow &row = out.sources[static_cast<std::size_t>(p.source)];
    ++row.count;
    ++out.total;
    auto it = gold.gold.find(p.id);
    if (it == gold.gold.end()) {
      ++out.unlabeled;
      continue;
    }
    ++row.labeled;
    ++out.labeled;
    if (it->second.Punishable()) ++row.punishable;
    for (const legal::LegalAssessment &a : it->second.assessments) {
      ++out.assessments;
      ++out.categories[legal::CategoryIndex(a.target.category)];
      const legal::SubLabels s = legal::ToSubLabels(a);
      count(out.labels[0], s.group_of_persons);
      count(out.labels[1], s.individual_as_member);
      count(out.labels[2], s.distinguishable_by_ground);
      count(out.labels[3], s.incites_hatred);
      count(out.labels[4], s.incites_violence);
      count(out.labels[5], legal::ApplyRule(s));
    }
  }
  for (SourceRow &row : out.sources) {
    row.percent_punishable =
        row.labeled == 0 ? 0.0 : 100.0 * static_cast<double>(row.punishable) /
                                     static_cast<double>(row.labeled);
  }
  return out;
}

Json ToJson(const SourceBreakdown &stats) {
  Json sources = Json::array();
  for (const SourceRow &r : stats.sources) {
    sources.push_back(Json{{"source", SourceName(r.source)},
                           {"count", r.count},
                           {"labeled", r.labeled},
                           {"punishable", r.punishable},
                           {"percent_punishable", r.percent_punishable}});
  }
  Json categories = Json::object();
  for (legal::GroupCategory c : legal::kAllCategories) {
    categories[std::string(legal::CategoryName(c))] =
        stats.categories[legal::CategoryIndex(c)];
  }
  Json labels = Json::array();
  for (const LabelCount &l : stats.labels) {
    labels.push_back(
        Json{{"label", l.label}, {"false", l.false_count}, {"true", l.true_count}});
  }
  return Json{{"total", stats.total},
              {"labeled", stats.labeled},
              {"unlabeled", stats.unlabeled},
              {"assessments", stats.assessments},
              {"sources", std::move(sources)},
              {"group_categories", std::move(categories)},
              {"labels", std::move(labels)}};
}

std::string RenderStats(const SourceBreakdown &stats) {
  std::ostringstream out;
  char buf[160];
  std::snprintf(buf, sizeof(buf), "%-22s %7s %8s %13s\n", "Source", "#",
                "labeled", "% Punishable");
  out << buf;
  for (const SourceRow &r : stats.sources) {
    std::snprintf(buf, sizeof(buf), "%-22s %7zu %8zu %13.1f\n",
                  std::string(SourceName(r.source)).c_str(), r.count, r.labeled,
                  r.percent_punishable);
    out << buf;
  }
  std::snprintf(buf, sizeof(buf), "%-22s %7zu %8zu\n", "total", stats.total,
                stats.labeled);
  out << buf << "unlabeled: " << stats.unlabeled << "\n\n";

  std::snprintf(buf, sizeof(buf), "%-27s %7s %7s\n", "Annotation", "false",
                "true");
  out << buf;
  for (const LabelCount &l : stats.labels) {
    std::snprintf(buf, sizeof(buf), "%-27s %7zu %7zu\n", l.label.c_str(),
                  l.false_count, l.true_count);
    out << buf;
  }
  out << '\n';
  std::snprintf(buf, sizeof(buf), "%-22s %7s\n", "Group Category", "#");
  out << buf;
  for (legal::GroupCategory c : legal::kAllCategories) {
    std::snprintf(buf, sizeof(buf), "%-22s %7zu\n",
                  std::string(legal::CategoryLabel(c)).c_str(),
                  stats.categories[legal::CategoryIndex(c)]);
    out << buf;
  }
  return out.str();
}

}  // namespace lexjudge::corpus
