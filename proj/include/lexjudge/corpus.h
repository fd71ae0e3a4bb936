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

#ifndef LEXJUDGE_CORPUS_H_
#define LEXJUDGE_CORPUS_H_

#include <array>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "lexjudge/error.h"
#include "lexjudge/records.h"

namespace lexjudge::corpus {

inline constexpr std::string_view kPostsFile = "posts.jsonl";
inline constexpr std::string_view kAnnotationsFile = "annotations.jsonl";

// An immutable snapshot of posts and their annotations. Layperson records
// live in `annotations`, expert records in `adjudications` (at most one per
// post).
struct Corpus {
  std::vector<Post> posts;
  std::vector<AnnotationRecord> annotations;
  std::vector<AnnotationRecord> adjudications;

  const Post *FindPost(std::string_view id) const;
  // Layperson and expert records for the post, in storage order.
  std::vector<const AnnotationRecord *> RecordsFor(std::string_view post_id) const;
};

// Checks the corpus invariants: unique non-empty post ids, every record
// refers to an existing post, (post_id, annotator_id) unique, at most one
// expert record per post, every record valid against its post text.
void ValidateCorpus(const Corpus &corpus);

// Routes the record into annotations or adjudications by role after the same
// checks ValidateCorpus applies. Throws Conflict on duplicates.
void AddRecord(Corpus &corpus, AnnotationRecord record);

// Equality up to the order of posts and records.
bool SameContents(const Corpus &a, const Corpus &b);

enum class Format { kJsonl, kCsv };
Format ParseFormat(std::string_view name);

struct IngestReport {
  std::vector<Post> posts;
  // One entry per rejected line; Error::line() carries the line number.
  std::vector<Error> errors;

  bool ok() const { return errors.empty(); }
};

// Reads posts leniently: good lines are kept, bad lines are reported.
// Throws Io when the file cannot be opened.
IngestReport ReadPosts(const std::filesystem::path &path, Format format);

// Strict ingestion: throws the first line error, with the total count of
// failing lines in the message.
Corpus Ingest(const std::filesystem::path &path, Format format);

// Annotation JSONL; strict, errors carry the line number.
std::vector<AnnotationRecord> ReadAnnotations(const std::filesystem::path &path);

// Reads <dir>/posts.jsonl and, when present, <dir>/annotations.jsonl.
Corpus LoadCorpus(const std::filesystem::path &dir);

// Writes <dir>/posts.jsonl and, if requested, <dir>/annotations.jsonl
// (removing a stale one otherwise). Files are replaced atomically.
void Export(const Corpus &corpus, const std::filesystem::path &dir,
            bool include_annotations);

std::string PostsJsonl(const Corpus &corpus);
// Layperson then expert records, one JSON object per line.
std::string AnnotationsJsonl(const Corpus &corpus);

// Writes to a temporary sibling, then renames over `path`.
void WriteFileAtomic(const std::filesystem::path &path,
                     std::string_view content);

// Order-independent content hash of posts and records, hex encoded.
std::string Fingerprint(const Corpus &corpus);

struct SourceRow {
  Source source = Source::kExternal;
  std::size_t count = 0;
  std::size_t labeled = 0;
  std::size_t punishable = 0;
  // 100 * punishable / labeled, 0 when nothing is labeled.
  double percent_punishable = 0.0;
};

struct LabelCount {
  std::string label;
  std::size_t false_count = 0;
  std::size_t true_count = 0;
};

struct SourceBreakdown {
  std::vector<SourceRow> sources;  // every Source, enum order
  std::size_t total = 0;
  std::size_t labeled = 0;
  std::size_t unlabeled = 0;
  // Gold assessments (one per group per post).
  std::size_t assessments = 0;
  std::array<std::size_t, legal::kNumCategories> categories{};
  // The five sub-labels plus "punishable", counted over gold assessments.
  std::vector<LabelCount> labels;
};

// Per-source composition and gold label distributions. Gold labels come from
// agreement::ResolveGold (adjudicated, agreed or single-annotator records).
SourceBreakdown Stats(const Corpus &corpus);

Json ToJson(const SourceBreakdown &stats);
std::string RenderStats(const SourceBreakdown &stats);

}  // namespace lexjudge::corpus

#endif  // LEXJUDGE_CORPUS_H_
