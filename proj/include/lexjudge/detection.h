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

// Sub-label predictors and their composition into a verdict.
//
// Instead of predicting punishability end to end, group detection and
// conduct detection are run separately and combined by the legal decision
// rule. The composed verdict comes with a trace of every sub-decision and
// the text evidence behind it.

#ifndef LEXJUDGE_DETECTION_H_
#define LEXJUDGE_DETECTION_H_

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <semaphore>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "lexjudge/legal.h"
#include "lexjudge/records.h"

namespace lexjudge::detection {

// Code point span into the original post text.
using Span = legal::SurfaceForm;

// Probability that the sub-label holds; the label counts as predicted true
// when score >= kThreshold.
struct LabelScore {
  double score = 0.0;
  std::optional<Span> evidence;
  std::string source;
};

struct CategoryScore {
  legal::GroupCategory category = legal::GroupCategory::kNone;
  double confidence = 0.0;
  std::optional<Span> evidence;
};

inline constexpr double kThreshold = 0.5;

struct SubLabelPrediction {
  std::optional<LabelScore> group_of_persons;
  std::optional<LabelScore> individual_as_member;
  std::optional<LabelScore> distinguishable_by_ground;
  std::optional<CategoryScore> category;
  std::optional<LabelScore> incites_hatred;
  std::optional<LabelScore> incites_violence;
  std::optional<LabelScore> punishable;

  bool HasAnySubLabel() const;
  bool Empty() const;
};

// At least one field present, all scores in [0, 1].
void Validate(const SubLabelPrediction &prediction);

// Wire form: each label is a number in [0, 1] (or a boolean, read as 0/1),
// or an object {"score", "evidence"?, "source"?}; "category" is a name or
// {"label", "confidence"}. Absent or null means not predicted.
Json ToJson(const SubLabelPrediction &prediction);
SubLabelPrediction PredictionFromJson(const Json &j);

// ---------------------------------------------------------------------------
// Gazetteer

struct LexiconEntry {
  legal::GroupCategory category = legal::GroupCategory::kNone;
  std::string surface_form;
  std::string source;
};

// Lines of `category<TAB>surface_form[<TAB>source]`. Blank lines and lines
// starting with '#' followed by a space are skipped.
std::vector<LexiconEntry> ParseLexicon(std::string_view content,
                                       std::string_view origin = "lexicon");
std::vector<LexiconEntry> ReadLexiconFile(const std::filesystem::path &path);

struct GroupMatch {
  legal::GroupCategory category = legal::GroupCategory::kNone;
  Span span;
  // The normalized lexicon form that matched.
  std::string form;

  friend bool operator==(const GroupMatch &, const GroupMatch &) = default;
};

class Gazetteer {
 public:
  static constexpr std::string_view kPolicy =
      "casefold(simple)+strip-leading-hash+collapse-whitespace;whole-word";

  // Normalizes all forms. Throws a validation Error for empty forms or
  // category None.
  static Gazetteer FromEntries(const std::vector<LexiconEntry> &entries);
  // Every *.tsv file in the directory, in file name order.
  static Gazetteer LoadDirectory(const std::filesystem::path &dir);

  const std::map<legal::GroupCategory, std::set<std::string>> &entries() const {
    return entries_;
  }
  std::size_t size() const;

  // Whole-word matches of every form; matches for different categories may
  // overlap and are all reported. Sorted by span, then category.
  std::vector<GroupMatch> Match(std::string_view text) const;

 private:
  std::map<legal::GroupCategory, std::set<std::string>> entries_;
  // Normalized form (code points) -> categories listing it.
  std::map<std::u32string, std::set<legal::GroupCategory>> forms_;
};

std::vector<GroupMatch> DetectGroups(const Post &post, const Gazetteer &gazetteer);

// ---------------------------------------------------------------------------
// Conduct patterns

// One token position of a phrase: alternatives separated by '|'. A trailing
// '*' matches any token with that prefix, a leading '*' any token with that
// suffix, a lone '*' any token.
struct TokenMatcher {
  enum class Mode { kExact, kPrefix, kSuffix, kAny };
  Mode mode = Mode::kExact;
  std::u32string literal;
};

struct Phrase {
  std::string source;
  std::vector<std::vector<TokenMatcher>> positions;
};

// Throws a validation Error for empty phrases or empty alternatives.
Phrase CompilePhrase(std::string_view pattern);

struct ViolencePattern {
  Phrase action;
  // When non-empty, one of these tokens must occur within `window` tokens
  // of the action ("burn GROUP", not "burn a candle").
  std::vector<TokenMatcher> target_cues;
  int window = 0;
};

struct HatredPattern {
  Phrase cue;
};

class ConductPatternSet {
 public:
  // Lines of `violence<TAB>phrase[<TAB>target-cues<TAB>window]` or
  // `hatred<TAB>phrase`; '#'-comments and blank lines are skipped.
  static ConductPatternSet Parse(std::string_view content,
                                 std::string_view origin = "patterns");
  static ConductPatternSet LoadFile(const std::filesystem::path &path);

  const std::vector<ViolencePattern> &violence() const { return violence_; }
  const std::vector<HatredPattern> &hatred() const { return hatred_; }

  void AddViolence(ViolencePattern pattern);
  void AddHatred(HatredPattern pattern);

 private:
  std::vector<ViolencePattern> violence_;
  std::vector<HatredPattern> hatred_;
};

struct ConductHit {
  bool violence = false;  // false: hatred
  Span span;
  std::string pattern;
};

struct ConductDetection {
  legal::ConductAssessment conduct;
  std::vector<ConductHit> hits;
};

ConductDetection DetectConduct(const Post &post, const ConductPatternSet &patterns);

// ---------------------------------------------------------------------------
// Composition

struct TraceItem {
  enum class Origin { kPredicted, kInferred, kDefault };
  std::string sub_label;
  bool value = false;
  std::optional<double> score;
  Origin origin = Origin::kDefault;
  std::optional<Span> evidence;
  std::string note;
};

// One node of the decision tree with the sub-labels it consumes.
struct TraceStep {
  std::string name;
  std::string question;
  bool passed = false;
  std::vector<TraceItem> items;
};

struct Verdict {
  bool punishable = false;
  // "composed" (sub-labels through the decision rule) or "direct".
  std::string mode;
  legal::LegalAssessment assessment;
  std::vector<TraceStep> trace;
  // First step that failed, empty if none.
  std::string failed_step;
};

// Thresholds the sub-labels, applies the decision rule and traces three
// steps: target group (group_of_persons, individual_as_member), protected
// ground (distinguishable_by_ground) and targeting conduct (incites_hatred,
// incites_violence). A missing distinguishable_by_ground is inferred from
// the predicted category and the profile's protected categories; other
// missing sub-labels default to false. Throws a validation Error for a
// profile that enables optional qualifiers.
Verdict Compose(const SubLabelPrediction &prediction,
                const legal::JurisdictionProfile &profile);

// Compose when any sub-label is predicted, otherwise the direct punishable
// prediction (false if absent).
Verdict Decide(const SubLabelPrediction &prediction,
               const legal::JurisdictionProfile &profile);

Json ToJson(const Verdict &verdict);
std::string RenderTrace(const Verdict &verdict);

// ---------------------------------------------------------------------------
// Predictors

enum class PredictorKind {
  kGroupGazetteer,
  kConductPattern,
  kExternal,
  kRandom,
  kComposite,
};

std::string_view PredictorKindName(PredictorKind kind);

// Cross-validation context handed to predictors that train per fold.
struct FoldContext {
  std::size_t fold = 0;
  std::size_t k = 0;
  std::uint64_t seed = 0;
};

// Immutable after construction; Predict may be called concurrently.
class Predictor {
 public:
  virtual ~Predictor() = default;
  virtual std::string name() const = 0;
  virtual PredictorKind kind() const = 0;
  // Throws a prediction Error when no prediction can be made.
  virtual SubLabelPrediction Predict(const Post &post,
                                     const FoldContext *fold = nullptr) const = 0;
};

class GazetteerPredictor : public Predictor {
 public:
  GazetteerPredictor(std::shared_ptr<const Gazetteer> gazetteer,
                     legal::JurisdictionProfile profile);
  std::string name() const override { return "gazetteer"; }
  PredictorKind kind() const override { return PredictorKind::kGroupGazetteer; }
  SubLabelPrediction Predict(const Post &post,
                             const FoldContext *fold = nullptr) const override;

 private:
  std::shared_ptr<const Gazetteer> gazetteer_;
  legal::JurisdictionProfile profile_;
};

class ConductPatternPredictor : public Predictor {
 public:
  // With `direct`, also predicts punishable = any conduct hit: an end-to-end
  // baseline that ignores who is targeted.
  ConductPatternPredictor(std::shared_ptr<const ConductPatternSet> patterns,
                          bool direct);
  std::string name() const override {
    return direct_ ? "direct-patterns" : "patterns";
  }
  PredictorKind kind() const override { return PredictorKind::kConductPattern; }
  SubLabelPrediction Predict(const Post &post,
                             const FoldContext *fold = nullptr) const override;

 private:
  std::shared_ptr<const ConductPatternSet> patterns_;
  bool direct_;
};

// Runs a group predictor and a conduct predictor and composes their
// sub-labels into punishable.
class CompositePredictor : public Predictor {
 public:
  CompositePredictor(std::shared_ptr<const Predictor> group,
                     std::shared_ptr<const Predictor> conduct,
                     legal::JurisdictionProfile profile);
  std::string name() const override;
  PredictorKind kind() const override { return PredictorKind::kComposite; }
  SubLabelPrediction Predict(const Post &post,
                             const FoldContext *fold = nullptr) const override;

 private:
  std::shared_ptr<const Predictor> group_;
  std::shared_ptr<const Predictor> conduct_;
  legal::JurisdictionProfile profile_;
};

// Predicts punishable with probability p, independently per post but
// reproducibly: the draw is a hash of (seed, post id).
class RandomPredictor : public Predictor {
 public:
  RandomPredictor(double p, std::uint64_t seed);
  std::string name() const override;
  PredictorKind kind() const override { return PredictorKind::kRandom; }
  SubLabelPrediction Predict(const Post &post,
                             const FoldContext *fold = nullptr) const override;

 private:
  double p_;
  std::uint64_t seed_;
};

std::unique_ptr<Predictor> MakeRandomPredictor(double p, std::uint64_t seed);

struct ExternalOptions {
  std::chrono::milliseconds timeout{10000};
  std::ptrdiff_t max_in_flight = 4;
};

// Client for a model served elsewhere: POST <base>/predict with
// {"post_id", "text", "language", "fold"?} and expects a SubLabelPrediction
// JSON body with status 200. Any other outcome raises a prediction Error.
class ExternalPredictor : public Predictor {
 public:
  ExternalPredictor(std::string url, ExternalOptions options = {});
  ~ExternalPredictor() override;
  std::string name() const override { return "external:" + url_; }
  PredictorKind kind() const override { return PredictorKind::kExternal; }
  SubLabelPrediction Predict(const Post &post,
                             const FoldContext *fold = nullptr) const override;

 private:
  std::string url_;
  std::string host_;  // scheme://host:port
  std::string base_path_;
  ExternalOptions options_;
  mutable std::counting_semaphore<> in_flight_;
};

struct Resources {
  std::shared_ptr<const Gazetteer> gazetteer;
  std::shared_ptr<const ConductPatternSet> patterns;
  legal::JurisdictionProfile profile = legal::EuMinimumProfile();
  std::uint64_t seed = 0;
  ExternalOptions external;
};

// Predictor specs: "gazetteer+patterns", "gazetteer", "patterns",
// "direct-patterns", "random:<p>", "external:<url>". Throws a validation
// Error for unknown specs.
std::shared_ptr<const Predictor> MakePredictor(std::string_view spec,
                                               const Resources &resources);

// Bundled lexicon and pattern locations below a data directory.
std::filesystem::path LexiconDir(const std::filesystem::path &data_dir);
std::filesystem::path PatternsFile(const std::filesystem::path &data_dir);
Resources LoadResources(const std::filesystem::path &data_dir,
                        legal::JurisdictionProfile profile);

// Output of one detection run, shared by the CLI and the HTTP API.
Json DetectionJson(const Post &post, const Predictor &predictor,
                   const SubLabelPrediction &prediction, const Verdict &verdict);
Json Detect(const Post &post, const Predictor &predictor,
            const legal::JurisdictionProfile &profile);

}  // namespace lexjudge::detection

#endif  // LEXJUDGE_DETECTION_H_
