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
#include "lexjudge/cli.h"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "lexjudge/agreement.h"
#include "lexjudge/corpus.h"
#include "lexjudge/detection.h"
#include "lexjudge/error.h"
#include "lexjudge/evaluation.h"
#include "lexjudge/legal.h"
#include "lexjudge/records.h"
#include "lexjudge/service.h"

#ifndef LEXJUDGE_DATA_DIR
#define LEXJUDGE_DATA_DIR "data"
#endif

namespace lexjudge {

namespace fs = std::filesystem;

namespace {

std::string EnvOr(const char *name, std::string fallback) {
  const char *v = std::getenv(name);
  return v != nullptr && *v != '\0' ? std::string(v) : std::move(fallback);
}

struct Globals {
  std::string corpus_dir = EnvOr("LEXJUDGE_CORPUS_DIR", ".");
  std::string data_dir = EnvOr("LEXJUDGE_DATA_DIR", LEXJUDGE_DATA_DIR);
  std::string profile = EnvOr("LEXJUDGE_PROFILE", "eu-minimum");
  bool json = false;
};

void WriteOut(const fs::path &path, const std::string &content) {
  corpus::WriteFileAtomic(path, content);
}

corpus::Corpus LoadOrEmpty(const fs::path &dir) {
  if (fs::exists(dir / "posts.jsonl")) return corpus::LoadCorpus(dir);
  return corpus::Corpus{};
}

std::vector<Post> ReadDetectPosts(const std::string &path, const std::string &format,
                                  const std::string &text) {
  if (!text.empty()) {
    Post p;
    p.id = "cli";
    p.text = text;
    return {p};
  }
  return corpus::Ingest(path, corpus::ParseFormat(format)).posts;
}

// ---------------------------------------------------------------------------

int Ingest(const Globals &g, const std::string &posts, const std::string &format,
           std::ostream &out, std::ostream &err) {
  const corpus::IngestReport report = corpus::ReadPosts(posts, corpus::ParseFormat(format));
  if (!report.ok()) {
    for (const Error &e : report.errors) {
      err << posts << ":" << e.line() << ": [" << ErrorCodeName(e.code()) << "] "
          << e.what() << '\n';
    }
    throw Error(report.errors.front().code(),
                std::to_string(report.errors.size()) +
                    " lines rejected; nothing was written",
                report.errors.front().field(), report.errors.front().line());
  }
  corpus::Corpus c = LoadOrEmpty(g.corpus_dir);
  for (const Post &p : report.posts) {
    if (c.FindPost(p.id) != nullptr) {
      throw Error(ErrorCode::kConflict,
                  "post '" + p.id + "' already exists in " + g.corpus_dir, "id");
    }
    c.posts.push_back(p);
  }
  corpus::ValidateCorpus(c);
  fs::create_directories(g.corpus_dir);
  corpus::Export(c, g.corpus_dir,
                 !c.annotations.empty() || !c.adjudications.empty());
  if (g.json) {
    out << Json{{"ingested", report.posts.size()},
                {"total", c.posts.size()},
                {"corpus_dir", g.corpus_dir}}.dump()
        << '\n';
  } else {
    out << "ingested " << report.posts.size() << " posts into " << g.corpus_dir
        << " (" << c.posts.size() << " total)\n";
  }
  return 0;
}

int ExportCmd(const Globals &g, const std::string &dir, bool with_annotations,
              std::ostream &out) {
  const corpus::Corpus c = corpus::LoadCorpus(g.corpus_dir);
  corpus::Export(c, dir, with_annotations);
  const std::size_t records = c.annotations.size() + c.adjudications.size();
  if (g.json) {
    out << Json{{"out", dir},
                {"posts", c.posts.size()},
                {"annotations", with_annotations ? records : 0}}.dump()
        << '\n';
  } else {
    out << "exported " << c.posts.size() << " posts";
    if (with_annotations) out << " and " << records << " annotation records";
    out << " to " << dir << '\n';
  }
  return 0;
}

int StatsCmd(const Globals &g, std::ostream &out) {
  const corpus::SourceBreakdown s = corpus::Stats(corpus::LoadCorpus(g.corpus_dir));
  if (g.json) {
    out << corpus::ToJson(s).dump() << '\n';
  } else {
    out << corpus::RenderStats(s);
  }
  return 0;
}

int AgreementCmd(const Globals &g, const std::string &pairs, const std::string &label,
                 const std::string &csv, std::ostream &out) {
  const corpus::Corpus c = corpus::LoadCorpus(g.corpus_dir);
  std::vector<std::string> annotators;
  if (pairs == "all") {
    annotators = agreement::Annotators(c);
  } else {
    const std::size_t comma = pairs.find(',');
    if (comma == std::string::npos || comma == 0 || comma + 1 == pairs.size() ||
        pairs.find(',', comma + 1) != std::string::npos) {
      throw ValidationError("--pairs must be 'all' or 'a,b'", "pairs");
    }
    annotators = {pairs.substr(0, comma), pairs.substr(comma + 1)};
  }
  const agreement::AgreementReport report = agreement::BuildAgreementReport(
      c, annotators, label.empty() ? std::nullopt : std::optional<std::string>(label));
  if (!csv.empty()) WriteOut(csv, agreement::AgreementCsv(report));
  if (g.json) {
    out << agreement::ToJson(report).dump() << '\n';
  } else {
    out << agreement::RenderAgreement(report);
  }
  return 0;
}

int AdjudicateCmd(const Globals &g, std::ostream &out) {
  const corpus::Corpus c = corpus::LoadCorpus(g.corpus_dir);
  const agreement::AdjudicatedLabels labels = agreement::ResolveGold(c);
  if (g.json) {
    out << agreement::ToJson(labels).dump() << '\n';
    return 0;
  }
  std::map<std::string_view, std::size_t> by_provenance;
  std::size_t punishable = 0;
  for (const auto &[id, entry] : labels.gold) {
    ++by_provenance[agreement::ProvenanceName(entry.provenance)];
    if (entry.Punishable()) ++punishable;
  }
  out << "gold: " << labels.gold.size() << " posts, " << punishable
      << " punishable\n";
  for (const auto &[name, n] : by_provenance) out << "  " << name << ": " << n << '\n';
  out << "queue: " << labels.queue.size() << " posts awaiting an expert\n";
  for (const agreement::QueueItem &item : labels.queue) {
    out << "  " << item.post_id << ":";
    for (const std::string &f : item.disagreeing_fields) out << ' ' << f;
    out << '\n';
  }
  return 0;
}

int DetectCmd(const Globals &g, const std::string &spec, const std::string &posts,
              const std::string &format, const std::string &text, bool explain,
              std::uint64_t seed, std::ostream &out) {
  const legal::JurisdictionProfile profile = legal::FindProfile(g.profile);
  detection::Resources r = detection::LoadResources(g.data_dir, profile);
  r.seed = seed;
  const std::shared_ptr<const detection::Predictor> predictor =
      detection::MakePredictor(spec, r);
  for (const Post &p : ReadDetectPosts(posts, format, text)) {
    const detection::SubLabelPrediction prediction = predictor->Predict(p);
    const detection::Verdict verdict = detection::Decide(prediction, profile);
    if (g.json) {
      out << detection::DetectionJson(p, *predictor, prediction, verdict).dump()
          << '\n';
    } else if (explain) {
      out << p.id << '\n' << detection::RenderTrace(verdict) << '\n';
    } else {
      out << p.id << '\t' << "punishable: " << (verdict.punishable ? "true" : "false")
          << '\n';
    }
  }
  return 0;
}

struct EvalArgs {
  std::string predictor = "gazetteer+patterns";
  std::string direct = "direct-patterns";
  std::string gold;
  std::string label = "punishable";
  std::size_t k = 10;
  std::uint64_t seed = 0;
  std::string report;
  std::string csv;
  bool table = false;
};

int EvalCmd(const Globals &g, const EvalArgs &a, std::ostream &out) {
  const legal::JurisdictionProfile profile = legal::FindProfile(g.profile);
  corpus::Corpus c;
  c.posts = corpus::LoadCorpus(g.corpus_dir).posts;
  for (AnnotationRecord &rec : corpus::ReadAnnotations(a.gold)) {
    corpus::AddRecord(c, std::move(rec));
  }
  corpus::ValidateCorpus(c);
  detection::Resources r = detection::LoadResources(g.data_dir, profile);
  r.seed = a.seed;

  if (a.table) {
    const evaluation::ResultsTable t =
        evaluation::BuildResultsTable(c, r, a.k, a.seed, a.predictor, a.direct);
    if (!a.report.empty()) WriteOut(a.report, evaluation::ToJson(t).dump(2) + "\n");
    if (!a.csv.empty()) WriteOut(a.csv, evaluation::ResultsTableCsv(t));
    if (g.json) {
      out << evaluation::ToJson(t).dump() << '\n';
    } else {
      out << evaluation::RenderResultsTable(t);
    }
    return 0;
  }
  const evaluation::FoldPlan plan = evaluation::StratifiedFolds(c, a.k, a.label, a.seed);
  const evaluation::EvaluationReport report =
      evaluation::Evaluate(*detection::MakePredictor(a.predictor, r), c, plan, profile);
  if (!a.report.empty()) {
    WriteOut(a.report, evaluation::ToJson(report).dump(2) + "\n");
  }
  if (!a.csv.empty()) WriteOut(a.csv, evaluation::ReportCsv(report));
  if (g.json) {
    out << evaluation::ToJson(report).dump() << '\n';
  } else {
    out << evaluation::RenderReport(report);
  }
  return 0;
}

int CompareCmd(const Globals &g, const std::vector<std::string> &files,
               const std::string &csv, std::ostream &out) {
  std::vector<evaluation::EvaluationReport> reports;
  for (const std::string &f : files) {
    std::ifstream in(f);
    if (!in) throw Error(ErrorCode::kIo, "cannot read report " + f, "report");
    Json j = Json::parse(in, nullptr, false);
    if (j.is_discarded()) throw ValidationError(f + " is not valid JSON", "report");
    reports.push_back(evaluation::ReportFromJson(j));
  }
  const evaluation::Comparison c = evaluation::Compare(reports);
  if (!csv.empty()) WriteOut(csv, evaluation::ComparisonCsv(c));
  if (g.json) {
    out << evaluation::ToJson(c).dump() << '\n';
  } else {
    out << evaluation::RenderComparison(c);
  }
  return 0;
}

struct DeriveArgs {
  bool group = false;
  bool member = false;
  bool distinguishable = false;
  bool hatred = false;
  bool violence = false;
  std::string category;
};

int DeriveCmd(const Globals &g, const DeriveArgs &a, std::ostream &out) {
  const legal::JurisdictionProfile profile = legal::FindProfile(g.profile);
  legal::LegalAssessment assessment = legal::FromSubLabels(legal::SubLabels{
      .group_of_persons = a.group,
      .individual_as_member = a.member,
      .distinguishable_by_ground = a.distinguishable,
      .incites_hatred = a.hatred,
      .incites_violence = a.violence,
  });
  if (!a.category.empty()) {
    assessment.target.category = legal::ParseCategory(a.category);
  }
  const bool punishable = legal::DerivePunishability(assessment);

  detection::SubLabelPrediction p;
  auto label = [](bool v) {
    return detection::LabelScore{.score = v ? 1.0 : 0.0, .evidence = {}, .source = "flag"};
  };
  p.group_of_persons = label(a.group);
  p.individual_as_member = label(a.member);
  p.distinguishable_by_ground = label(a.distinguishable);
  p.incites_hatred = label(a.hatred);
  p.incites_violence = label(a.violence);
  if (!a.category.empty()) {
    p.category = detection::CategoryScore{.category = assessment.target.category,
                                          .confidence = 1.0,
                                          .evidence = {}};
  }
  detection::Verdict v = detection::Compose(p, profile);
  if (v.punishable != punishable) {
    throw Error(ErrorCode::kInternal, "composition disagrees with the decision rule");
  }
  if (g.json) {
    Json j = detection::ToJson(v);
    j["assessment"] = ToJson(assessment);
    out << j.dump() << '\n';
  } else {
    out << detection::RenderTrace(v);
  }
  return 0;
}

struct ServeArgs {
  std::string config;
  std::string listen;
  std::size_t cap = 0;
  std::string tokens;
  std::string predictor;
};

int ServeCmd(const Globals &g, const ServeArgs &a, std::ostream &out) {
  service::ApiConfig config;
  config.corpus_dir = g.corpus_dir;
  config.data_dir = g.data_dir;
  config.profile = g.profile;
  if (!a.config.empty()) config = service::LoadConfigFile(a.config, config);
  config = service::ApplyEnvironment(config, service::ProcessEnvironment());
  if (!a.listen.empty()) {
    config = service::ConfigFromJson(Json{{"listen", a.listen}}, config);
  }
  if (a.cap > 0) config.daily_cap = a.cap;
  if (!a.tokens.empty()) config.tokens = service::ParseTokens(a.tokens);
  if (!a.predictor.empty()) config.predictor = a.predictor;

  auto svc = std::make_shared<service::Service>(config);
  service::Server server(svc);
  const int port = server.Bind();
  if (g.json) {
    out << Json{{"listening", config.host + ":" + std::to_string(port)}}.dump() << '\n';
  } else {
    out << "listening on " << config.host << ":" << port << '\n';
  }
  out.flush();
  server.Listen();
  return 0;
}

}  // namespace

int RunCli(int argc, const char *const *argv, std::ostream &out, std::ostream &err) {
  Globals g;
  CLI::App app{"Legal hate speech annotation, agreement and detection toolkit",
               "lexjudge"};
  app.require_subcommand(1);
  app.add_option("--corpus", g.corpus_dir, "Corpus directory (posts.jsonl, annotations.jsonl)");
  app.add_option("--data-dir", g.data_dir, "Directory with lexicon/ and patterns/");
  app.add_option("--profile", g.profile, "Jurisdiction profile")
      ->check(CLI::IsMember(legal::ProfileNames()));

  auto add_json = [&g](CLI::App *sub) {
    sub->add_flag("--json", g.json, "Machine-readable output");
  };

  std::string posts, format = "jsonl", out_dir, pairs = "all", label, csv, text;
  bool with_annotations = false, explain = false;
  std::string predictor = "gazetteer+patterns";
  std::uint64_t seed = 0;

  CLI::App *ingest = app.add_subcommand("ingest", "Add posts to the corpus");
  ingest->add_option("--posts", posts, "Posts file")->required();
  ingest->add_option("--format", format)->check(CLI::IsMember({"jsonl", "csv"}));
  add_json(ingest);

  CLI::App *exp = app.add_subcommand("export", "Write the corpus to a directory");
  exp->add_option("--out", out_dir, "Destination directory")->required();
  exp->add_flag("--with-annotations", with_annotations);
  add_json(exp);

  CLI::App *stats = app.add_subcommand("stats", "Source composition and label distributions");
  add_json(stats);

  CLI::App *agree = app.add_subcommand("agreement", "Cohen's kappa per label and annotator pair");
  agree->add_option("--pairs", pairs, "all or a,b");
  agree->add_option("--label", label, "Restrict to one label");
  agree->add_option("--csv", csv, "Also write CSV here");
  add_json(agree);

  CLI::App *adjudicate = app.add_subcommand("adjudicate", "Resolve gold labels and list the queue");
  add_json(adjudicate);

  CLI::App *detect = app.add_subcommand("detect", "Predict punishability of posts");
  detect->add_option("--predictor", predictor,
                     "gazetteer+patterns, gazetteer, patterns, direct-patterns, "
                     "random:<p> or external:<url>");
  auto *posts_opt = detect->add_option("--posts", posts, "Posts file");
  auto *text_opt = detect->add_option("--text", text, "A single post text");
  posts_opt->excludes(text_opt);
  detect->add_option("--format", format)->check(CLI::IsMember({"jsonl", "csv"}));
  detect->add_flag("--explain", explain, "Print the decision trace");
  detect->add_option("--seed", seed, "Seed for random predictors");
  add_json(detect);

  EvalArgs ea;
  CLI::App *eval = app.add_subcommand("eval", "Stratified k-fold evaluation");
  eval->add_option("--predictor", ea.predictor);
  eval->add_option("--gold", ea.gold, "Annotations file with gold labels")->required();
  eval->add_option("--k", ea.k)->check(CLI::Range(2, 1000000));
  eval->add_option("--seed", ea.seed);
  eval->add_option("--label", ea.label, "Stratification label");
  eval->add_option("--report", ea.report, "Write the JSON report here");
  eval->add_option("--csv", ea.csv, "Write CSV here");
  eval->add_flag("--table", ea.table,
                 "Sub-label, random, direct and composed rows side by side");
  eval->add_option("--direct", ea.direct, "Direct predictor for --table");
  add_json(eval);

  std::vector<std::string> report_files;
  CLI::App *compare = app.add_subcommand("compare", "Compare evaluation reports");
  compare->add_option("reports", report_files, "Report JSON files; the last is the reference")
      ->required();
  compare->add_option("--csv", csv);
  add_json(compare);

  DeriveArgs da;
  CLI::App *derive = app.add_subcommand("derive", "Verdict for one assessment given as flags");
  derive->add_flag("--group", da.group, "Group of persons");
  derive->add_flag("--member", da.member, "Individual as member of a group");
  derive->add_flag("--distinguishable", da.distinguishable,
                   "Distinguishable by a protected ground");
  derive->add_flag("--hatred", da.hatred, "Incites hatred");
  derive->add_flag("--violence", da.violence, "Incites violence");
  derive->add_option("--category", da.category, "Group category");
  add_json(derive);

  ServeArgs sa;
  CLI::App *serve = app.add_subcommand("serve", "Run the HTTP API");
  serve->add_option("--config", sa.config, "JSON config file");
  serve->add_option("--listen", sa.listen, "host:port");
  serve->add_option("--cap", sa.cap, "Daily annotation cap");
  serve->add_option("--tokens", sa.tokens, "token:annotator[:role],...");
  serve->add_option("--predictor", sa.predictor);
  add_json(serve);

  try {
    std::vector<std::string> args;
    for (int i = argc - 1; i > 0; --i) args.emplace_back(argv[i]);
    app.parse(std::move(args));
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp &e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion &e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError &e) {
    app.exit(e, out, err);
    return 2;
  }

  try {
    if (*ingest) return Ingest(g, posts, format, out, err);
    if (*exp) return ExportCmd(g, out_dir, with_annotations, out);
    if (*stats) return StatsCmd(g, out);
    if (*agree) return AgreementCmd(g, pairs, label, csv, out);
    if (*adjudicate) return AdjudicateCmd(g, out);
    if (*detect) {
      if (posts.empty() && text.empty()) {
        err << "detect: one of --posts or --text is required\n";
        return 2;
      }
      return DetectCmd(g, predictor, posts, format, text, explain, seed, out);
    }
    if (*eval) return EvalCmd(g, ea, out);
    if (*compare) return CompareCmd(g, report_files, csv, out);
    if (*derive) return DeriveCmd(g, da, out);
    if (*serve) return ServeCmd(g, sa, out);
  } catch (const Error &e) {
    if (g.json) {
      err << service::ErrorJson(e).dump() << '\n';
    } else {
      err << "error: [" << ErrorCodeName(e.code()) << "] " << e.what() << '\n';
    }
    return 1;
  } catch (const std::exception &e) {
    err << "error: [internal] " << e.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace lexjudge
