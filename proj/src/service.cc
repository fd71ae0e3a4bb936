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
#include "lexjudge/service.h"

#include <unistd.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <vector>

#include "httplib.h"
#include "lexjudge/agreement.h"
#include "lexjudge/corpus.h"
#include "lexjudge/text.h"

namespace lexjudge::service {

namespace fs = std::filesystem;

namespace {

std::vector<std::string> Split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = s.find(sep, start);
    out.emplace_back(s.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

void ParseListen(std::string_view listen, ApiConfig &config) {
  const std::size_t colon = listen.rfind(':');
  if (colon == std::string_view::npos) {
    throw ValidationError("listen address must be host:port", "listen");
  }
  config.host = std::string(listen.substr(0, colon));
  try {
    std::size_t used = 0;
    const std::string port(listen.substr(colon + 1));
    config.port = std::stoi(port, &used);
    if (used != port.size()) throw std::invalid_argument(port);
  } catch (const std::exception &) {
    throw ValidationError("listen port must be an integer", "listen");
  }
  if (config.port < 0 || config.port > 65535) {
    throw ValidationError("listen port out of range", "listen");
  }
}

std::uint64_t ParseUnsigned(std::string_view s, std::string_view field) {
  try {
    std::size_t used = 0;
    const std::string value(s);
    if (value.empty() || value.front() == '-') throw std::invalid_argument(value);
    const unsigned long long v = std::stoull(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception &) {
    throw ValidationError(std::string(field) + " must be a non-negative integer",
                          std::string(field));
  }
}

Json ParseBody(const Request &request) {
  if (text::Trim(request.body).empty()) return Json::object();
  Json j = Json::parse(request.body, nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    throw ValidationError("request body must be a JSON object", "body");
  }
  return j;
}

std::string RequireString(const Json &j, std::string_view key) {
  if (!j.contains(key) || !j.at(key).is_string()) {
    throw ValidationError("missing string field '" + std::string(key) + "'",
                          std::string(key));
  }
  return j.at(key).get<std::string>();
}

Error Unauthorized(const std::string &message) {
  return Error(ErrorCode::kUnauthorized, message);
}

}  // namespace

ApiConfig ConfigFromJson(const Json &j, ApiConfig c) {
  if (!j.is_object()) throw ValidationError("config must be a JSON object");
  try {
    if (j.contains("listen")) ParseListen(j.at("listen").get<std::string>(), c);
    if (j.contains("corpus_dir")) c.corpus_dir = j.at("corpus_dir").get<std::string>();
    if (j.contains("daily_cap")) {
      const std::int64_t cap = j.at("daily_cap").get<std::int64_t>();
      if (cap < 1) throw ValidationError("daily_cap must be >= 1", "daily_cap");
      c.daily_cap = static_cast<std::size_t>(cap);
    }
    if (j.contains("profile")) c.profile = j.at("profile").get<std::string>();
    if (j.contains("data_dir")) c.data_dir = j.at("data_dir").get<std::string>();
    if (j.contains("predictor")) c.predictor = j.at("predictor").get<std::string>();
    if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("tokens")) {
      c.tokens.clear();
      for (const Json &t : j.at("tokens")) {
        Principal p;
        p.annotator_id = t.at("annotator").get<std::string>();
        p.role = ParseRole(t.value("role", std::string("Layperson")));
        c.tokens[t.at("token").get<std::string>()] = std::move(p);
      }
    }
  } catch (const Json::exception &e) {
    throw ValidationError(std::string("malformed config: ") + e.what(), "config");
  }
  return c;
}

ApiConfig LoadConfigFile(const fs::path &path, ApiConfig base) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot read config " + path.string(), "config");
  std::stringstream ss;
  ss << in.rdbuf();
  Json j = Json::parse(ss.str(), nullptr, false);
  if (j.is_discarded()) {
    throw ValidationError("config " + path.string() + " is not valid JSON", "config");
  }
  return ConfigFromJson(j, std::move(base));
}

EnvLookup ProcessEnvironment() {
  return [](std::string_view name) -> std::optional<std::string> {
    const char *v = std::getenv(std::string(name).c_str());
    if (v == nullptr) return std::nullopt;
    return std::string(v);
  };
}

std::map<std::string, Principal> ParseTokens(std::string_view spec) {
  std::map<std::string, Principal> tokens;
  for (const std::string &entry : Split(spec, ',')) {
    if (text::Trim(entry).empty()) continue;
    const std::vector<std::string> parts = Split(text::Trim(entry), ':');
    if (parts.size() < 2 || parts.size() > 3 || parts[0].empty() ||
        parts[1].empty()) {
      throw ValidationError("token entries must be token:annotator[:role]", "tokens");
    }
    Principal p;
    p.annotator_id = parts[1];
    if (parts.size() == 3) p.role = ParseRole(parts[2]);
    tokens[parts[0]] = std::move(p);
  }
  return tokens;
}

ApiConfig ApplyEnvironment(ApiConfig c, const EnvLookup &env) {
  if (auto v = env("LEXJUDGE_LISTEN")) ParseListen(*v, c);
  if (auto v = env("LEXJUDGE_CORPUS_DIR")) c.corpus_dir = *v;
  if (auto v = env("LEXJUDGE_DAILY_CAP")) {
    c.daily_cap = ParseUnsigned(*v, "LEXJUDGE_DAILY_CAP");
  }
  if (auto v = env("LEXJUDGE_PROFILE")) c.profile = *v;
  if (auto v = env("LEXJUDGE_DATA_DIR")) c.data_dir = *v;
  if (auto v = env("LEXJUDGE_PREDICTOR")) c.predictor = *v;
  if (auto v = env("LEXJUDGE_SEED")) c.seed = ParseUnsigned(*v, "LEXJUDGE_SEED");
  if (auto v = env("LEXJUDGE_TOKENS")) c.tokens = ParseTokens(*v);
  return c;
}

void ValidateConfig(const ApiConfig &c) {
  if (c.daily_cap < 1) throw ValidationError("daily_cap must be >= 1", "daily_cap");
  legal::ValidateProfile(legal::FindProfile(c.profile));
  if (c.corpus_dir.empty()) {
    throw ValidationError("corpus directory is not configured", "corpus_dir");
  }
  std::error_code ec;
  if (!fs::is_directory(c.corpus_dir, ec)) {
    throw Error(ErrorCode::kIo,
                "corpus directory " + c.corpus_dir.string() + " does not exist",
                "corpus_dir");
  }
  if (::access(c.corpus_dir.c_str(), W_OK) != 0) {
    throw Error(ErrorCode::kIo,
                "corpus directory " + c.corpus_dir.string() + " is not writable",
                "corpus_dir");
  }
}

int HttpStatus(ErrorCode code) {
  switch (code) {
    case ErrorCode::kValidation:
      return 400;
    case ErrorCode::kUnauthorized:
      return 401;
    case ErrorCode::kNotFound:
      return 404;
    case ErrorCode::kConflict:
      return 409;
    case ErrorCode::kProtocol:
      return 422;
    case ErrorCode::kQuota:
      return 429;
    case ErrorCode::kPrediction:
      return 502;
    case ErrorCode::kIo:
    case ErrorCode::kInternal:
      return 500;
  }
  return 500;
}

Json ErrorJson(const Error &error) {
  Json j{{"code", ErrorCodeName(error.code())}, {"message", error.what()}};
  if (!error.field().empty()) j["field"] = error.field();
  return j;
}

Service::Service(ApiConfig config) : config_(std::move(config)) {
  ValidateConfig(config_);
  profile_ = legal::FindProfile(config_.profile);
  if (!config_.data_dir.empty()) {
    resources_ = detection::LoadResources(config_.data_dir, profile_);
  }
  resources_.profile = profile_;
  resources_.seed = config_.seed;
  predictor_ = detection::MakePredictor(config_.predictor, resources_);
  annotation::StoreOptions options;
  options.daily_cap = config_.daily_cap;
  options.directory = config_.corpus_dir;
  store_ = std::make_unique<annotation::AnnotationStore>(
      corpus::LoadCorpus(config_.corpus_dir), std::move(options));
}

Response Service::Handle(const Request &request) {
  try {
    auto [status, body] = Route(request);
    return Response{status, body.dump()};
  } catch (const Error &e) {
    return Response{HttpStatus(e.code()), ErrorJson(e).dump()};
  } catch (const Json::exception &e) {
    const Error err = ValidationError(std::string("malformed JSON: ") + e.what());
    return Response{400, ErrorJson(err).dump()};
  } catch (const std::exception &e) {
    const Error err(ErrorCode::kInternal, e.what());
    return Response{500, ErrorJson(err).dump()};
  }
}

Principal Service::Authenticate(const Request &request) const {
  constexpr std::string_view kBearer = "Bearer ";
  if (!request.authorization.starts_with(kBearer)) {
    throw Unauthorized("missing bearer token");
  }
  const std::string token = text::Trim(request.authorization.substr(kBearer.size()));
  const auto it = config_.tokens.find(token);
  if (it == config_.tokens.end()) throw Unauthorized("unknown bearer token");
  return it->second;
}

std::pair<int, Json> Service::Route(const Request &request) {
  const std::string &m = request.method;
  std::vector<std::string> parts = Split(request.path, '/');
  if (!parts.empty() && parts.front().empty()) parts.erase(parts.begin());
  if (!parts.empty() && parts.back().empty()) parts.pop_back();

  if (m == "GET" && parts == std::vector<std::string>{"healthz"}) {
    return {200, Json{{"status", "ok"}}};
  }
  const Principal who = Authenticate(request);
  const auto is = [&](std::string_view method, std::vector<std::string> path) {
    return m == method && parts == path;
  };

  if (is("GET", {"posts", "next"})) return {200, NextPost(who, request)};
  if (parts.size() == 3 && parts[0] == "session") {
    if (m == "GET") return {200, GetSession(who, parts[1], parts[2])};
    if (m == "POST") return {200, PostSession(who, parts[1], parts[2], ParseBody(request))};
  }
  if (is("POST", {"annotations"})) return {201, PostAnnotation(who, ParseBody(request))};
  if (is("GET", {"agreement"})) return {200, GetAgreement(request)};
  if (is("GET", {"adjudication", "queue"})) {
    if (who.role != Role::kExpert) {
      throw Unauthorized("the adjudication queue requires an expert token");
    }
    return {200, GetQueue()};
  }
  if (is("POST", {"adjudication"})) {
    return {201, PostAdjudication(who, ParseBody(request))};
  }
  if (is("POST", {"detect"})) return {200, PostDetect(ParseBody(request))};
  if (is("GET", {"stats"})) {
    return {200, corpus::ToJson(corpus::Stats(*store_->Snapshot()))};
  }
  throw Error(ErrorCode::kNotFound, "no route for " + m + " " + request.path, "path");
}

Json Service::NextPost(const Principal &who, const Request &request) {
  const auto it = request.query.find("annotator");
  if (it != request.query.end() && it->second != who.annotator_id) {
    throw Unauthorized("token is bound to annotator '" + who.annotator_id + "'");
  }
  const auto snapshot = store_->Snapshot();
  const std::optional<std::string> id = annotation::NextPostFor(*snapshot, who.annotator_id);
  const std::size_t used = store_->SubmittedOn(who.annotator_id, clock_());
  Json j{{"annotator", who.annotator_id},
         {"remaining_quota", used >= config_.daily_cap ? 0 : config_.daily_cap - used}};
  j["post"] = id ? lexjudge::ToJson(*snapshot->FindPost(*id)) : Json(nullptr);
  return j;
}

Json Service::GetSession(const Principal &who, std::string_view post,
                         std::string_view annotator) {
  if (annotator != who.annotator_id) {
    throw Unauthorized("token is bound to annotator '" + who.annotator_id + "'");
  }
  const auto snapshot = store_->Snapshot();
  const Post *p = snapshot->FindPost(post);
  if (p == nullptr) {
    throw Error(ErrorCode::kNotFound, "unknown post '" + std::string(post) + "'",
                "post_id");
  }
  annotation::WizardState state{std::string(post), std::string(annotator), {}, {}};
  {
    std::lock_guard lock(sessions_mu_);
    const auto it = sessions_.find({state.post_id, state.annotator_id});
    if (it != sessions_.end()) state = it->second;
  }
  Json j = annotation::ToJson(state);
  j["post"] = lexjudge::ToJson(*p);
  return j;
}

Json Service::PostSession(const Principal &who, std::string_view post,
                          std::string_view annotator, const Json &body) {
  if (annotator != who.annotator_id) {
    throw Unauthorized("token is bound to annotator '" + who.annotator_id + "'");
  }
  const auto snapshot = store_->Snapshot();
  const Post *p = snapshot->FindPost(post);
  if (p == nullptr) {
    throw Error(ErrorCode::kNotFound, "unknown post '" + std::string(post) + "'",
                "post_id");
  }
  const std::string action = body.value("action", std::string("answer"));
  const std::pair<std::string, std::string> key{std::string(post), std::string(annotator)};
  std::lock_guard lock(sessions_mu_);
  annotation::WizardState state{key.first, key.second, {}, {}};
  if (const auto it = sessions_.find(key); it != sessions_.end()) state = it->second;
  if (action == "answer") {
    const annotation::QuestionId q =
        annotation::ParseQuestionId(RequireString(body, "question"));
    if (!body.contains("answer")) throw ValidationError("missing answer", "answer");
    state = annotation::ApplyAnswer(std::move(state), q,
                                    annotation::AnswerFromJson(q, body.at("answer")));
  } else if (action == "add_group") {
    state = annotation::AddGroup(std::move(state));
  } else if (action == "reset") {
    state = annotation::WizardState{key.first, key.second, {}, {}};
  } else {
    throw Error(ErrorCode::kProtocol, "unknown session action '" + action + "'",
                "action");
  }
  sessions_[key] = state;
  Json j = annotation::ToJson(state);
  j["post"] = lexjudge::ToJson(*p);
  return j;
}

Json Service::PostAnnotation(const Principal &who, const Json &body) {
  const Timestamp now = clock_();
  if (body.contains("assessments")) {
    AnnotationRecord record = RecordFromJson(body);
    if (record.annotator_id != who.annotator_id) {
      throw Unauthorized("token is bound to annotator '" + who.annotator_id + "'");
    }
    if (record.role == Role::kExpert && who.role != Role::kExpert) {
      throw Unauthorized("only expert tokens may submit expert records");
    }
    record.created_at = now;
    return annotation::ToJson(store_->Submit(std::move(record)));
  }
  const std::pair<std::string, std::string> key{RequireString(body, "post_id"),
                                                who.annotator_id};
  annotation::WizardState state;
  {
    std::lock_guard lock(sessions_mu_);
    const auto it = sessions_.find(key);
    if (it == sessions_.end()) {
      throw Error(ErrorCode::kNotFound,
                  "no annotation session for post '" + key.first + "'", "post_id");
    }
    state = it->second;
  }
  annotation::Submitted submitted = annotation::Submit(state, *store_, who.role, now);
  {
    std::lock_guard lock(sessions_mu_);
    sessions_.erase(key);
  }
  return annotation::ToJson(submitted);
}

Json Service::GetAgreement(const Request &request) {
  const auto snapshot = store_->Snapshot();
  std::vector<std::string> annotators;
  const auto pairs = request.query.find("pairs");
  if (pairs == request.query.end() || pairs->second == "all") {
    annotators = agreement::Annotators(*snapshot);
  } else {
    annotators = Split(pairs->second, ',');
    if (annotators.size() != 2 || annotators[0].empty() || annotators[1].empty()) {
      throw ValidationError("pairs must be 'all' or 'a,b'", "pairs");
    }
  }
  std::optional<std::string> label;
  if (const auto it = request.query.find("label"); it != request.query.end()) {
    label = it->second;
  }
  Json j = agreement::ToJson(agreement::BuildAgreementReport(*snapshot, annotators, label));
  if (annotators.size() == 2) {
    j["group_confusion"] =
        agreement::ToJson(agreement::GroupConfusion(*snapshot, annotators[0], annotators[1]));
  }
  return j;
}

Json Service::GetQueue() {
  const auto snapshot = store_->Snapshot();
  const agreement::AdjudicatedLabels labels =
      agreement::Adjudicate(*snapshot, snapshot->adjudications);
  Json queue = Json::array();
  for (const agreement::QueueItem &item : labels.queue) {
    Json records = Json::array();
    for (const AnnotationRecord *r : snapshot->RecordsFor(item.post_id)) {
      Json rec = lexjudge::ToJson(*r);
      rec["punishable"] = RecordPunishable(*r);
      records.push_back(std::move(rec));
    }
    const Post *p = snapshot->FindPost(item.post_id);
    queue.push_back(Json{{"post_id", item.post_id},
                         {"text", p != nullptr ? p->text : std::string()},
                         {"annotators", item.annotators},
                         {"disagreeing_fields", item.disagreeing_fields},
                         {"records", std::move(records)}});
  }
  return Json{{"queue", std::move(queue)}};
}

Json Service::PostAdjudication(const Principal &who, const Json &body) {
  if (who.role != Role::kExpert) {
    throw Unauthorized("adjudication requires an expert token");
  }
  Json j = body;
  if (!j.contains("annotator_id")) j["annotator_id"] = who.annotator_id;
  j["role"] = RoleName(Role::kExpert);
  if (!j.contains("created_at")) j["created_at"] = FormatTimestamp(clock_());
  AnnotationRecord record = RecordFromJson(j);
  if (record.annotator_id != who.annotator_id) {
    throw Unauthorized("token is bound to annotator '" + who.annotator_id + "'");
  }
  record.created_at = clock_();
  return annotation::ToJson(store_->Submit(std::move(record)));
}

Json Service::PostDetect(const Json &body) {
  std::shared_ptr<const detection::Predictor> predictor = predictor_;
  if (body.contains("predictor")) {
    predictor = detection::MakePredictor(RequireString(body, "predictor"), resources_);
  }
  Post post;
  if (body.contains("post_id")) {
    const auto snapshot = store_->Snapshot();
    const Post *p = snapshot->FindPost(RequireString(body, "post_id"));
    if (p == nullptr) {
      throw Error(ErrorCode::kNotFound,
                  "unknown post '" + body.at("post_id").get<std::string>() + "'",
                  "post_id");
    }
    post = *p;
  } else {
    post.text = RequireString(body, "text");
    post.language = body.value("language", std::string("de"));
  }
  return detection::Detect(post, *predictor, profile_);
}

struct Server::Impl {
  std::shared_ptr<Service> service;
  httplib::Server http;
};

Server::Server(std::shared_ptr<Service> service) : impl_(std::make_unique<Impl>()) {
  impl_->service = std::move(service);
  auto handler = [svc = impl_->service](const httplib::Request &req,
                                        httplib::Response &res) {
    Request r;
    r.method = req.method;
    r.path = req.path;
    for (const auto &[k, v] : req.params) r.query.emplace(k, v);
    r.body = req.body;
    r.authorization = req.get_header_value("Authorization");
    const Response out = svc->Handle(r);
    res.status = out.status;
    res.set_content(out.body, "application/json");
  };
  impl_->http.Get(".*", handler);
  impl_->http.Post(".*", handler);
}

Server::~Server() { Stop(); }

int Server::Bind() {
  const ApiConfig &c = impl_->service->config();
  int port = c.port;
  if (port == 0) {
    port = impl_->http.bind_to_any_port(c.host);
  } else if (!impl_->http.bind_to_port(c.host, port)) {
    port = -1;
  }
  if (port < 0) {
    throw Error(ErrorCode::kIo,
                "cannot bind " + c.host + ":" + std::to_string(c.port), "listen");
  }
  return port;
}

void Server::Listen() { impl_->http.listen_after_bind(); }

void Server::Stop() {
  if (impl_ && impl_->http.is_running()) impl_->http.stop();
}

}  // namespace lexjudge::service
