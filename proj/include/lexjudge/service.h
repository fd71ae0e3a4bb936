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
// HTTP/JSON API over the corpus, annotation, agreement and detection
// modules. Requests are dispatched by Service::Handle, which does not depend
// on the transport; Server binds it to an HTTP listener.

#ifndef LEXJUDGE_SERVICE_H_
#define LEXJUDGE_SERVICE_H_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <utility>

#include "lexjudge/annotation.h"
#include "lexjudge/detection.h"
#include "lexjudge/error.h"
#include "lexjudge/legal.h"
#include "lexjudge/records.h"

namespace lexjudge::service {

struct Principal {
  std::string annotator_id;
  Role role = Role::kLayperson;
};

struct ApiConfig {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::filesystem::path corpus_dir;
  std::size_t daily_cap = 50;
  std::string profile = "eu-minimum";
  // Bearer token -> bound identity.
  std::map<std::string, Principal> tokens;
  std::filesystem::path data_dir;
  std::string predictor = "gazetteer+patterns";
  std::uint64_t seed = 0;
};

// Reads a JSON config file:
//   {"listen": "host:port", "corpus_dir": "...", "daily_cap": 50,
//    "profile": "eu-minimum", "data_dir": "...", "predictor": "...",
//    "seed": 0, "tokens": [{"token": "...", "annotator": "...",
//    "role": "Layperson"}]}
ApiConfig ConfigFromJson(const Json &j, ApiConfig base = {});
ApiConfig LoadConfigFile(const std::filesystem::path &path, ApiConfig base = {});

using EnvLookup = std::function<std::optional<std::string>(std::string_view)>;
EnvLookup ProcessEnvironment();

// Overrides from LEXJUDGE_LISTEN, LEXJUDGE_CORPUS_DIR, LEXJUDGE_DAILY_CAP,
// LEXJUDGE_PROFILE, LEXJUDGE_DATA_DIR, LEXJUDGE_PREDICTOR, LEXJUDGE_SEED and
// LEXJUDGE_TOKENS ("token:annotator:role,...").
ApiConfig ApplyEnvironment(ApiConfig config, const EnvLookup &env);

// Parses "token:annotator[:role]" entries separated by commas.
std::map<std::string, Principal> ParseTokens(std::string_view spec);

// cap >= 1, known profile, corpus directory exists and is writable.
void ValidateConfig(const ApiConfig &config);

int HttpStatus(ErrorCode code);
Json ErrorJson(const Error &error);

struct Request {
  std::string method;
  std::string path;
  std::map<std::string, std::string> query;
  std::string body;
  // Value of the Authorization header, if any.
  std::string authorization;
};

struct Response {
  int status = 200;
  std::string body;
};

class Service {
 public:
  // Validates the config and loads the corpus and detection resources.
  explicit Service(ApiConfig config);

  Response Handle(const Request &request);

  const ApiConfig &config() const { return config_; }
  const annotation::AnnotationStore &store() const { return *store_; }
  void set_clock(std::function<Timestamp()> clock) { clock_ = std::move(clock); }

 private:
  // Status and body of a successful request.
  std::pair<int, Json> Route(const Request &request);
  Principal Authenticate(const Request &request) const;

  Json NextPost(const Principal &who, const Request &request);
  Json GetSession(const Principal &who, std::string_view post,
                  std::string_view annotator);
  Json PostSession(const Principal &who, std::string_view post,
                   std::string_view annotator, const Json &body);
  Json PostAnnotation(const Principal &who, const Json &body);
  Json GetAgreement(const Request &request);
  Json GetQueue();
  Json PostAdjudication(const Principal &who, const Json &body);
  Json PostDetect(const Json &body);

  ApiConfig config_;
  legal::JurisdictionProfile profile_;
  detection::Resources resources_;
  std::shared_ptr<const detection::Predictor> predictor_;
  std::unique_ptr<annotation::AnnotationStore> store_;
  std::function<Timestamp()> clock_ = Now;

  std::mutex sessions_mu_;
  std::map<std::pair<std::string, std::string>, annotation::WizardState> sessions_;
};

// Binds a Service to an HTTP listener.
class Server {
 public:
  explicit Server(std::shared_ptr<Service> service);
  ~Server();

  // Binds config().host:port (0 picks a free port) and returns the port.
  // Throws an io Error on bind failure.
  int Bind();
  // Serves until Stop(); call Bind() first.
  void Listen();
  void Stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace lexjudge::service

#endif  // LEXJUDGE_SERVICE_H_
