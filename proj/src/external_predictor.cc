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
#include <string>

#include "httplib.h"
#include "lexjudge/detection.h"
#include "lexjudge/error.h"

namespace lexjudge::detection {

namespace {

Error PredictionError(const std::string &message) {
  return Error(ErrorCode::kPrediction, message, "predictor");
}

}  // namespace

ExternalPredictor::ExternalPredictor(std::string url, ExternalOptions options)
    : url_(std::move(url)),
      options_(options),
      in_flight_(options.max_in_flight) {
  if (options_.max_in_flight < 1) {
    throw ValidationError("max_in_flight must be >= 1", "max_in_flight");
  }
  const std::size_t scheme = url_.find("://");
  if (scheme == std::string::npos || url_.substr(0, scheme) != "http") {
    throw ValidationError("external predictor URL must start with http://",
                          "predictor");
  }
  const std::size_t path = url_.find('/', scheme + 3);
  host_ = url_.substr(0, path);
  base_path_ = path == std::string::npos ? "" : url_.substr(path);
  while (!base_path_.empty() && base_path_.back() == '/') base_path_.pop_back();
  if (host_.size() <= scheme + 3) {
    throw ValidationError("external predictor URL has no host", "predictor");
  }
}

ExternalPredictor::~ExternalPredictor() = default;

SubLabelPrediction ExternalPredictor::Predict(const Post &post,
                                              const FoldContext *fold) const {
  Json request{{"post_id", post.id}, {"text", post.text},
               {"language", post.language}};
  if (fold != nullptr) {
    request["fold"] = Json{{"index", fold->fold}, {"k", fold->k},
                           {"seed", fold->seed}};
  }

  in_flight_.acquire();
  httplib::Result result;
  {
    httplib::Client client(host_);
    const auto secs = std::chrono::duration_cast<std::chrono::seconds>(
        options_.timeout);
    const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(
        options_.timeout - secs);
    client.set_connection_timeout(secs.count(), usecs.count());
    client.set_read_timeout(secs.count(), usecs.count());
    client.set_write_timeout(secs.count(), usecs.count());
    result = client.Post(base_path_ + "/predict", request.dump(),
                         "application/json");
  }
  in_flight_.release();

  if (!result) {
    throw PredictionError("external predictor " + url_ + " unreachable: " +
                          httplib::to_string(result.error()));
  }
  if (result->status != 200) {
    throw PredictionError("external predictor " + url_ + " answered HTTP " +
                          std::to_string(result->status));
  }
  Json body = Json::parse(result->body, nullptr, false);
  if (body.is_discarded()) {
    throw PredictionError("external predictor " + url_ +
                          " returned malformed JSON");
  }
  try {
    return PredictionFromJson(body);
  } catch (const Error &e) {
    throw PredictionError("external predictor " + url_ +
                          " returned an invalid prediction: " + e.what());
  }
}

}  // namespace lexjudge::detection
