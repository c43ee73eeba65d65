// Copyright 2026 The NexusSum Authors
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

#include "nexussum/backend.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "nexussum/corpus.hpp"
#include "nexussum/errors.hpp"
#include "nexussum/hashing.hpp"

namespace nexussum {
namespace {

using nlohmann::json;

std::string format_double(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

inline bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

}  // namespace

std::string to_string(BackendKind kind) {
  switch (kind) {
    case BackendKind::kHttp: return "http";
    case BackendKind::kMockIdentity: return "mock_identity";
    case BackendKind::kMockTruncate: return "mock_truncate";
    case BackendKind::kMockHalve: return "mock_halve";
    case BackendKind::kFixture: return "fixture";
  }
  return "mock_identity";
}

BackendKind backend_kind_from_string(std::string_view name) {
  if (name == "http") return BackendKind::kHttp;
  if (name == "mock_identity" || name == "mock-identity") return BackendKind::kMockIdentity;
  if (name == "mock_truncate" || name == "mock-truncate") return BackendKind::kMockTruncate;
  if (name == "mock_halve" || name == "mock-halve") return BackendKind::kMockHalve;
  if (name == "fixture") return BackendKind::kFixture;
  throw ConfigError("unknown backend kind: " + std::string(name));
}

void BackendDescriptor::validate() const {
  auto require = [&](bool ok, const std::string& what) {
    if (!ok) {
      throw ConfigError("backend descriptor (" + to_string(kind) + "): " + what);
    }
  };
  require(max_in_flight >= 1, "max_in_flight must be >= 1");
  require(retry.max_attempts >= 1, "retry.max_attempts must be >= 1");

  const bool has_http_fields = !endpoint.empty() || !model.empty() || !credential_env.empty();
  switch (kind) {
    case BackendKind::kHttp:
      require(!endpoint.empty(), "endpoint is required");
      require(!model.empty(), "model is required");
      require(ratio == 0.0, "ratio is not a http field");
      require(fixture_path.empty(), "fixture_path is not a http field");
      break;
    case BackendKind::kMockTruncate:
      require(ratio > 0.0 && ratio <= 1.0, "ratio must be in (0, 1]");
      require(!has_http_fields, "http fields are not mock fields");
      require(fixture_path.empty(), "fixture_path is not a mock field");
      break;
    case BackendKind::kMockIdentity:
    case BackendKind::kMockHalve:
      require(ratio == 0.0, "ratio only applies to mock_truncate");
      require(!has_http_fields, "http fields are not mock fields");
      require(fixture_path.empty(), "fixture_path is not a mock field");
      break;
    case BackendKind::kFixture:
      require(!fixture_path.empty(), "fixture_path is required");
      require(ratio == 0.0, "ratio is not a fixture field");
      require(!has_http_fields, "http fields are not fixture fields");
      break;
  }
}

std::string request_hash(const std::vector<Message>& turns,
                         const GenerationParams& params) {
  std::string canonical;
  canonical += "temperature=" + format_double(params.temperature);
  canonical += "\x1etop_p=" + format_double(params.top_p);
  canonical += "\x1eseed=" + std::to_string(params.seed);
  canonical += "\x1emax_output_tokens=" + std::to_string(params.max_output_tokens);
  for (const Message& turn : turns) {
    canonical += '\x1e';
    canonical += to_string(turn.role);
    canonical += '\x1f';
    canonical += turn.text;
  }
  return content_hash(canonical);
}

std::string truncate_words(std::string_view payload, double ratio) {
  const std::int64_t total = word_count(payload);
  const std::int64_t keep =
      static_cast<std::int64_t>(std::ceil(ratio * static_cast<double>(total)));
  if (keep <= 0) return "";
  if (keep >= total) return std::string(trim(payload));

  std::int64_t seen = 0;
  bool in_word = false;
  std::size_t end = 0;
  for (std::size_t i = 0; i < payload.size(); ++i) {
    if (is_space(payload[i])) {
      in_word = false;
      if (seen == keep) break;
    } else {
      if (!in_word) {
        in_word = true;
        ++seen;
      }
      end = i + 1;
    }
  }
  return std::string(trim(payload.substr(0, end)));
}

std::string MockIdentityBackend::complete(const Prompt& prompt,
                                          const GenerationParams&) {
  return prompt.payload;
}

MockTruncateBackend::MockTruncateBackend(double ratio) : ratio_(ratio) {
  if (ratio <= 0.0 || ratio > 1.0) {
    throw ConfigError("mock_truncate ratio must be in (0, 1]");
  }
}

std::string MockTruncateBackend::complete(const Prompt& prompt,
                                          const GenerationParams&) {
  return truncate_words(prompt.payload, ratio_);
}

FixtureMap load_fixture_map(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open fixture file: " + path.string());
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw InputError("fixture file " + path.string() + ": " + e.what());
  }
  if (!doc.is_object()) {
    throw InputError("fixture file " + path.string() + ": expected a JSON object");
  }
  FixtureMap map;
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    if (!it.value().is_string()) {
      throw InputError("fixture file " + path.string() +
                       ": response for " + it.key() + " is not a string");
    }
    map[it.key()] = it.value().get<std::string>();
  }
  return map;
}

void save_fixture_map(const FixtureMap& map, const std::filesystem::path& path) {
  json doc = json::object();
  for (const auto& [key, value] : map) doc[key] = value;
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot write fixture file: " + path.string());
  out << doc.dump(2) << '\n';
}

FixtureBackend::FixtureBackend(FixtureMap responses)
    : responses_(std::move(responses)) {}

FixtureBackend::FixtureBackend(const std::filesystem::path& path)
    : responses_(load_fixture_map(path)) {}

std::string FixtureBackend::complete(const Prompt& prompt,
                                     const GenerationParams& params) {
  const std::string key = request_hash(prompt.turns, params);
  auto it = responses_.find(key);
  if (it == responses_.end()) throw FixtureMiss(key);
  return it->second;
}

HttpBackend::HttpBackend(BackendDescriptor descriptor)
    : descriptor_(std::move(descriptor)) {
  descriptor_.validate();
  const std::string& url = descriptor_.endpoint;
  std::size_t scheme_end = url.find("://");
  std::size_t host_begin = (scheme_end == std::string::npos) ? 0 : scheme_end + 3;
  std::size_t path_begin = url.find('/', host_begin);
  if (path_begin == std::string::npos) {
    base_url_ = url;
    path_ = "/v1/chat/completions";
  } else {
    base_url_ = url.substr(0, path_begin);
    path_ = url.substr(path_begin);
  }
}

std::string HttpBackend::complete(const Prompt& prompt,
                                  const GenerationParams& params) {
  json body;
  body["model"] = descriptor_.model;
  body["messages"] = json::array();
  for (const Message& turn : prompt.turns) {
    body["messages"].push_back({{"role", to_string(turn.role)},
                                {"content", turn.text}});
  }
  body["temperature"] = params.temperature;
  body["top_p"] = params.top_p;
  body["seed"] = params.seed;
  body["max_tokens"] = params.max_output_tokens;
  const std::string payload = body.dump();

  httplib::Headers headers;
  if (!descriptor_.credential_env.empty()) {
    const char* secret = std::getenv(descriptor_.credential_env.c_str());
    if (secret == nullptr) {
      throw ConfigError("credential environment variable is not set: " +
                        descriptor_.credential_env);
    }
    headers.emplace("Authorization", std::string("Bearer ") + secret);
  }

  std::string last_error;
  for (int attempt = 1; attempt <= descriptor_.retry.max_attempts; ++attempt) {
    if (attempt > 1) {
      std::this_thread::sleep_for(descriptor_.retry.base_backoff *
                                  (1 << (attempt - 2)));
    }
    httplib::Client client(base_url_);
    client.set_connection_timeout(30);
    client.set_read_timeout(300);
    httplib::Result res = client.Post(path_, headers, payload, "application/json");
    if (!res) {
      last_error = "transport failure: " + httplib::to_string(res.error());
      continue;  // retryable
    }
    if (res->status >= 500) {
      last_error = "server error: HTTP " + std::to_string(res->status);
      continue;  // retryable
    }
    if (res->status < 200 || res->status >= 300) {
      throw BackendRefusal(res->status,
                           "backend refused request: HTTP " +
                               std::to_string(res->status) + " " +
                               res->body.substr(0, 512));
    }
    try {
      json reply = json::parse(res->body);
      return reply.at("choices").at(0).at("message").at("content")
          .get<std::string>();
    } catch (const json::exception& e) {
      throw BackendRefusal(res->status,
                           std::string("malformed completion response: ") +
                               e.what());
    }
  }
  throw TransportError(last_error + " (after " +
                       std::to_string(descriptor_.retry.max_attempts) +
                       " attempts)");
}

std::unique_ptr<Backend> make_backend(const BackendDescriptor& descriptor) {
  descriptor.validate();
  switch (descriptor.kind) {
    case BackendKind::kHttp:
      return std::make_unique<HttpBackend>(descriptor);
    case BackendKind::kMockIdentity:
      return std::make_unique<MockIdentityBackend>();
    case BackendKind::kMockTruncate:
      return std::make_unique<MockTruncateBackend>(descriptor.ratio);
    case BackendKind::kMockHalve:
      return std::make_unique<MockTruncateBackend>(0.5);
    case BackendKind::kFixture:
      return std::make_unique<FixtureBackend>(
          std::filesystem::path(descriptor.fixture_path));
  }
  throw ConfigError("unsupported backend kind");
}

}  // namespace nexussum
