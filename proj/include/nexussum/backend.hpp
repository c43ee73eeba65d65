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
//
// LLM backend abstraction. One real implementation (OpenAI-compatible chat
// completions over HTTP) plus the deterministic test substrate: identity,
// word-truncation, and fixture-replay backends. All backends accept
// concurrent complete() calls.

#ifndef NEXUSSUM_BACKEND_HPP_
#define NEXUSSUM_BACKEND_HPP_

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "nexussum/prompt.hpp"

namespace nexussum {

struct GenerationParams {
  double temperature = 0.3;
  double top_p = 1.0;
  std::int64_t seed = 42;
  std::int64_t max_output_tokens = 4096;

  bool operator==(const GenerationParams&) const = default;
};

enum class BackendKind { kHttp, kMockIdentity, kMockTruncate, kMockHalve, kFixture };

std::string to_string(BackendKind kind);
BackendKind backend_kind_from_string(std::string_view name);

struct RetryPolicy {
  int max_attempts = 3;
  std::chrono::milliseconds base_backoff{250};

  bool operator==(const RetryPolicy&) const = default;
};

struct BackendDescriptor {
  BackendKind kind = BackendKind::kMockIdentity;

  // http
  std::string endpoint;
  std::string model;
  std::string credential_env;  // name of the env var holding the API key

  // mock_truncate
  double ratio = 0.0;

  // fixture
  std::string fixture_path;

  int max_in_flight = 4;
  RetryPolicy retry;

  // Enforces that exactly the fields for `kind` are set.
  void validate() const;

  bool operator==(const BackendDescriptor&) const = default;
};

class Backend {
 public:
  virtual ~Backend() = default;
  virtual std::string complete(const Prompt& prompt,
                               const GenerationParams& params) = 0;
};

// Stable key for a request: canonicalized turns + generation parameters,
// hashed to 16 lowercase hex chars.
std::string request_hash(const std::vector<Message>& turns,
                         const GenerationParams& params);

// Byte prefix of `payload` ending at the last byte of its ceil(ratio * W)-th
// word (W = payload word count). Internal structure is preserved.
std::string truncate_words(std::string_view payload, double ratio);

class MockIdentityBackend : public Backend {
 public:
  std::string complete(const Prompt& prompt, const GenerationParams&) override;
};

class MockTruncateBackend : public Backend {
 public:
  explicit MockTruncateBackend(double ratio);
  std::string complete(const Prompt& prompt, const GenerationParams&) override;

 private:
  double ratio_;
};

using FixtureMap = std::map<std::string, std::string>;

FixtureMap load_fixture_map(const std::filesystem::path& path);
void save_fixture_map(const FixtureMap& map, const std::filesystem::path& path);

class FixtureBackend : public Backend {
 public:
  explicit FixtureBackend(FixtureMap responses);
  explicit FixtureBackend(const std::filesystem::path& path);
  std::string complete(const Prompt& prompt,
                       const GenerationParams& params) override;
  std::size_t size() const { return responses_.size(); }

 private:
  FixtureMap responses_;
};

class HttpBackend : public Backend {
 public:
  explicit HttpBackend(BackendDescriptor descriptor);
  std::string complete(const Prompt& prompt,
                       const GenerationParams& params) override;

 private:
  BackendDescriptor descriptor_;
  std::string base_url_;
  std::string path_;
};

std::unique_ptr<Backend> make_backend(const BackendDescriptor& descriptor);

}  // namespace nexussum

#endif  // NEXUSSUM_BACKEND_HPP_
