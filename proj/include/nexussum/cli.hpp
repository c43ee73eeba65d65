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
// Command-line entry point: run pipelines, replay fixtures, sweep the
// delta/theta grid, and emit metric reports. Exposed as a function so tests
// drive it in-process.
//
// Exit codes: 0 ok, 2 config error, 3 input error, 4 backend error,
// 5 internal error.

#ifndef NEXUSSUM_CLI_HPP_
#define NEXUSSUM_CLI_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "nexussum/corpus.hpp"
#include "nexussum/pipeline.hpp"

namespace nexussum::cli {

// Values set by explicit CLI flags; they take precedence over config-file
// values, which take precedence over preset values.
struct CliOverrides {
  std::optional<std::string> preset;

  std::optional<std::int64_t> scenes_per_chunk;
  std::optional<std::string> delta;  // number or "max"
  std::optional<std::int64_t> theta;
  std::optional<std::int64_t> max_iterations;
  std::optional<std::vector<std::string>> stages;
  std::optional<bool> early_stop_on_stall;
  std::optional<std::string> prompt_dir;

  std::optional<std::string> backend_kind;
  std::optional<std::string> endpoint;
  std::optional<std::string> model;
  std::optional<std::string> credential_env;
  std::optional<double> ratio;
  std::optional<std::string> fixture_path;
  std::optional<int> max_in_flight;
  std::optional<int> retry_attempts;
  std::optional<std::int64_t> retry_backoff_ms;

  std::optional<double> temperature;
  std::optional<double> top_p;
  std::optional<std::int64_t> seed;
  std::optional<std::int64_t> max_output_tokens;

  std::optional<std::string> input;
  std::optional<std::string> medium;
  std::optional<std::string> output_dir;
  std::optional<std::string> doc_id;
};

struct RunOptions {
  PipelineConfig config;
  std::string input_path;
  std::optional<Medium> medium;
  std::string output_dir = "runs";
  std::string doc_id;
};

// Flag > file > preset, applied field by field.
RunOptions resolve_run_options(const std::optional<nlohmann::json>& config_file,
                               const CliOverrides& overrides);

int main(int argc, const char* const* argv);

}  // namespace nexussum::cli

#endif  // NEXUSSUM_CLI_HPP_
