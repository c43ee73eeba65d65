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
// End-to-end orchestration: preprocess -> summarize -> iteratively compress
// (-> reflect), with target-length halting, a hard iteration cap, stage
// ablation by subset selection, and a persisted run manifest that supports
// resuming an interrupted run without re-issuing completed backend calls.

#ifndef NEXUSSUM_PIPELINE_HPP_
#define NEXUSSUM_PIPELINE_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "nexussum/agents.hpp"
#include "nexussum/backend.hpp"
#include "nexussum/chunker.hpp"
#include "nexussum/corpus.hpp"

namespace nexussum {

struct PipelineConfig {
  std::int64_t scenes_per_chunk = 8;
  std::int64_t delta = kUnboundedDelta;  // sentence-chunk word budget
  std::int64_t theta = 0;                // target word count; 0 = no lower bound
  std::int64_t max_iterations = 10;
  std::vector<Stage> stages = {Stage::kPreprocess, Stage::kSummarize,
                               Stage::kCompress};
  BackendDescriptor backend;
  GenerationParams params;
  bool early_stop_on_stall = true;
  std::string prompt_dir;  // empty: <data dir>/prompts
  std::vector<std::string> fewshot_summarizer;
  std::vector<std::string> fewshot_compressor;

  void validate() const;
  std::filesystem::path resolved_prompt_dir() const;
  nlohmann::json to_json() const;
  static PipelineConfig from_json(const nlohmann::json& j);
  // Overlays the keys present in `j` onto this config; unknown keys are
  // rejected. Assigning a new backend kind resets kind-specific fields.
  void apply_json(const nlohmann::json& j);
  std::string hash() const;

  bool operator==(const PipelineConfig&) const = default;
};

// Directory holding the shipped prompt templates and sample texts.
std::filesystem::path default_data_dir();

// Per-benchmark presets: booksum, moviesum, mensa, summscreenfd.
PipelineConfig preset_config(std::string_view name);
const std::vector<std::string>& preset_names();

enum class HaltReason {
  kBelowThetaPreviousReturned,
  kInitialBelowTheta,
  kStalled,
  kMaxIterations,
};

std::string to_string(HaltReason reason);
HaltReason halt_reason_from_string(std::string_view name);

struct StageRecord {
  Stage stage = Stage::kPreprocess;
  std::int64_t iteration = 0;  // 0 for P/S/R; 1-based compressor iterations
  std::int64_t chunk_count = 0;
  std::vector<std::string> per_chunk_outputs;
  std::string output_text;
  std::int64_t output_word_count = 0;
  std::int64_t calls_made = 0;
  std::int64_t wall_time_ms = 0;

  bool operator==(const StageRecord&) const = default;
};

struct RunManifest {
  std::int64_t schema_version = 1;
  std::string run_id;
  bool complete = false;
  nlohmann::json config = nlohmann::json::object();
  std::string config_hash;
  std::string document_id;
  std::string document_hash;
  std::vector<StageRecord> records;
  std::string final_summary;
  std::optional<HaltReason> halt_reason;  // only set when a compressor ran
  std::int64_t iterations_used = 0;
  std::int64_t total_calls = 0;
  std::int64_t total_wall_time_ms = 0;

  nlohmann::json to_json() const;
  static RunManifest from_json(const nlohmann::json& j);

  bool operator==(const RunManifest&) const = default;
};

// Field-for-field equality except run_id and the wall-time fields.
bool equivalent_ignoring_timing(const RunManifest& a, const RunManifest& b);

std::string document_content_hash(const NarrativeDocument& doc);

struct CompressionResult {
  std::string final_text;
  std::int64_t iterations_used = 0;
  HaltReason halt_reason = HaltReason::kMaxIterations;
  std::vector<StageRecord> records;
};

// The iterative compression controller. Starting from s0:
//   - if theta > 0 and s0 is already at or below theta, s0 is returned as-is;
//   - otherwise each iteration re-chunks the previous text by sentences and
//     compresses chunk by chunk. An iterate below theta discards itself and
//     returns the previous text; a non-shrinking iterate halts as stalled
//     (when early_stop_on_stall); the loop is capped at max_iterations.
CompressionResult iterative_compress(const std::string& s0, std::int64_t delta,
                                     std::int64_t theta,
                                     std::int64_t max_iterations,
                                     Backend& backend,
                                     const StageConfig& compressor,
                                     const GenerationParams& params,
                                     bool early_stop_on_stall = true,
                                     int max_in_flight = 1);

// Runs the selected stages in order. When checkpoint_path is set, the
// manifest is atomically rewritten after every stage record.
RunManifest run_pipeline(const NarrativeDocument& doc,
                         const PipelineConfig& config, Backend& backend,
                         const std::optional<std::filesystem::path>&
                             checkpoint_path = std::nullopt);

// Convenience overload constructing the backend from config.backend.
RunManifest run_pipeline(const NarrativeDocument& doc,
                         const PipelineConfig& config);

void persist_manifest(const RunManifest& manifest,
                      const std::filesystem::path& path);
RunManifest load_manifest(const std::filesystem::path& path);

// Continues a run that halted mid-way. The config and document must hash
// identically to the recorded ones; completed records are reused without
// re-invoking the backend. The run_id is preserved.
RunManifest resume(const RunManifest& partial, const NarrativeDocument& doc,
                   const PipelineConfig& config, Backend& backend,
                   const std::optional<std::filesystem::path>& checkpoint_path =
                       std::nullopt);

// Builds a fixture map that makes `run_pipeline` replay a recorded chain of
// stage outputs. Every selected stage must produce exactly one chunk per
// pass, and multi-round stages cannot be recorded this way.
struct ChainOutputs {
  std::optional<std::string> preprocessed;
  std::optional<std::string> summary;
  std::vector<std::string> compressions;  // iteration 1..n outputs
  std::optional<std::string> reflected;
};

FixtureMap record_fixture_chain(const NarrativeDocument& doc,
                                const PipelineConfig& config,
                                const ChainOutputs& outputs);

}  // namespace nexussum

#endif  // NEXUSSUM_PIPELINE_HPP_
