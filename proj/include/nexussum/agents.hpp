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
// Stage executors. A stage maps a list of chunk texts through the backend
// (one completion per chunk; two for the chain-of-thought preprocessor) and
// concatenates the outputs in chunk order.

#ifndef NEXUSSUM_AGENTS_HPP_
#define NEXUSSUM_AGENTS_HPP_

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "nexussum/backend.hpp"
#include "nexussum/prompt.hpp"

namespace nexussum {

enum class Stage {
  kPreprocess,         // P
  kPreprocessCot,      // P_cot
  kSummarize,          // S
  kSummarizeFewshot,   // S_fewshot
  kCompress,           // C
  kCompressFewshot,    // C_fewshot
  kReflect,            // R
};

std::string to_string(Stage stage);
Stage stage_from_string(std::string_view name);
bool is_fewshot(Stage stage);

// Pipeline slot (P=0, S=1, C=2, R=3) regardless of prompt variant.
int stage_slot(Stage stage);

// Template file shipped for each stage, e.g. "preprocessor.tmpl".
std::string stage_template_filename(Stage stage);

struct StageConfig {
  Stage stage = Stage::kPreprocess;
  PromptTemplate prompt;
  // Few-shot variants only. Summarizer: exactly 3 example outputs.
  // Compressor: exactly 6 strings, (input, output) x 3, in order.
  std::vector<std::string> fewshot_examples;

  void validate() const;
};

// Loads the stage's template from `prompt_dir` and validates the few-shot
// example count against the template's slots.
StageConfig make_stage_config(Stage stage,
                              const std::filesystem::path& prompt_dir,
                              std::vector<std::string> fewshot_examples = {});

struct StageResult {
  std::string output_text;  // per-chunk outputs joined with "\n\n"
  std::vector<std::string> per_chunk_outputs;
  std::int64_t calls_made = 0;
};

// The exact request turns the executor issues for one chunk of a
// single-round stage. Fixture recording keys off this.
std::vector<Message> stage_request(const StageConfig& config,
                                   const std::string& chunk);

// Runs one backend completion per chunk (two rounds per chunk for the CoT
// preprocessor), fanning out up to max_in_flight concurrent calls and
// reducing strictly in chunk order. A failed chunk fails the whole stage.
StageResult run_stage(const std::vector<std::string>& chunks,
                      const StageConfig& config, Backend& backend,
                      const GenerationParams& params, int max_in_flight = 1);

// Single completion over the whole summary with the reflection template.
std::string run_reflection(std::string_view summary, const StageConfig& config,
                           Backend& backend, const GenerationParams& params);

}  // namespace nexussum

#endif  // NEXUSSUM_AGENTS_HPP_
