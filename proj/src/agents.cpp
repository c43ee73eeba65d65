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

#include "nexussum/agents.hpp"

#include <atomic>
#include <exception>
#include <thread>

#include "nexussum/corpus.hpp"
#include "nexussum/errors.hpp"

namespace nexussum {
namespace {

// Binds the chunk text plus the stage's few-shot examples.
Bindings base_bindings(const StageConfig& config, const std::string& chunk) {
  Bindings bindings;
  bindings["input"] = chunk;
  if (config.stage == Stage::kSummarizeFewshot) {
    for (std::size_t i = 0; i < 3; ++i) {
      bindings["example_output_" + std::to_string(i + 1)] =
          config.fewshot_examples[i];
    }
  } else if (config.stage == Stage::kCompressFewshot) {
    for (std::size_t i = 0; i < 3; ++i) {
      bindings["example_input_" + std::to_string(i + 1)] =
          config.fewshot_examples[2 * i];
      bindings["example_output_" + std::to_string(i + 1)] =
          config.fewshot_examples[2 * i + 1];
    }
  }
  return bindings;
}

std::vector<Message> round_request(const StageConfig& config, std::size_t round,
                                   const Bindings& accumulated) {
  Bindings round_bindings;
  for (const std::string& name : config.prompt.round_placeholders(round)) {
    auto it = accumulated.find(name);
    if (it == accumulated.end()) throw MissingPlaceholder(name);
    round_bindings[name] = it->second;
  }
  return render_round(config.prompt, round, round_bindings);
}

// One chunk through the stage. The CoT preprocessor runs two rounds: the
// strategy round, then the transform round consuming the strategy text.
std::string complete_chunk(const StageConfig& config, const std::string& chunk,
                           Backend& backend, const GenerationParams& params,
                           std::int64_t* calls) {
  Bindings bindings = base_bindings(config, chunk);
  std::string output;
  for (std::size_t round = 0; round < config.prompt.round_count(); ++round) {
    Prompt prompt;
    prompt.turns = round_request(config, round, bindings);
    prompt.payload = chunk;
    output = backend.complete(prompt, params);
    ++*calls;
    bindings["strategy"] = output;  // consumed by the next round, if any
  }
  return output;
}

}  // namespace

std::vector<Message> stage_request(const StageConfig& config,
                                   const std::string& chunk) {
  if (config.prompt.round_count() != 1) {
    throw ConfigError("stage_request only applies to single-round stages");
  }
  return round_request(config, 0, base_bindings(config, chunk));
}

std::string to_string(Stage stage) {
  switch (stage) {
    case Stage::kPreprocess: return "P";
    case Stage::kPreprocessCot: return "P_cot";
    case Stage::kSummarize: return "S";
    case Stage::kSummarizeFewshot: return "S_fewshot";
    case Stage::kCompress: return "C";
    case Stage::kCompressFewshot: return "C_fewshot";
    case Stage::kReflect: return "R";
  }
  return "P";
}

Stage stage_from_string(std::string_view name) {
  if (name == "P") return Stage::kPreprocess;
  if (name == "P_cot") return Stage::kPreprocessCot;
  if (name == "S") return Stage::kSummarize;
  if (name == "S_fewshot") return Stage::kSummarizeFewshot;
  if (name == "C") return Stage::kCompress;
  if (name == "C_fewshot") return Stage::kCompressFewshot;
  if (name == "R") return Stage::kReflect;
  throw ConfigError("unknown stage: " + std::string(name));
}

bool is_fewshot(Stage stage) {
  return stage == Stage::kSummarizeFewshot || stage == Stage::kCompressFewshot;
}

int stage_slot(Stage stage) {
  switch (stage) {
    case Stage::kPreprocess:
    case Stage::kPreprocessCot: return 0;
    case Stage::kSummarize:
    case Stage::kSummarizeFewshot: return 1;
    case Stage::kCompress:
    case Stage::kCompressFewshot: return 2;
    case Stage::kReflect: return 3;
  }
  return 0;
}

std::string stage_template_filename(Stage stage) {
  switch (stage) {
    case Stage::kPreprocess: return "preprocessor.tmpl";
    case Stage::kPreprocessCot: return "preprocessor_cot.tmpl";
    case Stage::kSummarize: return "summarizer.tmpl";
    case Stage::kSummarizeFewshot: return "summarizer_fewshot.tmpl";
    case Stage::kCompress: return "compressor.tmpl";
    case Stage::kCompressFewshot: return "compressor_fewshot.tmpl";
    case Stage::kReflect: return "reflection.tmpl";
  }
  return "preprocessor.tmpl";
}

void StageConfig::validate() const {
  if (is_fewshot(stage)) {
    const std::size_t expected =
        (stage == Stage::kSummarizeFewshot) ? 3u : 6u;
    if (fewshot_examples.size() != expected) {
      throw ConfigError("stage " + to_string(stage) + " needs exactly " +
                        std::to_string(expected) + " few-shot strings, got " +
                        std::to_string(fewshot_examples.size()));
    }
  } else if (!fewshot_examples.empty()) {
    throw ConfigError("stage " + to_string(stage) +
                      " does not take few-shot examples");
  }
  if (stage == Stage::kPreprocessCot) {
    if (prompt.round_count() != 2) {
      throw ConfigError("chain-of-thought template must declare two rounds");
    }
  } else if (prompt.round_count() != 1) {
    throw ConfigError("stage " + to_string(stage) +
                      " template must declare a single round");
  }
}

StageConfig make_stage_config(Stage stage,
                              const std::filesystem::path& prompt_dir,
                              std::vector<std::string> fewshot_examples) {
  StageConfig config;
  config.stage = stage;
  config.prompt = PromptTemplate::load(prompt_dir / stage_template_filename(stage));
  config.fewshot_examples = std::move(fewshot_examples);
  config.validate();
  return config;
}

StageResult run_stage(const std::vector<std::string>& chunks,
                      const StageConfig& config, Backend& backend,
                      const GenerationParams& params, int max_in_flight) {
  if (chunks.empty()) {
    throw InputError("stage " + to_string(config.stage) + ": no chunks");
  }
  config.validate();
  if (max_in_flight < 1) max_in_flight = 1;

  const std::size_t n = chunks.size();
  std::vector<std::string> outputs(n);
  std::vector<std::int64_t> calls(n, 0);
  std::vector<std::exception_ptr> failures(n);

  const std::size_t workers =
      std::min<std::size_t>(static_cast<std::size_t>(max_in_flight), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) {
      try {
        outputs[i] = complete_chunk(config, chunks[i], backend, params, &calls[i]);
      } catch (...) {
        failures[i] = std::current_exception();
        break;
      }
    }
  } else {
    std::atomic<std::size_t> next{0};
    std::atomic<bool> aborted{false};
    auto worker = [&]() {
      while (!aborted.load()) {
        const std::size_t i = next.fetch_add(1);
        if (i >= n) return;
        try {
          outputs[i] = complete_chunk(config, chunks[i], backend, params, &calls[i]);
        } catch (...) {
          failures[i] = std::current_exception();
          aborted.store(true);
        }
      }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }

  // A failed chunk fails the stage: report the lowest failing index.
  for (std::size_t i = 0; i < n; ++i) {
    if (!failures[i]) continue;
    try {
      std::rethrow_exception(failures[i]);
    } catch (const Error& e) {
      throw Error(e.category(), "stage " + to_string(config.stage) +
                                    ", chunk " + std::to_string(i) + ": " +
                                    e.what());
    } catch (const std::exception& e) {
      throw Error(ErrorCategory::kInternal,
                  "stage " + to_string(config.stage) + ", chunk " +
                      std::to_string(i) + ": " + e.what());
    }
  }

  StageResult result;
  result.per_chunk_outputs = std::move(outputs);
  for (std::size_t i = 0; i < n; ++i) {
    if (i > 0) result.output_text += "\n\n";
    result.output_text += result.per_chunk_outputs[i];
    result.calls_made += calls[i];
  }
  return result;
}

std::string run_reflection(std::string_view summary, const StageConfig& config,
                           Backend& backend, const GenerationParams& params) {
  if (is_blank(summary)) {
    throw InputError("reflection input summary is blank");
  }
  std::int64_t calls = 0;
  return complete_chunk(config, std::string(summary), backend, params, &calls);
}

}  // namespace nexussum
