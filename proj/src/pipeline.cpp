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

#include "nexussum/pipeline.hpp"

#include <chrono>
#include <fstream>
#include <mutex>
#include <random>

#include "nexussum/errors.hpp"
#include "nexussum/hashing.hpp"

#ifndef NEXUSSUM_DATA_DIR
#define NEXUSSUM_DATA_DIR "data"
#endif

namespace nexussum {
namespace {

using nlohmann::json;

std::string generate_run_id() {
  static std::mutex mu;
  static std::mt19937_64 rng(
      std::random_device{}() ^
      static_cast<std::uint64_t>(
          std::chrono::steady_clock::now().time_since_epoch().count()));
  std::lock_guard<std::mutex> lock(mu);
  static const char* digits = "0123456789abcdef";
  std::uint64_t v = rng();
  std::string id(16, '0');
  for (int i = 15; i >= 0; --i) {
    id[static_cast<std::size_t>(i)] = digits[v & 0xf];
    v >>= 4;
  }
  return id;
}

void reject_unknown_keys(const json& j, std::initializer_list<const char*> allowed,
                         const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool known = false;
    for (const char* key : allowed) known = known || (it.key() == key);
    if (!known) throw ConfigError(where + ": unknown key '" + it.key() + "'");
  }
}

json delta_to_json(std::int64_t delta) {
  if (delta == kUnboundedDelta) return "max";
  return delta;
}

std::int64_t delta_from_json(const json& j) {
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "max" || s == "maximum" || s == "unbounded") return kUnboundedDelta;
    throw ConfigError("delta: expected a positive integer or \"max\", got \"" + s + "\"");
  }
  if (!j.is_number_integer() || j.get<std::int64_t>() < 1) {
    throw ConfigError("delta: expected a positive integer or \"max\"");
  }
  return j.get<std::int64_t>();
}

json backend_to_json(const BackendDescriptor& b) {
  json j;
  j["kind"] = to_string(b.kind);
  switch (b.kind) {
    case BackendKind::kHttp:
      j["endpoint"] = b.endpoint;
      j["model"] = b.model;
      j["credential_env"] = b.credential_env;
      break;
    case BackendKind::kMockTruncate:
      j["ratio"] = b.ratio;
      break;
    case BackendKind::kFixture:
      j["fixture_path"] = b.fixture_path;
      break;
    default:
      break;
  }
  j["max_in_flight"] = b.max_in_flight;
  j["retry"] = {{"max_attempts", b.retry.max_attempts},
                {"base_backoff_ms", b.retry.base_backoff.count()}};
  return j;
}

void backend_apply_json(BackendDescriptor& b, const json& j) {
  reject_unknown_keys(j,
                      {"kind", "endpoint", "model", "credential_env", "ratio",
                       "fixture_path", "max_in_flight", "retry"},
                      "backend");
  if (j.contains("kind")) {
    BackendKind kind = backend_kind_from_string(j.at("kind").get<std::string>());
    if (kind != b.kind) {
      b = BackendDescriptor{};  // new kind starts from clean fields
      b.kind = kind;
    }
  }
  if (j.contains("endpoint")) b.endpoint = j.at("endpoint").get<std::string>();
  if (j.contains("model")) b.model = j.at("model").get<std::string>();
  if (j.contains("credential_env")) {
    b.credential_env = j.at("credential_env").get<std::string>();
  }
  if (j.contains("ratio")) b.ratio = j.at("ratio").get<double>();
  if (j.contains("fixture_path")) {
    b.fixture_path = j.at("fixture_path").get<std::string>();
  }
  if (j.contains("max_in_flight")) {
    b.max_in_flight = j.at("max_in_flight").get<int>();
  }
  if (j.contains("retry")) {
    const json& r = j.at("retry");
    reject_unknown_keys(r, {"max_attempts", "base_backoff_ms"}, "backend.retry");
    if (r.contains("max_attempts")) {
      b.retry.max_attempts = r.at("max_attempts").get<int>();
    }
    if (r.contains("base_backoff_ms")) {
      b.retry.base_backoff =
          std::chrono::milliseconds(r.at("base_backoff_ms").get<std::int64_t>());
    }
  }
}

json params_to_json(const GenerationParams& p) {
  return json{{"temperature", p.temperature},
              {"top_p", p.top_p},
              {"seed", p.seed},
              {"max_output_tokens", p.max_output_tokens}};
}

void params_apply_json(GenerationParams& p, const json& j) {
  reject_unknown_keys(j, {"temperature", "top_p", "seed", "max_output_tokens"},
                      "params");
  if (j.contains("temperature")) p.temperature = j.at("temperature").get<double>();
  if (j.contains("top_p")) p.top_p = j.at("top_p").get<double>();
  if (j.contains("seed")) p.seed = j.at("seed").get<std::int64_t>();
  if (j.contains("max_output_tokens")) {
    p.max_output_tokens = j.at("max_output_tokens").get<std::int64_t>();
  }
}

json record_to_json(const StageRecord& r) {
  return json{{"stage", to_string(r.stage)},
              {"iteration", r.iteration},
              {"chunk_count", r.chunk_count},
              {"per_chunk_outputs", r.per_chunk_outputs},
              {"output_text", r.output_text},
              {"output_word_count", r.output_word_count},
              {"calls_made", r.calls_made},
              {"wall_time_ms", r.wall_time_ms}};
}

StageRecord record_from_json(const json& j) {
  try {
    StageRecord r;
    r.stage = stage_from_string(j.at("stage").get<std::string>());
    r.iteration = j.at("iteration").get<std::int64_t>();
    r.chunk_count = j.at("chunk_count").get<std::int64_t>();
    r.per_chunk_outputs = j.at("per_chunk_outputs").get<std::vector<std::string>>();
    r.output_text = j.at("output_text").get<std::string>();
    r.output_word_count = j.at("output_word_count").get<std::int64_t>();
    r.calls_made = j.at("calls_made").get<std::int64_t>();
    r.wall_time_ms = j.at("wall_time_ms").get<std::int64_t>();
    return r;
  } catch (const json::exception& e) {
    throw SchemaMismatch(std::string("stage record: ") + e.what());
  }
}

// Completed records from an interrupted run, replayed in execution order.
class PriorFeed {
 public:
  explicit PriorFeed(const std::vector<StageRecord>* records)
      : records_(records) {}

  std::optional<StageRecord> take(Stage stage, std::int64_t iteration) {
    if (records_ == nullptr || next_ >= records_->size()) return std::nullopt;
    const StageRecord& front = (*records_)[next_];
    if (front.stage != stage || front.iteration != iteration) {
      throw ConfigDrift("recorded stage sequence does not match the "
                        "configured pipeline (expected " + to_string(stage) +
                        " #" + std::to_string(iteration) + ", found " +
                        to_string(front.stage) + " #" +
                        std::to_string(front.iteration) + ")");
    }
    ++next_;
    return front;
  }

 private:
  const std::vector<StageRecord>* records_;
  std::size_t next_ = 0;
};

class StageTimer {
 public:
  StageTimer() : begin_(std::chrono::steady_clock::now()) {}
  std::int64_t elapsed_ms() const {
    return std::chrono::duration_cast<std::chrono::milliseconds>(
               std::chrono::steady_clock::now() - begin_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point begin_;
};

StageConfig stage_config_for(const PipelineConfig& config, Stage stage) {
  std::vector<std::string> fewshot;
  if (stage == Stage::kSummarizeFewshot) fewshot = config.fewshot_summarizer;
  if (stage == Stage::kCompressFewshot) fewshot = config.fewshot_compressor;
  return make_stage_config(stage, config.resolved_prompt_dir(), std::move(fewshot));
}

// Scene chunks for the summarizer: the input text re-segmented with the
// document's medium and grouped with the same scenes-per-chunk setting.
std::vector<std::string> resegmented_chunks(const std::string& text,
                                            Medium medium,
                                            std::int64_t scenes_per_chunk) {
  NarrativeDocument view;
  view.medium = medium;
  view.raw_text = text;
  view.scenes = segment_scenes(text, medium);
  std::vector<std::string> chunks;
  for (SceneChunk& chunk : chunk_by_scenes(view, scenes_per_chunk)) {
    chunks.push_back(std::move(chunk.text));
  }
  return chunks;
}

struct CompressExtras {
  PriorFeed* priors = nullptr;
  std::function<void(StageRecord&&)> on_record;  // takes ownership
};

CompressionResult compress_impl(const std::string& s0, std::int64_t delta,
                                std::int64_t theta, std::int64_t max_iterations,
                                Backend& backend, const StageConfig& compressor,
                                const GenerationParams& params,
                                bool early_stop_on_stall, int max_in_flight,
                                const CompressExtras& extras) {
  if (is_blank(s0)) throw InputError("compression input is blank");
  if (max_iterations < 1) {
    throw std::invalid_argument("max_iterations must be >= 1");
  }

  CompressionResult result;
  auto finish = [&](std::string text, std::int64_t iterations, HaltReason why) {
    result.final_text = std::move(text);
    result.iterations_used = iterations;
    result.halt_reason = why;
    return result;
  };

  const std::int64_t initial_words = word_count(s0);
  if (theta > 0 && initial_words <= theta) {
    return finish(s0, 0, HaltReason::kInitialBelowTheta);
  }

  std::string prev_text = s0;
  std::int64_t prev_words = initial_words;
  for (std::int64_t i = 1; i <= max_iterations; ++i) {
    std::vector<SentenceChunk> chunks = chunk_by_sentences(prev_text, delta);
    if (chunks.empty()) {
      // nothing left to split; can only happen after a degenerate iterate
      return finish(prev_text, i - 1, HaltReason::kStalled);
    }

    StageRecord record;
    std::optional<StageRecord> reused =
        extras.priors ? extras.priors->take(compressor.stage, i) : std::nullopt;
    if (reused) {
      record = std::move(*reused);
    } else {
      std::vector<std::string> texts;
      texts.reserve(chunks.size());
      for (SentenceChunk& chunk : chunks) texts.push_back(std::move(chunk.text));
      StageTimer timer;
      StageResult out =
          run_stage(texts, compressor, backend, params, max_in_flight);
      record.stage = compressor.stage;
      record.iteration = i;
      record.chunk_count = static_cast<std::int64_t>(texts.size());
      record.per_chunk_outputs = std::move(out.per_chunk_outputs);
      record.output_text = std::move(out.output_text);
      record.output_word_count = word_count(record.output_text);
      record.calls_made = out.calls_made;
      record.wall_time_ms = timer.elapsed_ms();
    }

    const std::int64_t words = record.output_word_count;
    std::string output_text = record.output_text;
    result.records.push_back(record);
    if (extras.on_record) extras.on_record(std::move(record));

    if (words < theta) {
      return finish(std::move(prev_text), i,
                    HaltReason::kBelowThetaPreviousReturned);
    }
    if (early_stop_on_stall && words >= prev_words) {
      return finish(std::move(output_text), i, HaltReason::kStalled);
    }
    prev_text = std::move(output_text);
    prev_words = words;
  }
  return finish(std::move(prev_text), max_iterations, HaltReason::kMaxIterations);
}

RunManifest run_pipeline_impl(const NarrativeDocument& doc,
                              const PipelineConfig& config, Backend& backend,
                              const std::optional<std::filesystem::path>& checkpoint,
                              const std::vector<StageRecord>* prior_records,
                              std::string run_id) {
  config.validate();
  if (doc.scenes.empty()) throw EmptyDocument();

  RunManifest manifest;
  manifest.run_id = run_id.empty() ? generate_run_id() : std::move(run_id);
  manifest.config = config.to_json();
  manifest.config_hash = config.hash();
  manifest.document_id = doc.id;
  manifest.document_hash = document_content_hash(doc);

  auto save = [&]() {
    if (checkpoint) persist_manifest(manifest, *checkpoint);
  };
  auto append = [&](StageRecord&& record) {
    manifest.records.push_back(std::move(record));
    save();
  };

  PriorFeed priors(prior_records);
  std::string current = document_body(doc);

  for (Stage stage : config.stages) {
    const int slot = stage_slot(stage);
    if (slot == 2) {  // compressor: the iterative controller owns its records
      StageConfig compressor = stage_config_for(config, stage);
      CompressExtras extras;
      extras.priors = &priors;
      extras.on_record = [&](StageRecord&& record) { append(std::move(record)); };
      CompressionResult out = compress_impl(
          current, config.delta, config.theta, config.max_iterations, backend,
          compressor, config.params, config.early_stop_on_stall,
          config.backend.max_in_flight, extras);
      manifest.halt_reason = out.halt_reason;
      manifest.iterations_used = out.iterations_used;
      current = std::move(out.final_text);
      continue;
    }

    if (std::optional<StageRecord> reused = priors.take(stage, 0)) {
      current = reused->output_text;
      append(std::move(*reused));
      continue;
    }

    StageRecord record;
    record.stage = stage;
    record.iteration = 0;
    StageTimer timer;
    if (slot == 3) {  // reflection rewrites the whole summary in one call
      StageConfig reflect = stage_config_for(config, stage);
      std::string rewritten =
          run_reflection(current, reflect, backend, config.params);
      record.chunk_count = 1;
      record.per_chunk_outputs = {rewritten};
      record.output_text = std::move(rewritten);
      record.calls_made = 1;
    } else {
      std::vector<std::string> chunks;
      if (slot == 0) {
        for (SceneChunk& chunk : chunk_by_scenes(doc, config.scenes_per_chunk)) {
          chunks.push_back(std::move(chunk.text));
        }
      } else {
        chunks = resegmented_chunks(current, doc.medium, config.scenes_per_chunk);
      }
      StageConfig stage_config = stage_config_for(config, stage);
      StageResult out = run_stage(chunks, stage_config, backend, config.params,
                                  config.backend.max_in_flight);
      record.chunk_count = static_cast<std::int64_t>(chunks.size());
      record.per_chunk_outputs = std::move(out.per_chunk_outputs);
      record.output_text = std::move(out.output_text);
      record.calls_made = out.calls_made;
    }
    record.output_word_count = word_count(record.output_text);
    record.wall_time_ms = timer.elapsed_ms();
    current = record.output_text;
    append(std::move(record));
  }

  manifest.final_summary = std::move(current);
  manifest.total_calls = 0;
  manifest.total_wall_time_ms = 0;
  for (const StageRecord& record : manifest.records) {
    manifest.total_calls += record.calls_made;
    manifest.total_wall_time_ms += record.wall_time_ms;
  }
  manifest.complete = true;
  save();
  return manifest;
}

}  // namespace

void PipelineConfig::validate() const {
  if (scenes_per_chunk < 1) throw ConfigError("scenes_per_chunk must be >= 1");
  if (delta < 1) throw ConfigError("delta must be >= 1");
  if (theta < 0) throw ConfigError("theta must be >= 0");
  if (max_iterations < 1) throw ConfigError("max_iterations must be >= 1");
  if (stages.empty()) throw ConfigError("at least one stage must be selected");
  int prev_slot = -1;
  for (Stage stage : stages) {
    const int slot = stage_slot(stage);
    if (slot <= prev_slot) {
      throw ConfigError("stages must follow pipeline order P -> S -> C -> R "
                        "with at most one variant per slot");
    }
    prev_slot = slot;
  }
  backend.validate();
  if (params.temperature < 0) throw ConfigError("temperature must be >= 0");
  if (params.top_p <= 0 || params.top_p > 1.0) {
    throw ConfigError("top_p must be in (0, 1]");
  }
  if (params.max_output_tokens < 1) {
    throw ConfigError("max_output_tokens must be >= 1");
  }

  const bool has_s_fewshot =
      std::find(stages.begin(), stages.end(), Stage::kSummarizeFewshot) != stages.end();
  const bool has_c_fewshot =
      std::find(stages.begin(), stages.end(), Stage::kCompressFewshot) != stages.end();
  if (has_s_fewshot && fewshot_summarizer.size() != 3) {
    throw ConfigError("S_fewshot requires exactly 3 example outputs "
                      "(fewshot_summarizer)");
  }
  if (!has_s_fewshot && !fewshot_summarizer.empty()) {
    throw ConfigError("fewshot_summarizer set but S_fewshot is not selected");
  }
  if (has_c_fewshot && fewshot_compressor.size() != 6) {
    throw ConfigError("C_fewshot requires exactly 6 strings, (input, output) "
                      "x 3 (fewshot_compressor)");
  }
  if (!has_c_fewshot && !fewshot_compressor.empty()) {
    throw ConfigError("fewshot_compressor set but C_fewshot is not selected");
  }
}

std::filesystem::path default_data_dir() {
  return std::filesystem::path(NEXUSSUM_DATA_DIR);
}

std::filesystem::path PipelineConfig::resolved_prompt_dir() const {
  if (!prompt_dir.empty()) return std::filesystem::path(prompt_dir);
  return default_data_dir() / "prompts";
}

nlohmann::json PipelineConfig::to_json() const {
  json stages_json = json::array();
  for (Stage stage : stages) stages_json.push_back(to_string(stage));
  return json{{"scenes_per_chunk", scenes_per_chunk},
              {"delta", delta_to_json(delta)},
              {"theta", theta},
              {"max_iterations", max_iterations},
              {"stages", stages_json},
              {"early_stop_on_stall", early_stop_on_stall},
              {"prompt_dir", prompt_dir},
              {"backend", backend_to_json(backend)},
              {"params", params_to_json(params)},
              {"fewshot_summarizer", fewshot_summarizer},
              {"fewshot_compressor", fewshot_compressor}};
}

void PipelineConfig::apply_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("pipeline config must be a JSON object");
  reject_unknown_keys(j,
                      {"scenes_per_chunk", "delta", "theta", "max_iterations",
                       "stages", "early_stop_on_stall", "prompt_dir", "backend",
                       "params", "fewshot_summarizer", "fewshot_compressor"},
                      "config");
  try {
    if (j.contains("scenes_per_chunk")) {
      scenes_per_chunk = j.at("scenes_per_chunk").get<std::int64_t>();
    }
    if (j.contains("delta")) delta = delta_from_json(j.at("delta"));
    if (j.contains("theta")) theta = j.at("theta").get<std::int64_t>();
    if (j.contains("max_iterations")) {
      max_iterations = j.at("max_iterations").get<std::int64_t>();
    }
    if (j.contains("stages")) {
      stages.clear();
      for (const json& s : j.at("stages")) {
        stages.push_back(stage_from_string(s.get<std::string>()));
      }
    }
    if (j.contains("early_stop_on_stall")) {
      early_stop_on_stall = j.at("early_stop_on_stall").get<bool>();
    }
    if (j.contains("prompt_dir")) prompt_dir = j.at("prompt_dir").get<std::string>();
    if (j.contains("backend")) backend_apply_json(backend, j.at("backend"));
    if (j.contains("params")) params_apply_json(params, j.at("params"));
    if (j.contains("fewshot_summarizer")) {
      fewshot_summarizer = j.at("fewshot_summarizer").get<std::vector<std::string>>();
    }
    if (j.contains("fewshot_compressor")) {
      fewshot_compressor = j.at("fewshot_compressor").get<std::vector<std::string>>();
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

PipelineConfig PipelineConfig::from_json(const nlohmann::json& j) {
  PipelineConfig config;
  config.apply_json(j);
  return config;
}

std::string PipelineConfig::hash() const { return content_hash(to_json().dump()); }

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names = {"booksum", "moviesum", "mensa",
                                                 "summscreenfd"};
  return names;
}

PipelineConfig preset_config(std::string_view name) {
  PipelineConfig config;  // scenes_per_chunk 8, 10 iterations, default params
  if (name == "booksum") {
    config.delta = 300;
    config.theta = 1300;
  } else if (name == "moviesum" || name == "mensa") {
    config.delta = 300;
    config.theta = 900;
  } else if (name == "summscreenfd") {
    config.delta = kUnboundedDelta;
    config.theta = 0;
    config.stages = {Stage::kPreprocessCot, Stage::kSummarizeFewshot,
                     Stage::kCompressFewshot};
  } else {
    throw ConfigError("unknown preset: " + std::string(name) +
                      " (expected booksum, moviesum, mensa, or summscreenfd)");
  }
  return config;
}

std::string to_string(HaltReason reason) {
  switch (reason) {
    case HaltReason::kBelowThetaPreviousReturned:
      return "below_theta_previous_returned";
    case HaltReason::kInitialBelowTheta: return "initial_below_theta";
    case HaltReason::kStalled: return "stalled";
    case HaltReason::kMaxIterations: return "max_iterations";
  }
  return "max_iterations";
}

HaltReason halt_reason_from_string(std::string_view name) {
  if (name == "below_theta_previous_returned") {
    return HaltReason::kBelowThetaPreviousReturned;
  }
  if (name == "initial_below_theta") return HaltReason::kInitialBelowTheta;
  if (name == "stalled") return HaltReason::kStalled;
  if (name == "max_iterations") return HaltReason::kMaxIterations;
  throw SchemaMismatch("unknown halt reason: " + std::string(name));
}

std::string document_content_hash(const NarrativeDocument& doc) {
  return content_hash(doc.raw_text);
}

nlohmann::json RunManifest::to_json() const {
  json records_json = json::array();
  for (const StageRecord& record : records) {
    records_json.push_back(record_to_json(record));
  }
  return json{{"schema_version", schema_version},
              {"run_id", run_id},
              {"complete", complete},
              {"config", config},
              {"config_hash", config_hash},
              {"document", {{"id", document_id}, {"hash", document_hash}}},
              {"records", records_json},
              {"final_summary", final_summary},
              {"halt_reason", halt_reason ? json(to_string(*halt_reason)) : json()},
              {"iterations_used", iterations_used},
              {"totals", {{"calls", total_calls}, {"wall_time_ms", total_wall_time_ms}}}};
}

RunManifest RunManifest::from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("schema_version")) {
    throw SchemaMismatch("not a run manifest");
  }
  if (j.at("schema_version") != 1) {
    throw SchemaMismatch("unsupported manifest schema_version");
  }
  try {
    RunManifest m;
    m.schema_version = j.at("schema_version").get<std::int64_t>();
    m.run_id = j.at("run_id").get<std::string>();
    m.complete = j.at("complete").get<bool>();
    m.config = j.at("config");
    m.config_hash = j.at("config_hash").get<std::string>();
    m.document_id = j.at("document").at("id").get<std::string>();
    m.document_hash = j.at("document").at("hash").get<std::string>();
    for (const json& record : j.at("records")) {
      m.records.push_back(record_from_json(record));
    }
    m.final_summary = j.at("final_summary").get<std::string>();
    const json& halt = j.at("halt_reason");
    if (!halt.is_null()) {
      m.halt_reason = halt_reason_from_string(halt.get<std::string>());
    }
    m.iterations_used = j.at("iterations_used").get<std::int64_t>();
    m.total_calls = j.at("totals").at("calls").get<std::int64_t>();
    m.total_wall_time_ms = j.at("totals").at("wall_time_ms").get<std::int64_t>();
    return m;
  } catch (const json::exception& e) {
    throw SchemaMismatch(std::string("manifest: ") + e.what());
  }
}

bool equivalent_ignoring_timing(const RunManifest& a, const RunManifest& b) {
  auto strip = [](const RunManifest& m) {
    RunManifest copy = m;
    copy.run_id.clear();
    copy.total_wall_time_ms = 0;
    for (StageRecord& record : copy.records) record.wall_time_ms = 0;
    return copy;
  };
  return strip(a) == strip(b);
}

CompressionResult iterative_compress(const std::string& s0, std::int64_t delta,
                                     std::int64_t theta,
                                     std::int64_t max_iterations,
                                     Backend& backend,
                                     const StageConfig& compressor,
                                     const GenerationParams& params,
                                     bool early_stop_on_stall,
                                     int max_in_flight) {
  return compress_impl(s0, delta, theta, max_iterations, backend, compressor,
                       params, early_stop_on_stall, max_in_flight, {});
}

RunManifest run_pipeline(const NarrativeDocument& doc,
                         const PipelineConfig& config, Backend& backend,
                         const std::optional<std::filesystem::path>& checkpoint_path) {
  return run_pipeline_impl(doc, config, backend, checkpoint_path, nullptr, "");
}

RunManifest run_pipeline(const NarrativeDocument& doc,
                         const PipelineConfig& config) {
  std::unique_ptr<Backend> backend = make_backend(config.backend);
  return run_pipeline_impl(doc, config, *backend, std::nullopt, nullptr, "");
}

void persist_manifest(const RunManifest& manifest,
                      const std::filesystem::path& path) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot write manifest: " + tmp.string());
    out << manifest.to_json().dump(2) << '\n';
    out.flush();
    if (!out) throw InputError("short write persisting manifest: " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

RunManifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open manifest: " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw SchemaMismatch(std::string("manifest parse failure: ") + e.what());
  }
  return RunManifest::from_json(j);
}

RunManifest resume(const RunManifest& partial, const NarrativeDocument& doc,
                   const PipelineConfig& config, Backend& backend,
                   const std::optional<std::filesystem::path>& checkpoint_path) {
  if (partial.schema_version != 1) {
    throw SchemaMismatch("unsupported manifest schema_version");
  }
  if (config.hash() != partial.config_hash) {
    throw ConfigDrift("configuration hash differs from the recorded run");
  }
  if (document_content_hash(doc) != partial.document_hash) {
    throw ConfigDrift("document hash differs from the recorded run");
  }
  if (partial.complete) return partial;
  return run_pipeline_impl(doc, config, backend, checkpoint_path,
                           &partial.records, partial.run_id);
}

FixtureMap record_fixture_chain(const NarrativeDocument& doc,
                                const PipelineConfig& config,
                                const ChainOutputs& outputs) {
  config.validate();
  FixtureMap map;

  auto record_one = [&](const StageConfig& stage_config,
                        const std::vector<std::string>& chunks,
                        const std::string& response) {
    if (chunks.size() != 1) {
      throw ConfigError("record_fixture_chain requires single-chunk stages; "
                        "stage " + to_string(stage_config.stage) + " produced " +
                        std::to_string(chunks.size()) + " chunks");
    }
    map[request_hash(stage_request(stage_config, chunks.front()), config.params)] =
        response;
  };

  std::string current = document_body(doc);
  for (Stage stage : config.stages) {
    const int slot = stage_slot(stage);
    StageConfig stage_config = stage_config_for(config, stage);
    if (stage_config.prompt.round_count() != 1) {
      throw ConfigError("record_fixture_chain cannot record multi-round stages");
    }
    if (slot == 0) {
      if (!outputs.preprocessed) {
        throw ConfigError("chain is missing the preprocessed output");
      }
      std::vector<std::string> chunks;
      for (SceneChunk& chunk : chunk_by_scenes(doc, config.scenes_per_chunk)) {
        chunks.push_back(std::move(chunk.text));
      }
      record_one(stage_config, chunks, *outputs.preprocessed);
      current = *outputs.preprocessed;
    } else if (slot == 1) {
      if (!outputs.summary) throw ConfigError("chain is missing the summary output");
      record_one(stage_config,
                 resegmented_chunks(current, doc.medium, config.scenes_per_chunk),
                 *outputs.summary);
      current = *outputs.summary;
    } else if (slot == 2) {
      for (const std::string& compressed : outputs.compressions) {
        std::vector<SentenceChunk> chunks = chunk_by_sentences(current, config.delta);
        std::vector<std::string> texts;
        for (SentenceChunk& chunk : chunks) texts.push_back(std::move(chunk.text));
        record_one(stage_config, texts, compressed);
        current = compressed;
      }
    } else {
      if (!outputs.reflected) throw ConfigError("chain is missing the reflected output");
      record_one(stage_config, {current}, *outputs.reflected);
      current = *outputs.reflected;
    }
  }
  return map;
}

}  // namespace nexussum
