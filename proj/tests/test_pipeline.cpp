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

#include <doctest.h>

#include <atomic>
#include <random>
#include <sstream>

#include "nexussum/errors.hpp"
#include "nexussum/pipeline.hpp"
#include "support/oracle.hpp"
#include "support/paths.hpp"

using namespace nexussum;

namespace {

std::string make_words(const std::string& tag, int n) {
  std::string out;
  for (int i = 0; i < n; ++i) {
    if (i) out += ' ';
    out += tag + std::to_string(i);
  }
  return out;
}

// n scenes of exactly words_per_scene words (heading words included).
NarrativeDocument make_scene_doc(int scenes, int words_per_scene) {
  std::string raw;
  for (int s = 0; s < scenes; ++s) {
    raw += "INT. SCENE " + std::to_string(s) + "\n";  // 3 words
    raw += make_words("s" + std::to_string(s) + "w", words_per_scene - 3);
    raw += "\n";
  }
  return ingest(raw, Medium::kScreenplay, "grid");
}

StageConfig compressor_config() {
  return make_stage_config(Stage::kCompress, testsupport::prompts_dir());
}

PipelineConfig base_config() {
  PipelineConfig config;
  config.prompt_dir = testsupport::prompts_dir().string();
  return config;
}

class CountingBackend : public Backend {
 public:
  explicit CountingBackend(Backend& inner) : inner_(inner) {}
  std::string complete(const Prompt& prompt,
                       const GenerationParams& params) override {
    ++calls_;
    return inner_.complete(prompt, params);
  }
  int calls() const { return calls_.load(); }

 private:
  Backend& inner_;
  std::atomic<int> calls_{0};
};

std::vector<std::string> word_sequence(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string w;
  while (in >> w) out.push_back(w);
  return out;
}

struct SampleTexts {
  std::string script;
  std::string preprocessed;
  std::string summary;
  std::string compressed;
};

SampleTexts load_samples() {
  SampleTexts t;
  t.script = testsupport::read_file(testsupport::samples_dir() /
                                    "black_panther_script.txt");
  t.preprocessed = testsupport::read_file(testsupport::samples_dir() /
                                          "black_panther_preprocessed.txt");
  t.summary = testsupport::read_file(testsupport::samples_dir() /
                                     "black_panther_summary.txt");
  t.compressed = testsupport::read_file(testsupport::samples_dir() /
                                        "black_panther_compressed.txt");
  return t;
}

// Pipeline config for replaying the shipped sample chain: no lower bound,
// unbounded chunking, so the recorded identity step stalls the loop.
PipelineConfig sample_chain_config(const std::string& fixture_path) {
  PipelineConfig config = base_config();
  config.stages = {Stage::kPreprocess, Stage::kSummarize, Stage::kCompress};
  config.delta = kUnboundedDelta;
  config.theta = 0;
  config.backend.kind = BackendKind::kFixture;
  config.backend.fixture_path = fixture_path;
  return config;
}

ChainOutputs sample_chain_outputs(const SampleTexts& t) {
  ChainOutputs outputs;
  outputs.preprocessed = t.preprocessed;
  outputs.summary = t.summary;
  outputs.compressions = {t.compressed, t.compressed};  // second pass stalls
  return outputs;
}

}  // namespace

TEST_SUITE("pipeline") {

TEST_CASE("iterative_compress: halving trace returns the previous iterate") {
  MockTruncateBackend backend(0.5);
  const std::string s0 = make_words("w", 1000);
  CompressionResult result = iterative_compress(
      s0, kUnboundedDelta, 300, 10, backend, compressor_config(), {});
  CHECK(word_count(result.final_text) == 500);
  CHECK(result.iterations_used == 2);
  CHECK(result.halt_reason == HaltReason::kBelowThetaPreviousReturned);
  REQUIRE(result.records.size() == 2);
  CHECK(result.records[0].output_word_count == 500);
  CHECK(result.records[1].output_word_count == 250);  // the discarded iterate
}

TEST_CASE("iterative_compress: input already below theta returns unchanged") {
  MockIdentityBackend inner;
  CountingBackend backend(inner);
  const std::string s0 = make_words("w", 200);
  CompressionResult result = iterative_compress(
      s0, kUnboundedDelta, 300, 10, backend, compressor_config(), {});
  CHECK(result.final_text == s0);
  CHECK(result.iterations_used == 0);
  CHECK(result.halt_reason == HaltReason::kInitialBelowTheta);
  CHECK(backend.calls() == 0);
  CHECK(result.records.empty());
}

TEST_CASE("iterative_compress: identity stalls at the first iteration") {
  MockIdentityBackend backend;
  const std::string s0 = make_words("w", 1000);
  CompressionResult result = iterative_compress(
      s0, kUnboundedDelta, 300, 10, backend, compressor_config(), {});
  CHECK(word_count(result.final_text) == 1000);
  CHECK(result.iterations_used == 1);
  CHECK(result.halt_reason == HaltReason::kStalled);
}

TEST_CASE("iterative_compress: stall disabled burns all iterations") {
  MockIdentityBackend backend;
  const std::string s0 = make_words("w", 100);
  CompressionResult result =
      iterative_compress(s0, kUnboundedDelta, 0, 4, backend,
                         compressor_config(), {}, /*early_stop_on_stall=*/false);
  CHECK(result.iterations_used == 4);
  CHECK(result.halt_reason == HaltReason::kMaxIterations);
}

TEST_CASE("iterative_compress: randomized halting matches the simulator") {
  std::mt19937 rng(41);
  std::uniform_int_distribution<int> words_dist(1, 1500);
  std::uniform_int_distribution<int> theta_dist(0, 800);
  std::uniform_real_distribution<double> ratio_dist(0.1, 1.0);
  std::uniform_int_distribution<int> delta_pick(0, 2);
  for (int round = 0; round < 60; ++round) {
    const int w = words_dist(rng);
    const std::int64_t theta = theta_dist(rng);
    const double ratio = ratio_dist(rng);
    const std::int64_t delta =
        delta_pick(rng) == 0 ? kUnboundedDelta
                             : std::uniform_int_distribution<int>(5, 400)(rng);
    std::string s0;
    for (int i = 0; i < w; ++i) {
      if (i) s0 += ' ';
      s0 += "Wa" + std::to_string(i) + ".";
    }
    MockTruncateBackend backend(ratio);
    CompressionResult got = iterative_compress(s0, delta, theta, 10, backend,
                                               compressor_config(), {});
    oracle::SimResult want =
        oracle::simulate_compress(s0, delta, theta, 10, ratio, true);
    CHECK(word_count(got.final_text) == want.final_words);
    CHECK(got.iterations_used == want.iterations);
    CHECK(to_string(got.halt_reason) == want.halt);
    CHECK(got.iterations_used <= 10);
  }
}

TEST_CASE("theta-exceedance contract on the below-theta halt") {
  std::mt19937 rng(43);
  std::uniform_int_distribution<int> words_dist(50, 800);
  std::uniform_int_distribution<int> theta_dist(10, 400);
  std::uniform_real_distribution<double> ratio_dist(0.2, 0.9);
  for (int round = 0; round < 40; ++round) {
    const std::string s0 = make_words("w", words_dist(rng));
    const std::int64_t theta = theta_dist(rng);
    MockTruncateBackend backend(ratio_dist(rng));
    CompressionResult result = iterative_compress(
        s0, kUnboundedDelta, theta, 10, backend, compressor_config(), {});
    if (result.halt_reason == HaltReason::kBelowThetaPreviousReturned) {
      CHECK(word_count(result.final_text) >= theta);
      CHECK(result.records.back().output_word_count < theta);
    }
  }
}

TEST_CASE("run_pipeline: identity P+S preserves the word sequence") {
  NarrativeDocument doc = make_scene_doc(16, 24);
  PipelineConfig config = base_config();
  config.stages = {Stage::kPreprocess, Stage::kSummarize};
  MockIdentityBackend inner;
  CountingBackend backend(inner);
  RunManifest manifest = run_pipeline(doc, config, backend);

  CHECK(word_sequence(manifest.final_summary) == word_sequence(doc.raw_text));
  CHECK(manifest.total_calls == 2 + 2);  // k chunks + j chunks
  REQUIRE(manifest.records.size() == 2);
  CHECK(manifest.records[0].stage == Stage::kPreprocess);
  CHECK(manifest.records[0].chunk_count == 2);
  CHECK(manifest.records[1].stage == Stage::kSummarize);
  CHECK(manifest.records[1].chunk_count == 2);
  CHECK_FALSE(manifest.halt_reason.has_value());
  CHECK(manifest.complete);
}

TEST_CASE("run_pipeline: ablation equals manual stage composition") {
  NarrativeDocument doc = make_scene_doc(12, 30);
  PipelineConfig config = base_config();
  config.stages = {Stage::kPreprocess, Stage::kSummarize};
  MockTruncateBackend backend(0.7);
  RunManifest manifest = run_pipeline(doc, config, backend);

  // by hand: P over scene chunks, then S over the re-segmented output
  std::vector<std::string> p_chunks;
  for (SceneChunk& chunk : chunk_by_scenes(doc, 8)) {
    p_chunks.push_back(std::move(chunk.text));
  }
  StageConfig p_cfg = make_stage_config(Stage::kPreprocess, testsupport::prompts_dir());
  StageResult p_out = run_stage(p_chunks, p_cfg, backend, config.params);

  NarrativeDocument view;
  view.medium = doc.medium;
  view.raw_text = p_out.output_text;
  view.scenes = segment_scenes(p_out.output_text, doc.medium);
  std::vector<std::string> s_chunks;
  for (SceneChunk& chunk : chunk_by_scenes(view, 8)) {
    s_chunks.push_back(std::move(chunk.text));
  }
  StageConfig s_cfg = make_stage_config(Stage::kSummarize, testsupport::prompts_dir());
  StageResult s_out = run_stage(s_chunks, s_cfg, backend, config.params);

  CHECK(manifest.final_summary == s_out.output_text);
  CHECK(manifest.records[0].output_text == p_out.output_text);
}

TEST_CASE("run_pipeline: full trace matches the arithmetic replay oracle") {
  NarrativeDocument doc = make_scene_doc(16, 200);  // 3200 words
  REQUIRE(doc.total_word_count() == 3200);
  PipelineConfig config = base_config();
  config.stages = {Stage::kPreprocess, Stage::kSummarize, Stage::kCompress};
  config.delta = 200;
  config.theta = 400;
  MockTruncateBackend backend(0.5);
  RunManifest manifest = run_pipeline(doc, config, backend);

  oracle::PipelineSim sim;
  sim.scenes_per_chunk = 8;
  sim.delta = 200;
  sim.theta = 400;
  sim.max_iterations = 10;
  sim.ratio = 0.5;
  oracle::PipelineSimResult want = oracle::simulate_psc(doc.raw_text, sim);

  REQUIRE(manifest.records.size() >= 2);
  CHECK(manifest.records[0].output_word_count == want.p_words);
  CHECK(manifest.records[0].calls_made == want.p_calls);
  CHECK(manifest.records[1].output_word_count == want.s_words);
  CHECK(manifest.records[1].calls_made == want.s_calls);
  CHECK(word_count(manifest.final_summary) == want.compression.final_words);
  CHECK(manifest.iterations_used == want.compression.iterations);
  REQUIRE(manifest.halt_reason.has_value());
  CHECK(to_string(*manifest.halt_reason) == want.compression.halt);
}

TEST_CASE("run_pipeline: compressor-only ablation runs over the body") {
  NarrativeDocument doc = make_scene_doc(4, 50);
  PipelineConfig config = base_config();
  config.stages = {Stage::kCompress};
  config.delta = kUnboundedDelta;
  config.theta = 60;
  MockTruncateBackend backend(0.5);
  RunManifest manifest = run_pipeline(doc, config, backend);
  // 200 -> 100 -> 50(<60, discarded): final is the 100-word iterate
  CHECK(word_count(manifest.final_summary) == 100);
  CHECK(manifest.iterations_used == 2);
}

TEST_CASE("run_pipeline: reflection stage rewrites the final summary") {
  NarrativeDocument doc = make_scene_doc(2, 40);
  PipelineConfig config = base_config();
  config.stages = {Stage::kSummarize, Stage::kReflect};
  MockTruncateBackend backend(0.5);
  RunManifest manifest = run_pipeline(doc, config, backend);
  REQUIRE(manifest.records.size() == 2);
  CHECK(manifest.records[1].stage == Stage::kReflect);
  CHECK(manifest.records[1].calls_made == 1);
  CHECK(word_count(manifest.final_summary) ==
        (word_count(manifest.records[0].output_text) + 1) / 2);
}

TEST_CASE("pipeline config validates stage order") {
  PipelineConfig config = base_config();
  config.stages = {Stage::kSummarize, Stage::kPreprocess};
  CHECK_THROWS_AS(config.validate(), ConfigError);
  config.stages = {Stage::kPreprocess, Stage::kPreprocessCot};
  CHECK_THROWS_AS(config.validate(), ConfigError);
  config.stages = {Stage::kPreprocessCot, Stage::kSummarize, Stage::kCompress,
                   Stage::kReflect};
  CHECK_NOTHROW(config.validate());
  config.stages = {};
  CHECK_THROWS_AS(config.validate(), ConfigError);
}

TEST_CASE("presets carry the shipped delta/theta values") {
  CHECK(preset_config("booksum").delta == 300);
  CHECK(preset_config("booksum").theta == 1300);
  CHECK(preset_config("moviesum").delta == 300);
  CHECK(preset_config("moviesum").theta == 900);
  CHECK(preset_config("mensa").delta == 300);
  CHECK(preset_config("mensa").theta == 900);
  CHECK(preset_config("summscreenfd").delta == kUnboundedDelta);
  CHECK(preset_config("summscreenfd").theta == 0);
  CHECK(preset_config("summscreenfd").stages ==
        std::vector<Stage>{Stage::kPreprocessCot, Stage::kSummarizeFewshot,
                           Stage::kCompressFewshot});
  CHECK(preset_config("mensa").scenes_per_chunk == 8);
  CHECK(preset_config("mensa").max_iterations == 10);
  CHECK(preset_config("mensa").params.temperature == 0.3);
  CHECK(preset_config("mensa").params.top_p == 1.0);
  CHECK(preset_config("mensa").params.seed == 42);
  CHECK_THROWS_AS(preset_config("nope"), ConfigError);
}

TEST_CASE("config JSON round-trips, including unbounded delta") {
  PipelineConfig config = preset_config("summscreenfd");
  config.fewshot_summarizer = {"a", "b", "c"};
  config.fewshot_compressor = {"i1", "o1", "i2", "o2", "i3", "o3"};
  PipelineConfig back = PipelineConfig::from_json(config.to_json());
  CHECK(back == config);
  CHECK(config.to_json()["delta"] == "max");

  CHECK_THROWS_AS(PipelineConfig::from_json({{"bogus_key", 1}}), ConfigError);
  CHECK_THROWS_AS(PipelineConfig::from_json({{"delta", "huge"}}), ConfigError);
  CHECK(PipelineConfig::from_json({{"delta", 300}}).delta == 300);
}

TEST_CASE("manifest persistence round-trips field-for-field") {
  NarrativeDocument doc = make_scene_doc(9, 25);
  PipelineConfig config = base_config();
  config.stages = {Stage::kPreprocess, Stage::kSummarize, Stage::kCompress};
  config.theta = 30;
  config.delta = 40;
  MockTruncateBackend backend(0.6);
  RunManifest manifest = run_pipeline(doc, config, backend);

  testsupport::TempDir tmp;
  const auto path = tmp.path() / "manifest.json";
  persist_manifest(manifest, path);
  RunManifest loaded = load_manifest(path);
  CHECK(loaded == manifest);

  testsupport::write_file(tmp.path() / "junk.json", "{\"schema_version\": 9}");
  CHECK_THROWS_AS(load_manifest(tmp.path() / "junk.json"), SchemaMismatch);
  CHECK_THROWS_AS(load_manifest(tmp.path() / "absent.json"), InputError);
}

TEST_CASE("fixture-backed runs are reproducible modulo run_id and timing") {
  SampleTexts t = load_samples();
  NarrativeDocument doc = ingest(t.script, Medium::kScreenplay, "bp");
  testsupport::TempDir tmp;
  const auto fixture_path = tmp.path() / "fixture.json";
  PipelineConfig config = sample_chain_config(fixture_path.string());
  save_fixture_map(record_fixture_chain(doc, config, sample_chain_outputs(t)),
                   fixture_path);

  RunManifest first = run_pipeline(doc, config);
  RunManifest second = run_pipeline(doc, config);
  CHECK(equivalent_ignoring_timing(first, second));
  CHECK(first.run_id != second.run_id);
}

TEST_CASE("sample chain replays byte-exactly through the pipeline") {
  SampleTexts t = load_samples();
  NarrativeDocument doc = ingest(t.script, Medium::kScreenplay, "bp");
  testsupport::TempDir tmp;
  const auto fixture_path = tmp.path() / "fixture.json";
  PipelineConfig config = sample_chain_config(fixture_path.string());
  save_fixture_map(record_fixture_chain(doc, config, sample_chain_outputs(t)),
                   fixture_path);

  RunManifest manifest = run_pipeline(doc, config);
  REQUIRE(manifest.records.size() == 4);
  CHECK(manifest.records[0].output_text == t.preprocessed);
  CHECK(manifest.records[1].output_text == t.summary);
  CHECK(manifest.records[2].output_text == t.compressed);
  CHECK(manifest.final_summary == t.compressed);
  CHECK(manifest.iterations_used == 2);
  CHECK(manifest.halt_reason == HaltReason::kStalled);
}

TEST_CASE("interrupted run resumes to an identical manifest with fewer calls") {
  SampleTexts t = load_samples();
  NarrativeDocument doc = ingest(t.script, Medium::kScreenplay, "bp");
  testsupport::TempDir tmp;
  const auto fixture_path = tmp.path() / "fixture.json";
  PipelineConfig config = sample_chain_config(fixture_path.string());
  FixtureMap full = record_fixture_chain(doc, config, sample_chain_outputs(t));
  save_fixture_map(full, fixture_path);

  // the uninterrupted reference run
  FixtureBackend reference_backend(full);
  RunManifest reference = run_pipeline(doc, config, reference_backend);

  // keep only the preprocessor entry: the summarizer call dies mid-run
  FixtureMap partial_map;
  {
    StageConfig p_cfg = make_stage_config(Stage::kPreprocess,
                                          testsupport::prompts_dir());
    std::vector<SceneChunk> chunks = chunk_by_scenes(doc, config.scenes_per_chunk);
    const std::string key =
        request_hash(stage_request(p_cfg, chunks[0].text), config.params);
    partial_map[key] = full.at(key);
  }

  const auto checkpoint = tmp.path() / "manifest.json";
  FixtureBackend broken(partial_map);
  CHECK_THROWS_AS(run_pipeline(doc, config, broken, checkpoint), Error);

  RunManifest interrupted = load_manifest(checkpoint);
  CHECK_FALSE(interrupted.complete);
  REQUIRE(interrupted.records.size() == 1);
  CHECK(interrupted.records[0].stage == Stage::kPreprocess);

  FixtureBackend fixed(full);
  CountingBackend counting(fixed);
  RunManifest resumed = resume(interrupted, doc, config, counting, checkpoint);
  CHECK(resumed.complete);
  CHECK(resumed.run_id == interrupted.run_id);
  CHECK(equivalent_ignoring_timing(resumed, reference));
  CHECK(counting.calls() == 3);  // S + two compressor passes; P reused
  CHECK(load_manifest(checkpoint) == resumed);
}

TEST_CASE("resume rejects config and document drift") {
  SampleTexts t = load_samples();
  NarrativeDocument doc = ingest(t.script, Medium::kScreenplay, "bp");
  testsupport::TempDir tmp;
  const auto fixture_path = tmp.path() / "fixture.json";
  PipelineConfig config = sample_chain_config(fixture_path.string());
  save_fixture_map(record_fixture_chain(doc, config, sample_chain_outputs(t)),
                   fixture_path);
  RunManifest manifest = run_pipeline(doc, config);

  FixtureBackend backend{FixtureMap{}};
  PipelineConfig altered = config;
  altered.delta = 123;
  CHECK_THROWS_AS(resume(manifest, doc, altered, backend), ConfigDrift);

  NarrativeDocument other = ingest(t.summary, Medium::kScreenplay, "bp");
  CHECK_THROWS_AS(resume(manifest, other, config, backend), ConfigDrift);

  // a complete manifest resumes to itself
  RunManifest again = resume(manifest, doc, config, backend);
  CHECK(again == manifest);
}

TEST_CASE("checkpoint is written after every stage record") {
  NarrativeDocument doc = make_scene_doc(8, 20);
  PipelineConfig config = base_config();
  config.stages = {Stage::kPreprocess, Stage::kSummarize, Stage::kCompress};
  config.theta = 20;
  testsupport::TempDir tmp;
  const auto checkpoint = tmp.path() / "manifest.json";
  MockTruncateBackend backend(0.5);
  RunManifest manifest = run_pipeline(doc, config, backend, checkpoint);
  RunManifest on_disk = load_manifest(checkpoint);
  CHECK(on_disk == manifest);
  CHECK(on_disk.complete);
  CHECK(on_disk.records.size() == manifest.records.size());
}

}  // TEST_SUITE
