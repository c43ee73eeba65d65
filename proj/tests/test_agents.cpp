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
#include <cmath>
#include <mutex>
#include <random>
#include <thread>

#include "nexussum/agents.hpp"
#include "nexussum/corpus.hpp"
#include "nexussum/errors.hpp"
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

// Identity with a random per-call delay; completion order is scrambled while
// the reduce order must stay fixed.
class JitteryIdentityBackend : public Backend {
 public:
  explicit JitteryIdentityBackend(unsigned seed) : rng_(seed) {}
  std::string complete(const Prompt& prompt, const GenerationParams&) override {
    int delay_us = 0;
    {
      std::lock_guard<std::mutex> lock(mu_);
      delay_us = std::uniform_int_distribution<int>(0, 3000)(rng_);
    }
    std::this_thread::sleep_for(std::chrono::microseconds(delay_us));
    return prompt.payload;
  }

 private:
  std::mutex mu_;
  std::mt19937 rng_;
};

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

StageConfig stage(Stage s, std::vector<std::string> fewshot = {}) {
  return make_stage_config(s, testsupport::prompts_dir(), std::move(fewshot));
}

}  // namespace

TEST_SUITE("agents") {

TEST_CASE("identity stage rejoins the chunks") {
  MockIdentityBackend backend;
  const std::vector<std::string> chunks = {"first chunk", "second chunk",
                                           "third chunk"};
  StageResult result = run_stage(chunks, stage(Stage::kPreprocess), backend, {});
  CHECK(result.output_text == "first chunk\n\nsecond chunk\n\nthird chunk");
  CHECK(result.calls_made == 3);
  CHECK(result.per_chunk_outputs == chunks);
}

TEST_CASE("chain-of-thought preprocessing makes two calls per chunk") {
  MockIdentityBackend inner;
  CountingBackend backend(inner);
  StageResult result =
      run_stage({"only chunk"}, stage(Stage::kPreprocessCot), backend, {});
  CHECK(result.calls_made == 2);
  CHECK(backend.calls() == 2);
  CHECK(result.output_text == "only chunk");
}

TEST_CASE("halving two chunks halves each") {
  MockTruncateBackend backend(0.5);
  StageResult result = run_stage({make_words("a", 40), make_words("b", 60)},
                                 stage(Stage::kCompress), backend, {});
  CHECK(word_count(result.output_text) == 50);
  CHECK(word_count(result.per_chunk_outputs[0]) == 20);
  CHECK(word_count(result.per_chunk_outputs[1]) == 30);
}

TEST_CASE("truncating stage output equals the per-chunk ceil sum") {
  std::mt19937 rng(29);
  std::uniform_int_distribution<int> chunk_count(1, 10);
  std::uniform_int_distribution<int> words(1, 200);
  std::uniform_real_distribution<double> ratio_dist(0.05, 1.0);
  for (int round = 0; round < 50; ++round) {
    const double ratio = ratio_dist(rng);
    MockTruncateBackend backend(ratio);
    std::vector<std::string> chunks;
    std::int64_t expected = 0;
    const int n = chunk_count(rng);
    for (int i = 0; i < n; ++i) {
      const int w = words(rng);
      chunks.push_back(make_words("c" + std::to_string(i) + "_", w));
      expected += static_cast<std::int64_t>(std::ceil(ratio * w));
    }
    StageResult result = run_stage(chunks, stage(Stage::kCompress), backend, {});
    CHECK(word_count(result.output_text) == expected);
  }
}

TEST_CASE("empty chunk list is rejected") {
  MockIdentityBackend backend;
  CHECK_THROWS_AS(run_stage({}, stage(Stage::kSummarize), backend, {}),
                  InputError);
}

TEST_CASE("a failed chunk fails the stage with its index") {
  FixtureBackend backend{FixtureMap{}};  // every lookup misses
  try {
    run_stage({"one", "two"}, stage(Stage::kSummarize), backend, {});
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("chunk 0") != std::string::npos);
    CHECK(e.category() == ErrorCategory::kBackend);
  }
}

TEST_CASE("concatenation order is chunk order under concurrency") {
  std::vector<std::string> chunks;
  for (int i = 0; i < 12; ++i) {
    chunks.push_back("chunk " + std::to_string(i) + " " + make_words("w", 5));
  }
  std::string expected;
  for (std::size_t i = 0; i < chunks.size(); ++i) {
    if (i) expected += "\n\n";
    expected += chunks[i];
  }
  for (int round = 0; round < 20; ++round) {
    JitteryIdentityBackend backend(static_cast<unsigned>(round));
    StageResult result =
        run_stage(chunks, stage(Stage::kSummarize), backend, {}, 8);
    CHECK(result.output_text == expected);
  }
}

TEST_CASE("few-shot examples land in the rendered request") {
  StageConfig summarizer =
      stage(Stage::kSummarizeFewshot, {"EX ONE", "EX TWO", "EX THREE"});
  std::vector<Message> turns = stage_request(summarizer, "the chunk");
  REQUIRE(turns.size() == 2);
  CHECK(turns[1].text.find("EX ONE") != std::string::npos);
  CHECK(turns[1].text.find("EX THREE") != std::string::npos);
  CHECK(turns[1].text.find("the chunk") != std::string::npos);

  StageConfig compressor = stage(
      Stage::kCompressFewshot, {"in1", "out1", "in2", "out2", "in3", "out3"});
  turns = stage_request(compressor, "previous summary");
  CHECK(turns[1].text.find("in2") != std::string::npos);
  CHECK(turns[1].text.find("out3") != std::string::npos);
}

TEST_CASE("few-shot counts are validated") {
  CHECK_THROWS_AS(stage(Stage::kSummarizeFewshot, {"only one"}), ConfigError);
  CHECK_THROWS_AS(stage(Stage::kCompressFewshot, {"a", "b", "c"}), ConfigError);
  CHECK_THROWS_AS(stage(Stage::kSummarize, {"not allowed"}), ConfigError);
}

TEST_CASE("reflection rewrites the whole summary in one call") {
  MockIdentityBackend identity;
  const std::string summary = make_words("s", 30);
  CHECK(run_reflection(summary, stage(Stage::kReflect), identity, {}) == summary);

  MockTruncateBackend truncate(0.4);
  CHECK(word_count(run_reflection(make_words("s", 100), stage(Stage::kReflect),
                                  truncate, {})) == 40);

  CHECK_THROWS_AS(run_reflection("  ", stage(Stage::kReflect), identity, {}),
                  InputError);
}

TEST_CASE("reflection replays from a fixture") {
  StageConfig reflect = stage(Stage::kReflect);
  GenerationParams params;
  FixtureMap map;
  map[request_hash(stage_request(reflect, "rough draft"), params)] =
      "polished draft";
  FixtureBackend backend(std::move(map));
  CHECK(run_reflection("rough draft", reflect, backend, params) ==
        "polished draft");
}

TEST_CASE("stage names round-trip") {
  for (Stage s : {Stage::kPreprocess, Stage::kPreprocessCot, Stage::kSummarize,
                  Stage::kSummarizeFewshot, Stage::kCompress,
                  Stage::kCompressFewshot, Stage::kReflect}) {
    CHECK(stage_from_string(to_string(s)) == s);
  }
  CHECK_THROWS_AS(stage_from_string("X"), ConfigError);
}

}  // TEST_SUITE
