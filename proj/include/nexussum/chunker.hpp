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
// The two chunking schemes the pipeline runs on: fixed-size groups of scenes
// for the preprocessor/summarizer stages and greedy word-budgeted groups of
// sentences for the compressor.

#ifndef NEXUSSUM_CHUNKER_HPP_
#define NEXUSSUM_CHUNKER_HPP_

#include <cstdint>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include "nexussum/corpus.hpp"

namespace nexussum {

// "Maximum" chunk size: sentence chunking never splits.
inline constexpr std::int64_t kUnboundedDelta =
    std::numeric_limits<std::int64_t>::max();

struct SceneChunk {
  std::int64_t chunk_index = 0;
  std::int64_t first_scene = 0;  // contiguous range [first_scene, first_scene + scene_count)
  std::int64_t scene_count = 0;
  std::string text;  // trimmed scene texts joined with "\n\n"
  std::int64_t word_count = 0;

  bool operator==(const SceneChunk&) const = default;
};

struct SentenceChunk {
  std::int64_t chunk_index = 0;
  std::vector<Sentence> sentences;
  std::string text;  // sentences joined with a single space
  std::int64_t word_count = 0;

  bool operator==(const SentenceChunk&) const = default;
};

// ceil(scene_count / scenes_per_chunk) chunks; every chunk except possibly
// the last holds exactly scenes_per_chunk scenes. Throws EmptyDocument.
std::vector<SceneChunk> chunk_by_scenes(const NarrativeDocument& doc,
                                        std::int64_t scenes_per_chunk);

// Greedy first-fit packing: sentences are appended in order while the chunk
// stays within `delta` words; a single sentence longer than delta gets its
// own oversized chunk. Blank text yields an empty list.
std::vector<SentenceChunk> chunk_by_sentences(std::string_view text,
                                              std::int64_t delta);

}  // namespace nexussum

#endif  // NEXUSSUM_CHUNKER_HPP_
