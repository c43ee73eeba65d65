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

#include "nexussum/chunker.hpp"

#include <stdexcept>

#include "nexussum/errors.hpp"

namespace nexussum {

std::vector<SceneChunk> chunk_by_scenes(const NarrativeDocument& doc,
                                        std::int64_t scenes_per_chunk) {
  if (doc.scenes.empty()) throw EmptyDocument();
  if (scenes_per_chunk < 1) {
    throw std::invalid_argument("scenes_per_chunk must be >= 1");
  }

  std::vector<SceneChunk> chunks;
  const std::int64_t n = static_cast<std::int64_t>(doc.scenes.size());
  for (std::int64_t begin = 0; begin < n; begin += scenes_per_chunk) {
    SceneChunk chunk;
    chunk.chunk_index = static_cast<std::int64_t>(chunks.size());
    chunk.first_scene = begin;
    chunk.scene_count = std::min(scenes_per_chunk, n - begin);
    for (std::int64_t s = begin; s < begin + chunk.scene_count; ++s) {
      if (!chunk.text.empty()) chunk.text += "\n\n";
      chunk.text += trim(doc.scenes[static_cast<std::size_t>(s)].text);
    }
    chunk.word_count = word_count(chunk.text);
    chunks.push_back(std::move(chunk));
  }
  return chunks;
}

std::vector<SentenceChunk> chunk_by_sentences(std::string_view text,
                                              std::int64_t delta) {
  if (delta < 1) throw std::invalid_argument("delta must be >= 1");

  std::vector<SentenceChunk> chunks;
  auto open_chunk = [&]() -> SentenceChunk& {
    SentenceChunk chunk;
    chunk.chunk_index = static_cast<std::int64_t>(chunks.size());
    chunks.push_back(std::move(chunk));
    return chunks.back();
  };

  for (Sentence& sentence : split_sentences(text)) {
    bool fits = !chunks.empty() &&
                chunks.back().word_count + sentence.word_count <= delta;
    SentenceChunk& chunk = fits ? chunks.back() : open_chunk();
    if (!chunk.text.empty()) chunk.text += ' ';
    chunk.text += sentence.text;
    chunk.word_count += sentence.word_count;
    chunk.sentences.push_back(std::move(sentence));
  }
  return chunks;
}

}  // namespace nexussum
