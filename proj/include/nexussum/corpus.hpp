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
// Corpus ingestion: decompose raw narrative text into scenes, sentences and
// word counts. Everything here is a pure function over immutable inputs.

#ifndef NEXUSSUM_CORPUS_HPP_
#define NEXUSSUM_CORPUS_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace nexussum {

enum class Medium { kScreenplay, kProse, kTranscript };

std::string to_string(Medium medium);
Medium medium_from_string(std::string_view name);

struct Sentence {
  std::string text;  // no leading/trailing whitespace
  std::int64_t word_count = 0;

  bool operator==(const Sentence&) const = default;
};

// One segmentation unit. `text` is the exact byte span the scene covers in
// its source, so document reconstruction stays byte-exact; `heading`/`body`
// are the interpreted view of the same bytes.
struct Scene {
  std::int64_t index = 0;
  std::optional<std::string> heading;  // trimmed heading line, if detected
  std::string body;                    // text after the heading line
  std::string text;                    // exact source span
  std::int64_t word_count = 0;         // whitespace tokens in text

  bool operator==(const Scene&) const = default;
};

struct NarrativeDocument {
  std::string id;
  Medium medium = Medium::kProse;
  std::string raw_text;

  // raw_text == preamble + scenes[0].text + separators[0] + scenes[1].text + ...
  std::string preamble;
  std::vector<Scene> scenes;
  std::vector<std::string> separators;  // separators[i] follows scenes[i]

  std::int64_t total_word_count() const;
};

// Number of maximal non-whitespace runs.
std::int64_t word_count(std::string_view text);

bool is_blank(std::string_view text);
std::string_view trim(std::string_view text);

// Screenplay mode: a new scene starts at every line whose trimmed form begins
// with "INT." or "EXT." (case-sensitive); text before the first heading forms
// scene 0 with no heading. Prose/transcript mode: blank-line-separated blocks
// become pseudo-scenes. Throws EmptyInput on blank text.
std::vector<Scene> segment_scenes(std::string_view text, Medium medium);

// Rule-based splitter: a sentence ends at '.', '!' or '?' followed by
// whitespace and an uppercase/quote/digit start, unless the token ending in
// '.' is on the abbreviation guard list. Blank input yields an empty list.
std::vector<Sentence> split_sentences(std::string_view text);

// Throws EmptyInput on blank input and EncodingError on invalid UTF-8.
NarrativeDocument ingest(std::string raw, Medium medium, std::string id = "");

// Trimmed scene texts joined with "\n\n": the normalized text downstream
// stages chunk and re-segment.
std::string document_body(const NarrativeDocument& doc);

// Byte-exact reassembly of raw_text from the stored spans.
std::string reconstruct(const NarrativeDocument& doc);

bool is_valid_utf8(std::string_view text);

}  // namespace nexussum

#endif  // NEXUSSUM_CORPUS_HPP_
