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

#include "nexussum/corpus.hpp"

#include <algorithm>
#include <array>
#include <cctype>

#include "nexussum/errors.hpp"
#include "nexussum/hashing.hpp"

namespace nexussum {
namespace {

inline bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

// Tokens whose trailing '.' never ends a sentence. Compared case-insensitively.
constexpr std::array<std::string_view, 8> kAbbreviations = {
    "mr.", "mrs.", "dr.", "st.", "vs.", "e.g.", "i.e.", "etc."};

std::string ascii_lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

bool is_abbreviation(std::string_view token) {
  std::string lowered = ascii_lower(token);
  return std::find(kAbbreviations.begin(), kAbbreviations.end(), lowered) !=
         kAbbreviations.end();
}

bool is_heading_line(std::string_view line) {
  std::string_view t = trim(line);
  return t.rfind("INT.", 0) == 0 || t.rfind("EXT.", 0) == 0;
}

struct LineSpan {
  std::size_t begin = 0;  // first byte of the line
  std::size_t end = 0;    // one past the line terminator (or text end)
  std::string_view content;  // excludes the terminator
};

std::vector<LineSpan> scan_lines(std::string_view text) {
  std::vector<LineSpan> lines;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t nl = text.find('\n', pos);
    std::size_t content_end = (nl == std::string_view::npos) ? text.size() : nl;
    std::size_t end = (nl == std::string_view::npos) ? text.size() : nl + 1;
    lines.push_back({pos, end, text.substr(pos, content_end - pos)});
    pos = end;
  }
  return lines;
}

Scene make_scene(std::int64_t index, std::string_view span,
                 std::optional<std::string> heading, std::string body) {
  Scene scene;
  scene.index = index;
  scene.heading = std::move(heading);
  scene.body = std::move(body);
  scene.text = std::string(span);
  scene.word_count = word_count(span);
  return scene;
}

struct Segmentation {
  std::string preamble;
  std::vector<Scene> scenes;
  std::vector<std::string> separators;
};

Segmentation segment_screenplay(std::string_view text) {
  Segmentation out;
  std::vector<LineSpan> lines = scan_lines(text);

  std::vector<std::size_t> heading_lines;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (is_heading_line(lines[i].content)) heading_lines.push_back(i);
  }

  std::int64_t index = 0;
  if (heading_lines.empty()) {
    out.scenes.push_back(
        make_scene(index, text, std::nullopt, std::string(text)));
    out.separators.emplace_back();
    return out;
  }

  std::size_t first_heading_byte = lines[heading_lines.front()].begin;
  std::string_view preamble_span = text.substr(0, first_heading_byte);
  if (is_blank(preamble_span)) {
    out.preamble = std::string(preamble_span);
  } else {
    out.scenes.push_back(make_scene(index++, preamble_span, std::nullopt,
                                    std::string(preamble_span)));
    out.separators.emplace_back();
  }

  for (std::size_t h = 0; h < heading_lines.size(); ++h) {
    const LineSpan& head = lines[heading_lines[h]];
    std::size_t span_end = (h + 1 < heading_lines.size())
                               ? lines[heading_lines[h + 1]].begin
                               : text.size();
    std::string_view span = text.substr(head.begin, span_end - head.begin);
    std::string body(text.substr(head.end, span_end - head.end));
    out.scenes.push_back(make_scene(index++, span,
                                    std::string(trim(head.content)),
                                    std::move(body)));
    out.separators.emplace_back();
  }
  return out;
}

Segmentation segment_paragraphs(std::string_view text) {
  Segmentation out;
  std::vector<LineSpan> lines = scan_lines(text);

  std::int64_t index = 0;
  std::size_t i = 0;
  while (i < lines.size()) {
    // skip blank lines; they belong to the preceding separator (or preamble)
    std::size_t blank_start = lines[i].begin;
    while (i < lines.size() && is_blank(lines[i].content)) ++i;
    std::size_t sep_end = (i < lines.size()) ? lines[i].begin : text.size();
    std::string gap(text.substr(blank_start, sep_end - blank_start));
    if (out.scenes.empty()) {
      out.preamble += gap;
    } else {
      out.separators.back() += gap;
    }
    if (i >= lines.size()) break;

    std::size_t block_begin = lines[i].begin;
    std::size_t block_end = block_begin;
    while (i < lines.size() && !is_blank(lines[i].content)) {
      block_end = lines[i].end;
      ++i;
    }
    std::string_view span = text.substr(block_begin, block_end - block_begin);
    out.scenes.push_back(
        make_scene(index++, span, std::nullopt, std::string(span)));
    out.separators.emplace_back();
  }
  return out;
}

Segmentation segment(std::string_view text, Medium medium) {
  if (is_blank(text)) throw EmptyInput();
  if (medium == Medium::kScreenplay) return segment_screenplay(text);
  return segment_paragraphs(text);
}

}  // namespace

std::string to_string(Medium medium) {
  switch (medium) {
    case Medium::kScreenplay: return "screenplay";
    case Medium::kProse: return "prose";
    case Medium::kTranscript: return "transcript";
  }
  return "prose";
}

Medium medium_from_string(std::string_view name) {
  if (name == "screenplay") return Medium::kScreenplay;
  if (name == "prose") return Medium::kProse;
  if (name == "transcript") return Medium::kTranscript;
  throw ConfigError("unknown medium: " + std::string(name));
}

std::int64_t word_count(std::string_view text) {
  std::int64_t count = 0;
  bool in_word = false;
  for (char c : text) {
    if (is_space(c)) {
      in_word = false;
    } else if (!in_word) {
      in_word = true;
      ++count;
    }
  }
  return count;
}

bool is_blank(std::string_view text) {
  for (char c : text) {
    if (!is_space(c)) return false;
  }
  return true;
}

std::string_view trim(std::string_view text) {
  std::size_t b = 0;
  std::size_t e = text.size();
  while (b < e && is_space(text[b])) ++b;
  while (e > b && is_space(text[e - 1])) --e;
  return text.substr(b, e - b);
}

std::int64_t NarrativeDocument::total_word_count() const {
  std::int64_t total = 0;
  for (const Scene& scene : scenes) total += scene.word_count;
  return total;
}

std::vector<Scene> segment_scenes(std::string_view text, Medium medium) {
  return segment(text, medium).scenes;
}

std::vector<Sentence> split_sentences(std::string_view text) {
  std::vector<Sentence> sentences;
  auto flush = [&](std::string_view span) {
    std::string_view t = trim(span);
    if (t.empty()) return;
    Sentence s;
    s.text = std::string(t);
    s.word_count = word_count(t);
    sentences.push_back(std::move(s));
  };

  std::size_t start = 0;
  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (c != '.' && c != '!' && c != '?') continue;
    if (i + 1 >= text.size() || !is_space(text[i + 1])) continue;

    // next sentence must start with an uppercase letter, digit, or quote
    std::size_t j = i + 1;
    while (j < text.size() && is_space(text[j])) ++j;
    if (j >= text.size()) break;  // trailing whitespace; residual flush below
    char next = text[j];
    bool starts_sentence = (next >= 'A' && next <= 'Z') ||
                           (next >= '0' && next <= '9') || next == '"' ||
                           next == '\'';
    if (!starts_sentence) continue;

    if (c == '.') {
      std::size_t tok_begin = i;
      while (tok_begin > start && !is_space(text[tok_begin - 1])) --tok_begin;
      if (is_abbreviation(text.substr(tok_begin, i - tok_begin + 1))) continue;
    }

    flush(text.substr(start, i + 1 - start));
    start = j;
  }
  flush(text.substr(start));
  return sentences;
}

NarrativeDocument ingest(std::string raw, Medium medium, std::string id) {
  if (is_blank(raw)) throw EmptyInput();
  if (!is_valid_utf8(raw)) throw EncodingError("input is not valid UTF-8");

  Segmentation seg = segment(raw, medium);
  NarrativeDocument doc;
  doc.medium = medium;
  doc.raw_text = std::move(raw);
  doc.preamble = std::move(seg.preamble);
  doc.scenes = std::move(seg.scenes);
  doc.separators = std::move(seg.separators);
  doc.id = id.empty() ? "doc-" + content_hash(doc.raw_text).substr(0, 12)
                      : std::move(id);
  return doc;
}

std::string document_body(const NarrativeDocument& doc) {
  std::string body;
  for (const Scene& scene : doc.scenes) {
    if (!body.empty()) body += "\n\n";
    body += trim(scene.text);
  }
  return body;
}

std::string reconstruct(const NarrativeDocument& doc) {
  std::string out = doc.preamble;
  for (std::size_t i = 0; i < doc.scenes.size(); ++i) {
    out += doc.scenes[i].text;
    if (i < doc.separators.size()) out += doc.separators[i];
  }
  return out;
}

bool is_valid_utf8(std::string_view text) {
  std::size_t i = 0;
  const auto n = text.size();
  while (i < n) {
    unsigned char c = static_cast<unsigned char>(text[i]);
    std::size_t len;
    unsigned cp_min;
    if (c < 0x80) {
      i += 1;
      continue;
    } else if ((c & 0xe0) == 0xc0) {
      len = 2;
      cp_min = 0x80;
    } else if ((c & 0xf0) == 0xe0) {
      len = 3;
      cp_min = 0x800;
    } else if ((c & 0xf8) == 0xf0) {
      len = 4;
      cp_min = 0x10000;
    } else {
      return false;
    }
    if (i + len > n) return false;
    unsigned cp = c & (0x7f >> len);
    for (std::size_t k = 1; k < len; ++k) {
      unsigned char cont = static_cast<unsigned char>(text[i + k]);
      if ((cont & 0xc0) != 0x80) return false;
      cp = (cp << 6) | (cont & 0x3f);
    }
    if (cp < cp_min || cp > 0x10ffff || (cp >= 0xd800 && cp <= 0xdfff)) {
      return false;
    }
    i += len;
  }
  return true;
}

}  // namespace nexussum
