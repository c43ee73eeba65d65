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
// Independent arithmetic simulator for the chunk/truncate/halt mechanics.
// Deliberately shares no code with the library: everything is re-derived
// from the documented rules over plain strings, so pipeline results can be
// cross-checked against a second implementation path.

#ifndef NEXUSSUM_TESTS_SUPPORT_ORACLE_HPP_
#define NEXUSSUM_TESTS_SUPPORT_ORACLE_HPP_

#include <cctype>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

namespace oracle {

inline bool space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

inline long long words(const std::string& text) {
  long long n = 0;
  bool in = false;
  for (char c : text) {
    if (space(c)) {
      in = false;
    } else if (!in) {
      in = true;
      ++n;
    }
  }
  return n;
}

inline std::string strip(const std::string& s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && space(s[b])) ++b;
  while (e > b && space(s[e - 1])) --e;
  return s.substr(b, e - b);
}

inline std::vector<std::string> word_list(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : text) {
    if (space(c)) {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

// Sentence boundaries: '.', '!' or '?' followed by whitespace and an
// uppercase/digit/quote start; '.' guarded by the fixed abbreviation list.
inline std::vector<std::string> sentences(const std::string& text) {
  static const std::vector<std::string> guard = {"mr.",  "mrs.", "dr.",
                                                 "st.",  "vs.",  "e.g.",
                                                 "i.e.", "etc."};
  std::vector<std::string> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (c != '.' && c != '!' && c != '?') continue;
    if (i + 1 >= text.size() || !space(text[i + 1])) continue;
    std::size_t j = i + 1;
    while (j < text.size() && space(text[j])) ++j;
    if (j >= text.size()) break;
    char nxt = text[j];
    bool opens = (nxt >= 'A' && nxt <= 'Z') || (nxt >= '0' && nxt <= '9') ||
                 nxt == '"' || nxt == '\'';
    if (!opens) continue;
    if (c == '.') {
      std::size_t tb = i;
      while (tb > start && !space(text[tb - 1])) --tb;
      std::string token = text.substr(tb, i - tb + 1);
      for (char& t : token) t = static_cast<char>(std::tolower(static_cast<unsigned char>(t)));
      bool guarded = false;
      for (const std::string& g : guard) guarded = guarded || token == g;
      if (guarded) continue;
    }
    std::string piece = strip(text.substr(start, i + 1 - start));
    if (!piece.empty()) out.push_back(piece);
    start = j;
  }
  std::string tail = strip(text.substr(start));
  if (!tail.empty()) out.push_back(tail);
  return out;
}

// Greedy packing by word budget; an oversized sentence rides alone.
inline std::vector<std::string> sentence_chunks(const std::string& text,
                                                long long delta) {
  std::vector<std::string> chunks;
  long long current_words = 0;
  for (const std::string& s : sentences(text)) {
    const long long w = words(s);
    if (!chunks.empty() && current_words + w <= delta) {
      chunks.back() += ' ';
      chunks.back() += s;
      current_words += w;
    } else {
      chunks.push_back(s);
      current_words = w;
    }
  }
  return chunks;
}

// Byte prefix holding the first ceil(ratio * W) words, outer whitespace
// stripped.
inline std::string take_words(const std::string& text, double ratio) {
  const long long total = words(text);
  const long long keep =
      static_cast<long long>(std::ceil(ratio * static_cast<double>(total)));
  if (keep <= 0) return "";
  long long seen = 0;
  bool in = false;
  std::size_t end = 0;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (space(text[i])) {
      in = false;
      if (seen == keep) break;
    } else {
      if (!in) {
        in = true;
        ++seen;
      }
      end = i + 1;
    }
  }
  return strip(text.substr(0, end));
}

inline std::string join(const std::vector<std::string>& parts,
                        const std::string& sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

// --- scene machinery -------------------------------------------------------

inline std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> lines;
  std::string cur;
  for (char c : text) {
    if (c == '\n') {
      lines.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  lines.push_back(cur);
  return lines;
}

inline bool heading_line(const std::string& line) {
  const std::string t = strip(line);
  return t.rfind("INT.", 0) == 0 || t.rfind("EXT.", 0) == 0;
}

// Scenes = heading-delimited line groups (leading non-blank preamble is a
// scene of its own); chunk = up to `spc` scenes, trimmed, joined by blank
// lines.
inline std::vector<std::string> scene_chunks(const std::string& text,
                                             long long spc) {
  std::vector<std::string> lines = lines_of(text);
  std::vector<std::string> scenes;
  std::string cur;
  for (const std::string& line : lines) {
    if (heading_line(line)) {
      if (!strip(cur).empty()) scenes.push_back(strip(cur));
      cur.clear();
    }
    cur += line;
    cur += '\n';
  }
  if (!strip(cur).empty()) scenes.push_back(strip(cur));

  std::vector<std::string> chunks;
  for (std::size_t i = 0; i < scenes.size(); i += static_cast<std::size_t>(spc)) {
    std::vector<std::string> group;
    for (std::size_t k = i;
         k < scenes.size() && k < i + static_cast<std::size_t>(spc); ++k) {
      group.push_back(scenes[k]);
    }
    chunks.push_back(join(group, "\n\n"));
  }
  return chunks;
}

// --- halting controller ----------------------------------------------------

struct SimResult {
  long long final_words = 0;
  long long iterations = 0;
  std::string halt;  // matches the library's halt reason strings
};

// Word-truncating compression loop over a starting text.
inline SimResult simulate_compress(const std::string& s0, long long delta,
                                   long long theta, long long max_iter,
                                   double ratio, bool stall_stop) {
  SimResult result;
  long long prev_words = words(s0);
  if (theta > 0 && prev_words <= theta) {
    result.final_words = prev_words;
    result.iterations = 0;
    result.halt = "initial_below_theta";
    return result;
  }
  std::string prev = s0;
  for (long long i = 1; i <= max_iter; ++i) {
    std::vector<std::string> outs;
    for (const std::string& chunk : sentence_chunks(prev, delta)) {
      outs.push_back(take_words(chunk, ratio));
    }
    std::string next = join(outs, "\n\n");
    const long long w = words(next);
    if (w < theta) {
      result.final_words = prev_words;
      result.iterations = i;
      result.halt = "below_theta_previous_returned";
      return result;
    }
    if (stall_stop && w >= prev_words) {
      result.final_words = w;
      result.iterations = i;
      result.halt = "stalled";
      return result;
    }
    prev = std::move(next);
    prev_words = w;
  }
  result.final_words = prev_words;
  result.iterations = max_iter;
  result.halt = "max_iterations";
  return result;
}

// Full preprocess -> summarize -> compress replay with a truncating model.
struct PipelineSim {
  long long scenes_per_chunk = 8;
  long long delta = 0;
  long long theta = 0;
  long long max_iterations = 10;
  double ratio = 0.5;
  bool stall_stop = true;
};

struct PipelineSimResult {
  long long p_words = 0;
  long long s_words = 0;
  long long p_calls = 0;
  long long s_calls = 0;
  SimResult compression;
};

inline PipelineSimResult simulate_psc(const std::string& doc_text,
                                      const PipelineSim& sim) {
  PipelineSimResult result;

  std::vector<std::string> p_outs;
  for (const std::string& chunk : scene_chunks(doc_text, sim.scenes_per_chunk)) {
    p_outs.push_back(take_words(chunk, sim.ratio));
    ++result.p_calls;
  }
  const std::string preprocessed = join(p_outs, "\n\n");
  result.p_words = words(preprocessed);

  std::vector<std::string> s_outs;
  for (const std::string& chunk :
       scene_chunks(preprocessed, sim.scenes_per_chunk)) {
    s_outs.push_back(take_words(chunk, sim.ratio));
    ++result.s_calls;
  }
  const std::string summary = join(s_outs, "\n\n");
  result.s_words = words(summary);

  result.compression = simulate_compress(summary, sim.delta, sim.theta,
                                         sim.max_iterations, sim.ratio,
                                         sim.stall_stop);
  return result;
}

}  // namespace oracle

#endif  // NEXUSSUM_TESTS_SUPPORT_ORACLE_HPP_
