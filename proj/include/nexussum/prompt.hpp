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
// Prompt templates: ordered system/user turns with "{{name}}" slots.
//
// Template files interleave turn separator lines with turn bodies:
//
//   ---ROLE: system---
//   You are ...
//   ---ROLE: user---
//   ## INPUT_SCRIPT
//   {{input}}
//
// A multi-round template (chain-of-thought) is a sequence of such pairs;
// every `system` turn opens a new round, and later rounds consume the
// previous round's completion through the "strategy" slot.

#ifndef NEXUSSUM_PROMPT_HPP_
#define NEXUSSUM_PROMPT_HPP_

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace nexussum {

enum class Role { kSystem, kUser };

std::string to_string(Role role);

struct Message {
  Role role = Role::kUser;
  std::string text;

  bool operator==(const Message&) const = default;
};

struct TemplateTurn {
  Role role = Role::kUser;
  std::string body;

  bool operator==(const TemplateTurn&) const = default;
};

class PromptTemplate {
 public:
  PromptTemplate() = default;
  PromptTemplate(std::string name, std::vector<TemplateTurn> turns);

  static PromptTemplate parse(std::string_view source, std::string name);
  static PromptTemplate load(const std::filesystem::path& path);

  const std::string& name() const { return name_; }
  const std::vector<TemplateTurn>& turns() const { return turns_; }
  const std::set<std::string>& required_placeholders() const {
    return placeholders_;
  }

  // Rounds: consecutive turn groups opened by each system turn. A template
  // with a single system turn is one round (the common case).
  std::size_t round_count() const { return rounds_.size(); }
  std::vector<TemplateTurn> round(std::size_t index) const;
  std::set<std::string> round_placeholders(std::size_t index) const;

 private:
  std::string name_;
  std::vector<TemplateTurn> turns_;
  std::set<std::string> placeholders_;
  std::vector<std::pair<std::size_t, std::size_t>> rounds_;  // [begin, end)
};

using Bindings = std::map<std::string, std::string>;

// Substitutes every "{{name}}" slot; binding values are inserted verbatim in
// a single pass. Throws MissingPlaceholder / UnknownPlaceholder.
std::string render_body(std::string_view body, const Bindings& bindings);
std::vector<Message> render(const PromptTemplate& tpl, const Bindings& bindings);
std::vector<Message> render_round(const PromptTemplate& tpl, std::size_t index,
                                  const Bindings& bindings);

// A rendered request. `payload` carries the primary input text the prompt
// wraps (the "input" binding); deterministic mock backends operate on it.
struct Prompt {
  std::vector<Message> turns;
  std::string payload;
};

std::set<std::string> extract_placeholders(std::string_view body);

}  // namespace nexussum

#endif  // NEXUSSUM_PROMPT_HPP_
