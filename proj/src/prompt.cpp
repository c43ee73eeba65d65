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

#include "nexussum/prompt.hpp"

#include <fstream>
#include <sstream>

#include "nexussum/corpus.hpp"
#include "nexussum/errors.hpp"

namespace nexussum {
namespace {

constexpr std::string_view kSystemSeparator = "---ROLE: system---";
constexpr std::string_view kUserSeparator = "---ROLE: user---";

bool is_slot_char(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
         (c >= '0' && c <= '9') || c == '_';
}

// Finds the next "{{name}}" slot at or after `from`. Returns npos when none.
std::size_t find_slot(std::string_view body, std::size_t from,
                      std::string* name, std::size_t* end) {
  std::size_t pos = from;
  while ((pos = body.find("{{", pos)) != std::string_view::npos) {
    std::size_t close = body.find("}}", pos + 2);
    if (close == std::string_view::npos) return std::string_view::npos;
    std::string_view candidate = body.substr(pos + 2, close - pos - 2);
    bool valid = !candidate.empty();
    for (char c : candidate) valid = valid && is_slot_char(c);
    if (valid) {
      *name = std::string(candidate);
      *end = close + 2;
      return pos;
    }
    pos += 2;
  }
  return std::string_view::npos;
}

}  // namespace

std::string to_string(Role role) {
  return role == Role::kSystem ? "system" : "user";
}

std::set<std::string> extract_placeholders(std::string_view body) {
  std::set<std::string> names;
  std::size_t pos = 0;
  std::string name;
  std::size_t end = 0;
  while ((pos = find_slot(body, pos, &name, &end)) != std::string_view::npos) {
    names.insert(name);
    pos = end;
  }
  return names;
}

PromptTemplate::PromptTemplate(std::string name, std::vector<TemplateTurn> turns)
    : name_(std::move(name)), turns_(std::move(turns)) {
  for (const TemplateTurn& turn : turns_) {
    std::set<std::string> found = extract_placeholders(turn.body);
    placeholders_.insert(found.begin(), found.end());
  }
  std::size_t begin = 0;
  for (std::size_t i = 0; i < turns_.size(); ++i) {
    if (turns_[i].role == Role::kSystem && i != begin) {
      rounds_.emplace_back(begin, i);
      begin = i;
    }
  }
  if (begin < turns_.size()) rounds_.emplace_back(begin, turns_.size());
}

PromptTemplate PromptTemplate::parse(std::string_view source, std::string name) {
  std::vector<TemplateTurn> turns;
  std::string current_body;
  bool in_turn = false;
  Role current_role = Role::kUser;

  auto close_turn = [&]() {
    if (!in_turn) return;
    turns.push_back({current_role, std::string(trim(current_body))});
    current_body.clear();
  };

  std::size_t pos = 0;
  while (pos <= source.size()) {
    std::size_t nl = source.find('\n', pos);
    std::string_view line = source.substr(
        pos, (nl == std::string_view::npos ? source.size() : nl) - pos);
    std::string_view stripped = trim(line);
    if (stripped == kSystemSeparator || stripped == kUserSeparator) {
      close_turn();
      in_turn = true;
      current_role =
          (stripped == kSystemSeparator) ? Role::kSystem : Role::kUser;
    } else if (in_turn) {
      current_body += line;
      current_body += '\n';
    } else if (!is_blank(line)) {
      throw ConfigError("template '" + name +
                        "': content before the first turn separator");
    }
    if (nl == std::string_view::npos) break;
    pos = nl + 1;
  }
  close_turn();

  if (turns.empty()) {
    throw ConfigError("template '" + name + "' declares no turns");
  }
  return PromptTemplate(std::move(name), std::move(turns));
}

PromptTemplate PromptTemplate::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw InputError("cannot open template file: " + path.string());
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse(buffer.str(), path.stem().string());
}

std::vector<TemplateTurn> PromptTemplate::round(std::size_t index) const {
  const auto& [begin, end] = rounds_.at(index);
  return std::vector<TemplateTurn>(turns_.begin() + static_cast<long>(begin),
                                   turns_.begin() + static_cast<long>(end));
}

std::set<std::string> PromptTemplate::round_placeholders(
    std::size_t index) const {
  std::set<std::string> names;
  for (const TemplateTurn& turn : round(index)) {
    std::set<std::string> found = extract_placeholders(turn.body);
    names.insert(found.begin(), found.end());
  }
  return names;
}

std::string render_body(std::string_view body, const Bindings& bindings) {
  std::string out;
  out.reserve(body.size());
  std::size_t pos = 0;
  std::string name;
  std::size_t end = 0;
  std::size_t slot = 0;
  while ((slot = find_slot(body, pos, &name, &end)) !=
         std::string_view::npos) {
    out.append(body.substr(pos, slot - pos));
    auto it = bindings.find(name);
    if (it == bindings.end()) throw MissingPlaceholder(name);
    out.append(it->second);
    pos = end;
  }
  out.append(body.substr(pos));
  return out;
}

namespace {

std::vector<Message> render_turns(const std::vector<TemplateTurn>& turns,
                                  const std::set<std::string>& known,
                                  const Bindings& bindings) {
  for (const auto& [key, value] : bindings) {
    if (known.find(key) == known.end()) throw UnknownPlaceholder(key);
  }
  std::vector<Message> messages;
  messages.reserve(turns.size());
  for (const TemplateTurn& turn : turns) {
    messages.push_back({turn.role, render_body(turn.body, bindings)});
  }
  return messages;
}

}  // namespace

std::vector<Message> render(const PromptTemplate& tpl, const Bindings& bindings) {
  return render_turns(tpl.turns(), tpl.required_placeholders(), bindings);
}

std::vector<Message> render_round(const PromptTemplate& tpl, std::size_t index,
                                  const Bindings& bindings) {
  return render_turns(tpl.round(index), tpl.round_placeholders(index),
                      bindings);
}

}  // namespace nexussum
