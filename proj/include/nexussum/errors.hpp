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

#ifndef NEXUSSUM_ERRORS_HPP_
#define NEXUSSUM_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace nexussum {

// Coarse failure classes; the CLI maps them onto exit codes
// (0 ok, 2 config, 3 input, 4 backend, 5 internal).
enum class ErrorCategory { kConfig, kInput, kBackend, kInternal };

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& message)
      : std::runtime_error(message), category_(category) {}
  ErrorCategory category() const { return category_; }

 private:
  ErrorCategory category_;
};

// corpus
class EmptyInput : public Error {
 public:
  explicit EmptyInput(const std::string& message = "input is blank")
      : Error(ErrorCategory::kInput, message) {}
};

class EncodingError : public Error {
 public:
  explicit EncodingError(const std::string& message)
      : Error(ErrorCategory::kInput, message) {}
};

// chunker
class EmptyDocument : public Error {
 public:
  explicit EmptyDocument(const std::string& message = "document has no scenes")
      : Error(ErrorCategory::kInput, message) {}
};

// prompt
class MissingPlaceholder : public Error {
 public:
  explicit MissingPlaceholder(const std::string& name)
      : Error(ErrorCategory::kConfig, "missing placeholder binding: " + name),
        name_(name) {}
  const std::string& name() const { return name_; }

 private:
  std::string name_;
};

class UnknownPlaceholder : public Error {
 public:
  explicit UnknownPlaceholder(const std::string& name)
      : Error(ErrorCategory::kConfig, "binding for unknown placeholder: " + name),
        name_(name) {}
  const std::string& name() const { return name_; }

 private:
  std::string name_;
};

// backend
class TransportError : public Error {
 public:
  explicit TransportError(const std::string& message)
      : Error(ErrorCategory::kBackend, message) {}
};

class FixtureMiss : public Error {
 public:
  explicit FixtureMiss(const std::string& hash)
      : Error(ErrorCategory::kBackend, "no fixture response for request " + hash),
        hash_(hash) {}
  const std::string& hash() const { return hash_; }

 private:
  std::string hash_;
};

class BackendRefusal : public Error {
 public:
  BackendRefusal(int status, const std::string& message)
      : Error(ErrorCategory::kBackend, message), status_(status) {}
  int status() const { return status_; }

 private:
  int status_ = 0;
};

// pipeline persistence
class SchemaMismatch : public Error {
 public:
  explicit SchemaMismatch(const std::string& message)
      : Error(ErrorCategory::kInput, message) {}
};

class ConfigDrift : public Error {
 public:
  explicit ConfigDrift(const std::string& message)
      : Error(ErrorCategory::kConfig, message) {}
};

// metrics
class ZeroTarget : public Error {
 public:
  ZeroTarget() : Error(ErrorCategory::kInput, "target length must be >= 1") {}
};

class ZeroBefore : public Error {
 public:
  ZeroBefore() : Error(ErrorCategory::kInput, "before-compression word count must be >= 1") {}
};

class NotADistribution : public Error {
 public:
  explicit NotADistribution(const std::string& message)
      : Error(ErrorCategory::kInput, message) {}
};

class InvalidRatio : public Error {
 public:
  explicit InvalidRatio(const std::string& message)
      : Error(ErrorCategory::kInput, message) {}
};

class EmptySummary : public Error {
 public:
  EmptySummary() : Error(ErrorCategory::kInput, "summary has no sentences") {}
};

// cli / configuration
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& message)
      : Error(ErrorCategory::kConfig, message) {}
};

class InputError : public Error {
 public:
  explicit InputError(const std::string& message)
      : Error(ErrorCategory::kInput, message) {}
};

}  // namespace nexussum

#endif  // NEXUSSUM_ERRORS_HPP_
