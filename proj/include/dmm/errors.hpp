// Copyright 2026 The DMM Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//
#pragma once

#include <stdexcept>
#include <string>

namespace dmm {

// Base of every error raised by the library. `kind()` is a stable,
// machine-readable tag used by the CLI as its error-line prefix.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& message)
      : std::runtime_error(message), kind_(std::move(kind)) {}

  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

class ReservedTokenError : public Error {
 public:
  explicit ReservedTokenError(const std::string& token)
      : Error("reserved-token", "token '" + token + "' is reserved"),
        token_(token) {}

  const std::string& token() const noexcept { return token_; }

 private:
  std::string token_;
};

// A network matrix path whose length is not exactly six.
class MatrixDepthError : public Error {
 public:
  MatrixDepthError(std::string path, std::size_t depth)
      : Error("matrix-depth", "matrix path '" + path + "' has length " +
                                  std::to_string(depth) + ", expected 6"),
        path_(std::move(path)),
        depth_(depth) {}

  const std::string& path() const noexcept { return path_; }
  std::size_t depth() const noexcept { return depth_; }

 private:
  std::string path_;
  std::size_t depth_;
};

class UnknownNeuronTypeError : public Error {
 public:
  explicit UnknownNeuronTypeError(const std::string& type_name)
      : Error("unknown-neuron-type",
              "neuron type '" + type_name + "' is not in the registry"),
        type_name_(type_name) {}

  const std::string& type_name() const noexcept { return type_name_; }

 private:
  std::string type_name_;
};

class DimensionError : public Error {
 public:
  explicit DimensionError(const std::string& message)
      : Error("dimension", message) {}
};

class InvariantBrokenError : public Error {
 public:
  explicit InvariantBrokenError(const std::string& message)
      : Error("invariant-broken", message) {}
};

// Malformed serialized input. `where` is a slash-separated key path into
// the document ("" for the root).
class ParseError : public Error {
 public:
  ParseError(const std::string& where, const std::string& message)
      : Error("parse", (where.empty() ? std::string("<root>") : where) + ": " +
                           message),
        where_(where) {}

  const std::string& where() const noexcept { return where_; }

 private:
  std::string where_;
};

}  // namespace dmm
