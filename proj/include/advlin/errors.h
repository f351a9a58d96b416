// Copyright 2026 The adv-linmdp Authors.
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

#pragma once

#include <stdexcept>
#include <string>

namespace advlin {

// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or inconsistent caller input (shapes, ranges, probabilities).
class InputError : public Error {
 public:
  using Error::Error;
};

// A point outside the domain of a function (e.g. a boundary simplex point
// passed to the log-barrier).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Iterative solver failed to converge or a matrix was unexpectedly indefinite.
class NumericalError : public Error {
 public:
  using Error::Error;
};

// The simulator was asked for more calls than the configured budget, or a
// retry cap was exceeded.
class BudgetError : public Error {
 public:
  using Error::Error;
};

// Simulator queried at the last layer, where no successor exists.
class LayerBoundaryError : public Error {
 public:
  using Error::Error;
};

// An internal invariant that should hold by construction was violated.
class InvariantError : public Error {
 public:
  using Error::Error;
};

// Configuration schema violation. `path()` names the offending field, e.g.
// "env.layer_sizes[0]".
class ConfigError : public Error {
 public:
  ConfigError(std::string path, const std::string& message)
      : Error(path + ": " + message), path_(std::move(path)) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

}  // namespace advlin
