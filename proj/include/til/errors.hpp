// Copyright 2026 The til Authors
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

namespace til {

// Argument outside the mathematical domain of an operation (e.g. a support
// condition that the definition requires).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Incompatible matrix shapes or subsystem dimensions.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Floating point failure: non-convergence, overflow, lost invariants.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input that parses but does not describe a valid object (non-Hermitian
// matrix, non trace-preserving channel, ...).
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace til
