// Copyright 2026 The derivgen Authors.
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

#ifndef DERIVGEN_ERRORS_H_
#define DERIVGEN_ERRORS_H_

#include <stdexcept>
#include <string>

namespace derivgen {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Operand shapes disagree.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// backward() on a tape that has already been differentiated.
class StaleTapeError : public Error {
 public:
  using Error::Error;
};

// Non-finite gradient seen by the optimizer; the step is not applied.
class DivergenceError : public Error {
 public:
  using Error::Error;
};

class VocabularyError : public Error {
 public:
  using Error::Error;
};

// Invalid model variant, run configuration or evaluation setup.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Malformed input file. Carries the offending line when known.
class FormatError : public Error {
 public:
  using Error::Error;
};

class EmptyDatasetError : public Error {
 public:
  using Error::Error;
};

class InsufficientDataError : public Error {
 public:
  using Error::Error;
};

// An evaluation the chosen system cannot run, e.g. the n-gram baseline
// on a split lexicon.
class UnsupportedEvaluationError : public Error {
 public:
  using Error::Error;
};

class PathError : public Error {
 public:
  using Error::Error;
};

}  // namespace derivgen

#endif  // DERIVGEN_ERRORS_H_
