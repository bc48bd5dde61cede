// errors.hpp
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
// Copyright 2026 The corpus-affinity Authors.
//
// Exception types shared by every module. The CLI maps ArgumentError to
// exit code 2 and every other Error to exit code 1.

#ifndef CORPUS_AFFINITY_ERRORS_HPP_
#define CORPUS_AFFINITY_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace corpus_affinity {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Caller passed an out-of-contract argument (bad order, mismatched configs).
class ArgumentError : public Error {
 public:
  using Error::Error;
};

// An operation needed at least one token/document/term and got none.
class EmptyCorpusError : public Error {
 public:
  using Error::Error;
};

// Malformed or inconsistent input data (bad JSON line, missing baseline).
class DataError : public Error {
 public:
  using Error::Error;
};

// Artifacts built under incompatible settings, e.g. tokenizer mismatch.
class ConfigError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// Pearson r is undefined because one input has zero variance.
class UndefinedCorrelationError : public DataError {
 public:
  using DataError::DataError;
};

}  // namespace corpus_affinity

#endif  // CORPUS_AFFINITY_ERRORS_HPP_
