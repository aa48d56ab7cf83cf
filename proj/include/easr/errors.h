// include/easr/errors.h

// Copyright 2026 The easraug Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef EASR_ERRORS_H_
#define EASR_ERRORS_H_

#include <stdexcept>
#include <string>

namespace easr {

/// Base class for every error raised by the workbench.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad input data: malformed manifests, audio, records, failed validation.
/// The CLI maps this to exit code 1.
class DataError : public Error {
 public:
  using Error::Error;
};

/// A model backend (LLM or TTS) could not produce a usable result.
/// The CLI maps this to exit code 2.
class BackendError : public Error {
 public:
  using Error::Error;
};

/// Unparseable or inconsistent run configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace easr

#endif  // EASR_ERRORS_H_
