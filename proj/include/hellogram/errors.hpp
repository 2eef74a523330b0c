// Copyright (c) 2026 The hellogram authors
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

namespace hellogram {

/// Error codes for every failure mode the library reports.
enum class Errc {
  TruncatedMessage,
  NotClientHello,
  MalformedLength,
  InvalidHexDigit,
  OddDigitCount,
  LabelConflict,
  LabelMismatch,
  EmptyCorpus,
  EmptyInput,
  NoModels,
  ListTooShort,
  LengthMismatch,
  EmptyClassSet,
  MalformedRepositoryLine,
  SchemaVersionMismatch,
  CorruptModelFile,
  NotPcap,
  InvalidProfile,
  InsufficientSplits,
  NoLabeledData,
  IoError,
};

const char* errc_name(Errc code);

class Error : public std::runtime_error {
public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(std::string(errc_name(code)) + ": " + message), code_(code) {}

  Errc code() const { return code_; }

private:
  Errc code_;
};

[[noreturn]] inline void raise(Errc code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace hellogram
