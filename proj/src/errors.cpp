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

#include "hellogram/errors.hpp"

namespace hellogram {

const char* errc_name(Errc code) {
  switch (code) {
    case Errc::TruncatedMessage: return "TruncatedMessage";
    case Errc::NotClientHello: return "NotClientHello";
    case Errc::MalformedLength: return "MalformedLength";
    case Errc::InvalidHexDigit: return "InvalidHexDigit";
    case Errc::OddDigitCount: return "OddDigitCount";
    case Errc::LabelConflict: return "LabelConflict";
    case Errc::LabelMismatch: return "LabelMismatch";
    case Errc::EmptyCorpus: return "EmptyCorpus";
    case Errc::EmptyInput: return "EmptyInput";
    case Errc::NoModels: return "NoModels";
    case Errc::ListTooShort: return "ListTooShort";
    case Errc::LengthMismatch: return "LengthMismatch";
    case Errc::EmptyClassSet: return "EmptyClassSet";
    case Errc::MalformedRepositoryLine: return "MalformedRepositoryLine";
    case Errc::SchemaVersionMismatch: return "SchemaVersionMismatch";
    case Errc::CorruptModelFile: return "CorruptModelFile";
    case Errc::NotPcap: return "NotPcap";
    case Errc::InvalidProfile: return "InvalidProfile";
    case Errc::InsufficientSplits: return "InsufficientSplits";
    case Errc::NoLabeledData: return "NoLabeledData";
    case Errc::IoError: return "IoError";
  }
  return "UnknownErrc";
}

}  // namespace hellogram
