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

#include "hellogram/ja3.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>

#include "hellogram/errors.hpp"
#include "hellogram/md5.hpp"

namespace hellogram::ja3 {

namespace {

std::string to_lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

bool is_hex32(const std::string& s) {
  if (s.size() != 32) return false;
  return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isxdigit(c); });
}

template <typename T>
void append_joined(std::string& out, const std::vector<T>& values) {
  for (size_t i = 0; i < values.size(); ++i) {
    if (i > 0) out.push_back('-');
    out.append(std::to_string(values[i]));
  }
}

}  // namespace

Ja3Fields ja3_fields(const wire::ParsedClientHello& parsed) {
  Ja3Fields f;
  f.version = parsed.legacy_version;

  for (uint16_t suite : parsed.cipher_suites) {
    if (!is_grease(suite)) f.ciphers.push_back(suite);
  }

  for (const wire::Extension& ext : parsed.extensions) {
    if (!is_grease(ext.type)) f.extensions.push_back(ext.type);
    if (ext.type == wire::kExtSupportedGroups) {
      // Body: u16 list length then u16 group ids. Tolerate short or odd
      // bodies by taking as many whole pairs as fit.
      const Bytes& b = ext.body;
      if (b.size() >= 2) {
        const size_t list_len = static_cast<size_t>(b[0]) << 8 | b[1];
        const size_t avail = std::min(list_len, b.size() - 2);
        for (size_t i = 2; i + 2 <= 2 + avail; i += 2) {
          const uint16_t group = static_cast<uint16_t>(b[i] << 8 | b[i + 1]);
          if (!is_grease(group)) f.curves.push_back(group);
        }
      }
    } else if (ext.type == wire::kExtEcPointFormats) {
      // Body: u8 list length then u8 format codes.
      const Bytes& b = ext.body;
      if (!b.empty()) {
        const size_t avail = std::min(static_cast<size_t>(b[0]), b.size() - 1);
        for (size_t i = 1; i < 1 + avail; ++i) f.point_formats.push_back(b[i]);
      }
    }
  }
  return f;
}

std::string ja3_string(const wire::ParsedClientHello& parsed) {
  const Ja3Fields f = ja3_fields(parsed);
  std::string out = std::to_string(f.version);
  out.push_back(',');
  append_joined(out, f.ciphers);
  out.push_back(',');
  append_joined(out, f.extensions);
  out.push_back(',');
  append_joined(out, f.curves);
  out.push_back(',');
  append_joined(out, f.point_formats);
  return out;
}

std::string ja3_hash(const std::string& decimal_string) {
  return Md5::hex(Md5::digest(decimal_string));
}

const std::string& LabelRepository::lookup(const std::string& hash) const {
  auto it = entries_.find(to_lower(hash));
  if (it == entries_.end()) return kUnknownLabel;
  return it->second;
}

bool LabelRepository::insert(const std::string& hash, const std::string& label) {
  return entries_.emplace(to_lower(hash), label).second;
}

RepositoryLoad load_repository(const std::filesystem::path& path) {
  return load_repositories({path});
}

RepositoryLoad load_repositories(const std::vector<std::filesystem::path>& paths) {
  RepositoryLoad out;
  for (const auto& path : paths) {
    std::ifstream in(path);
    if (!in) {
      raise(Errc::IoError, "cannot open repository file " + path.string());
    }
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty() || line[0] == '#') continue;
      const size_t tab = line.find('\t');
      const std::string where = path.string() + ":" + std::to_string(line_no);
      if (tab == std::string::npos) {
        raise(Errc::MalformedRepositoryLine, "missing TAB (" + where + ")");
      }
      const std::string hash = line.substr(0, tab);
      const std::string label = line.substr(tab + 1);
      if (!is_hex32(hash)) {
        raise(Errc::MalformedRepositoryLine, "bad hash '" + hash + "' (" + where + ")");
      }
      if (label.empty()) {
        raise(Errc::MalformedRepositoryLine, "empty label (" + where + ")");
      }
      if (!out.repo.insert(hash, label)) {
        out.warnings.push_back("duplicate hash " + to_lower(hash) + " at " + where +
                               "; keeping earlier label '" + out.repo.lookup(hash) + "'");
      }
    }
  }
  return out;
}

std::string label(const wire::ParsedClientHello& parsed, const LabelRepository& repo) {
  return repo.lookup(ja3_hash(ja3_string(parsed)));
}

Ja3Record make_record(const wire::ParsedClientHello& parsed, const LabelRepository& repo) {
  Ja3Record rec;
  rec.decimal_string = ja3_string(parsed);
  rec.hash = ja3_hash(rec.decimal_string);
  rec.label = repo.lookup(rec.hash);
  return rec;
}

wire::FeatureBytes ja3_feature_bytes(const wire::ParsedClientHello& parsed) {
  const Ja3Fields f = ja3_fields(parsed);
  wire::FeatureBytes out;
  out.source_id = parsed.source_id;
  auto put16 = [&](uint16_t v) {
    out.bytes.push_back(static_cast<uint8_t>(v >> 8));
    out.bytes.push_back(static_cast<uint8_t>(v & 0xff));
  };
  put16(f.version);
  for (uint16_t v : f.ciphers) put16(v);
  for (uint16_t v : f.extensions) put16(v);
  for (uint16_t v : f.curves) put16(v);
  out.bytes.insert(out.bytes.end(), f.point_formats.begin(), f.point_formats.end());
  return out;
}

wire::FeatureBytes extract_features(const wire::ParsedClientHello& parsed, ByteMode mode) {
  return mode == ByteMode::AllBytes ? wire::scrub(parsed) : ja3_feature_bytes(parsed);
}

const char* byte_mode_name(ByteMode mode) {
  return mode == ByteMode::AllBytes ? "all" : "ja3";
}

ByteMode byte_mode_from_name(const std::string& name) {
  if (name == "all") return ByteMode::AllBytes;
  if (name == "ja3") return ByteMode::Ja3Bytes;
  raise(Errc::InvalidProfile, "unknown byte mode '" + name + "'");
}

}  // namespace hellogram::ja3
