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

#include "hellogram/wire.hpp"

#include <algorithm>
#include <unordered_map>

#include "hellogram/errors.hpp"

namespace hellogram::wire {

namespace {

/// Bounds-checked big-endian cursor over a byte buffer.
class Reader {
public:
  Reader(std::span<const uint8_t> data, const std::string& source)
      : data_(data), source_(source) {}

  size_t pos() const { return pos_; }
  size_t remaining() const { return data_.size() - pos_; }

  uint8_t u8(const char* what) {
    need(1, what);
    return data_[pos_++];
  }

  uint16_t u16(const char* what) {
    need(2, what);
    const uint16_t v = static_cast<uint16_t>((data_[pos_] << 8) | data_[pos_ + 1]);
    pos_ += 2;
    return v;
  }

  uint32_t u24(const char* what) {
    need(3, what);
    const uint32_t v = (static_cast<uint32_t>(data_[pos_]) << 16) |
                       (static_cast<uint32_t>(data_[pos_ + 1]) << 8) | data_[pos_ + 2];
    pos_ += 3;
    return v;
  }

  std::span<const uint8_t> take(size_t n, const char* what) {
    need(n, what);
    auto out = data_.subspan(pos_, n);
    pos_ += n;
    return out;
  }

  void need(size_t n, const char* what) const {
    if (remaining() < n) {
      raise(Errc::TruncatedMessage,
            std::string(what) + " needs " + std::to_string(n) + " octets, " +
                std::to_string(remaining()) + " left (" + source_ + ")");
    }
  }

private:
  std::span<const uint8_t> data_;
  size_t pos_ = 0;
  const std::string& source_;
};

void put_u16(Bytes& out, uint16_t v) {
  out.push_back(static_cast<uint8_t>(v >> 8));
  out.push_back(static_cast<uint8_t>(v & 0xff));
}

void put_u24(Bytes& out, uint32_t v) {
  out.push_back(static_cast<uint8_t>((v >> 16) & 0xff));
  out.push_back(static_cast<uint8_t>((v >> 8) & 0xff));
  out.push_back(static_cast<uint8_t>(v & 0xff));
}

/// Appends the handshake body fields (everything after the handshake header),
/// optionally scrubbing. Shared by serialize() and scrub() so the two agree
/// on field order by construction.
void write_body(const ParsedClientHello& p, Bytes& out, bool scrubbed) {
  put_u16(out, p.legacy_version);
  if (!scrubbed) {
    out.insert(out.end(), p.random.begin(), p.random.end());
  }
  out.push_back(static_cast<uint8_t>(p.session_id.size()));
  if (!scrubbed) {
    out.insert(out.end(), p.session_id.begin(), p.session_id.end());
  }
  put_u16(out, static_cast<uint16_t>(p.cipher_suites.size() * 2));
  for (uint16_t suite : p.cipher_suites) put_u16(out, suite);
  out.push_back(static_cast<uint8_t>(p.compression_methods.size()));
  out.insert(out.end(), p.compression_methods.begin(), p.compression_methods.end());

  if (!p.has_extensions_block) return;

  // In the scrubbed view the block length covers only kept extensions, so
  // a removed server_name cannot leak its size into these octets. Each kept
  // extension still contributes its original (pre-scrub) length.
  size_t ext_total = 0;
  for (const Extension& ext : p.extensions) {
    if (scrubbed && ext.type == kExtServerName) continue;
    ext_total += 4 + ext.body.size();
  }
  put_u16(out, static_cast<uint16_t>(ext_total));

  for (const Extension& ext : p.extensions) {
    if (scrubbed && ext.type == kExtServerName) continue;
    put_u16(out, ext.type);
    put_u16(out, static_cast<uint16_t>(ext.body.size()));
    if (scrubbed && ext.type == kExtKeyShare) {
      // Keep the share-list length, group ids and key lengths; drop the
      // key-exchange octets themselves. A body that does not parse as a
      // key_share list is kept verbatim.
      const Bytes& b = ext.body;
      bool consistent = b.size() >= 2;
      size_t at = 2;
      Bytes kept;
      if (consistent) {
        const size_t list_len = static_cast<size_t>(b[0]) << 8 | b[1];
        consistent = (list_len == b.size() - 2);
        kept.push_back(b[0]);
        kept.push_back(b[1]);
        while (consistent && at < b.size()) {
          if (at + 4 > b.size()) {
            consistent = false;
            break;
          }
          const size_t key_len = static_cast<size_t>(b[at + 2]) << 8 | b[at + 3];
          if (at + 4 + key_len > b.size()) {
            consistent = false;
            break;
          }
          kept.insert(kept.end(), b.begin() + at, b.begin() + at + 4);
          at += 4 + key_len;
        }
      }
      if (consistent) {
        out.insert(out.end(), kept.begin(), kept.end());
      } else {
        out.insert(out.end(), b.begin(), b.end());
      }
      continue;
    }
    out.insert(out.end(), ext.body.begin(), ext.body.end());
  }
}

}  // namespace

std::array<uint8_t, 5> ParsedClientHello::record_header() const {
  const size_t record_len = 4 + body_length();
  return {kRecordTypeHandshake, static_cast<uint8_t>(record_version >> 8),
          static_cast<uint8_t>(record_version & 0xff), static_cast<uint8_t>(record_len >> 8),
          static_cast<uint8_t>(record_len & 0xff)};
}

std::array<uint8_t, 4> ParsedClientHello::handshake_header() const {
  const size_t len = body_length();
  return {kHandshakeTypeClientHello, static_cast<uint8_t>((len >> 16) & 0xff),
          static_cast<uint8_t>((len >> 8) & 0xff), static_cast<uint8_t>(len & 0xff)};
}

size_t ParsedClientHello::body_length() const {
  size_t len = 2 + 32 + 1 + session_id.size() + 2 + cipher_suites.size() * 2 + 1 +
               compression_methods.size();
  if (has_extensions_block) {
    len += 2;
    for (const Extension& ext : extensions) len += 4 + ext.body.size();
  }
  return len;
}

ParsedClientHello parse_client_hello(const RawClientHello& raw) {
  if (raw.bytes.empty()) {
    raise(Errc::TruncatedMessage, "empty input (" + raw.source_id + ")");
  }

  ParsedClientHello out;
  out.source_id = raw.source_id;

  Reader r(raw.bytes, raw.source_id);
  size_t message_end = raw.bytes.size();

  const uint8_t first = raw.bytes[0];
  if (first == kRecordTypeHandshake) {
    out.framed = true;
    r.u8("record type");
    out.record_version = r.u16("record version");
    const size_t record_len = r.u16("record length");
    if (r.remaining() < record_len) {
      // The record promises more than we captured; a ClientHello spanning
      // multiple records or segments is out of scope.
      raise(Errc::TruncatedMessage, "record length " + std::to_string(record_len) +
                                        " exceeds available " + std::to_string(r.remaining()) +
                                        " (" + raw.source_id + ")");
    }
    if (r.remaining() > record_len) {
      raise(Errc::MalformedLength,
            "trailing data after TLS record (" + raw.source_id + ")");
    }
    message_end = r.pos() + record_len;
  } else if (first != kHandshakeTypeClientHello) {
    raise(Errc::NotClientHello,
          "first octet 0x" + bytes_to_hex({&first, 1}) + " is neither a handshake record nor a ClientHello (" +
              raw.source_id + ")");
  }

  const uint8_t handshake_type = r.u8("handshake type");
  if (handshake_type != kHandshakeTypeClientHello) {
    raise(Errc::NotClientHello, "handshake type " + std::to_string(handshake_type) + " (" +
                                    raw.source_id + ")");
  }
  const size_t body_len = r.u24("handshake length");
  if (r.remaining() < body_len) {
    raise(Errc::TruncatedMessage, "handshake length " + std::to_string(body_len) +
                                      " exceeds available " + std::to_string(r.remaining()) +
                                      " (" + raw.source_id + ")");
  }
  if (r.pos() + body_len != message_end) {
    raise(Errc::MalformedLength, "handshake length inconsistent with outer framing (" +
                                     raw.source_id + ")");
  }

  out.legacy_version = r.u16("legacy version");
  auto rnd = r.take(32, "random");
  std::copy(rnd.begin(), rnd.end(), out.random.begin());

  const uint8_t sid_len = r.u8("session id length");
  if (sid_len > 32) {
    raise(Errc::MalformedLength,
          "session id length " + std::to_string(sid_len) + " > 32 (" + raw.source_id + ")");
  }
  auto sid = r.take(sid_len, "session id");
  out.session_id.assign(sid.begin(), sid.end());

  const uint16_t cipher_bytes = r.u16("cipher suites length");
  if (cipher_bytes == 0 || cipher_bytes % 2 != 0) {
    raise(Errc::MalformedLength, "cipher suite list of " + std::to_string(cipher_bytes) +
                                     " octets (" + raw.source_id + ")");
  }
  auto suites = r.take(cipher_bytes, "cipher suites");
  out.cipher_suites.reserve(cipher_bytes / 2);
  for (size_t i = 0; i < suites.size(); i += 2) {
    out.cipher_suites.push_back(static_cast<uint16_t>((suites[i] << 8) | suites[i + 1]));
  }

  const uint8_t comp_len = r.u8("compression methods length");
  auto comps = r.take(comp_len, "compression methods");
  out.compression_methods.assign(comps.begin(), comps.end());

  if (r.pos() < message_end) {
    out.has_extensions_block = true;
    const uint16_t ext_total = r.u16("extensions length");
    if (r.pos() + ext_total != message_end) {
      raise(Errc::MalformedLength, "extensions length inconsistent with handshake length (" +
                                       raw.source_id + ")");
    }
    while (r.pos() < message_end) {
      Extension ext;
      ext.type = r.u16("extension type");
      const uint16_t ext_len = r.u16("extension length");
      if (r.pos() + ext_len > message_end) {
        raise(Errc::MalformedLength, "extension body overruns extensions block (" +
                                         raw.source_id + ")");
      }
      auto body = r.take(ext_len, "extension body");
      ext.body.assign(body.begin(), body.end());
      out.extensions.push_back(std::move(ext));
    }
  }

  return out;
}

Bytes serialize(const ParsedClientHello& parsed) {
  Bytes out;
  out.reserve((parsed.framed ? 5 : 0) + 4 + parsed.body_length());
  if (parsed.framed) {
    const auto rh = parsed.record_header();
    out.insert(out.end(), rh.begin(), rh.end());
  }
  const auto hh = parsed.handshake_header();
  out.insert(out.end(), hh.begin(), hh.end());
  write_body(parsed, out, /*scrubbed=*/false);
  return out;
}

FeatureBytes scrub(const ParsedClientHello& parsed) {
  FeatureBytes out;
  out.source_id = parsed.source_id;
  write_body(parsed, out.bytes, /*scrubbed=*/true);
  return out;
}

std::vector<FeatureBytes> dedupe(const std::vector<FeatureBytes>& corpus) {
  std::vector<FeatureBytes> unique;
  std::unordered_map<std::string_view, size_t> seen;
  unique.reserve(corpus.size());
  for (const FeatureBytes& fb : corpus) {
    const std::string_view key(reinterpret_cast<const char*>(fb.bytes.data()), fb.bytes.size());
    auto it = seen.find(key);
    if (it == seen.end()) {
      unique.push_back(fb);
      const FeatureBytes& stored = unique.back();
      seen.emplace(
          std::string_view(reinterpret_cast<const char*>(stored.bytes.data()), stored.bytes.size()),
          unique.size() - 1);
    } else if (unique[it->second].label != fb.label) {
      raise(Errc::LabelConflict, "identical bytes labeled '" + unique[it->second].label +
                                     "' (" + unique[it->second].source_id + ") and '" + fb.label +
                                     "' (" + fb.source_id + ")");
    }
  }
  return unique;
}

Bytes hex_to_bytes(std::string_view hex) {
  if (hex.size() % 2 != 0) {
    raise(Errc::OddDigitCount, std::to_string(hex.size()) + " hex digits");
  }
  auto nibble = [&](char c) -> uint8_t {
    if (c >= '0' && c <= '9') return static_cast<uint8_t>(c - '0');
    if (c >= 'a' && c <= 'f') return static_cast<uint8_t>(c - 'a' + 10);
    if (c >= 'A' && c <= 'F') return static_cast<uint8_t>(c - 'A' + 10);
    raise(Errc::InvalidHexDigit, "'" + std::string(1, c) + "'");
  };
  Bytes out;
  out.reserve(hex.size() / 2);
  for (size_t i = 0; i < hex.size(); i += 2) {
    out.push_back(static_cast<uint8_t>((nibble(hex[i]) << 4) | nibble(hex[i + 1])));
  }
  return out;
}

std::string bytes_to_hex(std::span<const uint8_t> bytes) {
  static constexpr char digits[] = "0123456789abcdef";
  std::string out;
  out.reserve(bytes.size() * 2);
  for (uint8_t b : bytes) {
    out.push_back(digits[b >> 4]);
    out.push_back(digits[b & 0x0f]);
  }
  return out;
}

}  // namespace hellogram::wire
