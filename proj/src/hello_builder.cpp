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

#include "hellogram/hello_builder.hpp"

#include <algorithm>

namespace hellogram {

namespace {

void put_u16(Bytes& out, uint16_t v) {
  out.push_back(static_cast<uint8_t>(v >> 8));
  out.push_back(static_cast<uint8_t>(v & 0xff));
}

}  // namespace

HelloBuilder::HelloBuilder() = default;

HelloBuilder& HelloBuilder::version(uint16_t v) {
  version_ = v;
  return *this;
}

HelloBuilder& HelloBuilder::record_version(uint16_t v) {
  record_version_ = v;
  return *this;
}

HelloBuilder& HelloBuilder::framed(bool on) {
  framed_ = on;
  return *this;
}

HelloBuilder& HelloBuilder::random(const std::array<uint8_t, 32>& bytes) {
  random_ = bytes;
  return *this;
}

HelloBuilder& HelloBuilder::random_fill(uint8_t value) {
  random_.fill(value);
  return *this;
}

HelloBuilder& HelloBuilder::session_id(Bytes bytes) {
  session_id_ = std::move(bytes);
  return *this;
}

HelloBuilder& HelloBuilder::ciphers(std::vector<uint16_t> suites) {
  ciphers_ = std::move(suites);
  return *this;
}

HelloBuilder& HelloBuilder::compressions(Bytes methods) {
  compressions_ = std::move(methods);
  return *this;
}

HelloBuilder& HelloBuilder::extension(uint16_t type, Bytes body) {
  extensions_.push_back({type, std::move(body)});
  return *this;
}

HelloBuilder& HelloBuilder::no_extensions() {
  extensions_block_ = false;
  extensions_.clear();
  return *this;
}

HelloBuilder& HelloBuilder::server_name(std::string_view host) {
  // server_name_list: u16 list length, entry type 0, u16 name length, name.
  Bytes body;
  put_u16(body, static_cast<uint16_t>(host.size() + 3));
  body.push_back(0x00);
  put_u16(body, static_cast<uint16_t>(host.size()));
  body.insert(body.end(), host.begin(), host.end());
  return extension(wire::kExtServerName, std::move(body));
}

HelloBuilder& HelloBuilder::supported_groups(std::initializer_list<uint16_t> groups) {
  return supported_groups(std::vector<uint16_t>(groups));
}

HelloBuilder& HelloBuilder::supported_groups(const std::vector<uint16_t>& groups) {
  Bytes body;
  put_u16(body, static_cast<uint16_t>(groups.size() * 2));
  for (uint16_t g : groups) put_u16(body, g);
  return extension(wire::kExtSupportedGroups, std::move(body));
}

HelloBuilder& HelloBuilder::ec_point_formats(std::initializer_list<uint8_t> formats) {
  Bytes body;
  body.push_back(static_cast<uint8_t>(formats.size()));
  body.insert(body.end(), formats.begin(), formats.end());
  return extension(wire::kExtEcPointFormats, std::move(body));
}

HelloBuilder& HelloBuilder::alpn(std::initializer_list<std::string_view> protocols) {
  std::vector<std::string> copy;
  for (auto p : protocols) copy.emplace_back(p);
  return alpn(copy);
}

HelloBuilder& HelloBuilder::alpn(const std::vector<std::string>& protocols) {
  Bytes list;
  for (const std::string& p : protocols) {
    list.push_back(static_cast<uint8_t>(p.size()));
    list.insert(list.end(), p.begin(), p.end());
  }
  Bytes body;
  put_u16(body, static_cast<uint16_t>(list.size()));
  body.insert(body.end(), list.begin(), list.end());
  return extension(0x0010, std::move(body));
}

HelloBuilder& HelloBuilder::key_share(uint16_t group, Bytes key_exchange) {
  Bytes body;
  put_u16(body, static_cast<uint16_t>(key_exchange.size() + 4));
  put_u16(body, group);
  put_u16(body, static_cast<uint16_t>(key_exchange.size()));
  body.insert(body.end(), key_exchange.begin(), key_exchange.end());
  return extension(wire::kExtKeyShare, std::move(body));
}

HelloBuilder& HelloBuilder::supported_versions(std::initializer_list<uint16_t> versions) {
  Bytes body;
  body.push_back(static_cast<uint8_t>(versions.size() * 2));
  for (uint16_t v : versions) put_u16(body, v);
  return extension(0x002b, std::move(body));
}

HelloBuilder& HelloBuilder::signature_algorithms(const std::vector<uint16_t>& schemes) {
  Bytes body;
  put_u16(body, static_cast<uint16_t>(schemes.size() * 2));
  for (uint16_t s : schemes) put_u16(body, s);
  return extension(0x000d, std::move(body));
}

HelloBuilder& HelloBuilder::padding(size_t n) {
  return extension(0x0015, Bytes(n, 0x00));
}

Bytes HelloBuilder::build() const {
  wire::ParsedClientHello p;
  p.legacy_version = version_;
  p.record_version = record_version_;
  p.framed = framed_;
  p.random = random_;
  p.session_id = session_id_;
  p.cipher_suites = ciphers_;
  p.compression_methods = compressions_;
  p.extensions = extensions_;
  p.has_extensions_block = extensions_block_;
  return wire::serialize(p);
}

wire::RawClientHello HelloBuilder::raw(std::string source_id) const {
  return {build(), std::move(source_id)};
}

wire::ParsedClientHello HelloBuilder::parsed(std::string source_id) const {
  return wire::parse_client_hello(raw(std::move(source_id)));
}

}  // namespace hellogram
