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

#include <functional>
#include <set>

#include <doctest.h>

#include "hellogram/errors.hpp"
#include "hellogram/hello_builder.hpp"
#include "hellogram/wire.hpp"
#include "helpers/random_hello.hpp"

using namespace hellogram;

namespace {

Errc code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return Errc::IoError;
}

}  // namespace

TEST_CASE("hex conversion") {
  CHECK(wire::hex_to_bytes("160301") == Bytes{0x16, 0x03, 0x01});
  CHECK(wire::hex_to_bytes("00") == Bytes{0x00});
  CHECK(wire::hex_to_bytes("ff") == Bytes{0xff});
  CHECK(wire::hex_to_bytes("FF") == Bytes{0xff});
  CHECK(wire::hex_to_bytes("").empty());

  CHECK(code_of([] { wire::hex_to_bytes("0g"); }) == Errc::InvalidHexDigit);
  CHECK(code_of([] { wire::hex_to_bytes("abc"); }) == Errc::OddDigitCount);

  SUBCASE("bijection over all 256 pairs") {
    std::set<uint8_t> seen;
    for (int v = 0; v < 256; ++v) {
      Bytes one{static_cast<uint8_t>(v)};
      const std::string hex = wire::bytes_to_hex(one);
      CHECK(hex.size() == 2);
      const Bytes back = wire::hex_to_bytes(hex);
      REQUIRE(back.size() == 1);
      CHECK(back[0] == v);
      seen.insert(back[0]);
    }
    CHECK(seen.size() == 256);
  }
}

TEST_CASE("parse extracts the ClientHello fields") {
  const auto raw = HelloBuilder()
                       .version(0x0301)
                       .ciphers({0x1301, 0x0005, 0xc02b})
                       .random_fill(0xab)
                       .raw("t1");
  REQUIRE(raw.bytes[0] == 0x16);
  REQUIRE(raw.bytes[5] == 0x01);

  const auto parsed = wire::parse_client_hello(raw);
  CHECK(parsed.legacy_version == 0x0301);
  CHECK(parsed.cipher_suites == std::vector<uint16_t>{0x1301, 0x0005, 0xc02b});
  CHECK(parsed.random[0] == 0xab);
  CHECK(parsed.framed);
  CHECK(parsed.source_id == "t1");
}

TEST_CASE("zero-length session id parses as empty") {
  const auto parsed = wire::parse_client_hello(HelloBuilder().session_id({}).raw());
  CHECK(parsed.session_id.empty());
}

TEST_CASE("a 19-cipher hello yields 19 entries") {
  std::vector<uint16_t> suites;
  for (uint16_t i = 0; i < 19; ++i) suites.push_back(static_cast<uint16_t>(0xc000 + i));
  const auto parsed = wire::parse_client_hello(HelloBuilder().ciphers(suites).raw());
  CHECK(parsed.cipher_suites.size() == 19);
}

TEST_CASE("bare handshake input (no record header) is accepted") {
  const auto framed = HelloBuilder().raw();
  wire::RawClientHello bare{Bytes(framed.bytes.begin() + 5, framed.bytes.end()), "bare"};
  const auto parsed = wire::parse_client_hello(bare);
  CHECK_FALSE(parsed.framed);
  CHECK(wire::serialize(parsed) == bare.bytes);
}

TEST_CASE("parse errors") {
  const auto good = HelloBuilder().raw();

  SUBCASE("truncated record") {
    wire::RawClientHello cut{Bytes(good.bytes.begin(), good.bytes.begin() + 20), "cut"};
    CHECK(code_of([&] { wire::parse_client_hello(cut); }) == Errc::TruncatedMessage);
  }
  SUBCASE("empty input") {
    CHECK(code_of([] { wire::parse_client_hello({{}, "empty"}); }) == Errc::TruncatedMessage);
  }
  SUBCASE("not a handshake record") {
    Bytes b = good.bytes;
    b[0] = 0x17;
    CHECK(code_of([&] { wire::parse_client_hello({b, "app"}); }) == Errc::NotClientHello);
  }
  SUBCASE("wrong handshake type") {
    Bytes b = good.bytes;
    b[5] = 0x02;  // server hello
    CHECK(code_of([&] { wire::parse_client_hello({b, "sh"}); }) == Errc::NotClientHello);
  }
  SUBCASE("trailing bytes after the record") {
    Bytes b = good.bytes;
    b.push_back(0x00);
    CHECK(code_of([&] { wire::parse_client_hello({b, "trail"}); }) == Errc::MalformedLength);
  }
  SUBCASE("handshake length inconsistent with record length") {
    Bytes b = good.bytes;
    b[8] = static_cast<uint8_t>(b[8] + 1);  // 24-bit handshake length low byte
    CHECK(code_of([&] { wire::parse_client_hello({b, "inner"}); }) == Errc::TruncatedMessage);
  }
  SUBCASE("odd cipher list length") {
    // version(2) random(32) sid_len(1) at offset 9; cipher length follows.
    Bytes b = good.bytes;
    const size_t cipher_len_at = 9 + 2 + 32 + 1;
    b[cipher_len_at + 1] = static_cast<uint8_t>(b[cipher_len_at + 1] + 1);
    CHECK(code_of([&] { wire::parse_client_hello({b, "odd"}); }) == Errc::MalformedLength);
  }
}

TEST_CASE("round-trip: serialize after parse reproduces the input") {
  Rng rng(7);
  for (int i = 0; i < 300; ++i) {
    const auto raw = testutil::random_hello(rng);
    const auto parsed = wire::parse_client_hello(raw);
    CHECK(wire::serialize(parsed) == raw.bytes);
  }
}

TEST_CASE("scrub removes exactly the volatile fields") {
  SUBCASE("minimal hello: everything after the headers minus random") {
    const auto raw =
        HelloBuilder().session_id({}).no_extensions().random_fill(0x55).raw("min");
    const auto parsed = wire::parse_client_hello(raw);
    const auto features = wire::scrub(parsed);

    Bytes expected(raw.bytes.begin() + 9, raw.bytes.end());  // drop record+handshake headers
    expected.erase(expected.begin() + 2, expected.begin() + 2 + 32);  // drop random
    CHECK(features.bytes == expected);
  }

  SUBCASE("random bytes never influence features") {
    auto b = HelloBuilder().ciphers({0x1301, 0xc02b});
    const auto a = b.random_fill(0x00).raw();
    const auto c = b.random_fill(0xff).raw();
    CHECK(wire::scrub(wire::parse_client_hello(a)).bytes ==
          wire::scrub(wire::parse_client_hello(c)).bytes);
  }

  SUBCASE("session id value removed, length octet kept") {
    auto base = HelloBuilder().ciphers({0x1301, 0xc02b});
    const auto with_a = base.session_id(Bytes(32, 0x11)).raw();
    const auto with_b = base.session_id(Bytes(32, 0x22)).raw();
    const auto empty = base.session_id({}).raw();

    const auto fa = wire::scrub(wire::parse_client_hello(with_a)).bytes;
    const auto fb = wire::scrub(wire::parse_client_hello(with_b)).bytes;
    const auto fe = wire::scrub(wire::parse_client_hello(empty)).bytes;
    CHECK(fa == fb);        // value octets gone
    CHECK(fa != fe);        // length octet retained (32 vs 0)
    CHECK(fa.size() == fe.size());
  }

  SUBCASE("server_name removed wholesale") {
    auto base = HelloBuilder().ciphers({0x1301, 0xc02b});
    const auto long_name = base.server_name("example.com").supported_groups({0x001d}).raw();
    auto base2 = HelloBuilder().ciphers({0x1301, 0xc02b});
    const auto short_name = base2.server_name("a.io").supported_groups({0x001d}).raw();
    CHECK(wire::scrub(wire::parse_client_hello(long_name)).bytes ==
          wire::scrub(wire::parse_client_hello(short_name)).bytes);
  }

  SUBCASE("key_share keeps group and length, drops the key") {
    auto mk = [](uint8_t fill) {
      return HelloBuilder()
          .ciphers({0x1301, 0xc02b})
          .key_share(0x001d, Bytes(32, fill))
          .raw();
    };
    const auto fa = wire::scrub(wire::parse_client_hello(mk(0xaa)));
    const auto fb = wire::scrub(wire::parse_client_hello(mk(0xbb)));
    CHECK(fa.bytes == fb.bytes);

    // The group id and the length fields must survive.
    const Bytes& bytes = fa.bytes;
    bool group_found = false;
    for (size_t i = 0; i + 1 < bytes.size(); ++i) {
      if (bytes[i] == 0x00 && bytes[i + 1] == 0x1d) group_found = true;
    }
    CHECK(group_found);
  }

  SUBCASE("deterministic for equal parses") {
    Rng rng(9);
    const auto raw = testutil::random_hello(rng);
    const auto p = wire::parse_client_hello(raw);
    CHECK(wire::scrub(p).bytes == wire::scrub(p).bytes);
  }
}

TEST_CASE("dedupe") {
  auto fb = [](Bytes b, std::string label) {
    wire::FeatureBytes f;
    f.bytes = std::move(b);
    f.label = std::move(label);
    return f;
  };

  SUBCASE("duplicate collapse keeps first-seen order") {
    const auto out = wire::dedupe({fb({1, 2}, "A"), fb({1, 2}, "A"), fb({3}, "B")});
    REQUIRE(out.size() == 2);
    CHECK(out[0].bytes == Bytes{1, 2});
    CHECK(out[1].bytes == Bytes{3});
  }

  SUBCASE("empty corpus") { CHECK(wire::dedupe({}).empty()); }

  SUBCASE("matches a brute-force set oracle") {
    Rng rng(21);
    std::vector<wire::FeatureBytes> corpus;
    for (int i = 0; i < 10; ++i) {
      corpus.push_back(fb({static_cast<uint8_t>(rng.bounded(3))}, "L"));
    }
    std::set<Bytes> oracle;
    for (const auto& f : corpus) oracle.insert(f.bytes);
    CHECK(wire::dedupe(corpus).size() == oracle.size());
  }

  SUBCASE("identical bytes with different labels conflict") {
    CHECK(code_of([&] { wire::dedupe({fb({1}, "A"), fb({1}, "B")}); }) == Errc::LabelConflict);
  }
}
