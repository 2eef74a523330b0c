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

#include <cctype>
#include <filesystem>
#include <fstream>

#include <doctest.h>
#include <openssl/evp.h>

#include "hellogram/errors.hpp"
#include "hellogram/hello_builder.hpp"
#include "hellogram/ja3.hpp"
#include "hellogram/rng.hpp"
#include "helpers/random_hello.hpp"

using namespace hellogram;

namespace {

/// Independent MD5 oracle (OpenSSL EVP) for cross-checking our digest.
std::string openssl_md5_hex(const std::string& input) {
  unsigned char digest[16];
  unsigned int len = 0;
  REQUIRE(EVP_Digest(input.data(), input.size(), digest, &len, EVP_md5(), nullptr) == 1);
  REQUIRE(len == 16);
  return wire::bytes_to_hex({digest, 16});
}

std::filesystem::path temp_file(const std::string& name, const std::string& content) {
  const auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream out(path, std::ios::binary);
  out << content;
  return path;
}

}  // namespace

TEST_CASE("grease detection matches the sixteen reserved values") {
  size_t count = 0;
  for (uint32_t v = 0; v <= 0xffff; ++v) {
    if (ja3::is_grease(static_cast<uint16_t>(v))) ++count;
  }
  CHECK(count == 16);
  for (uint16_t v : ja3::kGreaseValues) CHECK(ja3::is_grease(v));
  CHECK_FALSE(ja3::is_grease(0x1301));
  CHECK_FALSE(ja3::is_grease(0x0a1a));
}

TEST_CASE("ja3 string formatting") {
  SUBCASE("no extensions leaves three empty fields") {
    const auto parsed =
        HelloBuilder().version(0x0303).ciphers({0x1301, 0x1302}).no_extensions().parsed();
    CHECK(ja3::ja3_string(parsed) == "771,4865-4866,,,");
  }

  SUBCASE("GREASE ciphers are dropped") {
    const auto parsed = HelloBuilder().ciphers({0x0a0a, 0x1301}).no_extensions().parsed();
    CHECK(ja3::ja3_string(parsed) == "771,4865,,,");
  }

  SUBCASE("all five fields in order, wire extension order preserved") {
    const auto parsed = HelloBuilder()
                            .ciphers({0x1301})
                            .ec_point_formats({0x00})        // type 11 first on the wire
                            .supported_groups({0x001d, 0x0017})
                            .parsed();
    CHECK(ja3::ja3_string(parsed) == "771,4865,11-10,29-23,0");
  }

  SUBCASE("GREASE filtered from extension types and curves") {
    const auto parsed = HelloBuilder()
                            .ciphers({0x1301})
                            .extension(0x2a2a, {})
                            .supported_groups({0x0a0a, 0x001d})
                            .parsed();
    CHECK(ja3::ja3_string(parsed) == "771,4865,10,29,");
  }

  SUBCASE("swapping a GREASE cipher with its neighbour keeps the string") {
    auto b = HelloBuilder();
    const auto original = b.ciphers({0x0a0a, 0x1301, 0xc02b}).parsed();
    const auto swapped = b.ciphers({0x1301, 0x0a0a, 0xc02b}).parsed();
    CHECK(ja3::ja3_string(original) == ja3::ja3_string(swapped));
    CHECK(ja3::ja3_hash(ja3::ja3_string(original)) == ja3::ja3_hash(ja3::ja3_string(swapped)));
  }
}

TEST_CASE("ja3_hash") {
  CHECK(ja3::ja3_hash("") == "d41d8cd98f00b204e9800998ecf8427e");
  CHECK(ja3::ja3_hash("771,4865-4866,,,") == openssl_md5_hex("771,4865-4866,,,"));

  SUBCASE("format contract") {
    Rng rng(5);
    for (int i = 0; i < 50; ++i) {
      std::string s;
      const size_t len = rng.bounded(64);
      for (size_t j = 0; j < len; ++j) s.push_back(static_cast<char>(rng.bounded(256)));
      const std::string h = ja3::ja3_hash(s);
      CHECK(h.size() == 32);
      CHECK(h.find_first_not_of("0123456789abcdef") == std::string::npos);
      CHECK(h == openssl_md5_hex(s));
    }
  }
}

TEST_CASE("grease swap invariance and non-grease sensitivity") {
  Rng rng(17);
  testutil::RandomHelloOptions opts;
  opts.force_grease_cipher = true;
  for (int i = 0; i < 200; ++i) {
    const auto parsed = wire::parse_client_hello(testutil::random_hello(rng, opts));
    const std::string base_hash = ja3::ja3_hash(ja3::ja3_string(parsed));

    // Swap the GREASE value with a neighbour: hash must not move.
    size_t g = 0;
    while (!ja3::is_grease(parsed.cipher_suites[g])) ++g;
    auto grease_swapped = parsed;
    const size_t partner = g + 1 < grease_swapped.cipher_suites.size() ? g + 1 : g - 1;
    std::swap(grease_swapped.cipher_suites[g], grease_swapped.cipher_suites[partner]);
    CHECK(ja3::ja3_hash(ja3::ja3_string(grease_swapped)) == base_hash);

    // Swap two adjacent distinct non-GREASE values: hash must move.
    auto& suites = parsed.cipher_suites;
    for (size_t j = 0; j + 1 < suites.size(); ++j) {
      if (!ja3::is_grease(suites[j]) && !ja3::is_grease(suites[j + 1]) &&
          suites[j] != suites[j + 1]) {
        auto sensitive = parsed;
        std::swap(sensitive.cipher_suites[j], sensitive.cipher_suites[j + 1]);
        CHECK(ja3::ja3_hash(ja3::ja3_string(sensitive)) != base_hash);
        break;
      }
    }
  }
}

TEST_CASE("label lookup") {
  const auto parsed = HelloBuilder().ciphers({0x1301, 0xc02b}).parsed();
  const std::string hash = ja3::ja3_hash(ja3::ja3_string(parsed));

  ja3::LabelRepository repo;
  SUBCASE("present hash maps to its label") {
    repo.insert(hash, "Adware");
    CHECK(ja3::label(parsed, repo) == "Adware");
  }
  SUBCASE("absent hash maps to Unknown") {
    CHECK(ja3::label(parsed, repo) == ja3::kUnknownLabel);
  }
  SUBCASE("lookup is case-insensitive") {
    std::string upper = hash;
    for (char& c : upper) c = static_cast<char>(std::toupper(c));
    repo.insert(upper, "X");
    CHECK(repo.lookup(hash) == "X");
  }
  SUBCASE("hellos with equal JA3 strings share a label") {
    // Same JA3 fields, different compression methods: a JA3 collision.
    const auto other =
        HelloBuilder().ciphers({0x1301, 0xc02b}).compressions({0x00, 0x01}).parsed();
    REQUIRE(wire::serialize(other) != wire::serialize(parsed));
    repo.insert(hash, "Shared");
    CHECK(ja3::label(parsed, repo) == "Shared");
    CHECK(ja3::label(other, repo) == "Shared");
  }
}

TEST_CASE("repository files") {
  const std::string h1 = ja3::ja3_hash("one");
  const std::string h2 = ja3::ja3_hash("two");

  SUBCASE("two entries load") {
    const auto path = temp_file("hg_repo_a.tsv", h1 + "\tAlpha\n" + h2 + "\tBeta\n");
    const auto loaded = ja3::load_repository(path);
    CHECK(loaded.repo.size() == 2);
    CHECK(loaded.repo.lookup(h1) == "Alpha");
    CHECK(loaded.warnings.empty());
  }

  SUBCASE("comments and blank lines are ignored") {
    const auto path = temp_file("hg_repo_b.tsv", "# comment\n\n" + h1 + "\tAlpha\n");
    CHECK(ja3::load_repository(path).repo.size() == 1);
  }

  SUBCASE("first file wins on collision, with a warning") {
    const auto a = temp_file("hg_repo_c1.tsv", h1 + "\tFirst\n");
    const auto b = temp_file("hg_repo_c2.tsv", h1 + "\tSecond\n");
    const auto loaded = ja3::load_repositories({a, b});
    CHECK(loaded.repo.lookup(h1) == "First");
    REQUIRE(loaded.warnings.size() == 1);
    CHECK(loaded.warnings[0].find(h1) != std::string::npos);
  }

  SUBCASE("empty file gives an empty repository") {
    const auto path = temp_file("hg_repo_d.tsv", "");
    const auto loaded = ja3::load_repository(path);
    CHECK(loaded.repo.empty());
    CHECK(loaded.repo.lookup(h1) == ja3::kUnknownLabel);
  }

  SUBCASE("malformed lines are fatal") {
    const auto bad_hash = temp_file("hg_repo_e.tsv", "1234\tShort\n");
    CHECK_THROWS_AS((void)ja3::load_repository(bad_hash), Error);
    const auto no_tab = temp_file("hg_repo_f.tsv", h1 + " NoTab\n");
    CHECK_THROWS_AS((void)ja3::load_repository(no_tab), Error);
  }
}

TEST_CASE("ja3 feature bytes") {
  SUBCASE("version and ciphers only") {
    const auto parsed =
        HelloBuilder().version(0x0303).ciphers({0x1301}).no_extensions().parsed();
    CHECK(ja3::ja3_feature_bytes(parsed).bytes == Bytes{0x03, 0x03, 0x13, 0x01});
  }

  SUBCASE("field order matches the ja3 string") {
    const auto parsed = HelloBuilder()
                            .version(0x0303)
                            .ciphers({0x1301})
                            .supported_groups({0x001d})
                            .ec_point_formats({0x00})
                            .parsed();
    CHECK(ja3::ja3_feature_bytes(parsed).bytes ==
          Bytes{0x03, 0x03, 0x13, 0x01, 0x00, 0x0a, 0x00, 0x0b, 0x00, 0x1d, 0x00});
  }
}
