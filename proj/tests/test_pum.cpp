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

#include <cmath>
#include <filesystem>
#include <fstream>

#include <doctest.h>

#include "hellogram/errors.hpp"
#include "hellogram/ingest.hpp"
#include "hellogram/pum.hpp"
#include "hellogram/rng.hpp"

using namespace hellogram;

namespace {

wire::FeatureBytes fb(Bytes bytes, std::string label = "L") {
  wire::FeatureBytes f;
  f.bytes = std::move(bytes);
  f.label = std::move(label);
  return f;
}

/// Random labeled corpus over a tiny byte alphabet; sequence lengths vary.
std::vector<wire::FeatureBytes> random_corpus(Rng& rng, size_t n, size_t n_labels) {
  std::vector<wire::FeatureBytes> out;
  for (size_t i = 0; i < n; ++i) {
    const std::string label(1, static_cast<char>('A' + rng.bounded(n_labels)));
    Bytes bytes(1 + rng.bounded(6));
    for (auto& b : bytes) b = static_cast<uint8_t>(rng.bounded(8));
    out.push_back(fb(std::move(bytes), label));
  }
  return out;
}

bool same_counts(const pum::ModelSet& a, const pum::ModelSet& b) {
  if (a.size() != b.size() || a.delta() != b.delta()) return false;
  auto ia = a.entries().begin();
  auto ib = b.entries().begin();
  for (; ia != a.entries().end(); ++ia, ++ib) {
    if (ia->first != ib->first) return false;
    if (ia->second.counts.raw() != ib->second.counts.raw()) return false;
    if (ia->second.counts.sequences() != ib->second.counts.sequences()) return false;
    if (ia->second.counts.registry() != ib->second.counts.registry()) return false;
    const auto& pa = ia->second.model.probs;
    const auto& pb = ib->second.model.probs;
    if (pa.size() != pb.size()) return false;
    for (size_t i = 0; i < pa.size(); ++i) {
      if (std::abs(pa[i] - pb[i]) > 1e-12) return false;
    }
  }
  return true;
}

}  // namespace

TEST_CASE("accumulate grows the matrix and counts cells") {
  pum::FrequencyMatrix m("L", 1e-8);
  CHECK(m.rows() == 0);

  m.accumulate(fb({22, 3}));
  CHECK(m.rows() == 2);
  CHECK(m.sequences() == 1);
  CHECK(m.count(0, 22) == doctest::Approx(1.0 + 1e-8));
  CHECK(m.count(1, 3) == doctest::Approx(1.0 + 1e-8));
  CHECK(m.count(0, 0) == doctest::Approx(1e-8));
  CHECK(m.count(1, 200) == doctest::Approx(1e-8));

  SUBCASE("additivity: the same sequence twice") {
    m.accumulate(fb({22, 3}));
    CHECK(m.count(0, 22) == doctest::Approx(2.0 + 1e-8));
    CHECK(m.sequences() == 2);
  }

  SUBCASE("longer sequence grows rows, shorter leaves tail untouched") {
    m.accumulate(fb({1, 2, 3, 4}));
    CHECK(m.rows() == 4);
    m.accumulate(fb({9}));
    CHECK(m.rows() == 4);
    CHECK(m.increments(3, 4) == 1);
  }

  SUBCASE("m tracks the maximum sequence length seen") {
    Bytes long_seq(448, 7);
    m.accumulate(fb(std::move(long_seq)));
    CHECK(m.rows() == 448);
  }

  SUBCASE("label mismatch raises") {
    CHECK_THROWS_AS(m.accumulate(fb({1}, "Other")), Error);
  }
}

TEST_CASE("absorb skips duplicates") {
  pum::FrequencyMatrix m("L", 1e-8);
  CHECK(m.absorb(fb({5, 6, 7})));
  const auto snapshot = m.raw();
  CHECK_FALSE(m.absorb(fb({5, 6, 7})));
  CHECK(m.raw() == snapshot);
  CHECK(m.sequences() == 1);
  CHECK(m.absorb(fb({5, 6})));
}

TEST_CASE("normalize") {
  pum::FrequencyMatrix m("L", 1e-8);
  m.accumulate(fb({22}));

  SUBCASE("a touched row follows the smoothing formula") {
    const auto model = pum::normalize(m);
    CHECK(model.prob(0, 22) == doctest::Approx((1.0 + 1e-8) / (1.0 + 256e-8)).epsilon(1e-12));
    CHECK(model.prob(0, 0) == doctest::Approx(1e-8 / (1.0 + 256e-8)).epsilon(1e-12));
  }

  SUBCASE("an untouched row is uniform") {
    m.accumulate(fb({22, 9}));  // row 1 exists; make a matrix with an untouched row 2
    m.accumulate(fb({22, 9, 1}));
    pum::FrequencyMatrix fresh("L", 1e-8);
    fresh.restore_row(0, std::vector<uint32_t>(256, 0));
    const auto model = pum::normalize(fresh);
    for (int b = 0; b < 256; ++b) {
      CHECK(model.prob(0, static_cast<uint8_t>(b)) == doctest::Approx(1.0 / 256).epsilon(1e-12));
    }
  }

  SUBCASE("rows sum to one") {
    Rng rng(3);
    pum::FrequencyMatrix big("L", 1e-8);
    for (int i = 0; i < 40; ++i) {
      Bytes bytes(1 + rng.bounded(10));
      for (auto& b : bytes) b = static_cast<uint8_t>(rng.bounded(256));
      big.accumulate(fb(std::move(bytes)));
    }
    const auto model = pum::normalize(big);
    for (size_t row = 0; row < model.rows; ++row) {
      double sum = 0.0;
      for (int b = 0; b < 256; ++b) sum += model.prob(row, static_cast<uint8_t>(b));
      CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
    }
  }

  SUBCASE("log table matches probabilities") {
    const auto model = pum::normalize(m);
    for (int b = 0; b < 256; ++b) {
      CHECK(model.log_probs[b] ==
            doctest::Approx(std::log(model.prob(0, static_cast<uint8_t>(b)))).epsilon(1e-12));
    }
  }
}

TEST_CASE("build_models") {
  SUBCASE("partitions by label") {
    const auto set = pum::build_models(
        {fb({1}, "A"), fb({2}, "A"), fb({3}, "B")}, 1e-8);
    CHECK(set.size() == 2);
    CHECK(set.find("A") != nullptr);
    CHECK(set.find("B") != nullptr);
    CHECK(set.find("C") == nullptr);
  }

  SUBCASE("duplicates change nothing") {
    const std::vector<wire::FeatureBytes> base = {fb({1, 2}, "A"), fb({3}, "B")};
    std::vector<wire::FeatureBytes> doubled = base;
    doubled.insert(doubled.end(), base.begin(), base.end());
    CHECK(same_counts(pum::build_models(base, 1e-8), pum::build_models(doubled, 1e-8)));
    CHECK(pum::build_models(doubled, 1e-8).last_build_stats.duplicates_collapsed == 2);
  }

  SUBCASE("order independence") {
    Rng rng(77);
    auto corpus = random_corpus(rng, 60, 3);
    const auto set_a = pum::build_models(corpus, 1e-8);
    std::reverse(corpus.begin(), corpus.end());
    const auto set_b = pum::build_models(corpus, 1e-8);
    Rng rng2(78);
    rng2.shuffle(corpus);
    const auto set_c = pum::build_models(corpus, 1e-8);
    CHECK(same_counts(set_a, set_b));
    CHECK(same_counts(set_a, set_c));
  }

  SUBCASE("Unknown and unlabeled sequences are skipped") {
    const auto set = pum::build_models(
        {fb({1}, "A"), fb({2}, ja3::kUnknownLabel), fb({3}, "")}, 1e-8);
    CHECK(set.size() == 1);
    CHECK(set.last_build_stats.skipped_unlabeled == 2);
  }

  SUBCASE("empty corpus raises") {
    CHECK_THROWS_AS((void)pum::build_models({}, 1e-8), Error);
    CHECK_THROWS_AS((void)pum::build_models({fb({1}, ja3::kUnknownLabel)}, 1e-8), Error);
  }

  SUBCASE("default delta matches the published constant") {
    CHECK(pum::kDefaultDelta == 1e-8);
  }
}

TEST_CASE("strict positivity bound") {
  Rng rng(5);
  auto corpus = random_corpus(rng, 50, 2);
  const auto set = pum::build_models(corpus, 1e-8);
  for (const auto& [label, entry] : set.entries()) {
    uint64_t max_row_sum = 0;
    for (size_t row = 0; row < entry.counts.rows(); ++row) {
      uint64_t s = 0;
      for (int b = 0; b < 256; ++b) s += entry.counts.increments(row, static_cast<uint8_t>(b));
      max_row_sum = std::max(max_row_sum, s);
    }
    const double bound = 1e-8 / (static_cast<double>(max_row_sum) + 256e-8);
    for (double p : entry.model.probs) {
      CHECK(p >= bound * (1.0 - 1e-9));
      CHECK(p > 0.0);
    }
  }
}

TEST_CASE("batch build equals online update, cell-exact") {
  // Synthetic hellos with a repository so the online path can label them.
  const auto spec = ingest::default_synthetic_spec(3, 50, 123);
  const auto synth = ingest::generate_synthetic(spec, 123);

  std::vector<wire::FeatureBytes> features;
  for (const auto& entry : synth.corpus.entries) {
    const auto parsed = wire::parse_client_hello(entry.raw);
    auto f = wire::scrub(parsed);
    f.label = ja3::label(parsed, synth.repo);
    features.push_back(std::move(f));
  }
  const auto batch = pum::build_models(features, 1e-8);

  pum::ModelSet online(1e-8, ja3::ByteMode::AllBytes);
  for (const auto& entry : synth.corpus.entries) {
    (void)online.update(entry.raw, synth.repo);
  }
  CHECK(same_counts(batch, online));

  SUBCASE("update order does not matter") {
    pum::ModelSet reversed(1e-8, ja3::ByteMode::AllBytes);
    for (auto it = synth.corpus.entries.rbegin(); it != synth.corpus.entries.rend(); ++it) {
      (void)reversed.update(it->raw, synth.repo);
    }
    CHECK(same_counts(batch, reversed));
  }
}

TEST_CASE("online update outcomes") {
  const auto spec = ingest::default_synthetic_spec(2, 20, 9);
  const auto synth = ingest::generate_synthetic(spec, 9);

  pum::ModelSet set(1e-8, ja3::ByteMode::AllBytes);
  const auto first = set.update(synth.corpus.entries[0].raw, synth.repo);
  CHECK(first.status == pum::UpdateOutcome::Status::NewLabel);

  const auto dup = set.update(synth.corpus.entries[0].raw, synth.repo);
  CHECK(dup.status == pum::UpdateOutcome::Status::DuplicateSkipped);

  SUBCASE("unknown hash leaves the set unchanged") {
    ja3::LabelRepository empty;
    const auto before = set.entries().begin()->second.counts.raw();
    const auto outcome = set.update(synth.corpus.entries[1].raw, empty);
    CHECK(outcome.status == pum::UpdateOutcome::Status::UnknownSkipped);
    CHECK(set.entries().begin()->second.counts.raw() == before);
  }

  SUBCASE("update touches only the target label") {
    // Absorb one sample of every class, snapshot, then update with a fresh
    // sample of class 0.
    pum::ModelSet full(1e-8, ja3::ByteMode::AllBytes);
    std::map<std::string, size_t> first_of;
    for (size_t i = 0; i < synth.corpus.entries.size(); ++i) {
      const auto& e = synth.corpus.entries[i];
      if (first_of.emplace(e.label, i).second) {
        (void)full.update(e.raw, synth.repo);
      }
    }
    REQUIRE(full.size() == 2);

    const std::string target = synth.corpus.entries[0].label;
    std::map<std::string, std::vector<uint32_t>> before;
    for (const auto& [label, entry] : full.entries()) before[label] = entry.counts.raw();

    // Find a non-duplicate sample of the target class.
    for (const auto& e : synth.corpus.entries) {
      if (e.label != target) continue;
      const auto outcome = full.update(e.raw, synth.repo);
      if (outcome.status == pum::UpdateOutcome::Status::Added) break;
    }
    for (const auto& [label, entry] : full.entries()) {
      if (label == target) {
        CHECK(entry.counts.raw() != before[label]);
      } else {
        CHECK(entry.counts.raw() == before[label]);
      }
    }
  }
}

TEST_CASE("save and load round trip") {
  const auto dir = std::filesystem::temp_directory_path();
  Rng rng(31);
  const auto corpus = random_corpus(rng, 40, 3);
  const auto set = pum::build_models(corpus, 1e-8);

  const auto path = dir / "hg_model_roundtrip.json";
  set.save(path);
  const auto loaded = pum::ModelSet::load(path);
  CHECK(same_counts(set, loaded));
  CHECK(loaded.byte_mode() == set.byte_mode());

  SUBCASE("identical state saves identical bytes regardless of history") {
    // Rebuild from a shuffled corpus; canonical serialization must agree.
    auto shuffled = corpus;
    Rng rng2(32);
    rng2.shuffle(shuffled);
    const auto other = pum::build_models(shuffled, 1e-8);
    const auto path2 = dir / "hg_model_roundtrip2.json";
    other.save(path2);

    std::ifstream a(path, std::ios::binary), b(path2, std::ios::binary);
    const std::string sa((std::istreambuf_iterator<char>(a)), std::istreambuf_iterator<char>());
    const std::string sb((std::istreambuf_iterator<char>(b)), std::istreambuf_iterator<char>());
    CHECK(sa == sb);
  }

  SUBCASE("wrong magic") {
    const auto bad = dir / "hg_model_bad.json";
    std::ofstream(bad) << "{\"format\": \"something-else\", \"format_version\": 1}";
    try {
      (void)pum::ModelSet::load(bad);
      FAIL("expected CorruptModelFile");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::CorruptModelFile);
    }
  }

  SUBCASE("not json at all") {
    const auto bad = dir / "hg_model_garbage.json";
    std::ofstream(bad) << "not json";
    try {
      (void)pum::ModelSet::load(bad);
      FAIL("expected CorruptModelFile");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::CorruptModelFile);
    }
  }

  SUBCASE("schema version mismatch") {
    const auto bad = dir / "hg_model_v99.json";
    std::ofstream(bad) << "{\"format\": \"hellogram-pum\", \"format_version\": 99, "
                          "\"delta\": 1e-8, \"byte_mode\": \"all\", \"labels\": {}}";
    try {
      (void)pum::ModelSet::load(bad);
      FAIL("expected SchemaVersionMismatch");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::SchemaVersionMismatch);
    }
  }

  SUBCASE("empty model set survives the trip") {
    const pum::ModelSet empty(1e-8, ja3::ByteMode::Ja3Bytes);
    const auto path3 = dir / "hg_model_empty.json";
    empty.save(path3);
    const auto back = pum::ModelSet::load(path3);
    CHECK(back.empty());
    CHECK(back.byte_mode() == ja3::ByteMode::Ja3Bytes);
  }
}
