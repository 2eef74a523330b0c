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

#include "hellogram/ingest.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <functional>
#include <set>

#include "hellogram/errors.hpp"
#include "hellogram/hello_builder.hpp"
#include "hellogram/rng.hpp"

namespace hellogram::ingest {

namespace {

std::string strip_whitespace(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    if (c != ' ' && c != '\t' && c != '\r') out.push_back(c);
  }
  return out;
}

}  // namespace

CorpusFile read_hexline(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    raise(Errc::IoError, "cannot open " + path.string());
  }
  CorpusFile out;
  out.format = Format::HexLine;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;

    const std::string where = path.string() + ":" + std::to_string(line_no);
    std::string hex_part = line;
    std::string label;
    if (const size_t tab = line.find('\t'); tab != std::string::npos) {
      hex_part = line.substr(0, tab);
      label = line.substr(tab + 1);
    }
    Bytes bytes;
    try {
      bytes = wire::hex_to_bytes(strip_whitespace(hex_part));
    } catch (const Error& e) {
      // Bad hex is a malformed file, not a skippable record.
      raise(e.code(), std::string(e.what()) + " (" + where + ")");
    }

    Entry entry{wire::RawClientHello{std::move(bytes), where}, std::move(label)};
    try {
      (void)wire::parse_client_hello(entry.raw);
    } catch (const Error& e) {
      out.skips.push_back({where, e.what()});
      continue;
    }
    out.entries.push_back(std::move(entry));
  }
  return out;
}

void write_hexline(const CorpusFile& corpus, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    raise(Errc::IoError, "cannot write " + path.string());
  }
  for (const Entry& entry : corpus.entries) {
    out << wire::bytes_to_hex(entry.raw.bytes);
    if (!entry.label.empty()) out << '\t' << entry.label;
    out << '\n';
  }
}

// ---------------------------------------------------------------------------
// pcap

namespace {

struct PcapHeader {
  bool swapped = false;
  uint32_t linktype = 0;
};

uint32_t get_u32(const uint8_t* p, bool swapped) {
  uint32_t v;
  std::memcpy(&v, p, 4);
  if (swapped) v = __builtin_bswap32(v);
  return v;
}

uint16_t be16(const uint8_t* p) { return static_cast<uint16_t>(p[0] << 8 | p[1]); }

/// Extracts the TCP payload from one captured frame, or an empty span.
std::span<const uint8_t> tcp_payload(std::span<const uint8_t> frame, uint32_t linktype) {
  size_t at = 0;
  uint16_t ethertype = 0;
  if (linktype == 1) {  // Ethernet
    if (frame.size() < 14) return {};
    ethertype = be16(frame.data() + 12);
    at = 14;
    if (ethertype == 0x8100) {  // one 802.1Q tag
      if (frame.size() < 18) return {};
      ethertype = be16(frame.data() + 16);
      at = 18;
    }
  } else if (linktype == 101) {  // raw IP
    if (frame.empty()) return {};
    const uint8_t ver = frame[0] >> 4;
    ethertype = ver == 6 ? 0x86dd : 0x0800;
  } else {
    return {};
  }

  size_t ip_payload_len = 0;
  uint8_t proto = 0;
  if (ethertype == 0x0800) {
    if (frame.size() < at + 20) return {};
    const uint8_t ihl = (frame[at] & 0x0f) * 4;
    if (ihl < 20 || frame.size() < at + ihl) return {};
    const uint16_t total = be16(frame.data() + at + 2);
    if (total < ihl) return {};
    proto = frame[at + 9];
    ip_payload_len = std::min<size_t>(total - ihl, frame.size() - at - ihl);
    at += ihl;
  } else if (ethertype == 0x86dd) {
    if (frame.size() < at + 40) return {};
    proto = frame[at + 6];  // extension-header chains are out of scope
    const uint16_t plen = be16(frame.data() + at + 4);
    ip_payload_len = std::min<size_t>(plen, frame.size() - at - 40);
    at += 40;
  } else {
    return {};
  }

  if (proto != 6) return {};
  if (ip_payload_len < 20) return {};
  const uint8_t data_offset = (frame[at + 12] >> 4) * 4;
  if (data_offset < 20 || ip_payload_len < data_offset) return {};
  return frame.subspan(at + data_offset, ip_payload_len - data_offset);
}

}  // namespace

CorpusFile read_pcap(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    raise(Errc::IoError, "cannot open " + path.string());
  }
  Bytes data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

  if (data.size() < 24) {
    raise(Errc::NotPcap, path.string() + ": too small for a pcap header");
  }
  uint32_t magic;
  std::memcpy(&magic, data.data(), 4);
  PcapHeader hdr;
  switch (magic) {
    case 0xa1b2c3d4u:
    case 0xa1b23c4du:
      hdr.swapped = false;
      break;
    case 0xd4c3b2a1u:
    case 0x4d3cb2a1u:
      hdr.swapped = true;
      break;
    default:
      raise(Errc::NotPcap, path.string() + ": bad magic");
  }
  hdr.linktype = get_u32(data.data() + 20, hdr.swapped);

  CorpusFile out;
  out.format = Format::Pcap;
  size_t at = 24;
  size_t frame_no = 0;
  while (at + 16 <= data.size()) {
    ++frame_no;
    const uint32_t incl_len = get_u32(data.data() + at + 8, hdr.swapped);
    at += 16;
    if (at + incl_len > data.size()) break;  // truncated capture tail
    const std::span<const uint8_t> frame(data.data() + at, incl_len);
    at += incl_len;

    const auto payload = tcp_payload(frame, hdr.linktype);
    // A candidate is a TCP payload opening with a handshake record that
    // carries a ClientHello.
    if (payload.size() < 6 || payload[0] != wire::kRecordTypeHandshake ||
        payload[5] != wire::kHandshakeTypeClientHello) {
      continue;
    }
    const std::string where = path.string() + "#" + std::to_string(frame_no);
    const size_t record_len = 5 + (static_cast<size_t>(payload[3]) << 8 | payload[4]);
    if (payload.size() < record_len) {
      out.skips.push_back({where, "ClientHello continues beyond this segment"});
      continue;
    }
    Entry entry{wire::RawClientHello{Bytes(payload.begin(), payload.begin() + record_len), where},
                std::string{}};
    try {
      (void)wire::parse_client_hello(entry.raw);
    } catch (const Error& e) {
      out.skips.push_back({where, e.what()});
      continue;
    }
    out.entries.push_back(std::move(entry));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Synthetic corpus

namespace {

uint16_t pick_grease(Rng& rng) {
  return ja3::kGreaseValues[static_cast<size_t>(rng.bounded(ja3::kGreaseValues.size()))];
}

std::string random_host(const std::string& base, Rng& rng) {
  static constexpr char alphabet[] = "abcdefghijklmnopqrstuvwxyz0123456789";
  const size_t len = 4 + static_cast<size_t>(rng.bounded(5));
  std::string sub;
  for (size_t i = 0; i < len; ++i) {
    sub.push_back(alphabet[rng.bounded(sizeof(alphabet) - 1)]);
  }
  return sub + "." + base;
}

Bytes random_bytes(size_t n, Rng& rng) {
  Bytes out(n);
  for (auto& b : out) b = static_cast<uint8_t>(rng.bounded(256));
  return out;
}

/// Builds one sample of a class; all per-sample variation flows from rng.
wire::RawClientHello make_sample(const ClassProfile& profile, size_t index, Rng& rng) {
  HelloBuilder b;
  b.version(profile.version);

  std::array<uint8_t, 32> rnd{};
  for (auto& v : rnd) v = static_cast<uint8_t>(rng.bounded(256));
  b.random(rnd);
  if (profile.random_session_id) {
    b.session_id(random_bytes(32, rng));
  }

  std::vector<uint16_t> suites = profile.ciphers;
  for (auto& s : suites) {
    if (ja3::is_grease(s)) s = pick_grease(rng);
  }
  b.ciphers(std::move(suites));

  // Middle extensions are emitted in a class-specific order derived from
  // order_salt; the GREASE extension leads and key_share/padding trail,
  // mirroring common client stacks.
  if (profile.grease_extension) {
    b.extension(pick_grease(rng), {});
  }

  struct Part {
    uint64_t sort_key;
    std::function<void()> emit;
  };
  std::vector<Part> middle;
  Rng order_rng(derive_seed(profile.order_salt, {0x0e57u}));
  auto add = [&](std::function<void()> emit) {
    middle.push_back({order_rng.next(), std::move(emit)});
  };

  if (profile.sni) {
    add([&] { b.server_name(random_host(profile.sni_base, rng)); });
  }
  if (profile.extended_master_secret) {
    add([&] { b.extension(0x0017, {}); });
  }
  if (profile.renegotiation_info) {
    add([&] { b.extension(0xff01, {0x00}); });
  }
  if (profile.status_request) {
    add([&] { b.extension(0x0005, {0x01, 0x00, 0x00, 0x00, 0x00}); });
  }
  if (profile.signed_cert_timestamp) {
    add([&] { b.extension(0x0012, {}); });
  }
  if (profile.session_ticket) {
    add([&] { b.extension(0x0023, {}); });
  }
  if (!profile.groups.empty()) {
    add([&] {
      std::vector<uint16_t> groups = profile.groups;
      for (auto& g : groups) {
        if (ja3::is_grease(g)) g = pick_grease(rng);
      }
      b.supported_groups(groups);
    });
  }
  if (!profile.point_formats.empty()) {
    add([&] {
      Bytes body;
      body.push_back(static_cast<uint8_t>(profile.point_formats.size()));
      body.insert(body.end(), profile.point_formats.begin(), profile.point_formats.end());
      b.extension(wire::kExtEcPointFormats, std::move(body));
    });
  }
  if (!profile.alpn_variants.empty()) {
    const auto& choice =
        profile.alpn_variants[static_cast<size_t>(rng.bounded(profile.alpn_variants.size()))];
    add([&, &choice = choice] { b.alpn(choice); });
  }
  if (!profile.sig_algs.empty()) {
    add([&] { b.signature_algorithms(profile.sig_algs); });
  }

  std::sort(middle.begin(), middle.end(),
            [](const Part& a, const Part& z) { return a.sort_key < z.sort_key; });
  for (const Part& part : middle) part.emit();

  if (profile.tls13) {
    b.extension(0x002d, {0x01, 0x01});  // psk_key_exchange_modes: psk_dhe_ke
    b.supported_versions({0x0304, 0x0303});
    b.key_share(0x001d, random_bytes(32, rng));
  }
  if (!profile.padding_variants.empty()) {
    const size_t pad =
        profile.padding_variants[static_cast<size_t>(rng.bounded(profile.padding_variants.size()))];
    b.padding(pad);
  }

  return b.raw("synth:" + profile.name + ":" + std::to_string(index));
}

void validate_profile(const ClassProfile& profile) {
  if (profile.name.empty()) {
    raise(Errc::InvalidProfile, "class profile without a name");
  }
  if (profile.name == ja3::kUnknownLabel) {
    raise(Errc::InvalidProfile, "class name '" + profile.name + "' is reserved");
  }
  if (profile.samples == 0) {
    raise(Errc::InvalidProfile, "class '" + profile.name + "' has zero samples");
  }
  if (profile.ciphers.empty()) {
    raise(Errc::InvalidProfile, "class '" + profile.name + "' has no cipher suites");
  }
}

}  // namespace

SyntheticResult generate_synthetic(const SyntheticSpec& spec, uint64_t seed) {
  if (spec.classes.empty()) {
    raise(Errc::InvalidProfile, "no class profiles");
  }
  SyntheticResult out;
  out.corpus.format = Format::Synthetic;
  for (size_t c = 0; c < spec.classes.size(); ++c) {
    const ClassProfile& profile = spec.classes[c];
    validate_profile(profile);
    Rng rng(derive_seed(seed, {0xc1a55u, c}));
    for (size_t i = 0; i < profile.samples; ++i) {
      Entry entry{make_sample(profile, i, rng), profile.name};
      const auto parsed = wire::parse_client_hello(entry.raw);
      out.repo.insert(ja3::ja3_hash(ja3::ja3_string(parsed)), profile.name);
      out.corpus.entries.push_back(std::move(entry));
    }
  }
  return out;
}

SyntheticSpec default_synthetic_spec(size_t n_classes, size_t total_samples, uint64_t seed) {
  if (n_classes == 0 || total_samples < 2 * n_classes) {
    raise(Errc::InvalidProfile, "need at least 2 samples per class");
  }

  static const std::vector<std::string> kNames = {
      "Chrome 71",          "Firefox 63",      "Safari 12",        "Edge 18",
      "Chrome 60/61",       "Opera 57",        "Safari 11 iOS",    "Edge 44",
      "Firefox ESR 52",     "Chrome 49 XP",    "OpenSSL s_client", "curl 7.61",
      "Python Requests",    "Java 8 HTTPS",    "Go-http-client",   "wget 1.19",
      "Adware",             "Malware.Generic", "Malware.Trickbot", "Tor Browser",
      "Thunderbird 60",     "Outlook 2016",    "Dropbox Client",   "Spotify Desktop"};

  // Realistic 16-bit suite codes to draw class cipher lists from.
  std::vector<uint16_t> pool = {0x1301, 0x1302, 0x1303, 0x1304, 0xc02b, 0xc02f, 0xc02c, 0xc030,
                                0xcca9, 0xcca8, 0xccaa, 0xc013, 0xc014, 0xc009, 0xc00a, 0xc012,
                                0xc008, 0x009c, 0x009d, 0x009e, 0x009f, 0x0033, 0x0039, 0x0067,
                                0x006b, 0x002f, 0x0035, 0x003c, 0x003d, 0x000a, 0x0005, 0x0004,
                                0x00ff, 0x0016, 0x0013, 0x0066, 0x0015, 0x0012, 0x0009, 0x0014,
                                0x0011, 0x0008, 0x0006, 0x0003, 0xc011, 0xc007, 0xc00c, 0xc002,
                                0xc00e, 0xc004, 0xc00f, 0xc005, 0xc023, 0xc024, 0xc025, 0xc026,
                                0xc027, 0xc028, 0xc029, 0xc02a, 0xc02d, 0xc02e, 0xc031, 0xc032,
                                0x00a0, 0x00a1, 0x00a2, 0x00a3, 0x00a4, 0x00a5, 0x0084, 0x0087,
                                0x0088, 0x0096, 0x0041, 0x0045, 0x0044, 0x006a, 0x0069, 0x0068,
                                0x0040, 0x003f, 0x003e, 0x0038, 0x0037, 0x0036, 0x0034, 0x0032,
                                0x0031, 0x0030, 0x00ba, 0x00be, 0x00c0, 0x00c4, 0x007c, 0x007d,
                                0x008a, 0x008b, 0x008c, 0x008d, 0x0092, 0x0093, 0x0094, 0x0095,
                                0x00ab, 0x00aa, 0x00b3, 0x00b2, 0x00a9, 0x00a8, 0x00af, 0x00ae,
                                0x008e, 0x008f, 0x0090, 0x0091, 0xc0ac, 0xc0ad, 0xc0ae, 0xc0af};

  static const std::vector<uint16_t> kGroupPool = {0x001d, 0x0017, 0x0018, 0x0019, 0x001e,
                                                   0x0100, 0x0101, 0x001a, 0x001b, 0x001c};
  static const std::vector<uint16_t> kSigPool = {0x0403, 0x0503, 0x0603, 0x0804, 0x0805,
                                                 0x0806, 0x0401, 0x0501, 0x0601, 0x0203,
                                                 0x0201, 0x0402, 0x0502, 0x0602};

  // Paper-style imbalance: the top four classes carry ~75% of the corpus,
  // a middle tier ~20%, and the tail splits the rest with a floor of 2.
  std::vector<size_t> counts(n_classes, 0);
  {
    const double top4[] = {0.30, 0.20, 0.15, 0.10};
    size_t assigned = 0;
    for (size_t i = 0; i < n_classes && i < 4; ++i) {
      counts[i] = static_cast<size_t>(top4[i] * static_cast<double>(total_samples));
      assigned += counts[i];
    }
    if (n_classes > 4) {
      const size_t mid_end = std::min<size_t>(n_classes, 14);
      const size_t mid_n = mid_end - 4;
      const size_t mid_total = static_cast<size_t>(0.20 * static_cast<double>(total_samples));
      for (size_t i = 4; i < mid_end; ++i) {
        counts[i] = std::max<size_t>(2, mid_total / mid_n);
        assigned += counts[i];
      }
      for (size_t i = mid_end; i < n_classes; ++i) {
        const size_t left = total_samples > assigned ? total_samples - assigned : 0;
        const size_t tail_n = n_classes - mid_end;
        counts[i] = std::max<size_t>(2, left / (tail_n * 2));
        assigned += counts[i];
      }
    }
    // Park any remainder in the largest class.
    size_t sum = 0;
    for (size_t c : counts) sum += c;
    if (total_samples > sum) counts[0] += total_samples - sum;
  }

  SyntheticSpec spec;
  Rng rng(derive_seed(seed, {0x5bec5u}));
  std::set<std::vector<uint16_t>> used_cipher_sets;

  for (size_t c = 0; c < n_classes; ++c) {
    ClassProfile p;
    p.name = kNames[c % kNames.size()];
    if (c >= kNames.size()) p.name += " #" + std::to_string(c / kNames.size() + 1);
    p.samples = counts[c];
    p.order_salt = derive_seed(seed, {0x0cdeu, c});

    // Distinct cipher multiset per class so fingerprints cannot collide.
    for (int attempt = 0;; ++attempt) {
      std::vector<uint16_t> shuffled = pool;
      rng.shuffle(shuffled);
      const size_t n = 46 + static_cast<size_t>(rng.bounded(19));
      std::vector<uint16_t> suites(shuffled.begin(), shuffled.begin() + n);
      std::vector<uint16_t> key = suites;
      std::sort(key.begin(), key.end());
      if (used_cipher_sets.insert(key).second) {
        p.ciphers = std::move(suites);
        break;
      }
      if (attempt > 64) {
        raise(Errc::InvalidProfile, "could not find a distinct cipher set");
      }
    }
    // One or two per-sample GREASE slots.
    const size_t grease_slots = 1 + rng.bounded(2);
    for (size_t g = 0; g < grease_slots; ++g) {
      const size_t pos = static_cast<size_t>(rng.bounded(p.ciphers.size()));
      p.ciphers[pos] = 0x0a0a;
    }

    {
      std::vector<uint16_t> groups = kGroupPool;
      rng.shuffle(groups);
      groups.resize(3 + rng.bounded(4));
      if (rng.bounded(2) == 0) groups.insert(groups.begin(), 0x0a0a);
      p.groups = std::move(groups);
    }
    {
      std::vector<uint16_t> sigs = kSigPool;
      rng.shuffle(sigs);
      sigs.resize(6 + rng.bounded(6));
      p.sig_algs = std::move(sigs);
    }
    p.point_formats = rng.bounded(2) == 0 ? std::vector<uint8_t>{0x00}
                                          : std::vector<uint8_t>{0x00, 0x01, 0x02};

    static const std::vector<std::vector<std::string>> kAlpnChoices = {
        {"h2", "http/1.1"}, {"http/1.1"}, {"h2"}, {"h3", "h2", "http/1.1"}};
    const size_t n_variants = 1 + rng.bounded(3);
    for (size_t v = 0; v < n_variants; ++v) {
      p.alpn_variants.push_back(kAlpnChoices[rng.bounded(kAlpnChoices.size())]);
    }
    if (rng.bounded(2) == 0) {
      p.padding_variants = {0, 16 + static_cast<size_t>(rng.bounded(48))};
    }

    p.grease_extension = rng.bounded(3) != 0;
    p.sni_base = "app" + std::to_string(c) + ".example.net";
    p.session_ticket = rng.bounded(2) == 0;
    p.renegotiation_info = rng.bounded(2) == 0;
    p.status_request = rng.bounded(3) == 0;
    p.signed_cert_timestamp = rng.bounded(3) == 0;
    p.tls13 = rng.bounded(4) != 0;
    p.random_session_id = rng.bounded(3) == 0;

    spec.classes.push_back(std::move(p));
  }
  return spec;
}

std::vector<CorpusFile> split_corpus(const CorpusFile& corpus, size_t k, uint64_t seed) {
  if (k == 0) {
    raise(Errc::InvalidProfile, "cannot split into zero parts");
  }
  std::vector<size_t> order(corpus.entries.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng rng(derive_seed(seed, {0x5911u}));
  rng.shuffle(order);

  std::vector<CorpusFile> splits(k);
  for (auto& s : splits) s.format = corpus.format;
  for (size_t i = 0; i < order.size(); ++i) {
    splits[i % k].entries.push_back(corpus.entries[order[i]]);
  }
  return splits;
}

}  // namespace hellogram::ingest
