#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstring>

#include "polcor/wire.hpp"

using namespace polcor::wire;
using polcor::optics::Party;
using polcor::sim::DetectorSample;
using polcor::sim::OpticalConfig;
using polcor::sim::simulate;

namespace {

OpticalConfig sample_config() {
  OpticalConfig cfg;
  cfg.theta = 0.31;
  cfg.xi = -1.2;
  cfg.psi_a = 0.8;
  cfg.psi_b = 0.1;
  cfg.eta = 0.5;
  cfg.n_bins = 64;
  cfg.seed = 9;
  return cfg;
}

}  // namespace

TEST_CASE("sha256 known-answer vectors") {
  CHECK(hex(sha256({})) == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  const char* abc = "abc";
  CHECK(hex(sha256(std::span(reinterpret_cast<const std::uint8_t*>(abc), 3))) ==
        "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("fixed frame sizes") {
  CHECK(kRecordSize == 73);
  CHECK(kHeaderSize == 38);
}

TEST_CASE("record round trip is bit exact") {
  const auto run = simulate(sample_config());
  for (const DetectorSample& s : run.alice) {
    const auto bytes = encode_record(s);
    const DetectorSample back = decode_record(bytes, Party::Alpha);
    CHECK(back.bin == s.bin);
    CHECK(back.tag == s.tag);
    CHECK(std::memcmp(&back.port1_coef_h, &s.port1_coef_h, sizeof(back.port1_coef_h)) == 0);
    CHECK(back.intensity_port1 == s.intensity_port1);
    CHECK(back.intensity_port2 == s.intensity_port2);
    CHECK(encode_record(back) == bytes);
  }
}

TEST_CASE("decode errors are typed") {
  const auto run = simulate(sample_config());
  auto bytes = encode_record(run.alice.front());

  // truncated payload
  try {
    (void)decode_record(std::span(bytes.data(), 40), Party::Alpha);
    FAIL("expected framing error");
  } catch (const WireError& e) {
    CHECK(e.code() == WireErrorCode::ShortRead);
    CHECK(exit_code(e.code()) == 3);
  }

  // unknown source tag byte
  bytes[8] = 2;
  try {
    (void)decode_record(bytes, Party::Alpha);
    FAIL("expected tag error");
  } catch (const WireError& e) {
    CHECK(e.code() == WireErrorCode::UnknownTag);
  }
}

TEST_CASE("header validation") {
  const StreamHeader h{Party::Beta, config_digest(sample_config())};
  auto bytes = encode_header(h);
  const StreamHeader back = decode_header(bytes);
  CHECK(back.party == Party::Beta);
  CHECK(back.digest == h.digest);

  auto bad_magic = bytes;
  bad_magic[0] = 'X';
  CHECK_THROWS_AS((void)decode_header(bad_magic), WireError);

  auto bad_version = bytes;
  bad_version[4] = 9;
  try {
    (void)decode_header(bad_version);
    FAIL("expected version error");
  } catch (const WireError& e) {
    CHECK(e.code() == WireErrorCode::VersionMismatch);
  }

  auto bad_party = bytes;
  bad_party[5] = 7;
  CHECK_THROWS_AS((void)decode_header(bad_party), WireError);
}

TEST_CASE("config digest covers shared fields only") {
  const OpticalConfig base = sample_config();
  OpticalConfig private_differs = base;
  private_differs.theta = 2.9;
  private_differs.xi = 0.0;
  private_differs.psi_a = -1.0;
  private_differs.psi_b = 0.9;
  CHECK(config_digest(private_differs) == config_digest(base));

  OpticalConfig seed_differs = base;
  seed_differs.seed += 1;
  CHECK(config_digest(seed_differs) != config_digest(base));

  OpticalConfig eta_differs = base;
  eta_differs.eta += 0.1;
  CHECK(config_digest(eta_differs) != config_digest(base));

  OpticalConfig overlap_differs = base;
  overlap_differs.overlap = polcor::sim::OverlapMode::Coherent;
  CHECK(config_digest(overlap_differs) != config_digest(base));
}

TEST_CASE("stream round trip and gap detection") {
  const OpticalConfig cfg = sample_config();
  const auto run = simulate(cfg);
  const auto bytes = encode_stream(cfg, Party::Alpha, run.alice);
  CHECK(bytes.size() == kHeaderSize + cfg.n_bins * kRecordSize);

  const DecodedStream back = decode_stream(bytes);
  CHECK(back.header.party == Party::Alpha);
  CHECK(back.samples.size() == run.alice.size());
  for (std::size_t i = 0; i < back.samples.size(); ++i) {
    CHECK(back.samples[i].bin == i);
    CHECK(back.samples[i].tag == run.alice[i].tag);
  }

  // splice out record 3: the remaining indices jump and must be rejected
  std::vector<std::uint8_t> gapped = bytes;
  gapped.erase(gapped.begin() + static_cast<long>(kHeaderSize + 3 * kRecordSize),
               gapped.begin() + static_cast<long>(kHeaderSize + 4 * kRecordSize));
  try {
    (void)decode_stream(gapped);
    FAIL("expected gap error");
  } catch (const WireError& e) {
    CHECK(e.code() == WireErrorCode::StreamGap);
    CHECK(exit_code(e.code()) == 4);
  }

  // ragged tail
  std::vector<std::uint8_t> ragged = bytes;
  ragged.resize(ragged.size() - 10);
  CHECK_THROWS_AS((void)decode_stream(ragged), WireError);
}

TEST_CASE("exit codes") {
  CHECK(exit_code(WireErrorCode::ConfigMismatch) == 2);
  CHECK(exit_code(WireErrorCode::DuplicateParty) == 2);
  CHECK(exit_code(WireErrorCode::ShortRead) == 3);
  CHECK(exit_code(WireErrorCode::BadMagic) == 3);
  CHECK(exit_code(WireErrorCode::VersionMismatch) == 3);
  CHECK(exit_code(WireErrorCode::UnknownTag) == 3);
  CHECK(exit_code(WireErrorCode::StreamGap) == 4);
}
