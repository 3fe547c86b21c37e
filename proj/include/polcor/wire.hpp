#pragma once
#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "polcor/simulator.hpp"

namespace polcor::wire {

using sim::DetectorSample;
using sim::OpticalConfig;
using optics::Party;

/// Stream layout: one 38-byte header, then n_bins fixed 73-byte records.
/// All integers and doubles little-endian.
inline constexpr std::size_t kRecordSize = 73;  // u64 bin + u8 tag + 8 f64 coefs
inline constexpr std::size_t kHeaderSize = 38;  // magic + version + party + digest
inline constexpr std::array<std::uint8_t, 4> kMagic{'P', 'C', 'O', 'R'};
inline constexpr std::uint8_t kVersion = 1;

enum class WireErrorCode {
  ShortRead,
  BadMagic,
  VersionMismatch,
  UnknownTag,
  UnknownParty,
  ConfigMismatch,
  DuplicateParty,
  StreamGap,
};

/// Process exit code for each error class (0 = success).
int exit_code(WireErrorCode code);

class WireError : public std::runtime_error {
 public:
  WireError(WireErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  WireErrorCode code() const { return code_; }

 private:
  WireErrorCode code_;
};

using Digest = std::array<std::uint8_t, 32>;

/// SHA-256 (FIPS 180-4).
Digest sha256(std::span<const std::uint8_t> data);
std::string hex(const Digest& d);

/// Canonical serialization of the shared config fields (everything except
/// the party-private analyzer angles and path phases). Both parties and the
/// correlator must agree on its digest.
std::string canonical_shared_config(const OpticalConfig& cfg);
Digest config_digest(const OpticalConfig& cfg);

struct StreamHeader {
  Party party{Party::Alpha};
  Digest digest{};
};

std::array<std::uint8_t, kHeaderSize> encode_header(const StreamHeader& h);
StreamHeader decode_header(std::span<const std::uint8_t> bytes);

std::array<std::uint8_t, kRecordSize> encode_record(const DetectorSample& s);

/// Decodes one record; party is supplied by the stream header. Intensities
/// are recomputed from the coefficients, so decode(encode(x)) == x bit for
/// bit for samples produced by the simulator.
DetectorSample decode_record(std::span<const std::uint8_t> bytes, Party party);

/// Whole-stream helpers used by the file path and by tests.
std::vector<std::uint8_t> encode_stream(const OpticalConfig& cfg, Party party,
                                        std::span<const DetectorSample> samples);

struct DecodedStream {
  StreamHeader header;
  std::vector<DetectorSample> samples;
};
DecodedStream decode_stream(std::span<const std::uint8_t> bytes);

}  // namespace polcor::wire
