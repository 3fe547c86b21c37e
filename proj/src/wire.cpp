#include "polcor/wire.hpp"

#include <bit>
#include <charconv>
#include <cstring>

namespace polcor::wire {

using optics::Complex;
using optics::SourceTag;

int exit_code(WireErrorCode code) {
  switch (code) {
    case WireErrorCode::ConfigMismatch:
    case WireErrorCode::DuplicateParty: return 2;
    case WireErrorCode::ShortRead:
    case WireErrorCode::BadMagic:
    case WireErrorCode::VersionMismatch:
    case WireErrorCode::UnknownTag:
    case WireErrorCode::UnknownParty: return 3;
    case WireErrorCode::StreamGap: return 4;
  }
  return 1;
}

// --- SHA-256 ---------------------------------------------------------------

namespace {

constexpr std::array<std::uint32_t, 64> kSha256K = {
    0x428a2f98, 0x71374491, 0xb5c0fbcf, 0xe9b5dba5, 0x3956c25b, 0x59f111f1, 0x923f82a4,
    0xab1c5ed5, 0xd807aa98, 0x12835b01, 0x243185be, 0x550c7dc3, 0x72be5d74, 0x80deb1fe,
    0x9bdc06a7, 0xc19bf174, 0xe49b69c1, 0xefbe4786, 0x0fc19dc6, 0x240ca1cc, 0x2de92c6f,
    0x4a7484aa, 0x5cb0a9dc, 0x76f988da, 0x983e5152, 0xa831c66d, 0xb00327c8, 0xbf597fc7,
    0xc6e00bf3, 0xd5a79147, 0x06ca6351, 0x14292967, 0x27b70a85, 0x2e1b2138, 0x4d2c6dfc,
    0x53380d13, 0x650a7354, 0x766a0abb, 0x81c2c92e, 0x92722c85, 0xa2bfe8a1, 0xa81a664b,
    0xc24b8b70, 0xc76c51a3, 0xd192e819, 0xd6990624, 0xf40e3585, 0x106aa070, 0x19a4c116,
    0x1e376c08, 0x2748774c, 0x34b0bcb5, 0x391c0cb3, 0x4ed8aa4a, 0x5b9cca4f, 0x682e6ff3,
    0x748f82ee, 0x78a5636f, 0x84c87814, 0x8cc70208, 0x90befffa, 0xa4506ceb, 0xbef9a3f7,
    0xc67178f2};

std::uint32_t rotr(std::uint32_t x, int n) { return (x >> n) | (x << (32 - n)); }

}  // namespace

Digest sha256(std::span<const std::uint8_t> data) {
  std::array<std::uint32_t, 8> h = {0x6a09e667, 0xbb67ae85, 0x3c6ef372, 0xa54ff53a,
                                    0x510e527f, 0x9b05688c, 0x1f83d9ab, 0x5be0cd19};
  std::vector<std::uint8_t> msg(data.begin(), data.end());
  const std::uint64_t bit_len = static_cast<std::uint64_t>(msg.size()) * 8;
  msg.push_back(0x80);
  while (msg.size() % 64 != 56) msg.push_back(0);
  for (int i = 7; i >= 0; --i) msg.push_back(static_cast<std::uint8_t>(bit_len >> (8 * i)));

  std::array<std::uint32_t, 64> w{};
  for (std::size_t chunk = 0; chunk < msg.size(); chunk += 64) {
    for (int i = 0; i < 16; ++i)
      w[i] = (std::uint32_t(msg[chunk + 4 * i]) << 24) | (std::uint32_t(msg[chunk + 4 * i + 1]) << 16) |
             (std::uint32_t(msg[chunk + 4 * i + 2]) << 8) | std::uint32_t(msg[chunk + 4 * i + 3]);
    for (int i = 16; i < 64; ++i) {
      const std::uint32_t s0 = rotr(w[i - 15], 7) ^ rotr(w[i - 15], 18) ^ (w[i - 15] >> 3);
      const std::uint32_t s1 = rotr(w[i - 2], 17) ^ rotr(w[i - 2], 19) ^ (w[i - 2] >> 10);
      w[i] = w[i - 16] + s0 + w[i - 7] + s1;
    }
    auto [a, b, c, d, e, f, g, hh] = h;
    for (int i = 0; i < 64; ++i) {
      const std::uint32_t s1 = rotr(e, 6) ^ rotr(e, 11) ^ rotr(e, 25);
      const std::uint32_t ch = (e & f) ^ (~e & g);
      const std::uint32_t t1 = hh + s1 + ch + kSha256K[i] + w[i];
      const std::uint32_t s0 = rotr(a, 2) ^ rotr(a, 13) ^ rotr(a, 22);
      const std::uint32_t maj = (a & b) ^ (a & c) ^ (b & c);
      const std::uint32_t t2 = s0 + maj;
      hh = g; g = f; f = e; e = d + t1;
      d = c; c = b; b = a; a = t1 + t2;
    }
    h[0] += a; h[1] += b; h[2] += c; h[3] += d;
    h[4] += e; h[5] += f; h[6] += g; h[7] += hh;
  }

  Digest out{};
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 4; ++j) out[4 * i + j] = static_cast<std::uint8_t>(h[i] >> (24 - 8 * j));
  return out;
}

std::string hex(const Digest& d) {
  static const char* digits = "0123456789abcdef";
  std::string s;
  s.reserve(64);
  for (std::uint8_t b : d) {
    s.push_back(digits[b >> 4]);
    s.push_back(digits[b & 0xf]);
  }
  return s;
}

// --- canonical config ------------------------------------------------------

namespace {

std::string format_double(double v) {
  std::array<char, 64> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  (void)ec;
  return std::string(buf.data(), end);
}

}  // namespace

std::string canonical_shared_config(const OpticalConfig& cfg) {
  std::string s = "polcor-shared-config-v1\n";
  s += "n_bins=" + std::to_string(cfg.n_bins) + "\n";
  s += "duty=" + format_double(cfg.duty) + "\n";
  s += "eta=" + format_double(cfg.eta) + "\n";
  s += "i0=" + format_double(cfg.i0) + "\n";
  s += "seed=" + std::to_string(cfg.seed) + "\n";
  s += std::string("overlap=") + to_string(cfg.overlap) + "\n";
  return s;
}

Digest config_digest(const OpticalConfig& cfg) {
  const std::string canon = canonical_shared_config(cfg);
  return sha256(std::span(reinterpret_cast<const std::uint8_t*>(canon.data()), canon.size()));
}

// --- framing ---------------------------------------------------------------

namespace {

void put_u64(std::uint8_t* p, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) p[i] = static_cast<std::uint8_t>(v >> (8 * i));
}

std::uint64_t get_u64(const std::uint8_t* p) {
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | p[i];
  return v;
}

void put_f64(std::uint8_t* p, double d) { put_u64(p, std::bit_cast<std::uint64_t>(d)); }
double get_f64(const std::uint8_t* p) { return std::bit_cast<double>(get_u64(p)); }

}  // namespace

std::array<std::uint8_t, kHeaderSize> encode_header(const StreamHeader& h) {
  std::array<std::uint8_t, kHeaderSize> out{};
  std::memcpy(out.data(), kMagic.data(), 4);
  out[4] = kVersion;
  out[5] = static_cast<std::uint8_t>(h.party);
  std::memcpy(out.data() + 6, h.digest.data(), h.digest.size());
  return out;
}

StreamHeader decode_header(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kHeaderSize)
    throw WireError(WireErrorCode::ShortRead, "stream header truncated");
  if (std::memcmp(bytes.data(), kMagic.data(), 4) != 0)
    throw WireError(WireErrorCode::BadMagic, "bad stream magic (expected PCOR)");
  if (bytes[4] != kVersion)
    throw WireError(WireErrorCode::VersionMismatch,
                    "unsupported stream version " + std::to_string(int(bytes[4])));
  if (bytes[5] > 1)
    throw WireError(WireErrorCode::UnknownParty,
                    "unknown party byte " + std::to_string(int(bytes[5])));
  StreamHeader h;
  h.party = static_cast<Party>(bytes[5]);
  std::memcpy(h.digest.data(), bytes.data() + 6, h.digest.size());
  return h;
}

std::array<std::uint8_t, kRecordSize> encode_record(const DetectorSample& s) {
  std::array<std::uint8_t, kRecordSize> out{};
  put_u64(out.data(), s.bin);
  out[8] = static_cast<std::uint8_t>(s.tag);
  const double coefs[8] = {s.port1_coef_h.real(), s.port1_coef_h.imag(), s.port1_coef_v.real(),
                           s.port1_coef_v.imag(), s.port2_coef_h.real(), s.port2_coef_h.imag(),
                           s.port2_coef_v.real(), s.port2_coef_v.imag()};
  for (int i = 0; i < 8; ++i) put_f64(out.data() + 9 + 8 * i, coefs[i]);
  return out;
}

DetectorSample decode_record(std::span<const std::uint8_t> bytes, Party party) {
  if (bytes.size() < kRecordSize)
    throw WireError(WireErrorCode::ShortRead, "record truncated (expected 73 bytes)");
  if (bytes[8] > 1)
    throw WireError(WireErrorCode::UnknownTag,
                    "unknown source tag " + std::to_string(int(bytes[8])));
  DetectorSample s;
  s.bin = get_u64(bytes.data());
  s.party = party;
  s.tag = static_cast<SourceTag>(bytes[8]);
  double c[8];
  for (int i = 0; i < 8; ++i) c[i] = get_f64(bytes.data() + 9 + 8 * i);
  s.port1_coef_h = Complex{c[0], c[1]};
  s.port1_coef_v = Complex{c[2], c[3]};
  s.port2_coef_h = Complex{c[4], c[5]};
  s.port2_coef_v = Complex{c[6], c[7]};
  s.intensity_port1 = std::norm(s.port1_coef_h) + std::norm(s.port1_coef_v);
  s.intensity_port2 = std::norm(s.port2_coef_h) + std::norm(s.port2_coef_v);
  return s;
}

std::vector<std::uint8_t> encode_stream(const OpticalConfig& cfg, Party party,
                                        std::span<const DetectorSample> samples) {
  std::vector<std::uint8_t> out;
  out.reserve(kHeaderSize + samples.size() * kRecordSize);
  const auto header = encode_header(StreamHeader{party, config_digest(cfg)});
  out.insert(out.end(), header.begin(), header.end());
  for (const DetectorSample& s : samples) {
    const auto rec = encode_record(s);
    out.insert(out.end(), rec.begin(), rec.end());
  }
  return out;
}

DecodedStream decode_stream(std::span<const std::uint8_t> bytes) {
  DecodedStream out;
  out.header = decode_header(bytes);
  std::size_t off = kHeaderSize;
  if ((bytes.size() - off) % kRecordSize != 0)
    throw WireError(WireErrorCode::ShortRead, "stream length is not a whole number of records");
  out.samples.reserve((bytes.size() - off) / kRecordSize);
  std::uint64_t expected = 0;
  while (off < bytes.size()) {
    DetectorSample s = decode_record(bytes.subspan(off, kRecordSize), out.header.party);
    if (s.bin != expected)
      throw WireError(WireErrorCode::StreamGap,
                      "bin index gap: expected " + std::to_string(expected) + ", got " +
                          std::to_string(s.bin));
    ++expected;
    out.samples.push_back(s);
    off += kRecordSize;
  }
  return out;
}

}  // namespace polcor::wire
