#pragma once
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "polcor/measurement.hpp"
#include "polcor/wire.hpp"

namespace polcor::harness {

using algebra::DetectorPair;
using meas::PairCorrelation;
using optics::Party;
using sim::OpticalConfig;

/// Blocking byte sink; a full write() provides the flow control (a slow
/// consumer backs the producer up through the transport).
class ByteSink {
 public:
  virtual ~ByteSink() = default;
  virtual void write(std::span<const std::uint8_t> bytes) = 0;
};

/// Blocking byte source. read() fills as much of `out` as it can and returns
/// the byte count; 0 means end of stream.
class ByteSource {
 public:
  virtual ~ByteSource() = default;
  virtual std::size_t read(std::span<std::uint8_t> out) = 0;
};

class FileSink : public ByteSink {
 public:
  explicit FileSink(const std::string& path);
  ~FileSink() override;
  FileSink(const FileSink&) = delete;
  FileSink& operator=(const FileSink&) = delete;
  void write(std::span<const std::uint8_t> bytes) override;

 private:
  int fd_;
};

class FileSource : public ByteSource {
 public:
  explicit FileSource(const std::string& path);
  ~FileSource() override;
  FileSource(const FileSource&) = delete;
  FileSource& operator=(const FileSource&) = delete;
  std::size_t read(std::span<std::uint8_t> out) override;

 private:
  int fd_;
};

/// A connected TCP socket, usable as sink and source. Owns the fd.
class Socket : public ByteSink, public ByteSource {
 public:
  explicit Socket(int fd) : fd_(fd) {}
  Socket(Socket&& other) noexcept : fd_(other.fd_) { other.fd_ = -1; }
  Socket(const Socket&) = delete;
  Socket& operator=(const Socket&) = delete;
  ~Socket() override;
  void write(std::span<const std::uint8_t> bytes) override;
  std::size_t read(std::span<std::uint8_t> out) override;

 private:
  int fd_;
};

/// In-memory transport for tests.
class VectorSink : public ByteSink {
 public:
  void write(std::span<const std::uint8_t> bytes) override {
    data.insert(data.end(), bytes.begin(), bytes.end());
  }
  std::vector<std::uint8_t> data;
};

class VectorSource : public ByteSource {
 public:
  explicit VectorSource(std::vector<std::uint8_t> d) : data_(std::move(d)) {}
  std::size_t read(std::span<std::uint8_t> out) override;

 private:
  std::vector<std::uint8_t> data_;
  std::size_t pos_ = 0;
};

/// Listening TCP endpoint. Port 0 binds an ephemeral port.
class Listener {
 public:
  Listener(const std::string& host, std::uint16_t port);
  ~Listener();
  Listener(const Listener&) = delete;
  Listener& operator=(const Listener&) = delete;
  std::uint16_t port() const { return port_; }
  Socket accept();

 private:
  int fd_;
  std::uint16_t port_;
};

/// Connects with bounded retries (connection refused/reset is retriable).
Socket connect(const std::string& host, std::uint16_t port, int max_retries = 40,
               int backoff_ms = 50);

struct PartySummary {
  std::uint64_t bins_emitted;
};

/// Derives the shared pulse schedule from the config seed, propagates each
/// bin through this party's optics only, and emits header plus n_bins wire
/// records in bin order.
PartySummary run_party(Party role, const OpticalConfig& cfg, ByteSink& sink);

struct CorrelatorResult {
  std::vector<PairCorrelation> pairs;
  std::string csv;  ///< identical bytes to the in-process pipeline's CSV
};

/// Ingests both parties' streams (either source order), validates headers
/// against the local config digest, merge-joins on bin index with a bounded
/// reorder buffer, and runs the selective-measurement estimators.
CorrelatorResult run_correlator(ByteSource& first, ByteSource& second, const OpticalConfig& cfg,
                                std::span<const DetectorPair> requested);

/// The four standard pairs in canonical order.
std::span<const DetectorPair> all_pairs();

/// The in-process reference pipeline: simulate, pair, estimate, same CSV.
CorrelatorResult run_in_process(const OpticalConfig& cfg, std::span<const DetectorPair> requested);

}  // namespace polcor::harness
