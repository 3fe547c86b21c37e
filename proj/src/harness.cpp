#include "polcor/harness.hpp"

#include <arpa/inet.h>
#include <fcntl.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <condition_variable>
#include <cstring>
#include <deque>
#include <mutex>
#include <optional>
#include <thread>

#include "polcor/csv.hpp"

namespace polcor::harness {

using sim::DetectorSample;
using sim::PulseBin;
using wire::WireError;
using wire::WireErrorCode;

namespace {

[[noreturn]] void throw_errno(const std::string& what) {
  throw std::runtime_error(what + ": " + std::strerror(errno));
}

}  // namespace

// --- file transport ----------------------------------------------------------

FileSink::FileSink(const std::string& path)
    : fd_(::open(path.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644)) {
  if (fd_ < 0) throw_errno("open " + path);
}

FileSink::~FileSink() {
  if (fd_ >= 0) ::close(fd_);
}

void FileSink::write(std::span<const std::uint8_t> bytes) {
  std::size_t off = 0;
  while (off < bytes.size()) {
    const ssize_t n = ::write(fd_, bytes.data() + off, bytes.size() - off);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw_errno("write");
    }
    off += static_cast<std::size_t>(n);
  }
}

FileSource::FileSource(const std::string& path) : fd_(::open(path.c_str(), O_RDONLY)) {
  if (fd_ < 0) throw_errno("open " + path);
}

FileSource::~FileSource() {
  if (fd_ >= 0) ::close(fd_);
}

std::size_t FileSource::read(std::span<std::uint8_t> out) {
  while (true) {
    const ssize_t n = ::read(fd_, out.data(), out.size());
    if (n < 0) {
      if (errno == EINTR) continue;
      throw_errno("read");
    }
    return static_cast<std::size_t>(n);
  }
}

// --- sockets -----------------------------------------------------------------

Socket::~Socket() {
  if (fd_ >= 0) ::close(fd_);
}

void Socket::write(std::span<const std::uint8_t> bytes) {
  std::size_t off = 0;
  while (off < bytes.size()) {
    const ssize_t n = ::send(fd_, bytes.data() + off, bytes.size() - off, MSG_NOSIGNAL);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw_errno("send");
    }
    off += static_cast<std::size_t>(n);
  }
}

std::size_t Socket::read(std::span<std::uint8_t> out) {
  while (true) {
    const ssize_t n = ::recv(fd_, out.data(), out.size(), 0);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw_errno("recv");
    }
    return static_cast<std::size_t>(n);
  }
}

std::size_t VectorSource::read(std::span<std::uint8_t> out) {
  const std::size_t n = std::min(out.size(), data_.size() - pos_);
  std::memcpy(out.data(), data_.data() + pos_, n);
  pos_ += n;
  return n;
}

namespace {

sockaddr_in resolve(const std::string& host, std::uint16_t port) {
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(port);
  if (host.empty() || host == "*") {
    addr.sin_addr.s_addr = htonl(INADDR_ANY);
    return addr;
  }
  if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) == 1) return addr;
  hostent* he = ::gethostbyname(host.c_str());
  if (he == nullptr || he->h_addrtype != AF_INET)
    throw std::runtime_error("cannot resolve host " + host);
  std::memcpy(&addr.sin_addr, he->h_addr_list[0], sizeof(addr.sin_addr));
  return addr;
}

}  // namespace

Listener::Listener(const std::string& host, std::uint16_t port) : fd_(-1), port_(0) {
  fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
  if (fd_ < 0) throw_errno("socket");
  const int one = 1;
  ::setsockopt(fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
  sockaddr_in addr = resolve(host, port);
  if (::bind(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0) throw_errno("bind");
  if (::listen(fd_, 8) != 0) throw_errno("listen");
  sockaddr_in bound{};
  socklen_t len = sizeof(bound);
  if (::getsockname(fd_, reinterpret_cast<sockaddr*>(&bound), &len) != 0)
    throw_errno("getsockname");
  port_ = ntohs(bound.sin_port);
}

Listener::~Listener() {
  if (fd_ >= 0) ::close(fd_);
}

Socket Listener::accept() {
  while (true) {
    const int fd = ::accept(fd_, nullptr, nullptr);
    if (fd < 0) {
      if (errno == EINTR) continue;
      throw_errno("accept");
    }
    return Socket(fd);
  }
}

Socket connect(const std::string& host, std::uint16_t port, int max_retries, int backoff_ms) {
  sockaddr_in addr = resolve(host, port);
  for (int attempt = 0;; ++attempt) {
    const int fd = ::socket(AF_INET, SOCK_STREAM, 0);
    if (fd < 0) throw_errno("socket");
    if (::connect(fd, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) == 0) return Socket(fd);
    const int err = errno;
    ::close(fd);
    const bool retriable = err == ECONNREFUSED || err == ECONNRESET || err == ETIMEDOUT;
    if (!retriable || attempt >= max_retries)
      throw std::runtime_error(std::string("connect: ") + std::strerror(err));
    std::this_thread::sleep_for(std::chrono::milliseconds(backoff_ms));
  }
}

// --- party -------------------------------------------------------------------

PartySummary run_party(Party role, const OpticalConfig& cfg, ByteSink& sink) {
  cfg.validate();
  if (cfg.overlap != sim::OverlapMode::Separated)
    throw std::invalid_argument("run_party: wire streams carry separated-mode samples only");
  const auto header = wire::encode_header(wire::StreamHeader{role, wire::config_digest(cfg)});
  sink.write(header);

  const std::vector<PulseBin> schedule = sim::gen_schedule(cfg.n_bins, cfg.duty, cfg.seed);
  const DetectorSample per_tag[2] = {
      sim::propagate_party_bin(role, PulseBin{0, optics::SourceTag::D}, cfg),
      sim::propagate_party_bin(role, PulseBin{0, optics::SourceTag::A}, cfg)};

  constexpr std::size_t kBatch = 512;
  std::vector<std::uint8_t> buf;
  buf.reserve(kBatch * wire::kRecordSize);
  for (const PulseBin& bin : schedule) {
    DetectorSample s = per_tag[static_cast<int>(bin.tag)];
    s.bin = bin.index;
    const auto rec = wire::encode_record(s);
    buf.insert(buf.end(), rec.begin(), rec.end());
    if (buf.size() >= kBatch * wire::kRecordSize) {
      sink.write(buf);
      buf.clear();
    }
  }
  if (!buf.empty()) sink.write(buf);
  return PartySummary{cfg.n_bins};
}

// --- correlator --------------------------------------------------------------

namespace {

/// Bounded reorder buffer between one stream reader and the merge join.
class SampleQueue {
 public:
  explicit SampleQueue(std::size_t capacity) : capacity_(capacity) {}

  void push(DetectorSample s) {
    std::unique_lock lock(mu_);
    not_full_.wait(lock, [&] { return q_.size() < capacity_ || aborted_; });
    if (aborted_) return;
    q_.push_back(s);
    not_empty_.notify_one();
  }

  std::optional<DetectorSample> pop() {
    std::unique_lock lock(mu_);
    not_empty_.wait(lock, [&] { return !q_.empty() || closed_ || error_; });
    if (error_) std::rethrow_exception(error_);
    if (q_.empty()) return std::nullopt;
    DetectorSample s = q_.front();
    q_.pop_front();
    not_full_.notify_one();
    return s;
  }

  void close() {
    std::lock_guard lock(mu_);
    closed_ = true;
    not_empty_.notify_all();
  }

  void fail(std::exception_ptr e) {
    std::lock_guard lock(mu_);
    error_ = e;
    closed_ = true;
    not_empty_.notify_all();
  }

  // Lets the consumer abandon a failed join without draining the producer.
  void abort() {
    std::lock_guard lock(mu_);
    aborted_ = true;
    not_full_.notify_all();
  }

 private:
  std::mutex mu_;
  std::condition_variable not_full_, not_empty_;
  std::deque<DetectorSample> q_;
  std::size_t capacity_;
  bool closed_ = false;
  bool aborted_ = false;
  std::exception_ptr error_;
};

bool read_exact(ByteSource& src, std::span<std::uint8_t> out, bool eof_ok_at_start) {
  std::size_t off = 0;
  while (off < out.size()) {
    const std::size_t n = src.read(out.subspan(off));
    if (n == 0) {
      if (off == 0 && eof_ok_at_start) return false;
      throw WireError(WireErrorCode::ShortRead, "stream truncated mid-record");
    }
    off += n;
  }
  return true;
}

struct StreamReader {
  ByteSource& src;
  SampleQueue queue{4096};
  wire::StreamHeader header;
  std::thread thread;

  explicit StreamReader(ByteSource& s) : src(s) {}

  void read_header() {
    std::array<std::uint8_t, wire::kHeaderSize> h{};
    if (!read_exact(src, h, false))
      throw WireError(WireErrorCode::ShortRead, "stream header truncated");
    header = wire::decode_header(h);
  }

  void start() {
    thread = std::thread([this] {
      try {
        std::array<std::uint8_t, wire::kRecordSize> rec{};
        while (read_exact(src, rec, true)) queue.push(wire::decode_record(rec, header.party));
        queue.close();
      } catch (...) {
        queue.fail(std::current_exception());
      }
    });
  }

  void finish() {
    queue.abort();
    if (thread.joinable()) thread.join();
  }
};

}  // namespace

std::span<const DetectorPair> all_pairs() {
  static constexpr DetectorPair pairs[4] = {DetectorPair::AB, DetectorPair::CD, DetectorPair::AD,
                                            DetectorPair::BC};
  return pairs;
}

CorrelatorResult run_correlator(ByteSource& first, ByteSource& second, const OpticalConfig& cfg,
                                std::span<const DetectorPair> requested) {
  cfg.validate();
  StreamReader ra(first), rb(second);
  ra.read_header();
  rb.read_header();

  if (ra.header.party == rb.header.party)
    throw WireError(WireErrorCode::DuplicateParty,
                    std::string("both streams claim party ") + to_string(ra.header.party));
  if (ra.header.digest != rb.header.digest)
    throw WireError(WireErrorCode::ConfigMismatch, "stream config digests differ");
  if (ra.header.digest != wire::config_digest(cfg))
    throw WireError(WireErrorCode::ConfigMismatch,
                    "stream config digest does not match the correlator config");

  StreamReader& alice = ra.header.party == Party::Alpha ? ra : rb;
  StreamReader& bob = ra.header.party == Party::Alpha ? rb : ra;

  std::vector<PulseBin> schedule;
  std::vector<DetectorSample> alice_samples, bob_samples;
  schedule.reserve(cfg.n_bins);
  alice_samples.reserve(cfg.n_bins);
  bob_samples.reserve(cfg.n_bins);

  alice.start();
  bob.start();
  try {
    for (std::uint64_t expected = 0; expected < cfg.n_bins; ++expected) {
      std::optional<DetectorSample> a = alice.queue.pop();
      std::optional<DetectorSample> b = bob.queue.pop();
      if (!a || !b)
        throw WireError(WireErrorCode::StreamGap,
                        std::string(!a ? "alice" : "bob") + " stream ended early: missing bins " +
                            std::to_string(expected) + ".." + std::to_string(cfg.n_bins - 1));
      if (a->bin != expected || b->bin != expected)
        throw WireError(WireErrorCode::StreamGap,
                        "bin index gap at " + std::to_string(expected));
      if (a->tag != b->tag)
        throw WireError(WireErrorCode::StreamGap,
                        "source tag mismatch at bin " + std::to_string(expected));
      schedule.push_back(PulseBin{expected, a->tag});
      alice_samples.push_back(*a);
      bob_samples.push_back(*b);
    }
    if (alice.queue.pop() || bob.queue.pop())
      throw WireError(WireErrorCode::StreamGap, "stream continues past configured n_bins");
  } catch (...) {
    ra.finish();
    rb.finish();
    throw;
  }
  ra.finish();
  rb.finish();

  const meas::BinPairing pairing = meas::pair_bins(schedule);
  CorrelatorResult result;
  for (DetectorPair pair : requested)
    result.pairs.push_back(meas::estimate_R(pairing, alice_samples, bob_samples, pair, cfg));
  result.csv = csv::correlation_csv(cfg, result.pairs);
  return result;
}

CorrelatorResult run_in_process(const OpticalConfig& cfg, std::span<const DetectorPair> requested) {
  const sim::SimulationRun run = sim::simulate(cfg);
  const meas::BinPairing pairing = meas::pair_bins(run.schedule);
  CorrelatorResult result;
  for (DetectorPair pair : requested)
    result.pairs.push_back(meas::estimate_R(pairing, run.alice, run.bob, pair, cfg));
  result.csv = csv::correlation_csv(cfg, result.pairs);
  return result;
}

}  // namespace polcor::harness
