#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <cstring>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "parfem/errors.hpp"

namespace parfem {

using Bytes = std::vector<std::byte>;

class LocalFabric;

/// One logical rank's endpoint into the message fabric. Point-to-point
/// messages are FIFO per (sender, receiver, tag). Every blocking receive is
/// guarded by the fabric watchdog, so a deadlocked exchange surfaces as a
/// TransportError instead of a hang. The endpoint also accounts wall time
/// spent inside transport calls and payload bytes sent.
class Transport {
 public:
  int rank() const { return rank_; }
  int size() const { return size_; }

  void send(int to, int tag, Bytes payload);
  Bytes recv(int from, int tag);

  double comm_seconds() const { return comm_seconds_; }
  std::uint64_t bytes_sent() const { return bytes_sent_; }
  void reset_counters() {
    comm_seconds_ = 0;
    bytes_sent_ = 0;
  }

 private:
  friend class LocalFabric;
  Transport(LocalFabric* fabric, int rank, int size)
      : fabric_(fabric), rank_(rank), size_(size) {}

  LocalFabric* fabric_;
  int rank_;
  int size_;
  double comm_seconds_ = 0;
  std::uint64_t bytes_sent_ = 0;
};

/// Deterministic collectives built on point-to-point messages. Reductions
/// combine contributions in ascending rank order, as a fixed-order
/// sequential loop would, so reruns are bit-identical.
void barrier(Transport& tp);
Bytes broadcast(Transport& tp, int root, Bytes payload);
std::vector<Bytes> allgather(Transport& tp, Bytes payload);
std::vector<Bytes> gather(Transport& tp, int root, Bytes payload);
std::vector<double> allreduce_sum(Transport& tp, const std::vector<double>& x);
std::vector<std::int64_t> allreduce_sum(Transport& tp, const std::vector<std::int64_t>& x);
double allreduce_sum(Transport& tp, double x);
double allreduce_max(Transport& tp, double x);

/// Allgather of one integer per rank, indexed by rank.
std::vector<std::int64_t> allgather_counts(Transport& tp, std::int64_t mine);

/// Run `body` once per logical rank, each on its own thread, over a fresh
/// fabric. If any rank throws, the fabric is aborted so peers blocked in
/// recv fail fast; the first root-cause exception is rethrown here.
void run_on_ranks(int n_ranks, const std::function<void(Transport&)>& body,
                  std::chrono::milliseconds watchdog = std::chrono::milliseconds(240000));

template <typename T>
std::vector<T> run_on_ranks_collect(int n_ranks, const std::function<T(Transport&)>& body,
                                    std::chrono::milliseconds watchdog =
                                        std::chrono::milliseconds(240000)) {
  std::vector<std::optional<T>> slots(static_cast<std::size_t>(n_ranks));
  run_on_ranks(
      n_ranks, [&](Transport& tp) { slots[static_cast<std::size_t>(tp.rank())] = body(tp); },
      watchdog);
  std::vector<T> out;
  out.reserve(slots.size());
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

/// Little helpers for packing mixed int64/double payloads.
class ByteWriter {
 public:
  void put_i64(std::int64_t v) { append(&v, sizeof v); }
  void put_f64(double v) { append(&v, sizeof v); }
  Bytes take() { return std::move(buf_); }

 private:
  void append(const void* p, std::size_t n) {
    const std::size_t at = buf_.size();
    buf_.resize(at + n);
    std::memcpy(buf_.data() + at, p, n);
  }
  Bytes buf_;
};

class ByteReader {
 public:
  explicit ByteReader(Bytes buf) : buf_(std::move(buf)) {}
  std::int64_t get_i64() {
    std::int64_t v;
    extract(&v, sizeof v);
    return v;
  }
  double get_f64() {
    double v;
    extract(&v, sizeof v);
    return v;
  }
  bool done() const { return pos_ == buf_.size(); }

 private:
  void extract(void* p, std::size_t n) {
    if (pos_ + n > buf_.size()) throw TransportError("malformed payload: out of data");
    std::memcpy(p, buf_.data() + pos_, n);
    pos_ += n;
  }
  Bytes buf_;
  std::size_t pos_ = 0;
};

}  // namespace parfem
