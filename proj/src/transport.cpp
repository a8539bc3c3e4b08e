#include "parfem/transport.hpp"

#include <atomic>
#include <condition_variable>
#include <deque>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <thread>

namespace parfem {

namespace {
constexpr int kCollectiveTag = 1 << 28;

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}
}  // namespace

class LocalFabric {
 public:
  LocalFabric(int size, std::chrono::milliseconds watchdog) : size_(size), watchdog_(watchdog) {
    boxes_.resize(static_cast<std::size_t>(size) * static_cast<std::size_t>(size));
    for (auto& b : boxes_) b = std::make_unique<Mailbox>();
    for (int r = 0; r < size; ++r)
      endpoints_.push_back(std::unique_ptr<Transport>(new Transport(this, r, size)));
  }

  Transport& endpoint(int rank) { return *endpoints_[static_cast<std::size_t>(rank)]; }

  void deposit(int from, int to, int tag, Bytes payload) {
    check_peer(to);
    Mailbox& box = *boxes_[static_cast<std::size_t>(from) * static_cast<std::size_t>(size_) +
                           static_cast<std::size_t>(to)];
    {
      std::lock_guard<std::mutex> lock(box.m);
      box.queues[tag].push_back(std::move(payload));
    }
    box.cv.notify_all();
  }

  Bytes withdraw(int from, int to, int tag) {
    check_peer(from);
    Mailbox& box = *boxes_[static_cast<std::size_t>(from) * static_cast<std::size_t>(size_) +
                           static_cast<std::size_t>(to)];
    std::unique_lock<std::mutex> lock(box.m);
    const bool ok = box.cv.wait_for(lock, watchdog_, [&] {
      if (aborted_.load()) return true;
      auto it = box.queues.find(tag);
      return it != box.queues.end() && !it->second.empty();
    });
    if (aborted_.load())
      throw TransportError("fabric aborted while rank " + std::to_string(to) +
                           " awaited a message from rank " + std::to_string(from));
    if (!ok)
      throw TransportError("watchdog timeout: rank " + std::to_string(to) +
                           " waited on rank " + std::to_string(from) + ", tag " +
                           std::to_string(tag));
    auto& q = box.queues[tag];
    Bytes payload = std::move(q.front());
    q.pop_front();
    return payload;
  }

  void abort() {
    aborted_.store(true);
    for (auto& b : boxes_) b->cv.notify_all();
  }

 private:
  struct Mailbox {
    std::mutex m;
    std::condition_variable cv;
    std::map<int, std::deque<Bytes>> queues;
  };

  void check_peer(int r) const {
    if (r < 0 || r >= size_)
      throw TransportError("peer rank " + std::to_string(r) + " out of range [0, " +
                           std::to_string(size_) + ")");
  }

  int size_;
  std::chrono::milliseconds watchdog_;
  std::atomic<bool> aborted_{false};
  std::vector<std::unique_ptr<Mailbox>> boxes_;
  std::vector<std::unique_ptr<Transport>> endpoints_;
};

void Transport::send(int to, int tag, Bytes payload) {
  const auto t0 = std::chrono::steady_clock::now();
  bytes_sent_ += payload.size();
  fabric_->deposit(rank_, to, tag, std::move(payload));
  comm_seconds_ += seconds_since(t0);
}

Bytes Transport::recv(int from, int tag) {
  const auto t0 = std::chrono::steady_clock::now();
  Bytes payload = fabric_->withdraw(from, rank_, tag);
  comm_seconds_ += seconds_since(t0);
  return payload;
}

Bytes broadcast(Transport& tp, int root, Bytes payload) {
  if (tp.rank() == root) {
    for (int r = 0; r < tp.size(); ++r)
      if (r != root) tp.send(r, kCollectiveTag, payload);
    return payload;
  }
  return tp.recv(root, kCollectiveTag);
}

std::vector<Bytes> allgather(Transport& tp, Bytes payload) {
  std::vector<Bytes> out(static_cast<std::size_t>(tp.size()));
  for (int r = 0; r < tp.size(); ++r)
    if (r != tp.rank()) tp.send(r, kCollectiveTag, payload);
  out[static_cast<std::size_t>(tp.rank())] = std::move(payload);
  for (int r = 0; r < tp.size(); ++r)
    if (r != tp.rank()) out[static_cast<std::size_t>(r)] = tp.recv(r, kCollectiveTag);
  return out;
}

std::vector<Bytes> gather(Transport& tp, int root, Bytes payload) {
  if (tp.rank() != root) {
    tp.send(root, kCollectiveTag, std::move(payload));
    return {};
  }
  std::vector<Bytes> out(static_cast<std::size_t>(tp.size()));
  out[static_cast<std::size_t>(root)] = std::move(payload);
  for (int r = 0; r < tp.size(); ++r)
    if (r != root) out[static_cast<std::size_t>(r)] = tp.recv(r, kCollectiveTag);
  return out;
}

void barrier(Transport& tp) { allgather(tp, Bytes{}); }

std::vector<double> allreduce_sum(Transport& tp, const std::vector<double>& x) {
  ByteWriter w;
  for (double v : x) w.put_f64(v);
  const std::vector<Bytes> all = allgather(tp, w.take());
  std::vector<double> out(x.size(), 0.0);
  for (int r = 0; r < tp.size(); ++r) {
    ByteReader rd(all[static_cast<std::size_t>(r)]);
    for (double& o : out) o += rd.get_f64();
  }
  return out;
}

std::vector<std::int64_t> allreduce_sum(Transport& tp, const std::vector<std::int64_t>& x) {
  ByteWriter w;
  for (std::int64_t v : x) w.put_i64(v);
  const std::vector<Bytes> all = allgather(tp, w.take());
  std::vector<std::int64_t> out(x.size(), 0);
  for (int r = 0; r < tp.size(); ++r) {
    ByteReader rd(all[static_cast<std::size_t>(r)]);
    for (std::int64_t& o : out) o += rd.get_i64();
  }
  return out;
}

double allreduce_sum(Transport& tp, double x) {
  return allreduce_sum(tp, std::vector<double>{x})[0];
}

std::vector<std::int64_t> allgather_counts(Transport& tp, std::int64_t mine) {
  ByteWriter w;
  w.put_i64(mine);
  const std::vector<Bytes> all = allgather(tp, w.take());
  std::vector<std::int64_t> out(static_cast<std::size_t>(tp.size()));
  for (int r = 0; r < tp.size(); ++r) {
    ByteReader rd(all[static_cast<std::size_t>(r)]);
    out[static_cast<std::size_t>(r)] = rd.get_i64();
  }
  return out;
}

double allreduce_max(Transport& tp, double x) {
  ByteWriter w;
  w.put_f64(x);
  const std::vector<Bytes> all = allgather(tp, w.take());
  double out = x;
  for (int r = 0; r < tp.size(); ++r) {
    ByteReader rd(all[static_cast<std::size_t>(r)]);
    out = std::max(out, rd.get_f64());
  }
  return out;
}

void run_on_ranks(int n_ranks, const std::function<void(Transport&)>& body,
                  std::chrono::milliseconds watchdog) {
  if (n_ranks < 1) throw std::invalid_argument("n_ranks must be >= 1");
  LocalFabric fabric(n_ranks, watchdog);
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(n_ranks));
  std::vector<std::thread> threads;
  threads.reserve(static_cast<std::size_t>(n_ranks));
  for (int r = 0; r < n_ranks; ++r) {
    threads.emplace_back([&, r] {
      try {
        body(fabric.endpoint(r));
      } catch (...) {
        errors[static_cast<std::size_t>(r)] = std::current_exception();
        fabric.abort();
      }
    });
  }
  for (auto& t : threads) t.join();

  // Prefer the root cause: a non-transport error beats the TransportErrors
  // that aborting induces on the other ranks.
  std::exception_ptr first;
  for (const auto& e : errors) {
    if (!e) continue;
    if (!first) first = e;
    try {
      std::rethrow_exception(e);
    } catch (const TransportError&) {
    } catch (...) {
      std::rethrow_exception(e);
    }
  }
  if (first) std::rethrow_exception(first);
}

}  // namespace parfem
