#pragma once

#include <condition_variable>
#include <cstddef>
#include <deque>
#include <mutex>
#include <optional>

namespace tripipe {

/// Capacity of a channel; nullopt means unbounded.
using Capacity = std::optional<std::size_t>;

inline constexpr std::size_t kDefaultCapacity = 1024;

/// Single-producer single-consumer FIFO. The `try_` calls never block and
/// are what the schedulers use; `send`/`receive` block for callers that run
/// one thread per end.
template <typename T>
class Channel {
 public:
  explicit Channel(Capacity capacity = kDefaultCapacity) : capacity_(capacity) {
    if (capacity_ && *capacity_ == 0) capacity_ = 1;
  }

  Channel(const Channel&) = delete;
  Channel& operator=(const Channel&) = delete;

  bool try_send(T value) {
    {
      std::lock_guard lock(mu_);
      if (full_locked()) return false;
      queue_.push_back(std::move(value));
    }
    not_empty_.notify_one();
    return true;
  }

  /// `was_full`, when given, reports whether the channel was at capacity
  /// before this receive, i.e. whether a producer may have been waiting.
  std::optional<T> try_receive(bool* was_full = nullptr) {
    std::optional<T> out;
    {
      std::lock_guard lock(mu_);
      if (queue_.empty()) return std::nullopt;
      if (was_full) *was_full = full_locked();
      out.emplace(std::move(queue_.front()));
      queue_.pop_front();
    }
    not_full_.notify_one();
    return out;
  }

  void send(T value) {
    {
      std::unique_lock lock(mu_);
      not_full_.wait(lock, [&] { return !full_locked(); });
      queue_.push_back(std::move(value));
    }
    not_empty_.notify_one();
  }

  T receive() {
    std::unique_lock lock(mu_);
    not_empty_.wait(lock, [&] { return !queue_.empty(); });
    T out = std::move(queue_.front());
    queue_.pop_front();
    lock.unlock();
    not_full_.notify_one();
    return out;
  }

  std::size_t size() const {
    std::lock_guard lock(mu_);
    return queue_.size();
  }

  bool has_space() const {
    std::lock_guard lock(mu_);
    return !full_locked();
  }

  Capacity capacity() const noexcept { return capacity_; }

 private:
  bool full_locked() const { return capacity_ && queue_.size() >= *capacity_; }

  Capacity capacity_;
  mutable std::mutex mu_;
  std::condition_variable not_empty_;
  std::condition_variable not_full_;
  std::deque<T> queue_;
};

}  // namespace tripipe
