#pragma once

#include <chrono>
#include <limits>
#include <stdexcept>

namespace mcpfd {

class TimeoutError : public std::runtime_error {
 public:
  TimeoutError() : std::runtime_error("time limit exceeded") {}
};

// Cooperative wall-clock limit, polled by long-running loops.
class Deadline {
 public:
  using Clock = std::chrono::steady_clock;

  Deadline() : end_(Clock::time_point::max()) {}
  explicit Deadline(double seconds)
      : end_(seconds <= 0 || seconds > 1e9 ? Clock::time_point::max()
                                           : Clock::now() + std::chrono::duration_cast<Clock::duration>(
                                                                std::chrono::duration<double>(seconds))) {}

  bool expired() const { return end_ != Clock::time_point::max() && Clock::now() >= end_; }
  void check() const {
    if (expired()) throw TimeoutError();
  }

 private:
  Clock::time_point end_;
};

}  // namespace mcpfd
