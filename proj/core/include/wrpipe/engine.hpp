#pragma once

#include <atomic>
#include <chrono>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "wrpipe/report.hpp"
#include "wrpipe/transport.hpp"

namespace wrpipe {

/// Wall clock plus a run-wide event counter shared by all workers.
class RunClock {
  public:
    RunClock();

    [[nodiscard]] std::int64_t now_ns() const;
    std::uint64_t next_event() { return events_.fetch_add(1); }

  private:
    std::chrono::steady_clock::time_point start_;
    std::atomic<std::uint64_t> events_{0};
};

/// CPU time consumed by the calling thread.
std::int64_t thread_cpu_ns();

/// Per-worker task log. begin()/end() bracket the compute-and-send part of a
/// task; receives happen before begin() and count as idle time.
class WorkerLog {
  public:
    WorkerLog(std::size_t worker, RunClock& clock) : worker_(worker), clock_(&clock) {}

    void begin(int sub, int iterate, Stage stage, int block);
    void end();

    [[nodiscard]] std::size_t worker() const { return worker_; }
    [[nodiscard]] const std::vector<TaskEvent>& events() const { return events_; }
    [[nodiscard]] WorkerStats stats(std::int64_t lifetime_ns) const;

  private:
    std::size_t worker_;
    RunClock* clock_;
    std::vector<TaskEvent> events_;
    std::int64_t cpu_start_ = 0;
};

struct WorkerRunResult {
    std::vector<TaskEvent> timeline;
    std::vector<WorkerStats> stats;
    double wall_seconds = 0.0;
};

/// Runs body(worker, log) on one thread per worker. If any worker throws, the
/// transport is closed so blocked peers fail fast, and the first exception is
/// rethrown after all threads have joined.
WorkerRunResult run_workers(std::size_t workers,
                            Transport& transport,
                            const std::function<void(std::size_t, WorkerLog&)>& body);

}  // namespace wrpipe
