#include "wrpipe/engine.hpp"

#include <ctime>
#include <exception>
#include <mutex>
#include <thread>

namespace wrpipe {

RunClock::RunClock() : start_(std::chrono::steady_clock::now()) {}

std::int64_t RunClock::now_ns() const {
    return std::chrono::duration_cast<std::chrono::nanoseconds>(std::chrono::steady_clock::now() - start_)
        .count();
}

std::int64_t thread_cpu_ns() {
    timespec ts{};
    clock_gettime(CLOCK_THREAD_CPUTIME_ID, &ts);
    return static_cast<std::int64_t>(ts.tv_sec) * 1'000'000'000 + ts.tv_nsec;
}

void WorkerLog::begin(int sub, int iterate, Stage stage, int block) {
    TaskEvent e;
    e.worker = worker_;
    e.sub = sub;
    e.iterate = iterate;
    e.stage = stage;
    e.block = block;
    e.start_event = clock_->next_event();
    e.start_ns = clock_->now_ns();
    events_.push_back(e);
    cpu_start_ = thread_cpu_ns();
}

void WorkerLog::end() {
    auto& e = events_.back();
    e.cpu_ns = thread_cpu_ns() - cpu_start_;
    e.end_ns = clock_->now_ns();
    e.end_event = clock_->next_event();
}

WorkerStats WorkerLog::stats(std::int64_t lifetime_ns) const {
    WorkerStats s;
    s.worker = worker_;
    s.tasks = events_.size();
    std::int64_t busy = 0;
    std::int64_t cpu = 0;
    for (const auto& e : events_) {
        busy += e.end_ns - e.start_ns;
        cpu += e.cpu_ns;
    }
    s.busy_seconds = static_cast<double>(busy) * 1e-9;
    s.cpu_seconds = static_cast<double>(cpu) * 1e-9;
    s.idle_seconds = static_cast<double>(std::max<std::int64_t>(0, lifetime_ns - busy)) * 1e-9;
    return s;
}

WorkerRunResult run_workers(std::size_t workers,
                            Transport& transport,
                            const std::function<void(std::size_t, WorkerLog&)>& body) {
    RunClock clock;
    std::vector<WorkerLog> logs;
    logs.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        logs.emplace_back(w, clock);
    }
    std::vector<std::int64_t> lifetimes(workers, 0);

    std::mutex error_mutex;
    std::exception_ptr first_error;
    {
        std::vector<std::jthread> threads;
        threads.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) {
            threads.emplace_back([&, w] {
                const std::int64_t t0 = clock.now_ns();
                try {
                    body(w, logs[w]);
                } catch (...) {
                    {
                        std::lock_guard lock(error_mutex);
                        if (!first_error) {
                            first_error = std::current_exception();
                        }
                    }
                    transport.close();
                }
                lifetimes[w] = clock.now_ns() - t0;
            });
        }
    }
    if (first_error) {
        std::rethrow_exception(first_error);
    }

    WorkerRunResult result;
    result.wall_seconds = static_cast<double>(clock.now_ns()) * 1e-9;
    for (std::size_t w = 0; w < workers; ++w) {
        const auto& ev = logs[w].events();
        result.timeline.insert(result.timeline.end(), ev.begin(), ev.end());
        result.stats.push_back(logs[w].stats(lifetimes[w]));
    }
    return result;
}

}  // namespace wrpipe
