#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "wrpipe/transport.hpp"

namespace wrpipe {

/// Interface waveforms w_p(t_l), l = 1..Nt, for every interface p at one iterate.
struct TraceSet {
    int iterate = 0;
    std::size_t steps = 0;
    std::vector<std::vector<double>> values;  // [interface][step]

    static TraceSet zeros(std::size_t interfaces, std::size_t steps, int iterate = 0);

    [[nodiscard]] std::size_t interfaces() const { return values.size(); }
    [[nodiscard]] double max_abs() const;
    [[nodiscard]] double max_abs_diff(const TraceSet& other) const;
    [[nodiscard]] bool bitwise_equal(const TraceSet& other) const;
};

/// Timed execution of one block-task. Event numbers come from a run-wide counter.
struct TaskEvent {
    std::size_t worker = 0;
    int sub = 0;
    int iterate = 0;
    int block = 0;
    Stage stage = Stage::Solve;
    std::uint64_t start_event = 0;
    std::uint64_t end_event = 0;
    std::int64_t start_ns = 0;
    std::int64_t end_ns = 0;
    std::int64_t cpu_ns = 0;
};

struct WorkerStats {
    std::size_t worker = 0;
    std::size_t tasks = 0;
    double busy_seconds = 0.0;
    double idle_seconds = 0.0;
    double cpu_seconds = 0.0;
};

/// Endpoint data on both sides of one interface, per time step.
struct InterfaceSample {
    std::vector<double> left_value;   // subdomain p at its right end
    std::vector<double> right_value;  // subdomain p+1 at its left end
    std::vector<double> left_flux;    // one-sided stencil on subdomain p
    std::vector<double> right_flux;   // one-sided stencil on subdomain p+1
};

struct RunReport {
    std::string method;
    std::string mode;
    nlohmann::json config;

    bool converged = false;
    std::optional<int> converged_iterate;
    int iterations = 0;              // trace updates performed
    std::vector<double> residuals;   // residuals[k-1] = max |w^k - w^(k-1)|
    TraceSet final_traces;
    std::vector<TraceSet> history;   // w^0 .. w^iterations
    /// For DNWR: iterate whose residual first dropped below tol according to the
    /// convergence flags that reached subdomains 1 and N.
    std::optional<int> flag_converged_iterate;
    std::vector<InterfaceSample> interface_samples;  // last iterate; DNWR only

    MsgCounter messages;
    std::size_t pending_at_shutdown = 0;
    std::vector<TraceRecord> message_trace;

    std::size_t workers = 0;
    std::size_t hardware_threads = 0;
    double wall_seconds = 0.0;
    std::vector<WorkerStats> worker_stats;
    std::vector<TaskEvent> timeline;
};

nlohmann::json to_json(const RunReport& report);

/// `k,residual_Linf`
void write_residual_csv(std::ostream& os, const RunReport& report);
/// `worker,i,k,j,start_event,end_event`, ordered by start event; i, k and j are 1-based.
void write_timeline_csv(std::ostream& os, const RunReport& report);

}  // namespace wrpipe
