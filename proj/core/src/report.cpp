#include "wrpipe/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <iomanip>
#include <limits>

namespace wrpipe {

TraceSet TraceSet::zeros(std::size_t interfaces, std::size_t steps, int iterate) {
    TraceSet t;
    t.iterate = iterate;
    t.steps = steps;
    t.values.assign(interfaces, std::vector<double>(steps, 0.0));
    return t;
}

double TraceSet::max_abs() const {
    double m = 0.0;
    for (const auto& v : values) {
        for (double x : v) {
            m = std::max(m, std::abs(x));
        }
    }
    return m;
}

double TraceSet::max_abs_diff(const TraceSet& other) const {
    if (other.values.size() != values.size() || other.steps != steps) {
        return std::numeric_limits<double>::infinity();
    }
    double m = 0.0;
    for (std::size_t p = 0; p < values.size(); ++p) {
        for (std::size_t l = 0; l < steps; ++l) {
            m = std::max(m, std::abs(values[p][l] - other.values[p][l]));
        }
    }
    return m;
}

bool TraceSet::bitwise_equal(const TraceSet& other) const {
    if (other.values.size() != values.size() || other.steps != steps) {
        return false;
    }
    for (std::size_t p = 0; p < values.size(); ++p) {
        if (std::memcmp(values[p].data(), other.values[p].data(), steps * sizeof(double)) != 0) {
            return false;
        }
    }
    return true;
}

nlohmann::json to_json(const RunReport& r) {
    using nlohmann::json;
    json j;
    j["method"] = r.method;
    j["mode"] = r.mode;
    j["config"] = r.config;
    j["converged"] = r.converged;
    j["converged_iterate"] = r.converged_iterate ? json(*r.converged_iterate) : json(nullptr);
    j["flag_converged_iterate"] = r.flag_converged_iterate ? json(*r.flag_converged_iterate) : json(nullptr);
    j["iterations"] = r.iterations;
    j["residuals"] = r.residuals;
    j["messages"] = {
        {"data_messages", r.messages.data_messages},
        {"data_words", r.messages.data_words},
        {"neumann_messages", r.messages.neumann_messages},
        {"dirichlet_messages", r.messages.dirichlet_messages},
        {"flag_messages", r.messages.flag_messages},
        {"handoff_messages", r.messages.handoff_messages},
        {"handoff_words", r.messages.handoff_words},
        {"pending_at_shutdown", r.pending_at_shutdown},
    };
    j["workers"] = r.workers;
    j["hardware_threads"] = r.hardware_threads;
    j["oversubscribed"] = r.hardware_threads > 0 && r.workers > r.hardware_threads;
    j["wall_seconds"] = r.wall_seconds;
    json stats = json::array();
    for (const auto& w : r.worker_stats) {
        stats.push_back({{"worker", w.worker},
                         {"tasks", w.tasks},
                         {"busy_seconds", w.busy_seconds},
                         {"idle_seconds", w.idle_seconds},
                         {"cpu_seconds", w.cpu_seconds}});
    }
    j["worker_stats"] = std::move(stats);
    j["final_traces"] = r.final_traces.values;
    return j;
}

void write_residual_csv(std::ostream& os, const RunReport& r) {
    os << "k,residual_Linf\n";
    os << std::setprecision(17);
    for (std::size_t k = 0; k < r.residuals.size(); ++k) {
        os << (k + 1) << ',' << r.residuals[k] << '\n';
    }
}

void write_timeline_csv(std::ostream& os, const RunReport& r) {
    auto events = r.timeline;
    std::sort(events.begin(), events.end(),
              [](const TaskEvent& a, const TaskEvent& b) { return a.start_event < b.start_event; });
    os << "worker,i,k,j,start_event,end_event\n";
    for (const auto& e : events) {
        os << e.worker << ',' << (e.sub + 1) << ',' << e.iterate << ',' << (e.block + 1) << ','
           << e.start_event << ',' << e.end_event << '\n';
    }
}

}  // namespace wrpipe
