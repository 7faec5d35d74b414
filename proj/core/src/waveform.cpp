#include "wrpipe/waveform.hpp"

#include <algorithm>
#include <cmath>

#include "wrpipe/errors.hpp"

namespace wrpipe {

DecomposedProblem DecomposedProblem::make(HeatProblem problem,
                                          std::size_t nx,
                                          std::size_t nt,
                                          std::size_t subdomains,
                                          std::size_t blocks,
                                          InterfacePlacement placement,
                                          PivotPolicy pivot) {
    DecomposedProblem p;
    p.grid = build_grid(problem.length, problem.horizon, nx, nt);
    p.decomposition = decompose(p.grid, subdomains, blocks, pivot, placement);
    p.problem = std::move(problem);
    return p;
}

DecomposedProblem DecomposedProblem::with_blocks(std::size_t blocks) const {
    DecomposedProblem p = *this;
    if (blocks < 1 || grid.nt % blocks != 0) {
        throw ConfigError("J must divide Nt");
    }
    p.decomposition.blocks = blocks;
    p.decomposition.block_len = grid.nt / blocks;
    return p;
}

TraceSet initial_traces(const DecomposedProblem& p, const GuessSpec& guess) {
    const std::size_t interfaces = p.decomposition.interface_count();
    const std::size_t steps = p.grid.nt;
    switch (guess.kind) {
        case InitialGuess::Zero:
            return TraceSet::zeros(interfaces, steps, 0);
        case InitialGuess::InitialConditionTrace: {
            TraceSet t = TraceSet::zeros(interfaces, steps, 0);
            for (std::size_t q = 0; q < interfaces; ++q) {
                const double v = p.problem.initial ? p.problem.initial(p.decomposition.interfaces[q]) : 0.0;
                std::fill(t.values[q].begin(), t.values[q].end(), v);
            }
            return t;
        }
        case InitialGuess::Custom:
            if (!guess.custom || guess.custom->interfaces() != interfaces || guess.custom->steps != steps) {
                throw ConfigError("custom initial traces must cover every interface and time step");
            }
            {
                TraceSet t = *guess.custom;
                t.iterate = 0;
                return t;
            }
    }
    throw ConfigError("unknown initial guess");
}

std::vector<double> boundary_series(const TimeFunction& g,
                                    const SpaceTimeGrid& grid,
                                    std::size_t first_step,
                                    std::size_t count) {
    std::vector<double> out(count, 0.0);
    if (g) {
        for (std::size_t l = 0; l < count; ++l) {
            out[l] = g(grid.t(first_step + l + 1));
        }
    }
    return out;
}

TraceHistory::TraceHistory(int last_iterate, std::size_t interfaces, std::size_t steps)
    : interfaces_(interfaces), steps_(steps),
      data_(static_cast<std::size_t>(last_iterate + 1),
            std::vector<std::vector<double>>(interfaces, std::vector<double>(steps, 0.0))) {}

void TraceHistory::write(int iterate, std::size_t interface, std::size_t first_step,
                         std::span<const double> values) {
    auto& dst = data_.at(static_cast<std::size_t>(iterate)).at(interface);
    if (first_step + values.size() > dst.size()) {
        throw ScheduleError("trace block exceeds the time horizon");
    }
    std::copy(values.begin(), values.end(), dst.begin() + static_cast<std::ptrdiff_t>(first_step));
}

TraceSet TraceHistory::at(int iterate) const {
    TraceSet t;
    t.iterate = iterate;
    t.steps = steps_;
    t.values = data_.at(static_cast<std::size_t>(iterate));
    return t;
}

std::span<const double> TraceHistory::series(int iterate, std::size_t interface) const {
    return data_.at(static_cast<std::size_t>(iterate)).at(interface);
}

std::vector<double> residual_history(const TraceHistory& h, int last) {
    std::vector<double> out;
    for (int k = 1; k <= last; ++k) {
        out.push_back(h.at(k).max_abs_diff(h.at(k - 1)));
    }
    return out;
}

}  // namespace wrpipe
