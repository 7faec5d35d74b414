#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "wrpipe/grid.hpp"
#include "wrpipe/heat.hpp"
#include "wrpipe/problem.hpp"
#include "wrpipe/report.hpp"

namespace wrpipe {

/// A heat problem together with its discretization and decomposition.
struct DecomposedProblem {
    HeatProblem problem;
    SpaceTimeGrid grid;
    Decomposition decomposition;

    static DecomposedProblem make(HeatProblem problem,
                                  std::size_t nx,
                                  std::size_t nt,
                                  std::size_t subdomains,
                                  std::size_t blocks = 1,
                                  InterfacePlacement placement = InterfacePlacement::NearestNode,
                                  PivotPolicy pivot = PivotPolicy::middle());

    /// Same problem and interfaces, different block count.
    [[nodiscard]] DecomposedProblem with_blocks(std::size_t blocks) const;
};

enum class InitialGuess {
    InitialConditionTrace,  // w_p(t) = u0(x_p) for all t
    Zero,
    Custom,
};

struct GuessSpec {
    InitialGuess kind = InitialGuess::InitialConditionTrace;
    std::optional<TraceSet> custom;
};

/// w^0 on every interface over the full horizon.
TraceSet initial_traces(const DecomposedProblem& p, const GuessSpec& guess);

/// g(t_{l+1}) for l = first_step .. first_step+count-1; zeros for an empty g.
std::vector<double> boundary_series(const TimeFunction& g,
                                    const SpaceTimeGrid& grid,
                                    std::size_t first_step,
                                    std::size_t count);

/// Trace storage indexed by iterate. Writers fill disjoint (iterate, interface,
/// block) ranges, so concurrent writes from different workers do not conflict.
class TraceHistory {
  public:
    TraceHistory(int last_iterate, std::size_t interfaces, std::size_t steps);

    void write(int iterate, std::size_t interface, std::size_t first_step, std::span<const double> values);
    [[nodiscard]] TraceSet at(int iterate) const;
    [[nodiscard]] std::span<const double> series(int iterate, std::size_t interface) const;

  private:
    std::size_t interfaces_;
    std::size_t steps_;
    std::vector<std::vector<std::vector<double>>> data_;  // [k][p][l]
};

/// max |w^k - w^(k-1)| for k = 1..last.
std::vector<double> residual_history(const TraceHistory& h, int last);

}  // namespace wrpipe
