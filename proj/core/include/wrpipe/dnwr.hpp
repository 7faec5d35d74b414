#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "wrpipe/heat.hpp"
#include "wrpipe/report.hpp"
#include "wrpipe/transport.hpp"
#include "wrpipe/waveform.hpp"

namespace wrpipe::dnwr {

enum class Mode { Naive, ClassicalPacked, Pipeline };

struct Config {
    double theta = 0.5;
    int iterates = 4;  // K, always run in full
    Mode mode = Mode::Naive;
    double tol = 1e-8;  // reporting only
    GuessSpec guess;
    FluxStencil stencil = FluxStencil::Consistent;
    ChannelOptions transport;

    void validate() const;
};

/// Which subdomain supplies the trace for interface p.
enum class TraceSide { LeftOfPivot, RightOfPivot };

struct Subdomain {
    std::size_t index = 0;
    std::size_t count = 1;
    std::size_t pivot = 0;
    SubdomainGeometry geom;
    TriFactor factor;  // DD at the pivot, DN left of it, ND right of it
    const HeatProblem* problem = nullptr;
    FluxStencil stencil = FluxStencil::Consistent;
    std::size_t block_len = 1;

    [[nodiscard]] bool has_left_interface() const { return index > 0; }
    [[nodiscard]] bool has_right_interface() const { return index + 1 < count; }
    [[nodiscard]] bool is_pivot() const { return index == pivot; }
    [[nodiscard]] bool left_of_pivot() const { return index < pivot; }
    [[nodiscard]] bool right_of_pivot() const { return index > pivot; }
};

Subdomain make_subdomain(const DecomposedProblem& p, std::size_t s, FluxStencil stencil);

/// Per-step output of one block solve. The one-sided fluxes use the 3-point
/// stencil on the computed solution and serve the transmission-condition check.
struct BlockResult {
    std::vector<double> left_value;
    std::vector<double> right_value;
    std::vector<double> left_flux;
    std::vector<double> right_flux;
    std::vector<double> left_flux_onesided;
    std::vector<double> right_flux_onesided;
};

/// Pivot: Dirichlet data on both ends (interface traces or physical data).
BlockResult solve_pivot_block(const Subdomain& sd,
                              SubdomainState& u,
                              std::span<const double> w_left,
                              std::span<const double> w_right,
                              std::size_t block);

/// Left of the pivot: Dirichlet data on the left, the right neighbour's flux on the right.
BlockResult solve_left_block(const Subdomain& sd,
                             SubdomainState& u,
                             std::span<const double> w_left,
                             std::span<const double> flux_right,
                             std::size_t block);

/// Right of the pivot: the left neighbour's flux on the left, Dirichlet data on the right.
BlockResult solve_right_block(const Subdomain& sd,
                              SubdomainState& u,
                              std::span<const double> flux_left,
                              std::span<const double> w_right,
                              std::size_t block);

/// theta * u + (1 - theta) * w_old, elementwise. side is recorded for the
/// caller's bookkeeping; the arithmetic is the same on both sides.
std::vector<double> update_trace(std::span<const double> w_old,
                                 std::span<const double> u_trace,
                                 double theta,
                                 TraceSide side);

/// Subdomain that owns (uses as Dirichlet data) interface p.
std::size_t trace_holder(std::size_t interface, std::size_t pivot);
/// Subdomain whose solution supplies the new value of interface p.
std::size_t trace_source(std::size_t interface, std::size_t pivot);

/// Smallest J accepted by the pipeline: ceil(N/2) + 2K.
int min_pipeline_blocks(int subdomains, int iterates);

/// Naive and ClassicalPacked sweep the horizon as one block; Pipeline uses
/// the decomposition's J and requires J > ceil(N/2) + 2K - 1.
RunReport run(const DecomposedProblem& p, const Config& cfg);

/// J / (J + floor(N/2) + 2(K-1)); requires J > ceil(N/2) + 2K - 1.
double efficiency(int subdomains, int iterates, int blocks);

}  // namespace wrpipe::dnwr
