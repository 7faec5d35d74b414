#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "wrpipe/heat.hpp"
#include "wrpipe/report.hpp"
#include "wrpipe/transport.hpp"
#include "wrpipe/waveform.hpp"

namespace wrpipe::nnwr {

struct Config {
    double theta = 0.25;
    int iterates = 8;  // K: cap for classical, exact count for pipeline
    double tol = 1e-8;
    GuessSpec guess;
    FluxStencil stencil = FluxStencil::Consistent;
    ChannelOptions transport;

    /// Throws ConfigError unless 0 < theta <= 1, K >= 1 and tol >= 0.
    void validate() const;
};

/// Geometry and pre-factored matrices for one subdomain.
struct Subdomain {
    std::size_t index = 0;
    std::size_t count = 1;
    SubdomainGeometry geom;
    TriFactor dirichlet;  // u problem: Dirichlet at both ends
    TriFactor auxiliary;  // psi problem: Neumann at interfaces, zero Dirichlet at physical ends
    const HeatProblem* problem = nullptr;
    FluxStencil stencil = FluxStencil::Consistent;
    std::size_t block_len = 1;

    [[nodiscard]] bool has_left_interface() const { return index > 0; }
    [[nodiscard]] bool has_right_interface() const { return index + 1 < count; }
};

Subdomain make_subdomain(const DecomposedProblem& p, std::size_t s, FluxStencil stencil);

/// This subdomain's fluxes d/dx u at its two ends, one value per step.
struct FluxHalves {
    std::vector<double> left;
    std::vector<double> right;
};

/// Advances u over block j with w_left / w_right as Dirichlet data on interior
/// ends (physical data on the outer ends, where the span is ignored).
FluxHalves dirichlet_sweep(const Subdomain& sd,
                           SubdomainState& u,
                           std::span<const double> w_left,
                           std::span<const double> w_right,
                           std::size_t block);

/// psi at the subdomain's two ends, one value per step.
struct PsiTraces {
    std::vector<double> left;
    std::vector<double> right;
};

/// Advances psi over block j; jump_left / jump_right are d/dx psi at interior
/// ends (own flux minus the neighbour's flux at that interface).
PsiTraces auxiliary_sweep(const Subdomain& sd,
                          SubdomainState& psi,
                          std::span<const double> jump_left,
                          std::span<const double> jump_right,
                          std::size_t block);

/// own - neighbour, elementwise.
std::vector<double> neumann_jump(std::span<const double> own, std::span<const double> neighbour);

/// w - theta * (psi_left_sub + psi_right_sub), elementwise.
std::vector<double> update_traces(std::span<const double> w_old,
                                  std::span<const double> psi_left_sub,
                                  std::span<const double> psi_right_sub,
                                  double theta);

/// N workers; iterates until tol or K. Uses a single time block.
RunReport run_classical(const DecomposedProblem& p, const Config& cfg);

/// Streams the decomposition's J blocks through 2NK workers (J >= 2K) or NJ
/// workers (J < 2K). Always computes exactly K iterates.
RunReport run_pipeline(const DecomposedProblem& p, const Config& cfg);

/// Peak efficiency of the pipeline with unit block costs.
double peak_efficiency(int iterates, int blocks);

}  // namespace wrpipe::nnwr
