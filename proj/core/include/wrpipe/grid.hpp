#pragma once

#include <cstddef>
#include <optional>
#include <vector>

namespace wrpipe {

/// Uniform discretization of [0,L] x [0,T].
///
/// Nodes are x_n = n * dx for n = 0..nx+1; nodes 0 and nx+1 carry the
/// physical boundary values. Time levels are t_l = l * dt for l = 0..nt.
struct SpaceTimeGrid {
    double length = 1.0;
    double horizon = 1.0;
    std::size_t nx = 1;  // interior nodes
    std::size_t nt = 1;  // time steps
    double dx = 0.5;
    double dt = 1.0;

    [[nodiscard]] std::size_t node_count() const { return nx + 2; }
    [[nodiscard]] double x(std::size_t node) const;
    [[nodiscard]] double t(std::size_t level) const;
};

SpaceTimeGrid build_grid(double length, double horizon, std::size_t nx, std::size_t nt);

/// How equal-width interfaces are mapped onto grid nodes.
enum class InterfacePlacement {
    Exact,        // nx+1 must be divisible by N
    NearestNode,  // snap i*(nx+1)/N to the nearest node (ties round up)
};

/// Which subdomain DNWR treats as the pivot.
struct PivotPolicy {
    std::optional<std::size_t> pivot;  // 0-based; default ceil(N/2) - 1

    static PivotPolicy middle() { return {}; }
    static PivotPolicy at(std::size_t m) { return {m}; }
};

/// Spatial split into N subdomains and temporal split into J equal blocks.
///
/// Subdomain s (0-based) covers nodes [boundary_nodes[s], boundary_nodes[s+1]],
/// so neighbouring subdomains share their interface node. Interface p is the
/// node shared by subdomains p and p+1.
struct Decomposition {
    std::size_t subdomains = 1;
    std::vector<std::size_t> boundary_nodes;  // size N+1, first 0, last nx+1
    std::vector<double> interfaces;           // size N-1
    std::size_t blocks = 1;
    std::size_t block_len = 1;
    std::size_t pivot = 0;
    double h_min = 0.0;
    double h_max = 0.0;
    double h_tilde = 0.0;

    [[nodiscard]] std::size_t interface_count() const { return subdomains - 1; }
    [[nodiscard]] std::size_t first_node(std::size_t s) const { return boundary_nodes[s]; }
    [[nodiscard]] std::size_t last_node(std::size_t s) const { return boundary_nodes[s + 1]; }
    [[nodiscard]] std::size_t local_nodes(std::size_t s) const {
        return boundary_nodes[s + 1] - boundary_nodes[s] + 1;
    }
    [[nodiscard]] double width(std::size_t s, const SpaceTimeGrid& grid) const;
    /// First global time step (0-based) of block j.
    [[nodiscard]] std::size_t block_begin(std::size_t j) const { return j * block_len; }
};

Decomposition decompose(const SpaceTimeGrid& grid,
                        std::size_t subdomains,
                        std::size_t blocks,
                        PivotPolicy pivot = PivotPolicy::middle(),
                        InterfacePlacement placement = InterfacePlacement::Exact);

/// Explicit interface coordinates; each must coincide with a grid node.
Decomposition decompose(const SpaceTimeGrid& grid,
                        const std::vector<double>& interfaces,
                        std::size_t blocks,
                        PivotPolicy pivot = PivotPolicy::middle());

/// ceil(N/2) - 1, the 0-based middle subdomain.
std::size_t middle_pivot(std::size_t subdomains);

}  // namespace wrpipe
