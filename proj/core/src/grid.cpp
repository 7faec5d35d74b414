#include "wrpipe/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "wrpipe/errors.hpp"

namespace wrpipe {

double SpaceTimeGrid::x(std::size_t node) const {
    return length * static_cast<double>(node) / static_cast<double>(nx + 1);
}

double SpaceTimeGrid::t(std::size_t level) const {
    return horizon * static_cast<double>(level) / static_cast<double>(nt);
}

SpaceTimeGrid build_grid(double length, double horizon, std::size_t nx, std::size_t nt) {
    if (!(length > 0.0) || !std::isfinite(length)) {
        throw ConfigError("grid length L must be positive");
    }
    if (!(horizon > 0.0) || !std::isfinite(horizon)) {
        throw ConfigError("time horizon T must be positive");
    }
    if (nx < 1) {
        throw ConfigError("Nx must be at least 1");
    }
    if (nt < 1) {
        throw ConfigError("Nt must be at least 1");
    }
    SpaceTimeGrid grid;
    grid.length = length;
    grid.horizon = horizon;
    grid.nx = nx;
    grid.nt = nt;
    grid.dx = length / static_cast<double>(nx + 1);
    grid.dt = horizon / static_cast<double>(nt);
    return grid;
}

double Decomposition::width(std::size_t s, const SpaceTimeGrid& grid) const {
    return grid.x(last_node(s)) - grid.x(first_node(s));
}

std::size_t middle_pivot(std::size_t subdomains) {
    return (subdomains + 1) / 2 - 1;
}

namespace {

Decomposition finish(const SpaceTimeGrid& grid,
                     std::vector<std::size_t> nodes,
                     std::size_t blocks,
                     PivotPolicy pivot) {
    const std::size_t n = nodes.size() - 1;
    if (blocks < 1) {
        throw ConfigError("J must be at least 1");
    }
    if (grid.nt % blocks != 0) {
        throw ConfigError("J must divide Nt (J=" + std::to_string(blocks) +
                          ", Nt=" + std::to_string(grid.nt) + ")");
    }
    Decomposition d;
    d.subdomains = n;
    d.boundary_nodes = std::move(nodes);
    d.blocks = blocks;
    d.block_len = grid.nt / blocks;
    d.pivot = pivot.pivot.value_or(middle_pivot(n));
    if (d.pivot >= n) {
        throw ConfigError("pivot subdomain must satisfy 1 <= m <= N");
    }
    for (std::size_t p = 1; p < n; ++p) {
        d.interfaces.push_back(grid.x(d.boundary_nodes[p]));
    }
    d.h_min = d.width(0, grid);
    d.h_max = d.h_min;
    for (std::size_t s = 0; s < n; ++s) {
        const double h = d.width(s, grid);
        if (!(h > 0.0)) {
            throw ConfigError("subdomain widths must be positive");
        }
        d.h_min = std::min(d.h_min, h);
        d.h_max = std::max(d.h_max, h);
    }
    d.h_tilde = d.h_min;
    return d;
}

}  // namespace

Decomposition decompose(const SpaceTimeGrid& grid,
                        std::size_t subdomains,
                        std::size_t blocks,
                        PivotPolicy pivot,
                        InterfacePlacement placement) {
    if (subdomains < 1) {
        throw ConfigError("N must be at least 1");
    }
    const std::size_t intervals = grid.nx + 1;
    if (subdomains > intervals) {
        throw ConfigError("N exceeds the number of grid intervals");
    }
    if (placement == InterfacePlacement::Exact && intervals % subdomains != 0) {
        throw ConfigError("interface off-grid: Nx+1=" + std::to_string(intervals) +
                          " is not divisible by N=" + std::to_string(subdomains));
    }
    std::vector<std::size_t> nodes(subdomains + 1);
    for (std::size_t s = 0; s <= subdomains; ++s) {
        // 2*s*intervals/N rounded half-up, then halved: integer nearest-node snap
        const std::size_t twice = 2 * s * intervals / subdomains;
        nodes[s] = (twice + 1) / 2;
    }
    for (std::size_t s = 0; s < subdomains; ++s) {
        if (nodes[s + 1] <= nodes[s]) {
            throw ConfigError("degenerate subdomain after snapping interfaces to nodes");
        }
    }
    return finish(grid, std::move(nodes), blocks, pivot);
}

Decomposition decompose(const SpaceTimeGrid& grid,
                        const std::vector<double>& interfaces,
                        std::size_t blocks,
                        PivotPolicy pivot) {
    std::vector<std::size_t> nodes{0};
    const double scale = static_cast<double>(grid.nx + 1) / grid.length;
    for (double x : interfaces) {
        const double pos = x * scale;
        const double snapped = std::round(pos);
        if (std::abs(pos - snapped) > 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, pos) ||
            snapped <= 0.0 || snapped >= static_cast<double>(grid.nx + 1)) {
            throw ConfigError("interface off-grid: x=" + std::to_string(x));
        }
        const auto node = static_cast<std::size_t>(snapped);
        if (node <= nodes.back()) {
            throw ConfigError("interfaces must be strictly increasing");
        }
        nodes.push_back(node);
    }
    nodes.push_back(grid.nx + 1);
    return finish(grid, std::move(nodes), blocks, pivot);
}

}  // namespace wrpipe
