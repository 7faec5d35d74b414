#include "wrpipe/heat.hpp"

#include <string>

#include "wrpipe/errors.hpp"

namespace wrpipe {

TriFactor::TriFactor(std::size_t local_nodes, double dt_over_dx2, BcPattern pattern)
    : local_nodes_(local_nodes), ratio_(dt_over_dx2), pattern_(pattern) {
    if (local_nodes < 3) {
        throw ConfigError("degenerate subdomain: " + std::to_string(local_nodes) +
                          " nodes, need at least 3");
    }
    if (!(dt_over_dx2 > 0.0)) {
        throw ConfigError("dt/dx^2 must be positive");
    }
    const std::size_t first = first_unknown();
    const std::size_t last = pattern.right == BcKind::Neumann ? local_nodes - 1 : local_nodes - 2;
    const std::size_t n = last - first + 1;
    const double r = dt_over_dx2;

    lower_.assign(n, -r);
    diag_.assign(n, 1.0 + 2.0 * r);
    upper_.assign(n, -r);
    lower_.front() = 0.0;
    upper_.back() = 0.0;
    if (pattern.left == BcKind::Neumann && n > 1) {
        upper_.front() = -2.0 * r;
    }
    if (pattern.right == BcKind::Neumann && n > 1) {
        lower_.back() = -2.0 * r;
    }

    // Thomas factorization; the matrix is strictly diagonally dominant so no pivoting.
    inv_pivot_.resize(n);
    upper_scaled_.resize(n);
    inv_pivot_[0] = 1.0 / diag_[0];
    upper_scaled_[0] = upper_[0] * inv_pivot_[0];
    for (std::size_t q = 1; q < n; ++q) {
        inv_pivot_[q] = 1.0 / (diag_[q] - lower_[q] * upper_scaled_[q - 1]);
        upper_scaled_[q] = upper_[q] * inv_pivot_[q];
    }
}

void TriFactor::solve(std::span<double> rhs) const {
    const std::size_t n = diag_.size();
    rhs[0] *= inv_pivot_[0];
    for (std::size_t q = 1; q < n; ++q) {
        rhs[q] = (rhs[q] - lower_[q] * rhs[q - 1]) * inv_pivot_[q];
    }
    for (std::size_t q = n - 1; q-- > 0;) {
        rhs[q] -= upper_scaled_[q] * rhs[q + 1];
    }
}

void TriFactor::apply(std::span<const double> x, std::span<double> y) const {
    const std::size_t n = diag_.size();
    for (std::size_t q = 0; q < n; ++q) {
        double v = diag_[q] * x[q];
        if (q > 0) {
            v += lower_[q] * x[q - 1];
        }
        if (q + 1 < n) {
            v += upper_[q] * x[q + 1];
        }
        y[q] = v;
    }
}

TriFactor assemble_factor(const SpaceTimeGrid& grid, std::size_t local_nodes, BcPattern pattern) {
    return TriFactor(local_nodes, grid.dt / (grid.dx * grid.dx), pattern);
}

SubdomainGeometry subdomain_geometry(const SpaceTimeGrid& grid, const Decomposition& d, std::size_t s) {
    return {grid, d.first_node(s), d.local_nodes(s)};
}

SubdomainGeometry whole_domain(const SpaceTimeGrid& grid) {
    return {grid, 0, grid.node_count()};
}

SubdomainState initial_state(const SubdomainGeometry& geom, const SpaceFunction& u0) {
    SubdomainState state;
    state.u.assign(geom.nodes, 0.0);
    if (u0) {
        for (std::size_t l = 0; l < geom.nodes; ++l) {
            state.u[l] = u0(geom.x(l));
        }
    }
    return state;
}

void BlockTraces::reserve(std::size_t n) {
    left_value.reserve(n);
    right_value.reserve(n);
    left_flux.reserve(n);
    right_flux.reserve(n);
}

void advance_step(SubdomainState& state,
                  const TriFactor& factor,
                  const SubdomainGeometry& geom,
                  BcKind left_kind,
                  double left_data,
                  BcKind right_kind,
                  double right_data,
                  const Forcing& forcing,
                  FluxStencil stencil,
                  BlockTraces& out) {
    auto& u = state.u;
    const std::size_t n = u.size();
    const double dx = geom.grid.dx;
    const double dt = geom.grid.dt;
    const double r = factor.ratio();
    const double t_new = geom.grid.t(state.step + 1);

    const double old_left = u[0];
    const double old_right = u[n - 1];
    const double f_left = forcing ? forcing(geom.x(0), t_new) : 0.0;
    const double f_right = forcing ? forcing(geom.x(n - 1), t_new) : 0.0;

    const std::size_t first = factor.first_unknown();
    const std::size_t count = factor.unknowns();
    std::span<double> rhs(u.data() + first, count);
    if (forcing) {
        for (std::size_t q = 0; q < count; ++q) {
            rhs[q] += dt * forcing(geom.x(first + q), t_new);
        }
    }
    if (left_kind == BcKind::Dirichlet) {
        u[0] = left_data;
        rhs.front() += r * left_data;
    } else {
        rhs.front() -= 2.0 * r * dx * left_data;
    }
    if (right_kind == BcKind::Dirichlet) {
        u[n - 1] = right_data;
        rhs.back() += r * right_data;
    } else {
        rhs.back() += 2.0 * r * dx * right_data;
    }
    factor.solve(rhs);
    ++state.step;

    double left_flux = left_data;
    if (left_kind == BcKind::Dirichlet) {
        if (stencil == FluxStencil::Consistent) {
            left_flux = (u[1] - u[0]) / dx - 0.5 * dx * ((u[0] - old_left) / dt - f_left);
        } else {
            left_flux = extract_flux(u, Side::Left, dx);
        }
    }
    double right_flux = right_data;
    if (right_kind == BcKind::Dirichlet) {
        if (stencil == FluxStencil::Consistent) {
            right_flux = (u[n - 1] - u[n - 2]) / dx + 0.5 * dx * ((u[n - 1] - old_right) / dt - f_right);
        } else {
            right_flux = extract_flux(u, Side::Right, dx);
        }
    }
    out.left_value.push_back(u[0]);
    out.right_value.push_back(u[n - 1]);
    out.left_flux.push_back(left_flux);
    out.right_flux.push_back(right_flux);
}

BlockTraces advance_block(SubdomainState& state,
                          const TriFactor& factor,
                          const SubdomainGeometry& geom,
                          const BcSpec& bc,
                          const Forcing& forcing,
                          std::size_t nsteps,
                          FluxStencil stencil) {
    if (bc.left.values.size() != nsteps || bc.right.values.size() != nsteps) {
        throw ConfigError("boundary series length must equal the number of steps (" +
                          std::to_string(nsteps) + ")");
    }
    if (bc.pattern() != factor.pattern()) {
        throw ConfigError("boundary pattern does not match the factorization");
    }
    if (state.u.size() != factor.local_nodes()) {
        throw ConfigError("state size does not match the subdomain");
    }
    BlockTraces out;
    out.reserve(nsteps);
    for (std::size_t l = 0; l < nsteps; ++l) {
        advance_step(state, factor, geom, bc.left.kind, bc.left.values[l], bc.right.kind,
                     bc.right.values[l], forcing, stencil, out);
    }
    return out;
}

double extract_flux(std::span<const double> u, Side side, double dx) {
    const std::size_t n = u.size();
    if (n < 3) {
        throw ConfigError("flux extraction needs at least 3 nodes");
    }
    if (side == Side::Left) {
        return (-3.0 * u[0] + 4.0 * u[1] - u[2]) / (2.0 * dx);
    }
    return (3.0 * u[n - 1] - 4.0 * u[n - 2] + u[n - 3]) / (2.0 * dx);
}

}  // namespace wrpipe
