#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "wrpipe/grid.hpp"
#include "wrpipe/problem.hpp"

namespace wrpipe {

enum class BcKind { Dirichlet, Neumann };

struct BcPattern {
    BcKind left = BcKind::Dirichlet;
    BcKind right = BcKind::Dirichlet;

    friend bool operator==(const BcPattern&, const BcPattern&) = default;
};

inline constexpr BcPattern kDD{BcKind::Dirichlet, BcKind::Dirichlet};
inline constexpr BcPattern kDN{BcKind::Dirichlet, BcKind::Neumann};
inline constexpr BcPattern kND{BcKind::Neumann, BcKind::Dirichlet};
inline constexpr BcPattern kNN{BcKind::Neumann, BcKind::Neumann};

enum class Side { Left, Right };

/// How boundary fluxes are recovered from a Dirichlet-side solution.
enum class FluxStencil {
    /// (-3u0 + 4u1 - u2) / 2dx, purely spatial.
    OneSided,
    /// Flux implied by the ghost-point Neumann row: (u1-u0)/dx - dx/2 (du0/dt - f0).
    /// Feeding it back as Neumann data reproduces the Dirichlet solution exactly.
    Consistent,
};

/// Pre-factored (I - dt A) for one subdomain and one boundary pattern.
///
/// A is the centred second difference scaled by 1/dx^2. Dirichlet endpoints are
/// eliminated; Neumann endpoints stay unknown and use a ghost node, which turns
/// the neighbouring off-diagonal into -2 dt/dx^2.
class TriFactor {
  public:
    TriFactor(std::size_t local_nodes, double dt_over_dx2, BcPattern pattern);

    [[nodiscard]] std::size_t local_nodes() const { return local_nodes_; }
    [[nodiscard]] std::size_t unknowns() const { return diag_.size(); }
    /// Local index of the first unknown (0 for a Neumann left end, else 1).
    [[nodiscard]] std::size_t first_unknown() const { return pattern_.left == BcKind::Neumann ? 0 : 1; }
    [[nodiscard]] BcPattern pattern() const { return pattern_; }
    [[nodiscard]] double ratio() const { return ratio_; }

    [[nodiscard]] const std::vector<double>& lower() const { return lower_; }
    [[nodiscard]] const std::vector<double>& diag() const { return diag_; }
    [[nodiscard]] const std::vector<double>& upper() const { return upper_; }

    /// Overwrites rhs with the solution.
    void solve(std::span<double> rhs) const;
    /// y = M x with the unfactored matrix.
    void apply(std::span<const double> x, std::span<double> y) const;

  private:
    std::size_t local_nodes_;
    double ratio_;
    BcPattern pattern_;
    std::vector<double> lower_;
    std::vector<double> diag_;
    std::vector<double> upper_;
    std::vector<double> inv_pivot_;
    std::vector<double> upper_scaled_;
};

TriFactor assemble_factor(const SpaceTimeGrid& grid, std::size_t local_nodes, BcPattern pattern);

/// Placement of a subdomain on the global grid.
struct SubdomainGeometry {
    SpaceTimeGrid grid;
    std::size_t first_node = 0;
    std::size_t nodes = 0;

    [[nodiscard]] double x(std::size_t local) const { return grid.x(first_node + local); }
};

SubdomainGeometry subdomain_geometry(const SpaceTimeGrid& grid, const Decomposition& d, std::size_t s);
SubdomainGeometry whole_domain(const SpaceTimeGrid& grid);

/// Values of u (or psi) on a subdomain's local grid, endpoints included.
struct SubdomainState {
    std::vector<double> u;
    std::size_t step = 0;  // global time level of u
};

/// Initial state sampled from u0 (pass an empty function for zero).
SubdomainState initial_state(const SubdomainGeometry& geom, const SpaceFunction& u0);

/// Per-step boundary data for one endpoint: Dirichlet values or Neumann fluxes
/// (d/dx in the +x direction).
struct BoundarySeries {
    BcKind kind = BcKind::Dirichlet;
    std::span<const double> values;
};

struct BcSpec {
    BoundarySeries left;
    BoundarySeries right;

    [[nodiscard]] BcPattern pattern() const { return {left.kind, right.kind}; }
};

/// Per-step endpoint values and fluxes produced while advancing.
struct BlockTraces {
    std::vector<double> left_value;
    std::vector<double> right_value;
    std::vector<double> left_flux;
    std::vector<double> right_flux;

    void reserve(std::size_t n);
};

/// One backward-Euler step. Appends the new endpoint values and fluxes to out.
void advance_step(SubdomainState& state,
                  const TriFactor& factor,
                  const SubdomainGeometry& geom,
                  BcKind left_kind,
                  double left_data,
                  BcKind right_kind,
                  double right_data,
                  const Forcing& forcing,
                  FluxStencil stencil,
                  BlockTraces& out);

/// nsteps backward-Euler steps; bitwise identical to nsteps calls of advance_step.
BlockTraces advance_block(SubdomainState& state,
                          const TriFactor& factor,
                          const SubdomainGeometry& geom,
                          const BcSpec& bc,
                          const Forcing& forcing,
                          std::size_t nsteps,
                          FluxStencil stencil = FluxStencil::Consistent);

/// Second-order one-sided d/dx at an endpoint of a nodal vector.
double extract_flux(std::span<const double> u, Side side, double dx);

}  // namespace wrpipe
