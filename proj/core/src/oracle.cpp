#include "wrpipe/oracle.hpp"

#include <cmath>
#include <numbers>

#include "wrpipe/errors.hpp"

namespace wrpipe::oracle {

std::vector<double> MonolithicSolution::node_series(std::size_t node) const {
    std::vector<double> out;
    out.reserve(levels.size() - 1);
    for (std::size_t l = 1; l < levels.size(); ++l) {
        out.push_back(levels[l].at(node));
    }
    return out;
}

MonolithicSolution solve_monolithic(const HeatProblem& problem, const SpaceTimeGrid& grid) {
    const SubdomainGeometry geom = whole_domain(grid);
    const TriFactor factor = assemble_factor(grid, geom.nodes, kDD);
    SubdomainState state = initial_state(geom, problem.initial);
    MonolithicSolution sol;
    sol.grid = grid;
    sol.levels.reserve(grid.nt + 1);
    sol.levels.push_back(state.u);
    BlockTraces scratch;
    for (std::size_t l = 0; l < grid.nt; ++l) {
        const double t = grid.t(l + 1);
        const double gl = problem.left_value ? problem.left_value(t) : 0.0;
        const double gr = problem.right_value ? problem.right_value(t) : 0.0;
        advance_step(state, factor, geom, BcKind::Dirichlet, gl, BcKind::Dirichlet, gr, problem.forcing,
                     FluxStencil::Consistent, scratch);
        sol.levels.push_back(state.u);
    }
    return sol;
}

double fourier_coefficient(int n) {
    if (n < 1) {
        throw ConfigError("Fourier mode index must be at least 1");
    }
    if (n % 2 == 0) {
        return 0.0;
    }
    const double a = n * std::numbers::pi;
    return -8.0 / (a * a * a);
}

FourierSolution::FourierSolution(int modes) : modes_(modes) {
    if (modes < 1) {
        throw ConfigError("Fourier series needs at least one mode");
    }
    coeff_.reserve(static_cast<std::size_t>(modes));
    for (int n = 1; n <= modes; ++n) {
        coeff_.push_back(fourier_coefficient(n));
    }
}

double FourierSolution::operator()(double x, double t) const {
    double sum = 0.0;
    // Smallest terms first.
    for (int n = modes_; n >= 1; --n) {
        const double b = coeff_[static_cast<std::size_t>(n - 1)];
        if (b == 0.0) {
            continue;
        }
        const double w = n * std::numbers::pi;
        sum += b * std::exp(-w * w * t) * std::sin(w * x);
    }
    return sum;
}

double FourierSolution::tail_bound() const {
    const double pi3 = std::numbers::pi * std::numbers::pi * std::numbers::pi;
    return 4.0 / (pi3 * static_cast<double>(modes_) * static_cast<double>(modes_));
}

double fourier_exact(double x, double t, int modes) {
    return FourierSolution(modes)(x, t);
}

namespace {

void check_nnwr_args(int k, double h_tilde, double horizon, double err0) {
    if (k < 1 || !(h_tilde > 0.0) || !(horizon > 0.0) || err0 < 0.0) {
        throw ConfigError("NNWR bound needs k >= 1, h > 0, T > 0, err0 >= 0");
    }
}

}  // namespace

double nnwr_bound(int k, double h_tilde, double horizon, double err0) {
    check_nnwr_args(k, h_tilde, horizon, err0);
    if (err0 == 0.0) {
        return 0.0;
    }
    const double r = h_tilde * h_tilde / horizon;
    const double kk = static_cast<double>(k);
    // -expm1(-x) = 1 - exp(-x) without cancellation for small x.
    const double denom = -std::expm1(-(2.0 * kk + 1.0) * r);
    const double log_value = 2.0 * kk * (0.5 * std::log(6.0) - std::log(denom)) - kk * kk * r + std::log(err0);
    return std::exp(log_value);
}

double nnwr_bound_direct(int k, double h_tilde, double horizon, double err0) {
    check_nnwr_args(k, h_tilde, horizon, err0);
    const double r = h_tilde * h_tilde / horizon;
    const double base = std::sqrt(6.0) / (1.0 - std::exp(-(2.0 * k + 1.0) * r));
    return std::pow(base, 2.0 * k) * std::exp(-static_cast<double>(k) * k * r) * err0;
}

double dnwr_bound(int k, int subdomains, double h_min, double h_max, double h_pivot, double horizon, double err0) {
    if (subdomains <= 2) {
        throw ConfigError("DNWR bound holds for N > 2 only");
    }
    if (k < 0 || !(h_min > 0.0) || !(h_max > 0.0) || !(h_pivot > 0.0) || !(horizon > 0.0) || err0 < 0.0) {
        throw ConfigError("DNWR bound needs k >= 0, positive widths, T > 0, err0 >= 0");
    }
    const double base = subdomains - 4.0 + 2.0 * h_max / h_pivot;
    return std::pow(base, k) * std::erfc(k * h_min / (2.0 * std::sqrt(horizon))) * err0;
}

}  // namespace wrpipe::oracle
