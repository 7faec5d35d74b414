#pragma once

#include <cstddef>
#include <vector>

#include "wrpipe/grid.hpp"
#include "wrpipe/heat.hpp"
#include "wrpipe/problem.hpp"

namespace wrpipe::oracle {

/// Backward-Euler solution on the undecomposed grid, all time levels stored.
struct MonolithicSolution {
    SpaceTimeGrid grid;
    std::vector<std::vector<double>> levels;  // levels[l][n], l = 0..Nt, n = 0..Nx+1

    [[nodiscard]] const std::vector<double>& at_level(std::size_t l) const { return levels.at(l); }
    [[nodiscard]] const std::vector<double>& final_state() const { return levels.back(); }
    /// u(x_node, t_l) for l = 1..Nt.
    [[nodiscard]] std::vector<double> node_series(std::size_t node) const;
};

MonolithicSolution solve_monolithic(const HeatProblem& problem, const SpaceTimeGrid& grid);

/// Series solution of u_t = u_xx on [0,1], zero boundary data,
/// u(x,0) = (x-0.5)^2 - 0.25.
class FourierSolution {
  public:
    explicit FourierSolution(int modes);

    [[nodiscard]] int modes() const { return modes_; }
    [[nodiscard]] double operator()(double x, double t) const;
    /// Bound on the dropped modes at t = 0: 4 / (pi^3 M^2).
    [[nodiscard]] double tail_bound() const;

  private:
    int modes_;
    std::vector<double> coeff_;  // coeff_[n-1] = b_n
};

/// b_n = -8 / (n pi)^3 for odd n, 0 for even n.
double fourier_coefficient(int n);

/// Convenience wrapper around FourierSolution; throws for modes < 1.
double fourier_exact(double x, double t, int modes);

/// NNWR estimate (sqrt 6 / (1 - exp(-(2k+1) h^2 / T)))^(2k) exp(-k^2 h^2 / T) err0,
/// evaluated in log space.
double nnwr_bound(int k, double h_tilde, double horizon, double err0);
/// Same formula without the log-space path; overflows for large k.
double nnwr_bound_direct(int k, double h_tilde, double horizon, double err0);

/// DNWR estimate (N - 4 + 2 h_max / h_m)^k erfc(k h_min / (2 sqrt T)) err0, N > 2.
double dnwr_bound(int k, int subdomains, double h_min, double h_max, double h_pivot, double horizon, double err0);

}  // namespace wrpipe::oracle
