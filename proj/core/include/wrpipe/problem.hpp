#pragma once

#include <functional>
#include <string>

namespace wrpipe {

/// Scalar function of space, e.g. an initial condition.
using SpaceFunction = std::function<double(double)>;
/// Scalar function of time, e.g. Dirichlet boundary data.
using TimeFunction = std::function<double(double)>;
/// Source term f(x, t); an empty function means f = 0.
using Forcing = std::function<double(double, double)>;

/// u_t - u_xx = f on [0,L] x [0,T] with Dirichlet data at both ends.
struct HeatProblem {
    std::string name = "custom";
    double length = 1.0;
    double horizon = 0.1;
    SpaceFunction initial;
    TimeFunction left_value;
    TimeFunction right_value;
    Forcing forcing;

    /// u(x,0) = (x-0.5)^2 - 0.25 on [0,1] x [0,0.1], homogeneous Dirichlet, f = 0.
    static HeatProblem reference();
    /// Everything identically zero.
    static HeatProblem zero(double length = 1.0, double horizon = 0.1);
};

}  // namespace wrpipe
