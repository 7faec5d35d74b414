#include "wrpipe/problem.hpp"

namespace wrpipe {

HeatProblem HeatProblem::reference() {
    HeatProblem p;
    p.name = "reference";
    p.length = 1.0;
    p.horizon = 0.1;
    p.initial = [](double x) { return (x - 0.5) * (x - 0.5) - 0.25; };
    p.left_value = [](double) { return 0.0; };
    p.right_value = [](double) { return 0.0; };
    return p;
}

HeatProblem HeatProblem::zero(double length, double horizon) {
    HeatProblem p;
    p.name = "zero";
    p.length = length;
    p.horizon = horizon;
    p.initial = [](double) { return 0.0; };
    p.left_value = [](double) { return 0.0; };
    p.right_value = [](double) { return 0.0; };
    return p;
}

}  // namespace wrpipe
