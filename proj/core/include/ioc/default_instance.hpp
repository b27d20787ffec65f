#pragma once

// The shipped test instance: lower level of target type with two sine
// targets, upper-level observations generated from the lower-level solution
// at a known parameter x_star, so the bilevel optimum is 0 at x_star.

#include "ioc/problem.hpp"

namespace ioc {

struct DefaultInstanceOptions {
    int nodes = 64;
    double sigma = 1e-2;
    Vec x_star{0.3, 0.7};
    double c_y = 1.0;
    double c_u = 0.0;  // state observation only; u_o is still recorded
    double ua = -1.5;
    double ub = 3.5;
};

ProblemSpec make_default_problem(const DefaultInstanceOptions& options = {});

/// Same data with X_ad = [0, 1]^2 instead of the simplex.
ProblemSpec make_box_variant(const DefaultInstanceOptions& options = {});

}  // namespace ioc
