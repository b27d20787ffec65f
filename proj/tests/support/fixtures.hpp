#pragma once

#include "ioc/default_instance.hpp"
#include "ioc/problem.hpp"

namespace ioc::test {

/// Shared default instance (built once).
const ProblemSpec& default_spec();

/// Default data with F = (1/2)||u - u_o||^2 only: the value constraint is
/// inactive for every eps above the gap at the starting point.
ProblemSpec inactive_instance();

/// Copy of spec with every upper-level weight set to zero.
ProblemSpec zero_upper(const ProblemSpec& spec);

/// Target-type instance on N nodes with n sine targets and constant bounds.
ProblemSpec small_target_problem(int N, int n, double sigma, double ua, double ub);

Vec random_vec(std::size_t n, unsigned seed, double scale = 1.0);

}  // namespace ioc::test
