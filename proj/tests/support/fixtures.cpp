#include "support/fixtures.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "ioc/lower_level.hpp"

namespace ioc::test {

const ProblemSpec& default_spec() {
    static const ProblemSpec spec = make_default_problem();
    return spec;
}

ProblemSpec inactive_instance() {
    UpperObjective F = default_spec().upper();
    F.c_y = 0.0;
    F.c_u = 1.0;
    return default_spec().with_upper(F);
}

ProblemSpec zero_upper(const ProblemSpec& spec) {
    UpperObjective F = spec.upper();
    F.c_y = 0.0;
    F.c_u = 0.0;
    F.gamma = 0.0;
    return spec.with_upper(F);
}

ProblemSpec small_target_problem(int N, int n, double sigma, double ua, double ub) {
    const Grid g = Grid::build(N);
    std::vector<Vec> targets;
    for (int k = 1; k <= n; ++k) {
        Vec t(N);
        for (int i = 0; i < N; ++i) t[i] = std::sin(k * std::numbers::pi * g.node(i));
        targets.push_back(t);
    }
    UpperObjective F;
    F.y_o.assign(N, 0.0);
    F.u_o.assign(N, 0.0);
    return ProblemSpec(g, sigma, LowerObjective::target_type(targets), F,
                       AdmissibleSetX::simplex(n), ControlBounds{Vec(N, ua), Vec(N, ub)});
}

Vec random_vec(std::size_t n, unsigned seed, double scale) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> d(0.0, scale);
    Vec v(n);
    for (double& e : v) e = d(rng);
    return v;
}

}  // namespace ioc::test
