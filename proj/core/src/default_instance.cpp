#include "ioc/default_instance.hpp"

#include <cmath>
#include <numbers>

#include "ioc/lower_level.hpp"

namespace ioc {

namespace {

Vec sine(const Grid& g, double freq) {
    Vec v(g.size());
    for (int i = 0; i < g.size(); ++i) v[i] = std::sin(freq * std::numbers::pi * g.node(i));
    return v;
}

ProblemSpec build(const DefaultInstanceOptions& o, AdmissibleSetX x_ad) {
    const Grid g = Grid::build(o.nodes);
    LowerObjective lower = LowerObjective::target_type({sine(g, 1.0), sine(g, 2.0)});
    ControlBounds bounds{Vec(g.size(), o.ua), Vec(g.size(), o.ub)};

    UpperObjective placeholder;
    placeholder.c_y = o.c_y;
    placeholder.c_u = o.c_u;
    placeholder.y_o.assign(g.size(), 0.0);
    placeholder.u_o.assign(g.size(), 0.0);

    Tolerances tol;
    ProblemSpec draft(g, o.sigma, lower, placeholder, x_ad, bounds, tol, o.x_star);
    const LowerSolution s = solve_lower(draft, o.x_star, 1e-13);

    UpperObjective upper = placeholder;
    upper.y_o = s.y;
    upper.u_o = s.u;
    return draft.with_upper(std::move(upper));
}

}  // namespace

ProblemSpec make_default_problem(const DefaultInstanceOptions& options) {
    return build(options, AdmissibleSetX::simplex(static_cast<int>(options.x_star.size())));
}

ProblemSpec make_box_variant(const DefaultInstanceOptions& options) {
    const std::size_t n = options.x_star.size();
    return build(options, AdmissibleSetX::box(Vec(n, 0.0), Vec(n, 1.0)));
}

}  // namespace ioc
