#include "ioc/stationarity.hpp"

#include <algorithm>
#include <cmath>

namespace ioc {

namespace {

constexpr std::array<std::string_view, kConditionCount> kConditionNames = {
    "CSt_x",      "CSt_y",        "CSt_u",        "CSt_p",         "CSt_z",     "CSt_ll_y",
    "CSt_ll_u",   "CSt_ll_sign_a", "CSt_ll_sign_b", "CSt_xi",       "CSt_w",     "CSt_clarke",
    "CSt_strong_a", "CSt_strong_b", "M_diag_a",    "M_diag_b",
};

double max_over(const std::vector<int>& set, auto&& f) {
    double worst = 0.0;
    for (int i : set) worst = std::max(worst, f(i));
    return worst;
}

void check_sizes(const ProblemSpec& spec, const CandidatePoint& pt,
                 const StationarityMultipliers& m) {
    const std::size_t n = static_cast<std::size_t>(spec.n());
    const std::size_t N = static_cast<std::size_t>(spec.grid().size());
    require_same_size(pt.x.size(), n, "candidate x");
    require_same_size(m.z.size(), n, "multiplier z");
    for (const Vec* v : {&pt.y, &pt.u, &m.mu, &m.p, &m.rho, &m.lambda, &m.w, &m.xi})
        require_same_size(v->size(), N, "candidate grid function");
}

}  // namespace

std::string_view to_string(Stationarity s) noexcept {
    switch (s) {
        case Stationarity::W: return "W";
        case Stationarity::C: return "C";
        case Stationarity::S: return "S";
        default: return "none";
    }
}

std::string_view to_string(Condition c) noexcept { return kConditionNames[static_cast<int>(c)]; }

double StationarityCertificate::max_c_residual() const {
    double worst = 0.0;
    for (int i = 0; i <= static_cast<int>(Condition::CSt_clarke); ++i)
        worst = std::max(worst, residuals[i]);
    return worst;
}

ActiveSets active_sets(const ProblemSpec& spec, std::span<const double> u,
                       std::span<const double> lambda, double tol_act) {
    const ControlBounds& b = spec.bounds();
    require_same_size(u.size(), b.ua.size(), "active_sets control");
    require_same_size(lambda.size(), b.ua.size(), "active_sets multiplier");
    ActiveSets s;
    s.tol_act = tol_act;
    for (int i = 0; i < static_cast<int>(u.size()); ++i) {
        const bool above_a = u[i] > b.ua[i] + tol_act;
        const bool below_b = u[i] < b.ub[i] - tol_act;
        const bool small = std::abs(lambda[i]) <= tol_act;
        if (above_a) s.I_a_plus.push_back(i);
        if (below_b) s.I_b_minus.push_back(i);
        if (above_a && below_b) s.inactive.push_back(i);
        if (small && !above_a) s.biactive_a.push_back(i);
        if (small && !below_b) s.biactive_b.push_back(i);
    }
    return s;
}

StationarityCertificate classify(const ProblemSpec& spec, const CandidatePoint& pt,
                                 const StationarityMultipliers& m, ClassifyOptions options) {
    check_sizes(spec, pt, m);
    const Grid& g = spec.grid();
    const EllipticOperator& A = spec.op();
    const double solver_tol = spec.tolerances().solver_tol;
    const double tol_act = options.tol_act < 0.0 ? spec.tolerances().active_tol : options.tol_act;

    // Feasibility for the bilevel problem.
    std::string failed;
    if (!spec.x_ad().contains(pt.x, 1e-8)) failed += " x not in X_ad;";
    if (!spec.bounds().contains(pt.u, 1e-8)) failed += " u violates its bounds;";
    const double state = norm(g, sub(A.apply(pt.y), pt.u));
    if (!(state <= 10.0 * solver_tol * std::max(1.0, norm(g, pt.u))))
        failed += " state equation residual " + std::to_string(state) + ";";
    if (failed.empty()) {
        const double fp = LowerLevelSolver(spec).fixed_point_residual(pt.x, pt.u);
        if (!(fp <= 10.0 * solver_tol))
            failed += " (y, u) not lower-level optimal (residual " + std::to_string(fp) + ");";
    }
    if (!failed.empty()) throw InfeasibleError("candidate is infeasible:" + failed);

    StationarityCertificate c;
    c.tol = options.tol;
    c.sets = active_sets(spec, pt.u, m.lambda, tol_act);
    auto set = [&c](Condition k, double v) { c.residuals[static_cast<int>(k)] = v; };
    const UpperObjective& F = spec.upper();
    const LowerObjective& j = spec.lower();
    const double sigma = spec.sigma();

    Vec rx = add(F.grad_x(pt.x), m.z);
    axpy(1.0, j.derivative(g, pt.y, m.mu), rx);
    set(Condition::CSt_x, norm2(rx));

    Vec ry = add(F.grad_y(pt.y), A.apply_adjoint(m.rho));
    axpy(1.0, j.second_derivative_adjoint(g, pt.y, m.mu, pt.x), ry);
    set(Condition::CSt_y, norm(g, ry));

    Vec ru = F.grad_u(pt.u);
    axpy(sigma, m.w, ru);
    axpy(-1.0, m.rho, ru);
    axpy(1.0, m.xi, ru);
    set(Condition::CSt_u, norm(g, ru));

    set(Condition::CSt_p, norm(g, sub(A.apply(m.mu), m.w)));
    set(Condition::CSt_z, spec.x_ad().normal_cone_residual(pt.x, m.z, 1e-8));

    Vec lly = add(j.derivative_adjoint(g, pt.y, pt.x), A.apply_adjoint(m.p));
    set(Condition::CSt_ll_y, norm(g, lly));
    Vec llu = scaled(sigma, pt.u);
    axpy(-1.0, m.p, llu);
    axpy(1.0, m.lambda, llu);
    set(Condition::CSt_ll_u, norm(g, llu));

    const ActiveSets& s = c.sets;
    set(Condition::CSt_ll_sign_a,
        max_over(s.I_a_plus, [&](int i) { return std::max(0.0, -m.lambda[i]); }));
    set(Condition::CSt_ll_sign_b,
        max_over(s.I_b_minus, [&](int i) { return std::max(0.0, m.lambda[i]); }));
    set(Condition::CSt_xi, max_over(s.inactive, [&](int i) { return std::abs(m.xi[i]); }));

    double w_worst = 0.0, clarke = 0.0;
    for (int i = 0; i < g.size(); ++i) {
        if (std::abs(m.lambda[i]) > tol_act) w_worst = std::max(w_worst, std::abs(m.w[i]));
        clarke = std::max(clarke, -m.xi[i] * m.w[i]);
    }
    set(Condition::CSt_w, w_worst);
    set(Condition::CSt_clarke, clarke);

    set(Condition::CSt_strong_a, max_over(s.biactive_a, [&](int i) {
            return std::max({0.0, m.xi[i], m.w[i]});
        }));
    set(Condition::CSt_strong_b, max_over(s.biactive_b, [&](int i) {
            return std::max({0.0, -m.xi[i], -m.w[i]});
        }));
    // Disjunction: xi w = 0, or both carry the strong sign.
    set(Condition::M_diag_a, max_over(s.biactive_a, [&](int i) {
            return std::min(std::abs(m.xi[i] * m.w[i]), std::max({0.0, m.xi[i], m.w[i]}));
        }));
    set(Condition::M_diag_b, max_over(s.biactive_b, [&](int i) {
            return std::min(std::abs(m.xi[i] * m.w[i]), std::max({0.0, -m.xi[i], -m.w[i]}));
        }));

    const double tol = options.tol;
    bool weak = true;
    for (int i = 0; i <= static_cast<int>(Condition::CSt_w); ++i) weak = weak && c.residuals[i] <= tol;
    const bool clarke_ok = c[Condition::CSt_clarke] <= tol;
    const bool strong_ok =
        c[Condition::CSt_strong_a] <= tol && c[Condition::CSt_strong_b] <= tol;
    if (weak) c.classification = Stationarity::W;
    if (weak && clarke_ok) c.classification = Stationarity::C;
    if (weak && clarke_ok && strong_ok) c.classification = Stationarity::S;
    return c;
}

}  // namespace ioc
