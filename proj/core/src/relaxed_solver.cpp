#include "ioc/relaxed_solver.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

namespace ioc {

double RelaxedKktResiduals::max() const {
    return std::max({r_x, r_z, r_y, r_u, r_comp, r_alpha, r_lambda, r_feas, r_state});
}

struct RelaxedSolver::Evaluation {
    Vec y;
    ValueSample value;
    double upper = 0.0;
    double gap = 0.0;
    double merit = 0.0;
    double shifted = 0.0;  // max(0, alpha + beta (gap - eps))
    Vec gx;                // d merit / dx
    Vec gu;                // Riesz representative of d merit / du
};

namespace {

constexpr double kMinStep = 1e-12;
constexpr double kMaxStep = 1e12;
constexpr int kMemory = 10;
constexpr double kArmijo = 1e-4;

}  // namespace

RelaxedSolver::RelaxedSolver(const ProblemSpec& spec, RelaxedOptions options)
    : spec_(&spec), options_(options), vf_(spec) {
    if (!(options_.beta0 > 0.0) || !(options_.beta_growth > 1.0))
        throw ValidationError("relaxed solver: beta0 must be positive and beta_growth > 1");
    if (!(options_.feas_tol > 0.0) || !(options_.stat_tol > 0.0) || !(options_.comp_tol > 0.0))
        throw ValidationError("relaxed solver: tolerances must be positive");
    if (options_.outer_cap < 1 || options_.inner_cap < 1)
        throw ValidationError("relaxed solver: iteration caps must be positive");
}

RelaxedSolver::Evaluation RelaxedSolver::evaluate(const Vec& x, const Vec& u, double eps,
                                                  double alpha, double beta) const {
    const ProblemSpec& s = *spec_;
    const Grid& g = s.grid();
    Evaluation e;
    e.y = s.op().solve(u);
    e.value = vf_.sample(x);
    e.upper = s.upper_objective(x, e.y, u);
    e.gap = s.lower_objective(x, e.y, u) - e.value.phi;
    e.shifted = std::max(0.0, alpha + beta * (e.gap - eps));
    e.merit = e.upper + (e.shifted * e.shifted - alpha * alpha) / (2.0 * beta);

    // gap gradients
    Vec jy = s.lower().value(g, e.y);
    Vec gap_x = sub(jy, e.value.grad_phi);
    Vec gap_u = s.op().solve_adjoint(s.lower().derivative_adjoint(g, e.y, x));
    axpy(s.sigma(), u, gap_u);

    e.gx = s.upper().grad_x(x);
    axpy(e.shifted, gap_x, e.gx);
    e.gu = s.op().solve_adjoint(s.upper().grad_y(e.y));
    Vec fu = s.upper().grad_u(u);
    axpy(1.0, fu, e.gu);
    axpy(e.shifted, gap_u, e.gu);
    return e;
}

double RelaxedSolver::fixed_point_residual(const Vec& x, const Vec& u,
                                           const Evaluation& e) const {
    Vec tx = sub(x, e.gx);
    Vec tu = sub(u, e.gu);
    Vec px = spec_->x_ad().project(tx);
    Vec pu = spec_->bounds().project(tu);
    return std::max(norm_inf(sub(px, x)), norm_inf(sub(pu, u)));
}

int RelaxedSolver::inner_solve(Vec& x, Vec& u, Evaluation& e, double eps, double alpha,
                               double beta, double tol) const {
    const ProblemSpec& s = *spec_;
    const Grid& g = s.grid();
    auto prod = [&](const Vec& ax, const Vec& au, const Vec& bx, const Vec& bu) {
        return dot(ax, bx) + inner(g, au, bu);
    };

    std::deque<double> history{e.merit};
    double res = fixed_point_residual(x, u, e);
    double step = 1.0 / std::max(1.0, res);
    int it = 0;
    for (; it < options_.inner_cap; ++it) {
        if (res <= tol) break;

        Vec dx = sub(s.x_ad().project(sub(x, scaled(step, e.gx))), x);
        Vec du = sub(s.bounds().project(sub(u, scaled(step, e.gu))), u);
        const double slope = prod(e.gx, e.gu, dx, du);
        if (!(slope < 0.0)) {
            // Spectral step too large for the rounding level; fall back to a unit step.
            step = 1.0;
            dx = sub(s.x_ad().project(sub(x, e.gx)), x);
            du = sub(s.bounds().project(sub(u, e.gu)), u);
            if (!(prod(e.gx, e.gu, dx, du) < 0.0)) break;
            continue;
        }
        const double ref = *std::max_element(history.begin(), history.end());

        double t = 1.0;
        Vec xn, un;
        Evaluation en;
        bool accepted = false;
        for (int ls = 0; ls < 60; ++ls) {
            xn = x;
            un = u;
            axpy(t, dx, xn);
            axpy(t, du, un);
            // Re-project to remove drift from the convex combination.
            xn = s.x_ad().project(xn);
            un = s.bounds().project(un);
            en = evaluate(xn, un, eps, alpha, beta);
            if (en.merit <= ref + kArmijo * t * slope) {
                accepted = true;
                break;
            }
            const double denom = en.merit - e.merit - t * slope;
            double trial = denom > 0.0 ? -0.5 * t * t * slope / denom : 0.5 * t;
            if (!(trial >= 0.1 * t && trial <= 0.5 * t)) trial = 0.5 * t;
            t = trial;
        }
        if (!accepted) break;

        Vec sx = sub(xn, x), su = sub(un, u);
        Vec yx = sub(en.gx, e.gx), yu = sub(en.gu, e.gu);
        const double sy = prod(sx, su, yx, yu);
        const double ss = prod(sx, su, sx, su);
        step = sy > 0.0 ? std::clamp(ss / sy, kMinStep, kMaxStep) : kMaxStep;

        x = std::move(xn);
        u = std::move(un);
        e = std::move(en);
        history.push_back(e.merit);
        if (static_cast<int>(history.size()) > kMemory) history.pop_front();
        res = fixed_point_residual(x, u, e);
    }
    return it;
}

RelaxedSolution RelaxedSolver::assemble(const Vec& x, const Vec& u, const Evaluation& e,
                                        double eps, double alpha) const {
    const ProblemSpec& s = *spec_;
    const Grid& g = s.grid();
    RelaxedSolution r;
    r.eps = eps;
    r.x = x;
    r.y = e.y;
    r.u = u;
    r.alpha = alpha;
    r.upper_value = e.upper;
    r.gap = e.gap;

    Vec rhs = s.upper().grad_y(e.y);
    axpy(alpha, s.lower().derivative_adjoint(g, e.y, x), rhs);
    r.p = scaled(-1.0, s.op().solve_adjoint(rhs));

    r.lambda = sub(r.p, s.upper().grad_u(u));
    axpy(-alpha * s.sigma(), u, r.lambda);

    r.z = scaled(-1.0, s.upper().grad_x(x));
    Vec gap_x = sub(s.lower().value(g, e.y), e.value.grad_phi);
    axpy(-alpha, gap_x, r.z);
    return r;
}

RelaxedSolution RelaxedSolver::solve(double eps, const RelaxedSolution* warm) const {
    if (!(eps > 0.0) || !std::isfinite(eps))
        throw DomainError("relaxed solver: eps must be positive and finite");
    const ProblemSpec& s = *spec_;

    Vec x, u;
    double alpha = 0.0;
    if (warm != nullptr) {
        if (static_cast<int>(warm->x.size()) != s.n() ||
            static_cast<int>(warm->u.size()) != s.grid().size())
            throw DimensionError("relaxed solver: warm start has wrong dimensions");
        x = s.x_ad().project(warm->x);
        u = s.bounds().project(warm->u);
        alpha = std::max(0.0, warm->alpha);
    } else {
        x = s.x_ad().center();
        u = vf_.sample(x).lower->u;
    }

    double beta = options_.beta0;
    const double inner_tol = 0.1 * options_.stat_tol;
    double previous_violation = std::numeric_limits<double>::infinity();
    int inner_total = 0;

    Evaluation e = evaluate(x, u, eps, alpha, beta);
    RelaxedSolution last;
    for (int outer = 1; outer <= options_.outer_cap; ++outer) {
        inner_total += inner_solve(x, u, e, eps, alpha, beta, inner_tol);

        const double next_alpha = e.shifted;
        const double violation = std::abs(std::max(e.gap - eps, -alpha / beta));
        const double stationarity = fixed_point_residual(x, u, e);

        last = assemble(x, u, e, eps, next_alpha);
        last.stationarity = stationarity;
        last.beta = beta;
        last.inner_iterations = inner_total;
        last.outer_iterations = outer;

        const double feas = std::max(0.0, e.gap - eps);
        const double comp = next_alpha * std::abs(eps - e.gap);
        if (stationarity <= options_.stat_tol && feas <= options_.feas_tol &&
            comp <= options_.comp_tol)
            return last;

        if (violation > options_.sufficient_decrease * previous_violation)
            beta = std::min(beta * options_.beta_growth, options_.beta_max);
        previous_violation = violation;
        alpha = next_alpha;
        e = evaluate(x, u, eps, alpha, beta);
    }
    throw RelaxedConvergenceError("relaxed solver: outer iteration cap reached", last,
                                  residuals(last));
}

RelaxedKktResiduals RelaxedSolver::residuals(const RelaxedSolution& sol) const {
    const ProblemSpec& s = *spec_;
    const Grid& g = s.grid();
    const int n = s.n();
    const int N = g.size();
    if (static_cast<int>(sol.x.size()) != n || static_cast<int>(sol.z.size()) != n ||
        static_cast<int>(sol.y.size()) != N || static_cast<int>(sol.u.size()) != N ||
        static_cast<int>(sol.p.size()) != N || static_cast<int>(sol.lambda.size()) != N)
        throw DimensionError("relaxed residuals: solution has wrong dimensions");

    RelaxedKktResiduals r;
    const ValueSample fresh = vf_.sample_uncached(sol.x);
    const double gap = s.lower_objective(sol.x, sol.y, sol.u) - fresh.phi;

    Vec gap_x = sub(s.lower().value(g, sol.y), fresh.grad_phi);
    Vec rx = add(s.upper().grad_x(sol.x), sol.z);
    axpy(sol.alpha, gap_x, rx);
    r.r_x = norm2(rx);

    Vec z_re = scaled(-1.0, s.upper().grad_x(sol.x));
    axpy(-sol.alpha, gap_x, z_re);
    r.r_z = s.x_ad().normal_cone_residual(sol.x, z_re, 1e-8);

    Vec ry = s.upper().grad_y(sol.y);
    axpy(sol.alpha, s.lower().derivative_adjoint(g, sol.y, sol.x), ry);
    axpy(1.0, s.op().apply_adjoint(sol.p), ry);
    r.r_y = norm(g, ry);

    Vec ru = s.upper().grad_u(sol.u);
    axpy(sol.alpha * s.sigma(), sol.u, ru);
    axpy(-1.0, sol.p, ru);
    axpy(1.0, sol.lambda, ru);
    r.r_u = norm(g, ru);

    r.r_comp = std::abs(sol.alpha * (sol.eps - gap));
    r.r_alpha = std::max(0.0, -sol.alpha);
    r.r_lambda = s.bounds().normal_cone_residual(sol.u, sol.lambda, s.tolerances().active_tol);
    r.r_feas = std::max(0.0, gap - sol.eps);
    r.r_state = norm(g, sub(s.op().apply(sol.y), sol.u));
    return r;
}

RelaxedSolution solve_relaxed(const ProblemSpec& spec, double eps, const RelaxedSolution* warm,
                              RelaxedOptions options) {
    return RelaxedSolver(spec, options).solve(eps, warm);
}

RelaxedKktResiduals relaxed_kkt_residuals(const ProblemSpec& spec, const RelaxedSolution& sol) {
    return RelaxedSolver(spec).residuals(sol);
}

}  // namespace ioc
