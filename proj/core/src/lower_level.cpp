#include "ioc/lower_level.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace ioc {

namespace {

constexpr double kNegativeParameterTol = 1e-12;

// Largest eigenvalue of a self-adjoint positive semidefinite map (weighted inner product).
template <class Apply>
double power_iteration(const Grid& g, Apply&& apply, int max_iter) {
    Vec v(g.size());
    for (int i = 0; i < g.size(); ++i) v[i] = 1.0 + 0.1 * std::sin(3.7 * i);  // generic start
    double nv = norm(g, v);
    for (double& e : v) e /= nv;
    double estimate = 0.0;
    for (int it = 0; it < max_iter; ++it) {
        Vec w = apply(v);
        const double rayleigh = inner(g, v, w);
        const double nw = norm(g, w);
        if (nw == 0.0) return 0.0;
        for (int i = 0; i < g.size(); ++i) v[i] = w[i] / nw;
        if (it > 2 && std::abs(rayleigh - estimate) <= 1e-13 * std::abs(rayleigh)) {
            return std::max(rayleigh, nw);
        }
        estimate = rayleigh;
    }
    return estimate;
}

}  // namespace

double LowerKktResiduals::max() const {
    return std::max({state, adjoint, gradient, normal_cone, feasibility});
}

LowerLevelSolver::LowerLevelSolver(const ProblemSpec& spec) : spec_(&spec) {
    const Grid& g = spec.grid();
    const EllipticOperator& A = spec.op();
    const int n = spec.n();
    const Vec zero(g.size(), 0.0);
    component_curvature_.resize(n);
    for (int i = 0; i < n; ++i) {
        Vec ei(n, 0.0);
        ei[i] = 1.0;
        auto hess = [&](const Vec& v) {
            const Vec sv = A.solve(v);
            return A.solve_adjoint(spec.lower().second_derivative_adjoint(g, zero, sv, ei));
        };
        component_curvature_[i] = power_iteration(g, hess, 1000) * (1.0 + 1e-9);
    }
}

double LowerLevelSolver::curvature(std::span<const double> x) const {
    double L = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) L += std::max(x[i], 0.0) * component_curvature_[i];
    return L;
}

Vec LowerLevelSolver::clip_parameter(std::span<const double> x) const {
    require_same_size(x.size(), static_cast<std::size_t>(spec_->n()), "lower-level parameter");
    Vec xc(x.begin(), x.end());
    for (std::size_t i = 0; i < xc.size(); ++i) {
        if (!std::isfinite(xc[i]) || xc[i] < -kNegativeParameterTol) {
            throw DomainError("lower-level parameter must lie in the nonnegative orthant (component " +
                              std::to_string(i + 1) + " = " + std::to_string(xc[i]) + ")");
        }
        xc[i] = std::max(xc[i], 0.0);
    }
    return xc;
}

Vec LowerLevelSolver::reduced_gradient(std::span<const double> x, std::span<const double> u) const {
    const Grid& g = spec_->grid();
    const EllipticOperator& A = spec_->op();
    const Vec y = A.solve(u);
    Vec grad = A.solve_adjoint(spec_->lower().derivative_adjoint(g, y, x));
    axpy(spec_->sigma(), u, grad);
    return grad;
}

double LowerLevelSolver::fixed_point_residual(std::span<const double> x,
                                              std::span<const double> u) const {
    const Vec xc = clip_parameter(x);
    const double tau = 1.0 / (spec_->sigma() + curvature(xc));
    const Vec grad = reduced_gradient(xc, u);
    Vec trial(u.begin(), u.end());
    axpy(-tau, grad, trial);
    return norm(spec_->grid(), sub(spec_->bounds().project(trial), u));
}

LowerSolution LowerLevelSolver::solve(std::span<const double> x, double tol,
                                      std::optional<std::span<const double>> warm_start) const {
    if (!(tol > 0.0)) throw DomainError("lower-level tolerance must be positive");
    const ProblemSpec& spec = *spec_;
    const Grid& g = spec.grid();
    const EllipticOperator& A = spec.op();
    const Vec xc = clip_parameter(x);
    const double tau = 1.0 / (spec.sigma() + curvature(xc));

    Vec u = warm_start ? spec.bounds().project(*warm_start) : spec.bounds().project(Vec(g.size(), 0.0));
    require_same_size(u.size(), static_cast<std::size_t>(g.size()), "lower-level warm start");

    LowerSolution sol;
    sol.x = xc;
    Vec y, grad, trial;
    double residual = 0.0;
    int it = 0;
    for (;; ++it) {
        y = A.solve(u);
        grad = A.solve_adjoint(spec.lower().derivative_adjoint(g, y, xc));
        axpy(spec.sigma(), u, grad);
        trial = u;
        axpy(-tau, grad, trial);
        trial = spec.bounds().project(trial);
        residual = norm(g, sub(trial, u));
        if (residual <= tol) break;
        if (it >= max_iterations) {
            throw ConvergenceError("lower-level projected gradient did not converge within " +
                                       std::to_string(max_iterations) + " iterations",
                                   it, residual);
        }
        u.swap(trial);
    }

    sol.y = std::move(y);
    sol.p = scaled(-1.0, A.solve_adjoint(spec.lower().derivative_adjoint(g, sol.y, xc)));
    sol.lambda = sub(sol.p, scaled(spec.sigma(), u));
    sol.u = std::move(u);
    sol.objective = spec.lower_objective(xc, sol.y, sol.u);
    sol.fixed_point_residual = residual;
    sol.iterations = it;
    sol.kkt_residual = kkt_residuals(xc, sol.y, sol.u, sol.p, sol.lambda).max();
    return sol;
}

LowerKktResiduals LowerLevelSolver::kkt_residuals(std::span<const double> x,
                                                  std::span<const double> y,
                                                  std::span<const double> u,
                                                  std::span<const double> p,
                                                  std::span<const double> lambda) const {
    const ProblemSpec& spec = *spec_;
    const Grid& g = spec.grid();
    const EllipticOperator& A = spec.op();
    LowerKktResiduals r;
    r.state = norm(g, sub(A.apply(y), u));
    r.adjoint = norm(g, add(spec.lower().derivative_adjoint(g, y, x), A.apply_adjoint(p)));
    Vec grad_eq = scaled(spec.sigma(), u);
    axpy(-1.0, p, grad_eq);
    axpy(1.0, lambda, grad_eq);
    r.gradient = norm(g, grad_eq);
    const ControlBounds& b = spec.bounds();
    for (std::size_t i = 0; i < u.size(); ++i) {
        r.feasibility = std::max({r.feasibility, b.ua[i] - u[i], u[i] - b.ub[i]});
    }
    const double tol_act = spec.tolerances().active_tol;
    r.normal_cone = b.contains(u, tol_act) ? b.normal_cone_residual(u, lambda, tol_act)
                                           : std::numeric_limits<double>::infinity();
    return r;
}

LowerSolution solve_lower(const ProblemSpec& spec, std::span<const double> x, double tol,
                          std::optional<std::span<const double>> warm_start) {
    return LowerLevelSolver(spec).solve(x, tol, warm_start);
}

LipschitzSample lipschitz_probe(const ProblemSpec& spec, std::span<const double> x1,
                                std::span<const double> x2) {
    const LowerLevelSolver solver(spec);
    const LowerSolution a = solver.solve(x1);
    const LowerSolution b = solver.solve(x2, spec.tolerances().solver_tol, a.u);
    const Grid& g = spec.grid();
    LipschitzSample s;
    s.du = norm(g, sub(a.u, b.u));
    s.dy = norm(g, sub(a.y, b.y));
    s.dp = norm(g, sub(a.p, b.p));
    s.dlambda = norm(g, sub(a.lambda, b.lambda));
    s.dx = norm2(sub(x1, x2));
    return s;
}

double solution_operator_norm(const EllipticOperator& op, int max_iter) {
    const Grid& g = op.grid();
    auto sts = [&](const Vec& v) { return op.solve_adjoint(op.solve(v)); };
    return std::sqrt(power_iteration(g, sts, max_iter));
}

}  // namespace ioc
