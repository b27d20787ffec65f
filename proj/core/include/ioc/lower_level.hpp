#pragma once

// Parametric lower-level control problem
//
//     min  x . j(y) + sigma/2 ||u||^2   s.t.  A y = u,  ua <= u <= ub,
//
// solved in reduced form g(u) = x . j(S u) + sigma/2 ||u||^2 with S = A^{-1}
// by projected gradient. For x >= 0 the reduced objective is sigma-strongly
// convex, so the minimizer and its multipliers are unique.

#include <optional>
#include <span>

#include "ioc/problem.hpp"

namespace ioc {

struct LowerSolution {
    Vec x;
    Vec y;       // state S u
    Vec u;       // control
    Vec p;       // adjoint, A p = -j'(y)^* x
    Vec lambda;  // bound multiplier, lambda = p - sigma u
    double objective = 0.0;              // f(x, y, u)
    double fixed_point_residual = 0.0;   // ||u - P(u - tau grad g(u))||
    double kkt_residual = 0.0;           // max of LowerKktResiduals
    int iterations = 0;
};

struct LowerKktResiduals {
    double state = 0.0;        // ||A y - u||
    double adjoint = 0.0;      // ||j'(y)^* x + A p||
    double gradient = 0.0;     // ||sigma u - p + lambda||
    double normal_cone = 0.0;  // lambda in N_Uad(u), nodal max violation
    double feasibility = 0.0;  // nodal max bound violation

    double max() const;
};

class LowerLevelSolver {
public:
    /// The spec must outlive the solver.
    explicit LowerLevelSolver(const ProblemSpec& spec);

    const ProblemSpec& spec() const noexcept { return *spec_; }

    /// Throws DomainError if x has a component below -1e-12 (such components are
    /// clipped to 0 otherwise), ConvergenceError when the iteration cap is hit.
    LowerSolution solve(std::span<const double> x, double tol,
                        std::optional<std::span<const double>> warm_start = std::nullopt) const;
    LowerSolution solve(std::span<const double> x) const {
        return solve(x, spec_->tolerances().solver_tol);
    }

    /// Upper bound for the curvature of u -> x . j(S u), sum_i x_i L_i.
    double curvature(std::span<const double> x) const;
    /// Per-component curvature L_i (power iteration on the reduced Hessian of j_i o S).
    const Vec& component_curvatures() const noexcept { return component_curvature_; }

    /// Riesz vector of the reduced gradient S^*(j'(S u)^* x) + sigma u.
    Vec reduced_gradient(std::span<const double> x, std::span<const double> u) const;
    /// Fixed-point residual at step 1 / (sigma + L_x).
    double fixed_point_residual(std::span<const double> x, std::span<const double> u) const;

    /// Residuals of the lower-level KKT system at an arbitrary tuple.
    LowerKktResiduals kkt_residuals(std::span<const double> x, std::span<const double> y,
                                    std::span<const double> u, std::span<const double> p,
                                    std::span<const double> lambda) const;

    int max_iterations = 200000;

private:
    Vec clip_parameter(std::span<const double> x) const;

    const ProblemSpec* spec_;
    Vec component_curvature_;
};

/// Convenience wrapper constructing a solver on the fly.
LowerSolution solve_lower(const ProblemSpec& spec, std::span<const double> x, double tol,
                          std::optional<std::span<const double>> warm_start = std::nullopt);

struct LipschitzSample {
    double du = 0.0;
    double dy = 0.0;
    double dp = 0.0;
    double dlambda = 0.0;
    double dx = 0.0;
};

LipschitzSample lipschitz_probe(const ProblemSpec& spec, std::span<const double> x1,
                                std::span<const double> x2);

/// Largest singular value of S = A^{-1} by power iteration on S^* S.
double solution_operator_norm(const EllipticOperator& op, int max_iter = 500);

}  // namespace ioc
