#pragma once

// Relaxed optimal value program at a fixed eps > 0:
//
//     min F(x, S u, u)  s.t.  x in X_ad,  u in U_ad,  f(x, S u, u) - phi(x) <= eps.
//
// The scalar value constraint is handled by an augmented Lagrangian; the inner
// problems over X_ad x U_ad are solved by a nonmonotone spectral projected
// gradient method. The returned multipliers (z, alpha, p, lambda) solve the
// KKT system of the relaxed program up to the stated tolerances.

#include <optional>

#include "ioc/value_function.hpp"

namespace ioc {

struct RelaxedOptions {
    double beta0 = 1.0;
    double beta_growth = 10.0;
    double beta_max = 1e14;
    double feas_tol = 1e-8;
    double stat_tol = 1e-7;
    double comp_tol = 1e-8;
    int outer_cap = 50;
    int inner_cap = 20000;
    /// Required reduction of the constraint violation per outer step before beta grows.
    double sufficient_decrease = 0.5;
};

struct RelaxedSolution {
    double eps = 0.0;
    Vec x;
    Vec y;
    Vec u;
    double alpha = 0.0;  // value-constraint multiplier
    Vec z;               // element of N_Xad(x)
    Vec p;               // adjoint
    Vec lambda;          // control-bound multiplier
    double upper_value = 0.0;  // F(x, y, u)
    double gap = 0.0;          // f(x, y, u) - phi(x)
    double stationarity = 0.0; // final inner fixed-point residual (max norm)
    double beta = 0.0;
    int inner_iterations = 0;
    int outer_iterations = 0;
};

struct RelaxedKktResiduals {
    double r_x = 0.0;       // |F'_x + z + alpha (j(y) - phi'(x))|
    double r_z = 0.0;       // normal-cone residual of the recomputed z
    double r_y = 0.0;       // ||F'_y + alpha j'(y)^* x + A^* p||
    double r_u = 0.0;       // ||F'_u + alpha sigma u - B^* p + lambda||
    double r_comp = 0.0;    // |alpha (eps - gap)|
    double r_alpha = 0.0;   // max(0, -alpha)
    double r_lambda = 0.0;  // lambda in N_Uad(u)
    double r_feas = 0.0;    // max(0, gap - eps)
    double r_state = 0.0;   // ||A y - B u||

    double max() const;
};

/// Raised when the outer loop hits its cap; carries the last iterate.
class RelaxedConvergenceError : public ConvergenceError {
public:
    RelaxedConvergenceError(const std::string& what, RelaxedSolution best,
                            RelaxedKktResiduals residuals)
        : ConvergenceError(what, best.outer_iterations, residuals.max()),
          best_(std::move(best)),
          residuals_(residuals) {}

    const RelaxedSolution& best() const noexcept { return best_; }
    const RelaxedKktResiduals& residuals() const noexcept { return residuals_; }

private:
    RelaxedSolution best_;
    RelaxedKktResiduals residuals_;
};

class RelaxedSolver {
public:
    /// The spec must outlive the solver.
    explicit RelaxedSolver(const ProblemSpec& spec, RelaxedOptions options = {});

    const ProblemSpec& spec() const noexcept { return *spec_; }
    const RelaxedOptions& options() const noexcept { return options_; }
    const ValueFunction& value_function() const noexcept { return vf_; }

    /// Throws DomainError for eps <= 0 and RelaxedConvergenceError on outer-loop stall.
    RelaxedSolution solve(double eps, const RelaxedSolution* warm = nullptr) const;

    /// Recomputes every residual of the relaxed KKT system from scratch
    /// (fresh lower-level solve for phi and phi').
    RelaxedKktResiduals residuals(const RelaxedSolution& sol) const;

private:
    struct Point;
    struct Evaluation;

    Evaluation evaluate(const Vec& x, const Vec& u, double eps, double alpha, double beta) const;
    int inner_solve(Vec& x, Vec& u, Evaluation& e, double eps, double alpha, double beta,
                    double tol) const;
    double fixed_point_residual(const Vec& x, const Vec& u, const Evaluation& e) const;
    RelaxedSolution assemble(const Vec& x, const Vec& u, const Evaluation& e, double eps,
                             double alpha) const;

    const ProblemSpec* spec_;
    RelaxedOptions options_;
    ValueFunction vf_;
};

RelaxedSolution solve_relaxed(const ProblemSpec& spec, double eps,
                              const RelaxedSolution* warm = nullptr, RelaxedOptions options = {});
RelaxedKktResiduals relaxed_kkt_residuals(const ProblemSpec& spec, const RelaxedSolution& sol);

}  // namespace ioc
