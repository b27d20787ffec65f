#pragma once

// Data of one inverse optimal control instance: the lower objective j, the
// upper objective F, the parameter set X_ad and the control bounds.

#include <optional>
#include <random>
#include <span>
#include <vector>

#include "ioc/discretization.hpp"

namespace ioc {

enum class LowerKind { target_type, pointwise };

/// Vector-valued lower objective j: Y -> R^n_+.
///
/// target_type: j_i(y) = ||y - yd_i||^2.
/// pointwise:   j_i(y) = (y(w_i) - yd(w_i))^2 with w_i snapped to grid nodes.
///
/// Neither kind carries a factor 1/2, so the gradient of the optimal value
/// function is exactly j evaluated at the optimal state.
class LowerObjective {
public:
    static LowerObjective target_type(std::vector<Vec> targets);
    static LowerObjective pointwise(std::vector<int> nodes, Vec desired);

    LowerKind kind() const noexcept { return kind_; }
    int count() const noexcept;
    const std::vector<Vec>& targets() const noexcept { return targets_; }
    const std::vector<int>& nodes() const noexcept { return nodes_; }
    const Vec& desired() const noexcept { return desired_; }

    /// Throws ValidationError if the data does not fit the grid.
    void validate(const Grid& g) const;

    Vec value(const Grid& g, std::span<const double> y) const;
    /// j'(y) dir, a vector in R^n.
    Vec derivative(const Grid& g, std::span<const double> y, std::span<const double> dir) const;
    /// Riesz vector of j'(y)^* x.
    Vec derivative_adjoint(const Grid& g, std::span<const double> y, std::span<const double> x) const;
    /// Riesz vector of j''(y)(mu)^* x. Both kinds are quadratic, so this does not depend on y.
    Vec second_derivative_adjoint(const Grid& g, std::span<const double> y,
                                  std::span<const double> mu, std::span<const double> x) const;

    bool operator==(const LowerObjective&) const = default;

private:
    LowerKind kind_ = LowerKind::target_type;
    std::vector<Vec> targets_;
    std::vector<int> nodes_;
    Vec desired_;
};

/// F(x, y, u) = c_y/2 ||y - y_o||^2 + c_u/2 ||u - u_o||^2 + gamma/2 |x|^2
struct UpperObjective {
    double c_y = 1.0;
    Vec y_o;
    double c_u = 1.0;
    Vec u_o;
    double gamma = 0.0;

    void validate(const Grid& g) const;

    double value(const Grid& g, std::span<const double> x, std::span<const double> y,
                 std::span<const double> u) const;
    Vec grad_x(std::span<const double> x) const;
    Vec grad_y(std::span<const double> y) const;
    Vec grad_u(std::span<const double> u) const;

    bool operator==(const UpperObjective&) const = default;
};

enum class XSetKind { simplex, box };

/// Polyhedral parameter set X_ad in R^n_+: the standard simplex or a box.
class AdmissibleSetX {
public:
    static AdmissibleSetX simplex(int n);
    static AdmissibleSetX box(Vec lower, Vec upper);

    XSetKind kind() const noexcept { return kind_; }
    int dim() const noexcept { return n_; }
    const Vec& lower() const noexcept { return lower_; }
    const Vec& upper() const noexcept { return upper_; }

    void validate() const;

    /// Euclidean projection. Simplex: sort-based algorithm; box: clamp.
    Vec project(std::span<const double> x) const;
    bool contains(std::span<const double> x, double tol = 1e-10) const;
    const std::vector<Vec>& vertices() const noexcept { return vertices_; }
    /// Barycenter of the vertices.
    Vec center() const;

    /// max_v z . (v - x) over vertices, clipped at 0. Zero iff z in N(x).
    /// Throws InfeasibleError when x is not in the set (to tol).
    double normal_cone_residual(std::span<const double> x, std::span<const double> z,
                                double tol = 1e-8) const;

    /// Uniform sample (Dirichlet(1) on the simplex).
    Vec sample(std::mt19937_64& rng) const;

    bool operator==(const AdmissibleSetX& o) const {
        return kind_ == o.kind_ && n_ == o.n_ && lower_ == o.lower_ && upper_ == o.upper_;
    }

private:
    void build_vertices();

    XSetKind kind_ = XSetKind::simplex;
    int n_ = 0;
    Vec lower_;
    Vec upper_;
    std::vector<Vec> vertices_;
};

/// Pointwise control bounds u_a < u_b; entries may be +-infinity.
struct ControlBounds {
    Vec ua;
    Vec ub;

    void validate(const Grid& g) const;
    bool has_infinite() const;

    Vec project(std::span<const double> u) const;
    bool contains(std::span<const double> u, double tol) const;

    /// Max nodal violation of {lambda >= 0 where u > ua + tol_act; lambda <= 0 where
    /// u < ub - tol_act}. Throws InfeasibleError if u leaves [ua, ub] by more than tol_act.
    double normal_cone_residual(std::span<const double> u, std::span<const double> lambda,
                                double tol_act) const;

    bool operator==(const ControlBounds&) const = default;
};

struct Tolerances {
    double solver_tol = 1e-10;
    double active_tol = 1e-6;
    bool operator==(const Tolerances&) const = default;
};

/// One complete instance. Validated on construction and immutable afterwards.
class ProblemSpec {
public:
    ProblemSpec(Grid grid, double sigma, LowerObjective lower, UpperObjective upper,
                AdmissibleSetX x_ad, ControlBounds bounds, Tolerances tol = {},
                std::optional<Vec> x_star = std::nullopt);

    const Grid& grid() const noexcept { return grid_; }
    const EllipticOperator& op() const noexcept { return op_; }
    double sigma() const noexcept { return sigma_; }
    const LowerObjective& lower() const noexcept { return lower_; }
    const UpperObjective& upper() const noexcept { return upper_; }
    const AdmissibleSetX& x_ad() const noexcept { return x_ad_; }
    const ControlBounds& bounds() const noexcept { return bounds_; }
    const Tolerances& tolerances() const noexcept { return tol_; }
    /// Parameter that generated the observations, when the instance was constructed.
    const std::optional<Vec>& x_star() const noexcept { return x_star_; }
    int n() const noexcept { return lower_.count(); }

    /// Lower objective f(x, y, u) = x . j(y) + sigma/2 ||u||^2.
    double lower_objective(std::span<const double> x, std::span<const double> y,
                           std::span<const double> u) const;
    double upper_objective(std::span<const double> x, std::span<const double> y,
                           std::span<const double> u) const {
        return upper_.value(grid_, x, y, u);
    }

    ProblemSpec with_upper(UpperObjective upper) const;
    ProblemSpec with_x_ad(AdmissibleSetX x_ad) const;
    ProblemSpec with_bounds(ControlBounds bounds) const;
    ProblemSpec with_tolerances(Tolerances tol) const;

    bool operator==(const ProblemSpec&) const = default;

private:
    Grid grid_;
    EllipticOperator op_;
    double sigma_;
    LowerObjective lower_;
    UpperObjective upper_;
    AdmissibleSetX x_ad_;
    ControlBounds bounds_;
    Tolerances tol_;
    std::optional<Vec> x_star_;
};

}  // namespace ioc
