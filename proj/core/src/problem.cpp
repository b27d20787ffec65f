#include "ioc/problem.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <string>

namespace ioc {

namespace {

void require_grid_function(const Grid& g, std::span<const double> v, const std::string& what) {
    if (v.size() != static_cast<std::size_t>(g.size())) {
        throw DimensionError(what + ": expected " + std::to_string(g.size()) + " values, got " +
                             std::to_string(v.size()));
    }
}

}  // namespace

// ---------------------------------------------------------------------------
// LowerObjective

LowerObjective LowerObjective::target_type(std::vector<Vec> targets) {
    LowerObjective j;
    j.kind_ = LowerKind::target_type;
    j.targets_ = std::move(targets);
    return j;
}

LowerObjective LowerObjective::pointwise(std::vector<int> nodes, Vec desired) {
    LowerObjective j;
    j.kind_ = LowerKind::pointwise;
    j.nodes_ = std::move(nodes);
    j.desired_ = std::move(desired);
    return j;
}

int LowerObjective::count() const noexcept {
    return kind_ == LowerKind::target_type ? static_cast<int>(targets_.size())
                                           : static_cast<int>(nodes_.size());
}

void LowerObjective::validate(const Grid& g) const {
    if (count() < 1) throw ValidationError("lower objective needs at least one component");
    if (kind_ == LowerKind::target_type) {
        for (std::size_t i = 0; i < targets_.size(); ++i) {
            require_grid_function(g, targets_[i], "target " + std::to_string(i + 1));
            if (!all_finite(targets_[i])) {
                throw ValidationError("target " + std::to_string(i + 1) + " has non-finite values");
            }
        }
    } else {
        require_grid_function(g, desired_, "desired state");
        if (!all_finite(desired_)) throw ValidationError("desired state has non-finite values");
        for (int k : nodes_) {
            if (k < 0 || k >= g.size()) {
                throw ValidationError("measurement node index " + std::to_string(k) +
                                      " out of range");
            }
        }
    }
}

Vec LowerObjective::value(const Grid& g, std::span<const double> y) const {
    require_grid_function(g, y, "j(y)");
    Vec out(count());
    if (kind_ == LowerKind::target_type) {
        for (std::size_t i = 0; i < targets_.size(); ++i) {
            const Vec r = sub(y, targets_[i]);
            out[i] = inner(g, r, r);
        }
    } else {
        for (std::size_t i = 0; i < nodes_.size(); ++i) {
            const int k = nodes_[i];
            const double r = y[k] - desired_[k];
            out[i] = r * r;
        }
    }
    return out;
}

Vec LowerObjective::derivative(const Grid& g, std::span<const double> y,
                               std::span<const double> dir) const {
    require_grid_function(g, y, "j'(y)");
    require_grid_function(g, dir, "j'(y) direction");
    Vec out(count());
    if (kind_ == LowerKind::target_type) {
        for (std::size_t i = 0; i < targets_.size(); ++i) {
            out[i] = 2.0 * inner(g, sub(y, targets_[i]), dir);
        }
    } else {
        for (std::size_t i = 0; i < nodes_.size(); ++i) {
            const int k = nodes_[i];
            out[i] = 2.0 * (y[k] - desired_[k]) * dir[k];
        }
    }
    return out;
}

Vec LowerObjective::derivative_adjoint(const Grid& g, std::span<const double> y,
                                       std::span<const double> x) const {
    require_grid_function(g, y, "j'(y)*x");
    require_same_size(x.size(), static_cast<std::size_t>(count()), "j'(y)*x parameter");
    Vec out(g.size(), 0.0);
    if (kind_ == LowerKind::target_type) {
        const double total = sum(x);
        for (int k = 0; k < g.size(); ++k) out[k] = 2.0 * total * y[k];
        for (std::size_t i = 0; i < targets_.size(); ++i) axpy(-2.0 * x[i], targets_[i], out);
    } else {
        for (std::size_t i = 0; i < nodes_.size(); ++i) {
            const int k = nodes_[i];
            out[k] += 2.0 * x[i] * (y[k] - desired_[k]) / g.h();
        }
    }
    return out;
}

Vec LowerObjective::second_derivative_adjoint(const Grid& g, std::span<const double> y,
                                              std::span<const double> mu,
                                              std::span<const double> x) const {
    require_grid_function(g, y, "j''(y)");
    require_grid_function(g, mu, "j''(y) direction");
    require_same_size(x.size(), static_cast<std::size_t>(count()), "j''(y)(mu)*x parameter");
    if (kind_ == LowerKind::target_type) return scaled(2.0 * sum(x), mu);
    Vec out(g.size(), 0.0);
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        const int k = nodes_[i];
        out[k] += 2.0 * x[i] * mu[k] / g.h();
    }
    return out;
}

// ---------------------------------------------------------------------------
// UpperObjective

void UpperObjective::validate(const Grid& g) const {
    if (!(c_y >= 0.0) || !(c_u >= 0.0) || !(gamma >= 0.0)) {
        throw ValidationError("upper objective weights c_y, c_u, gamma must be nonnegative");
    }
    require_grid_function(g, y_o, "y_o");
    require_grid_function(g, u_o, "u_o");
    if (!all_finite(y_o) || !all_finite(u_o)) {
        throw ValidationError("upper objective targets must be finite");
    }
}

double UpperObjective::value(const Grid& g, std::span<const double> x, std::span<const double> y,
                             std::span<const double> u) const {
    const Vec ry = sub(y, y_o);
    const Vec ru = sub(u, u_o);
    return 0.5 * c_y * inner(g, ry, ry) + 0.5 * c_u * inner(g, ru, ru) + 0.5 * gamma * dot(x, x);
}

Vec UpperObjective::grad_x(std::span<const double> x) const { return scaled(gamma, x); }
Vec UpperObjective::grad_y(std::span<const double> y) const { return scaled(c_y, sub(y, y_o)); }
Vec UpperObjective::grad_u(std::span<const double> u) const { return scaled(c_u, sub(u, u_o)); }

// ---------------------------------------------------------------------------
// AdmissibleSetX

AdmissibleSetX AdmissibleSetX::simplex(int n) {
    AdmissibleSetX s;
    s.kind_ = XSetKind::simplex;
    s.n_ = n;
    s.lower_.assign(n, 0.0);
    s.upper_.assign(n, 1.0);
    s.validate();
    s.build_vertices();
    return s;
}

AdmissibleSetX AdmissibleSetX::box(Vec lower, Vec upper) {
    AdmissibleSetX s;
    s.kind_ = XSetKind::box;
    s.n_ = static_cast<int>(lower.size());
    s.lower_ = std::move(lower);
    s.upper_ = std::move(upper);
    s.validate();
    s.build_vertices();
    return s;
}

void AdmissibleSetX::validate() const {
    if (n_ < 1) throw ValidationError("X_ad is empty: dimension must be positive");
    if (kind_ == XSetKind::box) {
        if (lower_.size() != upper_.size()) {
            throw DimensionError("X_ad box: lower and upper have different lengths");
        }
        for (int i = 0; i < n_; ++i) {
            if (!std::isfinite(lower_[i]) || !std::isfinite(upper_[i])) {
                throw ValidationError("X_ad box must be bounded");
            }
            if (lower_[i] < 0.0) throw ValidationError("X_ad must lie in the nonnegative orthant");
            if (lower_[i] > upper_[i]) {
                throw ValidationError("X_ad is empty: lower > upper in component " +
                                      std::to_string(i + 1));
            }
        }
    }
}

void AdmissibleSetX::build_vertices() {
    vertices_.clear();
    if (kind_ == XSetKind::simplex) {
        for (int i = 0; i < n_; ++i) {
            Vec e(n_, 0.0);
            e[i] = 1.0;
            vertices_.push_back(std::move(e));
        }
        return;
    }
    if (n_ > 16) return;  // separable residual formula does not need them
    for (unsigned mask = 0; mask < (1u << n_); ++mask) {
        Vec v(n_);
        for (int i = 0; i < n_; ++i) v[i] = (mask >> i) & 1u ? upper_[i] : lower_[i];
        vertices_.push_back(std::move(v));
    }
}

Vec AdmissibleSetX::project(std::span<const double> x) const {
    require_same_size(x.size(), static_cast<std::size_t>(n_), "project_X");
    Vec p(x.begin(), x.end());
    if (kind_ == XSetKind::box) {
        for (int i = 0; i < n_; ++i) p[i] = std::clamp(p[i], lower_[i], upper_[i]);
        return p;
    }
    Vec s(x.begin(), x.end());
    std::sort(s.begin(), s.end(), std::greater<>());
    double cumulative = 0.0;
    double theta = 0.0;
    for (int k = 0; k < n_; ++k) {
        cumulative += s[k];
        const double t = (cumulative - 1.0) / (k + 1);
        if (s[k] - t > 0.0) theta = t;
    }
    for (double& v : p) v = std::max(v - theta, 0.0);
    return p;
}

bool AdmissibleSetX::contains(std::span<const double> x, double tol) const {
    if (x.size() != static_cast<std::size_t>(n_)) return false;
    for (int i = 0; i < n_; ++i) {
        if (!(x[i] >= lower_[i] - tol) || !(x[i] <= upper_[i] + tol)) return false;
    }
    if (kind_ == XSetKind::simplex && std::abs(sum(x) - 1.0) > tol) return false;
    return true;
}

Vec AdmissibleSetX::center() const {
    Vec c(n_);
    if (kind_ == XSetKind::simplex) {
        std::fill(c.begin(), c.end(), 1.0 / n_);
    } else {
        for (int i = 0; i < n_; ++i) c[i] = 0.5 * (lower_[i] + upper_[i]);
    }
    return c;
}

double AdmissibleSetX::normal_cone_residual(std::span<const double> x, std::span<const double> z,
                                            double tol) const {
    require_same_size(z.size(), static_cast<std::size_t>(n_), "normal_cone_residual_X");
    if (!contains(x, tol)) throw InfeasibleError("normal cone of X_ad requested at infeasible x");
    double worst = 0.0;
    if (kind_ == XSetKind::simplex) {
        // vertices are the unit vectors
        worst = *std::max_element(z.begin(), z.end()) - dot(z, x);
    } else {
        for (int i = 0; i < n_; ++i) {
            worst += std::max(z[i] * (lower_[i] - x[i]), z[i] * (upper_[i] - x[i]));
        }
    }
    return std::max(worst, 0.0);
}

Vec AdmissibleSetX::sample(std::mt19937_64& rng) const {
    Vec x(n_);
    if (kind_ == XSetKind::simplex) {
        std::exponential_distribution<double> e(1.0);
        for (double& v : x) v = e(rng);
        const double s = sum(x);
        for (double& v : x) v /= s;
    } else {
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        for (int i = 0; i < n_; ++i) x[i] = lower_[i] + (upper_[i] - lower_[i]) * unit(rng);
    }
    return x;
}

// ---------------------------------------------------------------------------
// ControlBounds

void ControlBounds::validate(const Grid& g) const {
    require_grid_function(g, ua, "u_a");
    require_grid_function(g, ub, "u_b");
    for (int i = 0; i < g.size(); ++i) {
        if (std::isnan(ua[i]) || std::isnan(ub[i])) throw ValidationError("control bounds contain NaN");
        if (!(ua[i] < ub[i])) {
            throw ValidationError("control bounds require u_a < u_b at every node (violated at node " +
                                  std::to_string(i) + ")");
        }
    }
}

bool ControlBounds::has_infinite() const {
    auto inf = [](double v) { return std::isinf(v); };
    return std::any_of(ua.begin(), ua.end(), inf) || std::any_of(ub.begin(), ub.end(), inf);
}

Vec ControlBounds::project(std::span<const double> u) const {
    require_same_size(u.size(), ua.size(), "project_U");
    Vec p(u.begin(), u.end());
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i] < ua[i]) p[i] = ua[i];
        if (p[i] > ub[i]) p[i] = ub[i];
    }
    return p;
}

bool ControlBounds::contains(std::span<const double> u, double tol) const {
    if (u.size() != ua.size()) return false;
    for (std::size_t i = 0; i < u.size(); ++i) {
        if (!(u[i] >= ua[i] - tol) || !(u[i] <= ub[i] + tol)) return false;
    }
    return true;
}

double ControlBounds::normal_cone_residual(std::span<const double> u,
                                           std::span<const double> lambda,
                                           double tol_act) const {
    require_same_size(u.size(), ua.size(), "normal_cone_residual_U");
    require_same_size(lambda.size(), ua.size(), "normal_cone_residual_U multiplier");
    if (!contains(u, tol_act)) throw InfeasibleError("control violates its bounds beyond tolerance");
    double worst = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        if (u[i] > ua[i] + tol_act) worst = std::max(worst, -lambda[i]);
        if (u[i] < ub[i] - tol_act) worst = std::max(worst, lambda[i]);
    }
    return worst;
}

// ---------------------------------------------------------------------------
// ProblemSpec

ProblemSpec::ProblemSpec(Grid grid, double sigma, LowerObjective lower, UpperObjective upper,
                         AdmissibleSetX x_ad, ControlBounds bounds, Tolerances tol,
                         std::optional<Vec> x_star)
    : grid_(grid),
      op_(grid),
      sigma_(sigma),
      lower_(std::move(lower)),
      upper_(std::move(upper)),
      x_ad_(std::move(x_ad)),
      bounds_(std::move(bounds)),
      tol_(tol),
      x_star_(std::move(x_star)) {
    if (!(sigma_ > 0.0) || !std::isfinite(sigma_)) throw ValidationError("sigma must be positive");
    lower_.validate(grid_);
    upper_.validate(grid_);
    x_ad_.validate();
    if (x_ad_.dim() != lower_.count()) {
        throw DimensionError("X_ad dimension " + std::to_string(x_ad_.dim()) +
                             " does not match the number of lower objective components " +
                             std::to_string(lower_.count()));
    }
    bounds_.validate(grid_);
    if (!(tol_.solver_tol > 0.0) || !(tol_.active_tol > 0.0)) {
        throw ValidationError("tolerances must be positive");
    }
    if (x_star_ && !x_ad_.contains(*x_star_, 1e-12)) {
        throw ValidationError("generating parameter x_star is not in X_ad");
    }
}

double ProblemSpec::lower_objective(std::span<const double> x, std::span<const double> y,
                                    std::span<const double> u) const {
    return dot(x, lower_.value(grid_, y)) + 0.5 * sigma_ * inner(grid_, u, u);
}

ProblemSpec ProblemSpec::with_upper(UpperObjective upper) const {
    return ProblemSpec(grid_, sigma_, lower_, std::move(upper), x_ad_, bounds_, tol_, x_star_);
}

ProblemSpec ProblemSpec::with_x_ad(AdmissibleSetX x_ad) const {
    std::optional<Vec> xs = x_star_;
    if (xs && !x_ad.contains(*xs, 1e-12)) xs.reset();
    return ProblemSpec(grid_, sigma_, lower_, upper_, std::move(x_ad), bounds_, tol_, xs);
}

ProblemSpec ProblemSpec::with_bounds(ControlBounds bounds) const {
    return ProblemSpec(grid_, sigma_, lower_, upper_, x_ad_, std::move(bounds), tol_, x_star_);
}

ProblemSpec ProblemSpec::with_tolerances(Tolerances tol) const {
    return ProblemSpec(grid_, sigma_, lower_, upper_, x_ad_, bounds_, tol, x_star_);
}

}  // namespace ioc
