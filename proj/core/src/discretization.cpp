#include "ioc/discretization.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace ioc {

Grid Grid::build(int n_nodes) {
    if (n_nodes < 2) {
        throw ValidationError("invalid grid: need at least 2 interior nodes, got " +
                              std::to_string(n_nodes));
    }
    return Grid(n_nodes, 1.0 / (n_nodes + 1));
}

Vec Grid::nodes() const {
    Vec w(n_);
    for (int i = 0; i < n_; ++i) w[i] = node(i);
    return w;
}

int Grid::nearest_node(double w) const noexcept {
    const long k = std::lround(w / h_) - 1;
    if (k < 0) return 0;
    if (k >= n_) return n_ - 1;
    return static_cast<int>(k);
}

double inner(const Grid& g, std::span<const double> u, std::span<const double> v) {
    require_same_size(u.size(), static_cast<std::size_t>(g.size()), "inner");
    return g.h() * dot(u, v);
}

double norm(const Grid& g, std::span<const double> u) { return std::sqrt(inner(g, u, u)); }

EllipticOperator::EllipticOperator(const Grid& grid)
    : grid_(grid),
      diag_(2.0 / (grid.h() * grid.h())),
      off_(-1.0 / (grid.h() * grid.h())),
      pivots_(grid.size()),
      lower_(grid.size(), 0.0) {
    const int n = grid.size();
    pivots_[0] = diag_;
    for (int i = 1; i < n; ++i) {
        lower_[i] = off_ / pivots_[i - 1];
        pivots_[i] = diag_ - lower_[i] * off_;
    }
}

Vec EllipticOperator::apply(std::span<const double> y) const {
    const int n = grid_.size();
    require_same_size(y.size(), static_cast<std::size_t>(n), "EllipticOperator::apply");
    Vec r(n);
    for (int i = 0; i < n; ++i) {
        double v = diag_ * y[i];
        if (i > 0) v += off_ * y[i - 1];
        if (i + 1 < n) v += off_ * y[i + 1];
        r[i] = v;
    }
    return r;
}

Vec EllipticOperator::solve(std::span<const double> rhs) const {
    const int n = grid_.size();
    require_same_size(rhs.size(), static_cast<std::size_t>(n), "EllipticOperator::solve");
    Vec z(rhs.begin(), rhs.end());
    for (int i = 1; i < n; ++i) z[i] -= lower_[i] * z[i - 1];
    for (int i = 0; i < n; ++i) z[i] /= pivots_[i];
    for (int i = n - 2; i >= 0; --i) z[i] -= lower_[i + 1] * z[i + 1];
    return z;
}

double EllipticOperator::norm_estimate() const noexcept {
    const double s = std::sin(std::numbers::pi * grid_.size() * grid_.h() / 2.0);
    return 4.0 * s * s / (grid_.h() * grid_.h());
}

}  // namespace ioc
