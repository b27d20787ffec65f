#pragma once

// Finite-difference discretization of the Dirichlet Laplacian on (0, 1).
//
// Grid functions live on the N interior nodes w_i = i*h, h = 1/(N+1). All
// pairings use the weighted inner product <u, v> = h * sum_i u_i v_i, so a
// dual functional l(v) = sum_i c_i v_i is stored as its Riesz vector c / h
// and a point evaluation at node i is e_i / h. The control-to-W embedding is
// the identity on grid vectors under this identification.

#include <span>
#include <vector>

#include "ioc/vector_ops.hpp"

namespace ioc {

class Grid {
public:
    /// Throws ValidationError for n_nodes < 2.
    static Grid build(int n_nodes);

    int size() const noexcept { return n_; }
    double h() const noexcept { return h_; }
    double node(int i) const noexcept { return (i + 1) * h_; }  // 0-based storage
    Vec nodes() const;

    /// Index of the interior node nearest to coordinate w (clamped to the interior).
    int nearest_node(double w) const noexcept;

    bool operator==(const Grid&) const = default;

private:
    Grid(int n, double h) : n_(n), h_(h) {}

    int n_;
    double h_;
};

/// <u, v> = h * sum u_i v_i
double inner(const Grid& g, std::span<const double> u, std::span<const double> v);
double norm(const Grid& g, std::span<const double> u);

/// A = -d^2/dw^2 with homogeneous Dirichlet data, stencil (-1, 2, -1) / h^2.
/// The LDL^T factorization of the tridiagonal matrix is computed once in the
/// constructor; every member is const afterwards.
class EllipticOperator {
public:
    explicit EllipticOperator(const Grid& grid);

    const Grid& grid() const noexcept { return grid_; }

    Vec apply(std::span<const double> y) const;
    Vec apply_adjoint(std::span<const double> y) const { return apply(y); }
    Vec solve(std::span<const double> rhs) const;
    Vec solve_adjoint(std::span<const double> rhs) const { return solve(rhs); }

    /// Largest eigenvalue of A (closed form for the uniform stencil).
    double norm_estimate() const noexcept;

    bool operator==(const EllipticOperator& other) const { return grid_ == other.grid_; }

private:
    Grid grid_;
    double diag_;
    double off_;
    Vec pivots_;   // D of LDL^T
    Vec lower_;    // sub-diagonal of L
};

}  // namespace ioc
