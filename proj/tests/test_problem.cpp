#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "ioc/error.hpp"
#include "ioc/problem.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace ioc;
using test::random_vec;

namespace {

LowerObjective two_targets(const Grid& g) {
    return LowerObjective::target_type({random_vec(g.size(), 1), random_vec(g.size(), 2)});
}

LowerObjective three_points(const Grid& g) {
    return LowerObjective::pointwise({2, 7, 11}, random_vec(g.size(), 3));
}

Vec abs_vec(Vec v) {
    for (double& e : v) e = std::abs(e);
    return v;
}

}  // namespace

TEST(LowerObjective, TargetTypeZeroAtTarget) {
    const Grid g = Grid::build(10);
    const Vec yd = random_vec(10, 4);
    const LowerObjective j = LowerObjective::target_type({yd});
    EXPECT_EQ(j.value(g, yd)[0], 0.0);
}

TEST(LowerObjective, ZeroWeightGivesZeroAdjoint) {
    const Grid g = Grid::build(10);
    const Vec d = two_targets(g).derivative_adjoint(g, random_vec(10, 5), Vec{0.0, 0.0});
    for (double v : d) EXPECT_EQ(v, 0.0);
}

TEST(LowerObjective, ClosedForms) {
    const Grid g = Grid::build(12);
    const LowerObjective jt = two_targets(g);
    const Vec y = random_vec(12, 6), x{0.3, 0.9}, mu = random_vec(12, 7);
    const Vec adj = jt.derivative_adjoint(g, y, x);
    const Vec hess = jt.second_derivative_adjoint(g, y, mu, x);
    for (int i = 0; i < 12; ++i) {
        const double expect = 2.0 * 1.2 * y[i] - 2.0 * (0.3 * jt.targets()[0][i] + 0.9 * jt.targets()[1][i]);
        EXPECT_NEAR(adj[i], expect, 1e-12);
        EXPECT_NEAR(hess[i], 2.0 * 1.2 * mu[i], 1e-12);
    }

    const LowerObjective jp = three_points(g);
    const Vec xp{0.5, 1.5, 2.0};
    const Vec adjp = jp.derivative_adjoint(g, y, xp);
    const Vec hessp = jp.second_derivative_adjoint(g, y, mu, xp);
    for (int i = 0; i < 12; ++i) {
        double a = 0.0, b = 0.0;
        for (int k = 0; k < 3; ++k) {
            if (jp.nodes()[k] != i) continue;
            a += 2.0 * xp[k] * (y[i] - jp.desired()[i]) / g.h();
            b += 2.0 * xp[k] * mu[i] / g.h();
        }
        EXPECT_NEAR(adjp[i], a, 1e-10);
        EXPECT_NEAR(hessp[i], b, 1e-10);
    }
}

TEST(LowerObjective, DirectionalDerivativeMatchesFiniteDifference) {
    const Grid g = Grid::build(16);
    for (const LowerObjective& j : {two_targets(g), three_points(g)}) {
        for (unsigned s = 0; s < 20; ++s) {
            const Vec y = random_vec(16, 10 + s), v = random_vec(16, 50 + s);
            // Central difference: exact up to rounding because j is quadratic.
            const double t = 1e-5;
            Vec yp = y, ym = y;
            axpy(t, v, yp);
            axpy(-t, v, ym);
            const Vec fd = scaled(0.5 / t, sub(j.value(g, yp), j.value(g, ym)));
            const Vec an = j.derivative(g, y, v);
            for (int i = 0; i < j.count(); ++i)
                EXPECT_LE(std::abs(fd[i] - an[i]), 1e-6 * std::max(1.0, std::abs(an[i])));
        }
    }
}

TEST(LowerObjective, AdjointConsistency) {
    const Grid g = Grid::build(16);
    for (const LowerObjective& j : {two_targets(g), three_points(g)}) {
        for (unsigned s = 0; s < 20; ++s) {
            const Vec y = random_vec(16, s), v = random_vec(16, 100 + s);
            const Vec x = abs_vec(random_vec(j.count(), 200 + s));
            const double lhs = inner(g, j.derivative_adjoint(g, y, x), v);
            const double rhs = dot(x, j.derivative(g, y, v));
            EXPECT_LE(std::abs(lhs - rhs), 1e-10 * std::max(1.0, std::abs(rhs)));
        }
    }
}

TEST(LowerObjective, HessianSymmetry) {
    const Grid g = Grid::build(16);
    for (const LowerObjective& j : {two_targets(g), three_points(g)}) {
        const Vec y = random_vec(16, 1), mu = random_vec(16, 2), v = random_vec(16, 3);
        const Vec x = abs_vec(random_vec(j.count(), 4));
        const double a = inner(g, j.second_derivative_adjoint(g, y, mu, x), v);
        const double b = inner(g, j.second_derivative_adjoint(g, y, v, x), mu);
        EXPECT_NEAR(a, b, 1e-10 * std::max(1.0, std::abs(a)));
    }
}

TEST(LowerObjective, Nonnegative) {
    const Grid g = Grid::build(16);
    for (const LowerObjective& j : {two_targets(g), three_points(g)})
        for (unsigned s = 0; s < 1000; ++s)
            for (double v : j.value(g, random_vec(16, s, 3.0))) EXPECT_GE(v, 0.0);
}

TEST(LowerObjective, ValidationErrors) {
    const Grid g = Grid::build(8);
    EXPECT_THROW(LowerObjective::pointwise({8}, Vec(8, 0.0)).validate(g), ValidationError);
    EXPECT_THROW(LowerObjective::pointwise({-1}, Vec(8, 0.0)).validate(g), ValidationError);
    EXPECT_THROW(LowerObjective::target_type({Vec(7, 0.0)}).validate(g), ValidationError);
    EXPECT_THROW(LowerObjective::target_type({}).validate(g), ValidationError);
    EXPECT_THROW(two_targets(Grid::build(8)).value(g, Vec(9, 0.0)), DimensionError);
}

TEST(UpperObjective, GradientsMatchFiniteDifferences) {
    const Grid g = Grid::build(10);
    UpperObjective F{0.7, random_vec(10, 1), 1.3, random_vec(10, 2), 0.4};
    F.validate(g);
    const Vec x{0.2, 0.5}, y = random_vec(10, 3), u = random_vec(10, 4);
    const double t = 1e-6;
    const Vec dy = random_vec(10, 5), du = random_vec(10, 6), dx{0.3, -0.7};
    auto shifted = [t](const Vec& a, const Vec& d) {
        Vec r = a;
        axpy(t, d, r);
        return r;
    };
    const double f0 = F.value(g, x, y, u);
    EXPECT_NEAR((F.value(g, x, shifted(y, dy), u) - f0) / t, inner(g, F.grad_y(y), dy), 1e-5);
    EXPECT_NEAR((F.value(g, x, y, shifted(u, du)) - f0) / t, inner(g, F.grad_u(u), du), 1e-5);
    EXPECT_NEAR((F.value(g, shifted(x, dx), y, u) - f0) / t, dot(F.grad_x(x), dx), 1e-5);
}

TEST(UpperObjective, RejectsNegativeWeights) {
    const Grid g = Grid::build(4);
    UpperObjective F{-1.0, Vec(4, 0.0), 1.0, Vec(4, 0.0), 0.0};
    EXPECT_THROW(F.validate(g), ValidationError);
}

TEST(AdmissibleSetX, SimplexProjectionExamples) {
    const AdmissibleSetX s = AdmissibleSetX::simplex(2);
    const Vec p = s.project(Vec{2.0, 0.0});
    EXPECT_NEAR(p[0], 1.0, 1e-15);
    EXPECT_NEAR(p[1], 0.0, 1e-15);
    const Vec f{0.25, 0.75};
    EXPECT_EQ(s.project(f), f);
}

TEST(AdmissibleSetX, SimplexProjectionAgainstFineGrid) {
    // Minimise |p - x|^2 over a fine lattice of the 2-simplex.
    const AdmissibleSetX s = AdmissibleSetX::simplex(2);
    const Vec x{2.0, 0.0};
    double best = 1e300, best_t = -1.0;
    for (int k = 0; k <= 100000; ++k) {
        const double t = k / 100000.0;
        const double d = (t - x[0]) * (t - x[0]) + (1 - t - x[1]) * (1 - t - x[1]);
        if (d < best) best = d, best_t = t;
    }
    EXPECT_NEAR(s.project(x)[0], best_t, 1e-5);
}

TEST(AdmissibleSetX, SimplexProjectionMatchesBisectionOracle) {
    for (int n : {2, 3, 5}) {
        const AdmissibleSetX s = AdmissibleSetX::simplex(n);
        for (unsigned k = 0; k < 50; ++k) {
            const Vec x = random_vec(n, 1000 + k, 2.0);
            const Vec p = s.project(x), q = test::simplex_projection_bisection(x);
            for (int i = 0; i < n; ++i) EXPECT_NEAR(p[i], q[i], 1e-12);
        }
    }
}

TEST(AdmissibleSetX, ProjectionOptimality) {
    const AdmissibleSetX s = AdmissibleSetX::simplex(3);
    std::mt19937_64 rng(11);
    const Vec x = random_vec(3, 77, 3.0);
    const double d = norm2(sub(s.project(x), x));
    for (int k = 0; k < 100; ++k) EXPECT_LE(d, norm2(sub(s.sample(rng), x)) + 1e-14);
}

TEST(AdmissibleSetX, BoxClamp) {
    const AdmissibleSetX b = AdmissibleSetX::box({0.0, 0.0}, {1.0, 1.0});
    const Vec p = b.project(Vec{-1.0, 0.5});
    EXPECT_EQ(p, (Vec{0.0, 0.5}));
    EXPECT_THROW(AdmissibleSetX::box({0.0}, {1.0, 1.0}).validate(), DimensionError);
    EXPECT_THROW(AdmissibleSetX::box({-0.5}, {1.0}).validate(), ValidationError);
    EXPECT_THROW(AdmissibleSetX::box({1.0}, {0.5}).validate(), ValidationError);
}

TEST(AdmissibleSetX, NormalConeResidualExamples) {
    const AdmissibleSetX s = AdmissibleSetX::simplex(2);
    EXPECT_EQ(s.normal_cone_residual(Vec{0.3, 0.7}, Vec{0.0, 0.0}), 0.0);
    EXPECT_EQ(s.normal_cone_residual(Vec{1.0, 0.0}, Vec{1.0, -1.0}), 0.0);
    EXPECT_DOUBLE_EQ(s.normal_cone_residual(Vec{0.5, 0.5}, Vec{1.0, 0.0}), 0.5);
    EXPECT_THROW(s.normal_cone_residual(Vec{0.9, 0.9}, Vec{0.0, 0.0}), InfeasibleError);
}

TEST(AdmissibleSetX, NormalConeResidualMatchesVertexEnumeration) {
    for (const AdmissibleSetX& X :
         {AdmissibleSetX::simplex(3), AdmissibleSetX::box({0.0, 0.2, 0.0}, {1.0, 0.5, 2.0})}) {
        std::mt19937_64 rng(3);
        for (unsigned k = 0; k < 30; ++k) {
            const Vec x = X.sample(rng), z = random_vec(3, 300 + k);
            double worst = 0.0;
            for (const Vec& v : X.vertices()) worst = std::max(worst, dot(z, sub(v, x)));
            EXPECT_NEAR(X.normal_cone_residual(x, z), worst, 1e-12);
        }
    }
}

TEST(ControlBounds, NormalConeResidualExamples) {
    const ControlBounds b{Vec{0.0, 0.0}, Vec{1.0, 1.0}};
    EXPECT_EQ(b.normal_cone_residual(Vec{0.5, 0.2}, Vec{0.0, 0.0}, 1e-6), 0.0);
    EXPECT_DOUBLE_EQ(b.normal_cone_residual(Vec{0.5, 0.2}, Vec{0.3, 0.0}, 1e-6), 0.3);
    EXPECT_EQ(b.normal_cone_residual(Vec{1.0, 0.2}, Vec{0.3, 0.0}, 1e-6), 0.0);
    EXPECT_DOUBLE_EQ(b.normal_cone_residual(Vec{0.0, 0.2}, Vec{0.3, 0.0}, 1e-6), 0.3);
    EXPECT_THROW(b.normal_cone_residual(Vec{1.5, 0.2}, Vec{0.0, 0.0}, 1e-6), InfeasibleError);
}

TEST(ControlBounds, ProjectionAndInfiniteBounds) {
    const double inf = std::numeric_limits<double>::infinity();
    const ControlBounds b{Vec{-inf, 0.0}, Vec{1.0, inf}};
    EXPECT_TRUE(b.has_infinite());
    EXPECT_EQ(b.project(Vec{-1e9, -2.0}), (Vec{-1e9, 0.0}));
    EXPECT_EQ(b.project(Vec{3.0, 1e9}), (Vec{1.0, 1e9}));
}

TEST(ControlBounds, Validation) {
    const Grid g = Grid::build(2);
    EXPECT_THROW((ControlBounds{Vec{0.0, 1.0}, Vec{1.0, 1.0}}.validate(g)), ValidationError);
    EXPECT_THROW((ControlBounds{Vec{0.0}, Vec{1.0}}.validate(g)), ValidationError);
    EXPECT_THROW((ControlBounds{Vec{0.0, NAN}, Vec{1.0, 1.0}}.validate(g)), ValidationError);
}

TEST(ProblemSpec, Validation) {
    const ProblemSpec& d = test::default_spec();
    auto build = [&](double sigma, const AdmissibleSetX& X, std::optional<Vec> xs) {
        return ProblemSpec(d.grid(), sigma, d.lower(), d.upper(), X, d.bounds(), {}, xs);
    };
    try {
        build(0.0, d.x_ad(), std::nullopt);
        FAIL() << "sigma = 0 accepted";
    } catch (const ValidationError& e) {
        EXPECT_NE(std::string(e.what()).find("sigma must be positive"), std::string::npos);
    }
    EXPECT_THROW(build(-1.0, d.x_ad(), std::nullopt), ValidationError);
    EXPECT_THROW(build(0.01, AdmissibleSetX::simplex(3), std::nullopt), DimensionError);
    EXPECT_THROW(build(0.01, d.x_ad(), Vec{0.9, 0.9}), ValidationError);
    EXPECT_NO_THROW(build(0.01, d.x_ad(), Vec{0.5, 0.5}));
}

TEST(ProblemSpec, DefaultInstanceShape) {
    const ProblemSpec& d = test::default_spec();
    EXPECT_EQ(d.grid().size(), 64);
    EXPECT_EQ(d.n(), 2);
    EXPECT_DOUBLE_EQ(d.sigma(), 1e-2);
    ASSERT_TRUE(d.x_star().has_value());
    EXPECT_EQ(*d.x_star(), (Vec{0.3, 0.7}));
}
