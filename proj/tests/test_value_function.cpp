#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <thread>

#include "ioc/lower_level.hpp"
#include "ioc/value_function.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace ioc;

namespace {

ProblemSpec equal_targets() {
    const ProblemSpec& d = test::default_spec();
    const Vec t = d.lower().targets()[0];
    return ProblemSpec(d.grid(), d.sigma(), LowerObjective::target_type({t, t}), d.upper(), d.x_ad(),
                       d.bounds());
}

}  // namespace

TEST(ValueFunction, ZeroParameter) {
    const ProblemSpec& p = test::default_spec();
    const ValueFunction vf(p);
    const ValueSample s = vf.sample(Vec{0.0, 0.0});
    EXPECT_NEAR(s.phi, 0.0, 1e-14);
    for (int i = 0; i < 2; ++i) {
        const double expect = norm(p.grid(), p.lower().targets()[i]);
        EXPECT_NEAR(s.grad_phi[i], expect * expect, 1e-12);
    }
}

TEST(ValueFunction, ZeroTargetAtVertex) {
    const ProblemSpec& d = test::default_spec();
    const Vec zero(d.grid().size(), 0.0);
    const ProblemSpec p(d.grid(), d.sigma(),
                        LowerObjective::target_type({zero, d.lower().targets()[1]}), d.upper(),
                        d.x_ad(), d.bounds());
    EXPECT_NEAR(ValueFunction(p).phi(Vec{1.0, 0.0}), 0.0, 1e-14);
}

TEST(ValueFunction, BoundedByFeasibleCompetitor) {
    const ProblemSpec& p = test::default_spec();
    const ValueFunction vf(p);
    const Vec uo = p.bounds().project(p.upper().u_o);
    const Vec yo = p.op().solve(uo);
    std::mt19937_64 rng(4);
    for (int k = 0; k < 20; ++k) {
        const Vec x = p.x_ad().sample(rng);
        EXPECT_LE(vf.phi(x), p.lower_objective(x, yo, uo) + 1e-12);
    }
}

TEST(ValueFunction, EqualTargetsGiveEqualGradient) {
    const ProblemSpec p = equal_targets();
    const Vec g = ValueFunction(p).grad_phi(Vec{0.2, 0.8});
    EXPECT_NEAR(g[0], g[1], 1e-14);
}

TEST(ValueFunction, GradientMatchesCentralDifferences) {
    const ProblemSpec& p = test::default_spec();
    const ValueFunction vf(p, 1e-13);
    const double t = 1e-4;
    for (const Vec& x : {Vec{0.3, 0.7}, Vec{0.5, 0.5}, Vec{0.8, 0.3}}) {
        const Vec g = vf.grad_phi(x);
        for (int i = 0; i < 2; ++i) {
            Vec a = x, b = x;
            a[i] += t;
            b[i] -= t;
            const double fd = (vf.phi(a) - vf.phi(b)) / (2 * t);
            EXPECT_LE(std::abs(fd - g[i]), 1e-4 * std::abs(g[i])) << i;
        }
    }
}

TEST(ValueFunction, GradientNonnegative) {
    const ProblemSpec& p = test::default_spec();
    const ValueFunction vf(p);
    std::mt19937_64 rng(2);
    for (int k = 0; k < 50; ++k) {
        const ValueSample s = vf.sample(p.x_ad().sample(rng));
        EXPECT_GE(s.phi, 0.0);
        for (double v : s.grad_phi) EXPECT_GE(v, -1e-12);
    }
}

TEST(ValueFunction, ConcavityExamples) {
    const ProblemSpec& p = test::default_spec();
    const ValueFunction vf(p);
    const Vec a{0.2, 0.8}, b{0.9, 0.1};
    EXPECT_NEAR(concavity_violation(vf, a, a, 0.4), 0.0, 1e-14);
    EXPECT_NEAR(concavity_violation(vf, a, b, 0.0), 0.0, 1e-14);
    EXPECT_NEAR(concavity_violation(vf, a, b, 1.0), 0.0, 1e-14);
    EXPECT_LE(probe_concavity(vf, 100), 1e-8);
}

TEST(ValueFunction, TaylorRemainder) {
    const ProblemSpec& p = test::default_spec();
    const ValueFunction vf(p, 1e-13);
    const Vec xb{0.3, 0.7};
    EXPECT_NEAR(taylor_remainder(vf, xb, xb), 0.0, 1e-14);
    const TaylorProbe big = probe_taylor(vf, xb, 1e-2, 20);
    const TaylorProbe small = probe_taylor(vf, xb, 1e-3, 20);
    ASSERT_GT(big.constant, 0.0);
    ASSERT_GT(small.constant, 0.0);
    EXPECT_LE(std::max(big.constant, small.constant) / std::min(big.constant, small.constant), 3.0);
}

TEST(ValueFunction, TaylorRatioMatchesDenseSecondDifference) {
    // Single target, bounds never active: phi(t) along a segment is smooth and
    // its second difference is available from dense solves.
    const ProblemSpec& d = test::default_spec();
    const int N = d.grid().size();
    const ProblemSpec p = d.with_bounds(ControlBounds{Vec(N, -1e4), Vec(N, 1e4)});
    const ValueFunction vf(p, 1e-13);
    const Vec xb{0.4, 0.6}, dir{0.05, -0.05};
    const Vec x = add(xb, dir);

    auto dense_phi = [&](const Vec& z) {
        const test::LowerQuadratic q = test::lower_quadratic(p, z);
        const Eigen::VectorXd u = q.Q.ldlt().solve(q.c);
        return 0.5 * u.dot(q.Q * u) - q.c.dot(u) + q.r;
    };
    const double g = dot(vf.grad_phi(xb), dir);
    const double dense_remainder = std::abs(dense_phi(x) - dense_phi(xb) - g);
    EXPECT_NEAR(taylor_remainder(vf, xb, x), dense_remainder, 1e-9);
}

TEST(ValueFunction, CacheTransparency) {
    const ProblemSpec& p = test::default_spec();
    const ValueFunction vf(p);
    const Vec x{0.35, 0.65};
    const ValueSample a = vf.sample(x);
    const ValueSample b = vf.sample(x);
    const ValueSample c = vf.sample_uncached(x);
    EXPECT_EQ(vf.cache_size(), 1u);
    EXPECT_EQ(a.phi, b.phi);
    EXPECT_LE(norm(p.grid(), sub(a.lower->u, c.lower->u)), 10 * vf.tolerance());
    vf.clear_cache();
    EXPECT_EQ(vf.cache_size(), 0u);
}

TEST(ValueFunction, ConcurrentSampling) {
    const ProblemSpec& p = test::default_spec();
    const ValueFunction vf(p);
    std::vector<double> out(8);
    {
        std::vector<std::jthread> pool;
        for (int t = 0; t < 8; ++t)
            pool.emplace_back([&, t] { out[t] = vf.phi(Vec{0.1 * (t % 4), 1.0 - 0.1 * (t % 4)}); });
    }
    for (int t = 0; t < 4; ++t) EXPECT_NEAR(out[t], out[t + 4], 1e-9);
    EXPECT_EQ(vf.cache_size(), 4u);
}

TEST(ValueFunction, SliceEndpoints) {
    const ProblemSpec& p = test::default_spec();
    const ValueFunction vf(p);
    const Vec a{1.0, 0.0}, b{0.0, 1.0};
    const auto s = value_slice(vf, a, b, 5);
    ASSERT_EQ(s.size(), 5u);
    EXPECT_EQ(s.front().x, a);
    EXPECT_EQ(s.back().x, b);
    EXPECT_EQ(value_slice(vf, a, a, 5).size(), 1u);
}
