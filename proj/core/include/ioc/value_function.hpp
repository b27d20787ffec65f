#pragma once

// Optimal value function phi(x) = f(x, psi^y(x), psi^u(x)) of the lower level
// and its gradient phi'(x) = j(psi^y(x)), evaluated on R^n_+ only.

#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <shared_mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include "ioc/lower_level.hpp"

namespace ioc {

struct ValueSample {
    Vec x;
    double phi = 0.0;
    Vec grad_phi;
    std::shared_ptr<const LowerSolution> lower;
};

/// Cached evaluator. Entries are keyed by the exact bit pattern of x; lookups
/// and inserts are safe from several threads.
class ValueFunction {
public:
    explicit ValueFunction(const ProblemSpec& spec, std::optional<double> tol = std::nullopt);

    ValueFunction(const ValueFunction&) = delete;
    ValueFunction& operator=(const ValueFunction&) = delete;

    const ProblemSpec& spec() const noexcept { return *spec_; }
    const LowerLevelSolver& lower_solver() const noexcept { return solver_; }
    double tolerance() const noexcept { return tol_; }

    ValueSample sample(std::span<const double> x) const;
    /// Bypasses the cache (cold start).
    ValueSample sample_uncached(std::span<const double> x) const;
    double phi(std::span<const double> x) const { return sample(x).phi; }
    Vec grad_phi(std::span<const double> x) const { return sample(x).grad_phi; }

    std::size_t cache_size() const;
    void clear_cache() const;

    std::size_t max_cache_entries = 20000;

private:
    static std::string key_of(std::span<const double> x);
    ValueSample make_sample(const LowerSolution& sol) const;

    const ProblemSpec* spec_;
    LowerLevelSolver solver_;
    double tol_;
    mutable std::shared_mutex mutex_;
    mutable std::unordered_map<std::string, ValueSample> cache_;
    mutable Vec last_control_;
};

/// t phi(x1) + (1 - t) phi(x2) - phi(t x1 + (1 - t) x2); positive values violate concavity.
double concavity_violation(const ValueFunction& vf, std::span<const double> x1,
                           std::span<const double> x2, double t);

/// Max violation over random segments in X_ad.
double probe_concavity(const ValueFunction& vf, int trials, std::uint64_t seed = 20240917);
double probe_concavity(const ProblemSpec& spec, int trials, std::uint64_t seed = 20240917);

/// |phi(x) - phi(x_bar) - phi'(x_bar) . (x - x_bar)|
double taylor_remainder(const ValueFunction& vf, std::span<const double> x_bar,
                        std::span<const double> x);

struct TaylorProbe {
    double constant = 0.0;  // max remainder / |x - x_bar|^2
    int samples = 0;
};

/// Samples points at distance about `radius` from x_bar inside X_ad.
TaylorProbe probe_taylor(const ValueFunction& vf, std::span<const double> x_bar, double radius,
                         int trials, std::uint64_t seed = 7);
TaylorProbe probe_taylor(const ProblemSpec& spec, std::span<const double> x_bar, double radius,
                         int trials, std::uint64_t seed = 7);

/// Evenly spaced samples on the segment [a, b]; a single sample when a == b.
std::vector<ValueSample> value_slice(const ValueFunction& vf, std::span<const double> a,
                                     std::span<const double> b, int count);

}  // namespace ioc
