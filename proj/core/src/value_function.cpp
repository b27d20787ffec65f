#include "ioc/value_function.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>

namespace ioc {

ValueFunction::ValueFunction(const ProblemSpec& spec, std::optional<double> tol)
    : spec_(&spec), solver_(spec), tol_(tol.value_or(spec.tolerances().solver_tol)) {}

std::string ValueFunction::key_of(std::span<const double> x) {
    std::string key(x.size() * sizeof(double), '\0');
    std::memcpy(key.data(), x.data(), key.size());
    return key;
}

ValueSample ValueFunction::make_sample(const LowerSolution& sol) const {
    ValueSample s;
    s.x = sol.x;
    s.phi = sol.objective;
    s.grad_phi = spec_->lower().value(spec_->grid(), sol.y);
    s.lower = std::make_shared<const LowerSolution>(sol);
    return s;
}

ValueSample ValueFunction::sample(std::span<const double> x) const {
    const std::string key = key_of(x);
    Vec warm;
    {
        std::shared_lock lock(mutex_);
        if (auto it = cache_.find(key); it != cache_.end()) return it->second;
        warm = last_control_;
    }
    const LowerSolution sol =
        warm.empty() ? solver_.solve(x, tol_) : solver_.solve(x, tol_, std::span<const double>(warm));
    ValueSample s = make_sample(sol);
    {
        std::unique_lock lock(mutex_);
        if (cache_.size() >= max_cache_entries) cache_.clear();
        cache_.insert_or_assign(key, s);
        last_control_ = sol.u;
    }
    return s;
}

ValueSample ValueFunction::sample_uncached(std::span<const double> x) const {
    return make_sample(solver_.solve(x, tol_));
}

std::size_t ValueFunction::cache_size() const {
    std::shared_lock lock(mutex_);
    return cache_.size();
}

void ValueFunction::clear_cache() const {
    std::unique_lock lock(mutex_);
    cache_.clear();
    last_control_.clear();
}

double concavity_violation(const ValueFunction& vf, std::span<const double> x1,
                           std::span<const double> x2, double t) {
    require_same_size(x1.size(), x2.size(), "concavity_violation");
    Vec mid(x1.size());
    for (std::size_t i = 0; i < mid.size(); ++i) mid[i] = t * x1[i] + (1.0 - t) * x2[i];
    return t * vf.phi(x1) + (1.0 - t) * vf.phi(x2) - vf.phi(mid);
}

double probe_concavity(const ValueFunction& vf, int trials, std::uint64_t seed) {
    if (trials < 1) throw DomainError("probe_concavity needs at least one trial");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const AdmissibleSetX& X = vf.spec().x_ad();
    double worst = -std::numeric_limits<double>::infinity();
    for (int k = 0; k < trials; ++k) {
        const Vec x1 = X.sample(rng);
        const Vec x2 = X.sample(rng);
        const double t = unit(rng);
        worst = std::max(worst, concavity_violation(vf, x1, x2, t));
    }
    return worst;
}

double probe_concavity(const ProblemSpec& spec, int trials, std::uint64_t seed) {
    const ValueFunction vf(spec);
    return probe_concavity(vf, trials, seed);
}

double taylor_remainder(const ValueFunction& vf, std::span<const double> x_bar,
                        std::span<const double> x) {
    const ValueSample at_bar = vf.sample(x_bar);
    const Vec d = sub(x, x_bar);
    return std::abs(vf.phi(x) - at_bar.phi - dot(at_bar.grad_phi, d));
}

TaylorProbe probe_taylor(const ValueFunction& vf, std::span<const double> x_bar, double radius,
                         int trials, std::uint64_t seed) {
    if (!(radius > 0.0) || trials < 1) throw DomainError("probe_taylor needs radius > 0 and trials >= 1");
    const AdmissibleSetX& X = vf.spec().x_ad();
    if (!X.contains(x_bar, 1e-12)) throw InfeasibleError("probe_taylor: x_bar is not in X_ad");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const int n = X.dim();
    TaylorProbe probe;
    for (int k = 0; k < trials; ++k) {
        Vec d(n);
        for (double& v : d) v = gauss(rng);
        if (X.kind() == XSetKind::simplex) {
            const double mean = sum(d) / n;
            for (double& v : d) v -= mean;
        }
        const double nd = norm2(d);
        if (nd == 0.0) continue;
        Vec x(x_bar.begin(), x_bar.end());
        axpy(radius / nd, d, x);
        x = X.project(x);
        const double dist = norm2(sub(x, x_bar));
        if (dist < 1e-3 * radius) continue;
        probe.constant = std::max(probe.constant, taylor_remainder(vf, x_bar, x) / (dist * dist));
        ++probe.samples;
    }
    return probe;
}

TaylorProbe probe_taylor(const ProblemSpec& spec, std::span<const double> x_bar, double radius,
                         int trials, std::uint64_t seed) {
    const ValueFunction vf(spec);
    return probe_taylor(vf, x_bar, radius, trials, seed);
}

std::vector<ValueSample> value_slice(const ValueFunction& vf, std::span<const double> a,
                                     std::span<const double> b, int count) {
    require_same_size(a.size(), b.size(), "value_slice");
    if (count < 1) throw DomainError("value_slice needs count >= 1");
    const bool degenerate = std::equal(a.begin(), a.end(), b.begin());
    const int m = degenerate ? 1 : std::max(count, 2);
    std::vector<ValueSample> out;
    out.reserve(m);
    for (int k = 0; k < m; ++k) {
        const double s = m == 1 ? 0.0 : static_cast<double>(k) / (m - 1);
        Vec x(a.size());
        for (std::size_t i = 0; i < x.size(); ++i) x[i] = (1.0 - s) * a[i] + s * b[i];
        out.push_back(vf.sample(x));
    }
    return out;
}

}  // namespace ioc
