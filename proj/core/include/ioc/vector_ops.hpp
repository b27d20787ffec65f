#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "ioc/error.hpp"

namespace ioc {

using Vec = std::vector<double>;

inline void require_same_size(std::size_t a, std::size_t b, const char* where) {
    if (a != b) {
        throw DimensionError(std::string(where) + ": length mismatch (" + std::to_string(a) +
                             " vs " + std::to_string(b) + ")");
    }
}

inline double dot(std::span<const double> a, std::span<const double> b) {
    require_same_size(a.size(), b.size(), "dot");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

inline double norm_inf(std::span<const double> a) {
    double m = 0.0;
    for (double v : a) m = std::max(m, std::abs(v));
    return m;
}

inline double sum(std::span<const double> a) {
    double s = 0.0;
    for (double v : a) s += v;
    return s;
}

/// y += alpha * x
inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
    require_same_size(x.size(), y.size(), "axpy");
    for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

inline Vec add(std::span<const double> a, std::span<const double> b) {
    require_same_size(a.size(), b.size(), "add");
    Vec r(a.begin(), a.end());
    for (std::size_t i = 0; i < r.size(); ++i) r[i] += b[i];
    return r;
}

inline Vec sub(std::span<const double> a, std::span<const double> b) {
    require_same_size(a.size(), b.size(), "sub");
    Vec r(a.begin(), a.end());
    for (std::size_t i = 0; i < r.size(); ++i) r[i] -= b[i];
    return r;
}

inline Vec scaled(double alpha, std::span<const double> a) {
    Vec r(a.begin(), a.end());
    for (double& v : r) v *= alpha;
    return r;
}

inline bool all_finite(std::span<const double> a) {
    return std::all_of(a.begin(), a.end(), [](double v) { return std::isfinite(v); });
}

}  // namespace ioc
