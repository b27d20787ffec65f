#include "ioc/oracle.hpp"

#include <algorithm>
#include <thread>

#include "ioc/lower_level.hpp"

namespace ioc {

namespace {

void check_request(const AdmissibleSetX& x_ad, int resolution) {
    if (x_ad.dim() > 3) throw ValidationError("oracle: refusing lattice search for n > 3");
    if (resolution < 2) throw ValidationError("oracle: resolution must be at least 2");
}

// All k in {0..R}^n (box) or with sum k = R (simplex), lexicographic.
void enumerate(int n, int R, bool simplex, std::vector<int>& k, int pos, int used,
               std::vector<std::vector<int>>& out) {
    if (pos == n - 1 && simplex) {
        k[pos] = R - used;
        out.push_back(k);
        return;
    }
    if (pos == n) {
        out.push_back(k);
        return;
    }
    const int top = simplex ? R - used : R;
    for (int v = 0; v <= top; ++v) {
        k[pos] = v;
        enumerate(n, R, simplex, k, pos + 1, used + v, out);
    }
}

}  // namespace

std::vector<Vec> oracle_lattice(const AdmissibleSetX& x_ad, int resolution) {
    check_request(x_ad, resolution);
    const int n = x_ad.dim();
    const bool simplex = x_ad.kind() == XSetKind::simplex;
    std::vector<std::vector<int>> idx;
    std::vector<int> k(n, 0);
    enumerate(n, resolution, simplex, k, 0, 0, idx);

    std::vector<Vec> pts;
    pts.reserve(idx.size());
    for (const auto& ki : idx) {
        Vec x(n);
        for (int i = 0; i < n; ++i) {
            const double t = static_cast<double>(ki[i]) / resolution;
            x[i] = simplex ? t : x_ad.lower()[i] + t * (x_ad.upper()[i] - x_ad.lower()[i]);
        }
        pts.push_back(std::move(x));
    }
    return pts;
}

double reduced_objective(const ProblemSpec& spec, std::span<const double> x, double lower_tol) {
    const LowerSolution s = solve_lower(spec, x, lower_tol);
    return spec.upper_objective(x, s.y, s.u);
}

std::vector<OracleSample> landscape(const ProblemSpec& spec, int resolution,
                                    OracleOptions options) {
    std::vector<Vec> pts = oracle_lattice(spec.x_ad(), resolution);
    std::vector<OracleSample> out(pts.size());
    const LowerLevelSolver solver(spec);

    auto work = [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            // Cold starts keep each value independent of the thread split.
            const LowerSolution s = solver.solve(pts[i], options.lower_tol);
            out[i] = {pts[i], spec.upper_objective(pts[i], s.y, s.u)};
        }
    };

    const std::size_t count = pts.size();
    const std::size_t threads =
        std::clamp<std::size_t>(static_cast<std::size_t>(std::max(options.threads, 1)), 1, count);
    if (threads == 1) {
        work(0, count);
    } else {
        std::vector<std::jthread> pool;
        const std::size_t chunk = (count + threads - 1) / threads;
        for (std::size_t t = 0; t < threads; ++t) {
            const std::size_t b = t * chunk, e = std::min(count, b + chunk);
            if (b < e) pool.emplace_back(work, b, e);
        }
    }
    return out;
}

OracleResult grid_search(const ProblemSpec& spec, int resolution, OracleOptions options) {
    return best_of(spec, landscape(spec, resolution, options), resolution);
}

OracleResult best_of(const ProblemSpec& spec, const std::vector<OracleSample>& samples,
                     int resolution) {
    if (samples.empty()) throw ValidationError("oracle: no samples");
    OracleResult r;
    r.resolution = resolution;
    r.sample_count = static_cast<long>(samples.size());
    const OracleSample* best = nullptr;
    for (const OracleSample& s : samples) {
        // Ties go to the lexicographically smaller x.
        if (best == nullptr || s.value < best->value ||
            (s.value == best->value && s.x < best->x))
            best = &s;
    }
    r.best_x = best->x;
    r.best_value = best->value;

    const double spacing = 1.0 / resolution;
    for (std::size_t i = 1; i < samples.size(); ++i) {
        const double dx = norm_inf(sub(samples[i].x, samples[i - 1].x));
        const double width = spec.x_ad().kind() == XSetKind::simplex
                                 ? spacing
                                 : spacing * norm_inf(sub(spec.x_ad().upper(), spec.x_ad().lower()));
        if (dx <= width * (1.0 + 1e-9))
            r.continuity_modulus = std::max(
                r.continuity_modulus, std::abs(samples[i].value - samples[i - 1].value) / dx);
    }
    return r;
}

OracleVerdict compare(const ProblemSpec& spec, double candidate_value, int resolution,
                      OracleOptions options) {
    OracleVerdict v;
    v.oracle = grid_search(spec, resolution, options);
    v.candidate_value = candidate_value;
    v.gap_to_oracle = candidate_value - v.oracle.best_value;
    return v;
}

}  // namespace ioc
