#include "ioc/path_driver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace ioc {

void PathSchedule::validate() const {
    if (!(eps0 > 0.0) || !std::isfinite(eps0)) throw DomainError("path: eps0 must be positive");
    if (!(ratio > 0.0 && ratio < 1.0)) throw DomainError("path: ratio must lie in (0, 1)");
    if (steps < 2) throw DomainError("path: at least two steps are required");
}

double PathSchedule::eps(int k) const { return eps0 * std::pow(ratio, k); }

namespace {

PathRecord make_record(const ProblemSpec& spec, const RelaxedSolver& solver, int k,
                       RelaxedSolution sol) {
    const Grid& g = spec.grid();
    PathRecord r;
    r.k = k;
    r.eps = sol.eps;
    r.residuals = solver.residuals(sol);
    r.lower = *solver.value_function().sample_uncached(sol.x).lower;
    const double a = sol.alpha;

    Vec dy = sub(sol.y, r.lower.y);
    Vec du = sub(sol.u, r.lower.u);
    r.mu = scaled(a, dy);
    r.w = scaled(a, du);
    r.rho = sol.p;
    axpy(-a, r.lower.p, r.rho);
    r.xi = sol.lambda;
    axpy(-a, r.lower.lambda, r.xi);
    r.lower_distance = norm(g, du);
    r.proof_bound = 0.5 * spec.sigma() * r.lower_distance * r.lower_distance;
    r.relaxed = std::move(sol);
    return r;
}

double recombined_norm(const Grid& g, const PathRecord& r) {
    return std::max({norm2(r.relaxed.z), norm(g, r.mu), norm(g, r.w), norm(g, r.rho),
                     norm(g, r.xi)});
}

void summarize(const ProblemSpec& spec, PathTrace& t, const RelaxedOptions& opt) {
    const auto& rec = t.records;
    const int m = static_cast<int>(rec.size());

    // Cauchy quality over the trailing five steps.
    if (m >= 6) {
        bool ok = true;
        for (int k = m - 4; k < m; ++k) {
            const double slack = 1e-12;
            ok = ok && rec[k].step_x <= rec[k - 1].step_x + slack &&
                 rec[k].step_u <= rec[k - 1].step_u + slack;
        }
        t.cauchy_ok = ok;
    }

    // Optimal values should not decrease as the feasible sets shrink.
    for (int k = 1; k < m; ++k) {
        const double prev = rec[k - 1].relaxed.upper_value;
        const double cur = rec[k].relaxed.upper_value;
        const bool comp_ok = rec[k - 1].residuals.r_comp <= opt.comp_tol &&
                             rec[k].residuals.r_comp <= opt.comp_tol;
        if (comp_ok && cur < prev - 1e-8 * std::max(1.0, std::abs(prev))) {
            std::ostringstream os;
            os << "upper value decreased at k=" << rec[k].k << " (" << prev << " -> " << cur
               << "); iterate is likely a local minimum";
            t.warnings.push_back(os.str());
        }
    }

    // Boundedness of the recombined multipliers.
    if (m >= 2) {
        double first = 0.0, second = 0.0;
        bool finite = true;
        for (int k = 0; k < m; ++k) {
            const double v = recombined_norm(spec.grid(), rec[k]);
            finite = finite && std::isfinite(v);
            (k < m / 2 ? first : second) = std::max(k < m / 2 ? first : second, v);
        }
        t.multiplier_growth = second / std::max(first, 1e-12);
        t.multipliers_bounded = finite && (second <= 1e-8 || t.multiplier_growth <= 100.0);
        if (!t.multipliers_bounded)
            t.warnings.push_back("recombined multipliers grow along the path");
    }
}

}  // namespace

PathTrace run_path(const ProblemSpec& spec, PathSchedule schedule, RelaxedOptions options) {
    schedule.validate();
    RelaxedSolver solver(spec, options);
    PathTrace trace;
    trace.schedule = schedule;

    const RelaxedSolution* warm = nullptr;
    for (int k = 0; k <= schedule.steps; ++k) {
        RelaxedSolution sol;
        try {
            sol = solver.solve(schedule.eps(k), warm);
        } catch (const Error& e) {
            trace.failed_at = k;
            trace.failure = e.what();
            break;
        }
        PathRecord rec = make_record(spec, solver, k, std::move(sol));
        if (!trace.records.empty()) {
            const PathRecord& prev = trace.records.back();
            rec.step_x = norm2(sub(rec.relaxed.x, prev.relaxed.x));
            rec.step_u = norm(spec.grid(), sub(rec.relaxed.u, prev.relaxed.u));
        }
        trace.records.push_back(std::move(rec));
        warm = &trace.records.back().relaxed;
    }

    summarize(spec, trace, options);
    if (trace.successes() >= 2) trace.limit = extract_candidate(trace);
    return trace;
}

PathLimit extract_candidate(const PathTrace& trace) {
    if (trace.successes() < 2)
        throw InsufficientPathError("path has fewer than two successful iterates");
    const PathRecord& last = trace.records.back();
    PathLimit lim;
    lim.point = {last.relaxed.x, last.lower.y, last.lower.u};
    lim.multipliers.z = last.relaxed.z;
    lim.multipliers.mu = last.mu;
    lim.multipliers.w = last.w;
    lim.multipliers.rho = last.rho;
    lim.multipliers.xi = last.xi;
    lim.multipliers.p = last.lower.p;
    lim.multipliers.lambda = last.lower.lambda;
    return lim;
}

}  // namespace ioc
