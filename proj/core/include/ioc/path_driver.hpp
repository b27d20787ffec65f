#pragma once

// Continuation eps_k = eps0 * ratio^k, k = 0..K, over relaxed programs with
// warm starts, plus the multiplier recombinations whose limits enter the
// stationarity system.

#include <optional>
#include <string>
#include <utility>

#include "ioc/relaxed_solver.hpp"
#include "ioc/stationarity.hpp"

namespace ioc {

struct PathSchedule {
    double eps0 = 1.0;
    double ratio = 0.5;
    int steps = 20;  // K; the path has K + 1 solves

    void validate() const;
    double eps(int k) const;
};

struct PathRecord {
    int k = 0;
    double eps = 0.0;
    RelaxedSolution relaxed;
    RelaxedKktResiduals residuals;
    LowerSolution lower;  // lower-level solution at relaxed.x
    Vec mu;               // alpha (y - psi^y(x))
    Vec w;                // alpha (u - psi^u(x))
    Vec rho;              // p - alpha phi^p(x)
    Vec xi;               // lambda - alpha phi^lambda(x)
    double lower_distance = 0.0;  // ||u - psi^u(x)||
    double proof_bound = 0.0;     // (sigma/2) ||u - psi^u(x)||^2
    double step_x = 0.0;          // |x_k - x_{k-1}|, 0 at k = 0
    double step_u = 0.0;          // ||u_k - u_{k-1}||
};

struct PathLimit {
    CandidatePoint point;
    StationarityMultipliers multipliers;
};

struct PathTrace {
    PathSchedule schedule;
    std::vector<PathRecord> records;  // successful solves, in order
    std::optional<int> failed_at;     // index k of the first failed solve
    std::string failure;
    bool cauchy_ok = false;           // steps nonincreasing over the last five records
    bool multipliers_bounded = true;
    double multiplier_growth = 0.0;   // max norm, second half / first half
    std::vector<std::string> warnings;
    std::optional<PathLimit> limit;

    int successes() const noexcept { return static_cast<int>(records.size()); }
};

PathTrace run_path(const ProblemSpec& spec, PathSchedule schedule = {},
                   RelaxedOptions options = {});

/// Candidate point re-centred on the lower-level solution map at x_K.
/// Throws InsufficientPathError with fewer than two successful records.
PathLimit extract_candidate(const PathTrace& trace);

}  // namespace ioc
