#pragma once

// Exhaustive lattice search of the reduced upper objective
// x -> F(x, psi^y(x), psi^u(x)) over X_ad, for n <= 3.

#include "ioc/problem.hpp"

namespace ioc {

struct OracleSample {
    Vec x;
    double value = 0.0;
};

struct OracleResult {
    Vec best_x;
    double best_value = 0.0;
    long sample_count = 0;
    int resolution = 0;
    /// Largest |F(x) - F(x')| / |x - x'|_inf over lattice neighbours in enumeration order.
    double continuity_modulus = 0.0;
};

struct OracleOptions {
    double lower_tol = 1e-12;
    int threads = 1;
};

/// Lattice points with spacing 1/resolution (barycentric on the simplex,
/// tensor on the box), in lexicographic order of their integer coordinates.
std::vector<Vec> oracle_lattice(const AdmissibleSetX& x_ad, int resolution);

/// Reduced objective at every lattice point, in lattice order.
std::vector<OracleSample> landscape(const ProblemSpec& spec, int resolution,
                                    OracleOptions options = {});

/// Best sample (ties to the lexicographically smallest x) and continuity modulus.
OracleResult best_of(const ProblemSpec& spec, const std::vector<OracleSample>& samples,
                     int resolution);

/// Throws ValidationError for n > 3 or resolution < 2.
OracleResult grid_search(const ProblemSpec& spec, int resolution, OracleOptions options = {});

struct OracleVerdict {
    OracleResult oracle;
    double candidate_value = 0.0;
    double gap_to_oracle = 0.0;  // candidate - oracle best; negative if the candidate wins
};

OracleVerdict compare(const ProblemSpec& spec, double candidate_value, int resolution,
                      OracleOptions options = {});

/// F(x, psi^y(x), psi^u(x)) with a tight lower-level solve.
double reduced_objective(const ProblemSpec& spec, std::span<const double> x,
                         double lower_tol = 1e-12);

}  // namespace ioc
