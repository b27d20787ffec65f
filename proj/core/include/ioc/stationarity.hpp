#pragma once

// W/C/S stationarity certification of a candidate (x, y, u) for the bilevel
// problem. Pointwise a.e. conditions are evaluated nodewise as max
// violations; function-valued equations use the weighted grid norm.

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include "ioc/lower_level.hpp"

namespace ioc {

struct CandidatePoint {
    Vec x;
    Vec y;
    Vec u;
};

struct StationarityMultipliers {
    Vec z;
    Vec mu;
    Vec p;
    Vec rho;
    Vec lambda;
    Vec w;
    Vec xi;
};

struct ActiveSets {
    std::vector<int> I_a_plus;   // u_i > ua_i + tol
    std::vector<int> I_b_minus;  // u_i < ub_i - tol
    std::vector<int> biactive_a;
    std::vector<int> biactive_b;
    std::vector<int> inactive;   // I_a_plus and I_b_minus
    double tol_act = 0.0;
};

ActiveSets active_sets(const ProblemSpec& spec, std::span<const double> u,
                       std::span<const double> lambda, double tol_act);

enum class Stationarity { none, W, C, S };

std::string_view to_string(Stationarity s) noexcept;

enum class Condition {
    CSt_x,
    CSt_y,
    CSt_u,
    CSt_p,
    CSt_z,
    CSt_ll_y,
    CSt_ll_u,
    CSt_ll_sign_a,
    CSt_ll_sign_b,
    CSt_xi,
    CSt_w,
    CSt_clarke,
    CSt_strong_a,
    CSt_strong_b,
    M_diag_a,
    M_diag_b,
};

inline constexpr int kConditionCount = 16;

std::string_view to_string(Condition c) noexcept;

struct StationarityCertificate {
    std::array<double, kConditionCount> residuals{};
    Stationarity classification = Stationarity::none;
    double tol = 0.0;
    ActiveSets sets;

    double operator[](Condition c) const { return residuals[static_cast<int>(c)]; }
    /// Largest residual among the conditions required for W and C.
    double max_c_residual() const;
};

struct ClassifyOptions {
    double tol = 1e-5;
    double tol_act = -1.0;  // negative: use the problem's active tolerance
};

/// Throws InfeasibleError (message lists every failed check) when the point is
/// not feasible for the bilevel problem, DimensionError on size mismatches.
StationarityCertificate classify(const ProblemSpec& spec, const CandidatePoint& point,
                                 const StationarityMultipliers& m, ClassifyOptions options = {});

}  // namespace ioc
