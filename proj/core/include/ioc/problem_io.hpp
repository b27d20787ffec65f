#pragma once

// JSON problem files.
//
//   {
//     "grid": {"N": 64},
//     "sigma": 0.01,
//     "lower_objective": {"kind": "target_type", "targets": [<gf>, ...]}
//                     | {"kind": "pointwise", "points": [w1, ...], "desired": <gf>},
//     "upper_objective": {"c_y": 1, "y_o": <gf>, "c_u": 1, "u_o": <gf>, "gamma": 0},
//     "x_ad": {"kind": "simplex", "n": 2} | {"kind": "box", "bounds": {"lower": [...], "upper": [...]}},
//     "u_bounds": {"ua": <gf>, "ub": <gf>, "allow_infinite": false},
//     "tolerances": {"solver_tol": 1e-10, "active_tol": 1e-6},
//     "x_star": [0.3, 0.7]                                   (optional)
//   }
//
// A grid function <gf> is an array of N numbers (entries may be the strings
// "inf" / "-inf") or a generator string: "sin_pi", "sin_2pi", "const:<v>".
// Measurement points are coordinates in (0, 1) snapped to the nearest node.

#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "ioc/problem.hpp"

namespace ioc {

/// Evaluates a grid-function spec (array or generator string) on the grid.
Vec grid_function_from_json(const Grid& g, const nlohmann::json& spec, const std::string& what);
/// Arrays of numbers; infinite entries are written as "inf" / "-inf".
nlohmann::json grid_function_to_json(std::span<const double> v);

ProblemSpec problem_from_json(const nlohmann::json& doc);
nlohmann::json problem_to_json(const ProblemSpec& spec);

ProblemSpec load_problem(const std::filesystem::path& path);
void save_problem(const ProblemSpec& spec, const std::filesystem::path& path);

/// Writes text to path via a temporary sibling and rename.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

}  // namespace ioc
