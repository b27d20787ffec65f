#include "ioc/problem_io.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

namespace ioc {

using nlohmann::json;

namespace {

const json& require(const json& obj, const char* key, const std::string& where) {
    if (!obj.is_object() || !obj.contains(key)) {
        throw ValidationError(where + ": missing key '" + key + "'");
    }
    return obj.at(key);
}

double number(const json& v, const std::string& what) {
    if (v.is_number()) return v.get<double>();
    if (v.is_string()) {
        const std::string s = v.get<std::string>();
        if (s == "inf" || s == "+inf") return std::numeric_limits<double>::infinity();
        if (s == "-inf") return -std::numeric_limits<double>::infinity();
    }
    throw ValidationError(what + ": expected a number");
}

json number_to_json(double v) {
    if (std::isinf(v)) return v > 0 ? json("inf") : json("-inf");
    return json(v);
}

Vec number_array(const json& v, const std::string& what) {
    if (!v.is_array()) throw ValidationError(what + ": expected an array");
    Vec out;
    out.reserve(v.size());
    for (const auto& e : v) out.push_back(number(e, what));
    return out;
}

}  // namespace

Vec grid_function_from_json(const Grid& g, const json& spec, const std::string& what) {
    if (spec.is_array()) {
        Vec v = number_array(spec, what);
        if (v.size() != static_cast<std::size_t>(g.size())) {
            throw ValidationError(what + ": expected " + std::to_string(g.size()) +
                                  " values, got " + std::to_string(v.size()));
        }
        return v;
    }
    if (!spec.is_string()) throw ValidationError(what + ": expected an array or a generator name");
    const std::string name = spec.get<std::string>();
    Vec v(g.size());
    if (name == "sin_pi" || name == "sin_2pi") {
        const double k = name == "sin_pi" ? 1.0 : 2.0;
        for (int i = 0; i < g.size(); ++i) v[i] = std::sin(k * std::numbers::pi * g.node(i));
        return v;
    }
    if (name.rfind("const:", 0) == 0) {
        const std::string text = name.substr(6);
        char* end = nullptr;
        const double c = std::strtod(text.c_str(), &end);
        if (text.empty() || end != text.c_str() + text.size()) {
            throw ValidationError(what + ": bad constant in generator '" + name + "'");
        }
        std::fill(v.begin(), v.end(), c);
        return v;
    }
    throw ValidationError(what + ": unknown generator '" + name + "'");
}

json grid_function_to_json(std::span<const double> v) {
    json arr = json::array();
    for (double d : v) arr.push_back(number_to_json(d));
    return arr;
}

ProblemSpec problem_from_json(const json& doc) {
    if (!doc.is_object()) throw ValidationError("problem file: top level must be an object");
    try {
        const json& grid_j = require(doc, "grid", "problem");
        const int n_nodes = require(grid_j, "N", "grid").get<int>();
        const Grid grid = Grid::build(n_nodes);

        const double sigma = number(require(doc, "sigma", "problem"), "sigma");
        if (!(sigma > 0.0)) throw ValidationError("sigma must be positive");

        const json& lo = require(doc, "lower_objective", "problem");
        const std::string kind = require(lo, "kind", "lower_objective").get<std::string>();
        LowerObjective lower;
        if (kind == "target_type") {
            const json& targets = require(lo, "targets", "lower_objective");
            if (!targets.is_array() || targets.empty()) {
                throw ValidationError("lower_objective.targets must be a nonempty array");
            }
            std::vector<Vec> yd;
            for (std::size_t i = 0; i < targets.size(); ++i) {
                yd.push_back(grid_function_from_json(grid, targets[i],
                                                     "lower_objective.targets[" + std::to_string(i) + "]"));
            }
            lower = LowerObjective::target_type(std::move(yd));
        } else if (kind == "pointwise") {
            const Vec points = number_array(require(lo, "points", "lower_objective"),
                                            "lower_objective.points");
            if (points.empty()) throw ValidationError("lower_objective.points must be nonempty");
            std::vector<int> nodes;
            for (double w : points) {
                if (!(w > 0.0 && w < 1.0)) {
                    throw ValidationError("lower_objective.points must lie in (0, 1)");
                }
                nodes.push_back(grid.nearest_node(w));
            }
            lower = LowerObjective::pointwise(
                std::move(nodes),
                grid_function_from_json(grid, require(lo, "desired", "lower_objective"),
                                        "lower_objective.desired"));
        } else {
            throw ValidationError("lower_objective.kind must be 'target_type' or 'pointwise'");
        }
        const int n = lower.count();

        const json& up = require(doc, "upper_objective", "problem");
        UpperObjective upper;
        upper.c_y = number(require(up, "c_y", "upper_objective"), "c_y");
        upper.y_o = grid_function_from_json(grid, require(up, "y_o", "upper_objective"), "y_o");
        upper.c_u = number(require(up, "c_u", "upper_objective"), "c_u");
        upper.u_o = grid_function_from_json(grid, require(up, "u_o", "upper_objective"), "u_o");
        upper.gamma = up.contains("gamma") ? number(up.at("gamma"), "gamma") : 0.0;

        const json& xj = require(doc, "x_ad", "problem");
        const std::string xkind = require(xj, "kind", "x_ad").get<std::string>();
        AdmissibleSetX x_ad = AdmissibleSetX::simplex(n);
        if (xkind == "box") {
            const json& b = require(xj, "bounds", "x_ad");
            x_ad = AdmissibleSetX::box(number_array(require(b, "lower", "x_ad.bounds"), "x_ad.bounds.lower"),
                                       number_array(require(b, "upper", "x_ad.bounds"), "x_ad.bounds.upper"));
        } else if (xkind != "simplex") {
            throw ValidationError("x_ad.kind must be 'simplex' or 'box'");
        }
        if (xj.contains("n") && xj.at("n").get<int>() != n) {
            throw ValidationError("x_ad.n does not match the number of lower objective components");
        }

        const json& ubj = require(doc, "u_bounds", "problem");
        ControlBounds bounds;
        bounds.ua = grid_function_from_json(grid, require(ubj, "ua", "u_bounds"), "u_bounds.ua");
        bounds.ub = grid_function_from_json(grid, require(ubj, "ub", "u_bounds"), "u_bounds.ub");
        const bool allow_inf = ubj.value("allow_infinite", false);
        if (!allow_inf && bounds.has_infinite()) {
            throw ValidationError("u_bounds contain infinite values but allow_infinite is false");
        }

        Tolerances tol;
        if (doc.contains("tolerances")) {
            const json& t = doc.at("tolerances");
            if (t.contains("solver_tol")) tol.solver_tol = number(t.at("solver_tol"), "solver_tol");
            if (t.contains("active_tol")) tol.active_tol = number(t.at("active_tol"), "active_tol");
        }

        std::optional<Vec> x_star;
        if (doc.contains("x_star") && !doc.at("x_star").is_null()) {
            x_star = number_array(doc.at("x_star"), "x_star");
        }

        return ProblemSpec(grid, sigma, std::move(lower), std::move(upper), std::move(x_ad),
                           std::move(bounds), tol, std::move(x_star));
    } catch (const json::exception& e) {
        throw ValidationError(std::string("problem file schema violation: ") + e.what());
    }
}

json problem_to_json(const ProblemSpec& spec) {
    const Grid& g = spec.grid();
    json doc;
    doc["grid"] = {{"N", g.size()}};
    doc["sigma"] = spec.sigma();

    json lo;
    if (spec.lower().kind() == LowerKind::target_type) {
        lo["kind"] = "target_type";
        lo["targets"] = json::array();
        for (const Vec& t : spec.lower().targets()) lo["targets"].push_back(grid_function_to_json(t));
    } else {
        lo["kind"] = "pointwise";
        lo["points"] = json::array();
        for (int k : spec.lower().nodes()) lo["points"].push_back(g.node(k));
        lo["desired"] = grid_function_to_json(spec.lower().desired());
    }
    doc["lower_objective"] = lo;

    const UpperObjective& up = spec.upper();
    doc["upper_objective"] = {{"c_y", up.c_y},
                              {"y_o", grid_function_to_json(up.y_o)},
                              {"c_u", up.c_u},
                              {"u_o", grid_function_to_json(up.u_o)},
                              {"gamma", up.gamma}};

    const AdmissibleSetX& x_ad = spec.x_ad();
    if (x_ad.kind() == XSetKind::simplex) {
        doc["x_ad"] = {{"kind", "simplex"}, {"n", x_ad.dim()}};
    } else {
        doc["x_ad"] = {{"kind", "box"},
                       {"n", x_ad.dim()},
                       {"bounds", {{"lower", x_ad.lower()}, {"upper", x_ad.upper()}}}};
    }

    doc["u_bounds"] = {{"ua", grid_function_to_json(spec.bounds().ua)},
                       {"ub", grid_function_to_json(spec.bounds().ub)},
                       {"allow_infinite", spec.bounds().has_infinite()}};
    doc["tolerances"] = {{"solver_tol", spec.tolerances().solver_tol},
                         {"active_tol", spec.tolerances().active_tol}};
    if (spec.x_star()) doc["x_star"] = *spec.x_star();
    return doc;
}

ProblemSpec load_problem(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open problem file " + path.string());
    json doc;
    try {
        in >> doc;
    } catch (const json::parse_error& e) {
        throw ValidationError("problem file " + path.string() + " is not valid JSON: " + e.what());
    }
    return problem_from_json(doc);
}

void save_problem(const ProblemSpec& spec, const std::filesystem::path& path) {
    write_file_atomic(path, problem_to_json(spec).dump(2) + "\n");
}

void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot write " + tmp.string());
        out << contents;
        if (!out) throw Error("write failed for " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

}  // namespace ioc
