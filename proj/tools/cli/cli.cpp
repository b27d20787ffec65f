#include "cli.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>

#include "ioc/default_instance.hpp"
#include "ioc/problem_io.hpp"
#include "ioc/serialize.hpp"

#ifndef IOC_TOOL_VERSION
#define IOC_TOOL_VERSION "unknown"
#endif

namespace ioc::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Common {
    std::string problem;
    std::string out = ".";
    std::optional<double> solver_tol;
    std::optional<double> active_tol;
};

struct Loaded {
    ProblemSpec spec;
    std::string digest;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json parse_json(const std::string& text, const std::string& what) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ValidationError(what + " is not valid JSON: " + e.what());
    }
}

Loaded load(const Common& c) {
    if (c.problem.empty()) throw ValidationError("--problem is required");
    const std::string bytes = read_file(c.problem);
    ProblemSpec spec = problem_from_json(parse_json(bytes, "problem file " + c.problem));
    if (c.solver_tol || c.active_tol) {
        Tolerances t = spec.tolerances();
        if (c.solver_tol) t.solver_tol = *c.solver_tol;
        if (c.active_tol) t.active_tol = *c.active_tol;
        if (!(t.solver_tol > 0.0) || !(t.active_tol > 0.0))
            throw ValidationError("tolerances must be positive");
        spec = spec.with_tolerances(t);
    }
    return {std::move(spec), fnv1a_hex(bytes)};
}

Vec parse_list(const std::string& text, const char* flag) {
    Vec v;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        char* end = nullptr;
        const double d = std::strtod(item.c_str(), &end);
        if (item.empty() || end == item.c_str() || *end != '\0')
            throw ValidationError(std::string(flag) + ": cannot parse '" + item + "'");
        v.push_back(d);
    }
    if (v.empty()) throw ValidationError(std::string(flag) + " is empty");
    return v;
}

class Writer {
public:
    Writer(const std::string& dir, std::string command, std::string digest, json params)
        : dir_(dir) {
        manifest_.command = std::move(command);
        manifest_.problem_digest = std::move(digest);
        manifest_.parameters = std::move(params);
        manifest_.tool_version = IOC_TOOL_VERSION;
        manifest_.timestamp = utc_timestamp();
        fs::create_directories(dir_);
    }

    void text(const std::string& name, const std::string& contents) {
        write_file_atomic(dir_ / name, contents);
        manifest_.outputs.push_back(name);
    }
    void doc(const std::string& name, const json& j) { text(name, dump(j)); }

    void finish(std::ostream& out) {
        const std::string name = "manifest_" + manifest_.command + ".json";
        write_file_atomic(dir_ / name, dump(manifest_.to_json()));
        for (const std::string& o : manifest_.outputs) out << (dir_ / o).string() << '\n';
    }

private:
    fs::path dir_;
    RunManifest manifest_;
};

std::string lower_csv(const LowerSolution& s, const Grid& g) {
    std::ostringstream os;
    os.precision(17);
    os << "i,node,y,u,p,lambda\n";
    for (int i = 0; i < g.size(); ++i)
        os << i << ',' << g.node(i) << ',' << s.y[i] << ',' << s.u[i] << ',' << s.p[i] << ','
           << s.lambda[i] << '\n';
    return os.str();
}

RelaxedOptions relaxed_options(double stat_tol, double feas_tol, double comp_tol) {
    RelaxedOptions o;
    o.stat_tol = stat_tol;
    o.feas_tol = feas_tol;
    o.comp_tol = comp_tol;
    return o;
}

int report(const std::string& dir, const std::string& kind, const std::string& message, int code,
           std::ostream& err, json extra = json::object()) {
    json e = {{"error", kind}, {"message", message}, {"exit_code", code}};
    for (auto& [k, v] : extra.items()) e[k] = v;
    err << e.dump() << '\n';
    try {
        if (!dir.empty()) {
            fs::create_directories(dir);
            write_file_atomic(fs::path(dir) / "error.json", dump(e));
        }
    } catch (...) {
        // The message already went to stderr.
    }
    return code;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Inverse optimal control toolkit: lower solves, value function, relaxation path, "
                 "stationarity certificates"};
    app.set_version_flag("--version", std::string(IOC_TOOL_VERSION));
    app.require_subcommand(1);

    Common c;
    auto add_common = [&c](CLI::App* sub, bool needs_problem = true) {
        if (needs_problem) sub->add_option("--problem", c.problem, "Problem file (JSON)")->required();
        sub->add_option("--out", c.out, "Output directory");
        sub->add_option("--solver-tol", c.solver_tol, "Override the lower-level tolerance");
        sub->add_option("--active-tol", c.active_tol, "Override the active-set tolerance");
    };

    // lower
    auto* lower = app.add_subcommand("lower", "Solve the lower-level problem at one parameter");
    add_common(lower);
    std::string x_text;
    std::optional<double> tol;
    lower->add_option("--x", x_text, "Parameter, comma separated")->required();
    lower->add_option("--tol", tol, "Solver tolerance");

    // value
    auto* value = app.add_subcommand("value", "Sample the optimal value function");
    add_common(value);
    value->add_option("--x", x_text, "Single parameter, comma separated");
    int samples = 0;
    std::uint64_t seed = 1;
    std::string slice_a, slice_b;
    int slice_count = 11;
    value->add_option("--samples", samples, "Number of random parameters in X_ad")
        ->check(CLI::NonNegativeNumber);
    value->add_option("--seed", seed, "Seed for random sampling");
    value->add_option("--slice-a", slice_a, "Slice start point");
    value->add_option("--slice-b", slice_b, "Slice end point");
    value->add_option("--count", slice_count, "Points on the slice")->check(CLI::PositiveNumber);

    // relax
    auto* relax = app.add_subcommand("relax", "Solve one relaxed program");
    add_common(relax);
    double eps = 1e-3;
    double stat_tol = 1e-7, feas_tol = 1e-8, comp_tol = 1e-8;
    relax->add_option("--eps", eps, "Relaxation parameter")->required();
    auto add_relaxed_tols = [&](CLI::App* sub) {
        sub->add_option("--stat-tol", stat_tol, "Relaxed stationarity tolerance");
        sub->add_option("--feas-tol", feas_tol, "Value-constraint feasibility tolerance");
        sub->add_option("--comp-tol", comp_tol, "Complementarity tolerance");
    };
    add_relaxed_tols(relax);

    // path
    auto* path = app.add_subcommand("path", "Run the relaxation path and extract a candidate");
    add_common(path);
    PathSchedule schedule;
    path->add_option("--eps0", schedule.eps0, "Initial relaxation parameter");
    path->add_option("--ratio", schedule.ratio, "Reduction factor in (0, 1)");
    path->add_option("--steps", schedule.steps, "Number of reductions K");
    add_relaxed_tols(path);

    // certify
    auto* certify = app.add_subcommand("certify", "Classify a candidate as W/C/S stationary");
    add_common(certify);
    std::string point_file, multiplier_file;
    double cert_tol = 1e-5;
    certify->add_option("--point", point_file, "Candidate point JSON")->required();
    certify->add_option("--multipliers", multiplier_file, "Multiplier JSON")->required();
    certify->add_option("--tol", cert_tol, "Classification tolerance");

    // oracle
    auto* oracle = app.add_subcommand("oracle", "Lattice search of the reduced objective (n <= 3)");
    add_common(oracle);
    int resolution = 200;
    int threads = 1;
    std::optional<double> candidate_value;
    oracle->add_option("--resolution", resolution, "Lattice resolution");
    oracle->add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);
    oracle->add_option("--candidate-value", candidate_value, "Compare against this upper value");
    oracle->add_option("--tol", tol, "Lower-level tolerance inside the oracle (default 1e-12)");

    // make-default
    auto* make_default = app.add_subcommand("make-default", "Write the constructed default instance");
    add_common(make_default, false);
    std::string variant = "simplex";
    make_default->add_option("--variant", variant, "simplex or box")
        ->check(CLI::IsMember({"simplex", "box"}));

    std::vector<const char*> argv{"iocsolve"};
    for (const std::string& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kValidation;
    }

    try {
        if (lower->parsed()) {
            Loaded l = load(c);
            const Vec x = parse_list(x_text, "--x");
            const LowerLevelSolver solver(l.spec);
            const double t = tol.value_or(l.spec.tolerances().solver_tol);
            const LowerSolution s = solver.solve(x, t);
            json doc = to_json(s);
            doc["kkt"] = to_json(solver.kkt_residuals(s.x, s.y, s.u, s.p, s.lambda));
            Writer w(c.out, "lower", l.digest, {{"x", x}, {"tol", t}});
            w.doc("lower.json", doc);
            w.text("lower.csv", lower_csv(s, l.spec.grid()));
            w.finish(out);
        } else if (value->parsed()) {
            Loaded l = load(c);
            ValueFunction vf(l.spec);
            json params = {{"seed", seed}};
            std::vector<std::pair<std::string, std::string>> files;
            const bool slice = !slice_a.empty() || !slice_b.empty();
            if (slice && (slice_a.empty() || slice_b.empty()))
                throw ValidationError("--slice-a and --slice-b must be given together");
            if (!slice && x_text.empty() && samples == 0)
                throw ValidationError("value: give --x, --samples or --slice-a/--slice-b");
            json list = json::array();
            if (!x_text.empty()) {
                const Vec x = parse_list(x_text, "--x");
                if (!l.spec.x_ad().contains(x, 1e-10)) throw DomainError("--x is not in X_ad");
                list.push_back(to_json(vf.sample(x)));
                params["x"] = x;
            }
            if (samples > 0) {
                std::mt19937_64 rng(seed);
                for (int i = 0; i < samples; ++i)
                    list.push_back(to_json(vf.sample(l.spec.x_ad().sample(rng))));
                params["samples"] = samples;
            }
            if (!list.empty()) files.emplace_back("value.json", dump({{"samples", list}}));
            if (slice) {
                const Vec a = parse_list(slice_a, "--slice-a");
                const Vec b = parse_list(slice_b, "--slice-b");
                for (const Vec* v : {&a, &b})
                    if (!l.spec.x_ad().contains(*v, 1e-10))
                        throw DomainError("slice endpoint not in X_ad");
                files.emplace_back("value_slice.csv",
                                   value_slice_csv(value_slice(vf, a, b, slice_count)));
                params["slice_a"] = a;
                params["slice_b"] = b;
                params["count"] = slice_count;
            }
            Writer w(c.out, "value", l.digest, params);
            for (const auto& [name, text] : files) w.text(name, text);
            w.finish(out);
        } else if (relax->parsed()) {
            Loaded l = load(c);
            const RelaxedSolver solver(l.spec, relaxed_options(stat_tol, feas_tol, comp_tol));
            RelaxedSolution s;
            try {
                s = solver.solve(eps);
            } catch (const RelaxedConvergenceError& e) {
                return report(c.out, "convergence", e.what(), kNumerical, err,
                              {{"best", to_json(e.best())}, {"residuals", to_json(e.residuals())}});
            }
            json doc = to_json(s);
            doc["residuals"] = to_json(solver.residuals(s));
            Writer w(c.out, "relax", l.digest,
                     {{"eps", eps}, {"stat_tol", stat_tol}, {"feas_tol", feas_tol}, {"comp_tol", comp_tol}});
            w.doc("relaxed.json", doc);
            w.finish(out);
        } else if (path->parsed()) {
            Loaded l = load(c);
            const PathTrace t = run_path(l.spec, schedule, relaxed_options(stat_tol, feas_tol, comp_tol));
            Writer w(c.out, "path", l.digest,
                     {{"eps0", schedule.eps0}, {"ratio", schedule.ratio}, {"steps", schedule.steps},
                      {"stat_tol", stat_tol}, {"feas_tol", feas_tol}, {"comp_tol", comp_tol}});
            w.doc("path.json", to_json(t));
            w.text("path.csv", path_csv(t));
            if (t.limit) {
                w.doc("candidate_point.json", to_json(t.limit->point));
                w.doc("candidate_multipliers.json", to_json(t.limit->multipliers));
            }
            w.finish(out);
            if (!t.limit)
                return report(c.out, "insufficient_path", "path has fewer than two successful iterates: " + t.failure,
                              kNumerical, err);
        } else if (certify->parsed()) {
            Loaded l = load(c);
            const CandidatePoint pt =
                candidate_point_from_json(parse_json(read_file(point_file), point_file));
            const StationarityMultipliers m =
                multipliers_from_json(parse_json(read_file(multiplier_file), multiplier_file));
            ClassifyOptions o;
            o.tol = cert_tol;
            const StationarityCertificate cert = classify(l.spec, pt, m, o);
            Writer w(c.out, "certify", l.digest,
                     {{"point", point_file}, {"multipliers", multiplier_file}, {"tol", cert_tol}});
            w.doc("certificate.json", to_json(cert));
            w.finish(out);
        } else if (oracle->parsed()) {
            Loaded l = load(c);
            OracleOptions o;
            o.threads = threads;
            if (tol) o.lower_tol = *tol;
            const auto land = landscape(l.spec, resolution, o);
            const OracleResult r = best_of(l.spec, land, resolution);
            json doc = to_json(r);
            if (candidate_value) {
                doc["candidate_value"] = *candidate_value;
                doc["gap_to_oracle"] = *candidate_value - r.best_value;
            }
            Writer w(c.out, "oracle", l.digest,
                     {{"resolution", resolution}, {"threads", threads}, {"lower_tol", o.lower_tol}});
            w.doc("oracle.json", doc);
            w.text("landscape.csv", landscape_csv(land));
            w.finish(out);
        } else if (make_default->parsed()) {
            const ProblemSpec spec =
                variant == "box" ? make_box_variant() : make_default_problem();
            const std::string text = dump(problem_to_json(spec));
            Writer w(c.out, "make-default", fnv1a_hex(text), {{"variant", variant}});
            w.text(variant == "box" ? "default_box_problem.json" : "default_problem.json", text);
            w.finish(out);
        }
    } catch (const ConvergenceError& e) {
        return report(c.out, "convergence", e.what(), kNumerical, err,
                      {{"iterations", e.iterations()}, {"residual", e.residual()}});
    } catch (const ValidationError& e) {
        return report(c.out, "validation", e.what(), kValidation, err);
    } catch (const std::exception& e) {
        return report(c.out, "failure", e.what(), kFailure, err);
    }
    return kOk;
}

}  // namespace ioc::cli
