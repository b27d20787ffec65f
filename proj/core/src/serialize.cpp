#include "ioc/serialize.hpp"

#include <cinttypes>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <iomanip>
#include <sstream>

#include "ioc/problem_io.hpp"

namespace ioc {

using nlohmann::json;

namespace {

json gf(std::span<const double> v) { return grid_function_to_json(v); }

// Doubles in CSV use round-trip precision.
std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

Vec read_vec(const json& doc, const char* key) {
    if (!doc.contains(key)) throw ValidationError(std::string("missing key '") + key + "'");
    const json& a = doc.at(key);
    if (!a.is_array()) throw ValidationError(std::string("key '") + key + "' must be an array");
    Vec v;
    v.reserve(a.size());
    for (const json& e : a) {
        if (!e.is_number()) throw ValidationError(std::string("key '") + key + "' must hold numbers");
        v.push_back(e.get<double>());
    }
    return v;
}

json index_list(const std::vector<int>& v) { return json(v); }

}  // namespace

json to_json(const LowerKktResiduals& r) {
    return {{"state", r.state},
            {"adjoint", r.adjoint},
            {"gradient", r.gradient},
            {"normal_cone", r.normal_cone},
            {"feasibility", r.feasibility},
            {"max", r.max()}};
}

json to_json(const LowerSolution& s) {
    return {{"x", s.x},
            {"objective", s.objective},
            {"fixed_point_residual", s.fixed_point_residual},
            {"kkt_residual", s.kkt_residual},
            {"iterations", s.iterations},
            {"y", gf(s.y)},
            {"u", gf(s.u)},
            {"p", gf(s.p)},
            {"lambda", gf(s.lambda)}};
}

json to_json(const RelaxedKktResiduals& r) {
    return {{"r_x", r.r_x},       {"r_z", r.r_z},         {"r_y", r.r_y},
            {"r_u", r.r_u},       {"r_comp", r.r_comp},   {"r_alpha", r.r_alpha},
            {"r_lambda", r.r_lambda}, {"r_feas", r.r_feas}, {"r_state", r.r_state},
            {"max", r.max()}};
}

json to_json(const RelaxedSolution& s) {
    return {{"eps", s.eps},
            {"x", s.x},
            {"alpha", s.alpha},
            {"z", s.z},
            {"upper_value", s.upper_value},
            {"gap", s.gap},
            {"stationarity", s.stationarity},
            {"beta", s.beta},
            {"inner_iterations", s.inner_iterations},
            {"outer_iterations", s.outer_iterations},
            {"y", gf(s.y)},
            {"u", gf(s.u)},
            {"p", gf(s.p)},
            {"lambda", gf(s.lambda)}};
}

json to_json(const CandidatePoint& p) {
    return {{"x", p.x}, {"y", gf(p.y)}, {"u", gf(p.u)}};
}

json to_json(const StationarityMultipliers& m) {
    return {{"z", m.z},          {"mu", gf(m.mu)}, {"p", gf(m.p)},  {"rho", gf(m.rho)},
            {"lambda", gf(m.lambda)}, {"w", gf(m.w)},   {"xi", gf(m.xi)}};
}

CandidatePoint candidate_point_from_json(const json& doc) {
    if (!doc.is_object()) throw ValidationError("candidate point must be a JSON object");
    return {read_vec(doc, "x"), read_vec(doc, "y"), read_vec(doc, "u")};
}

StationarityMultipliers multipliers_from_json(const json& doc) {
    if (!doc.is_object()) throw ValidationError("multipliers must be a JSON object");
    StationarityMultipliers m;
    m.z = read_vec(doc, "z");
    m.mu = read_vec(doc, "mu");
    m.p = read_vec(doc, "p");
    m.rho = read_vec(doc, "rho");
    m.lambda = read_vec(doc, "lambda");
    m.w = read_vec(doc, "w");
    m.xi = read_vec(doc, "xi");
    return m;
}

json to_json(const PathTrace& t) {
    json records = json::array();
    for (const PathRecord& r : t.records) {
        records.push_back({{"k", r.k},
                           {"eps", r.eps},
                           {"x", r.relaxed.x},
                           {"upper_value", r.relaxed.upper_value},
                           {"gap", r.relaxed.gap},
                           {"alpha", r.relaxed.alpha},
                           {"z", r.relaxed.z},
                           {"lower_distance", r.lower_distance},
                           {"proof_bound", r.proof_bound},
                           {"step_x", r.step_x},
                           {"step_u", r.step_u},
                           {"inner_iterations", r.relaxed.inner_iterations},
                           {"outer_iterations", r.relaxed.outer_iterations},
                           {"residuals", to_json(r.residuals)}});
    }
    json doc = {{"schedule",
                 {{"eps0", t.schedule.eps0}, {"ratio", t.schedule.ratio}, {"steps", t.schedule.steps}}},
                {"successes", t.successes()},
                {"failed_at", t.failed_at ? json(*t.failed_at) : json(nullptr)},
                {"failure", t.failure},
                {"cauchy_ok", t.cauchy_ok},
                {"multipliers_bounded", t.multipliers_bounded},
                {"multiplier_growth", t.multiplier_growth},
                {"warnings", t.warnings},
                {"records", records}};
    if (t.limit) {
        doc["limit"] = {{"point", to_json(t.limit->point)},
                        {"multipliers", to_json(t.limit->multipliers)}};
    } else {
        doc["limit"] = nullptr;
    }
    return doc;
}

json to_json(const ActiveSets& s) {
    return {{"tol_act", s.tol_act},
            {"I_a_plus", index_list(s.I_a_plus)},
            {"I_b_minus", index_list(s.I_b_minus)},
            {"biactive_a", index_list(s.biactive_a)},
            {"biactive_b", index_list(s.biactive_b)},
            {"inactive", index_list(s.inactive)}};
}

json to_json(const StationarityCertificate& c) {
    json res = json::object();
    for (int i = 0; i < kConditionCount; ++i)
        res[std::string(to_string(static_cast<Condition>(i)))] = c.residuals[i];
    return {{"classification", std::string(to_string(c.classification))},
            {"tol", c.tol},
            {"max_c_residual", c.max_c_residual()},
            {"residuals", res},
            {"active_sets", to_json(c.sets)}};
}

json to_json(const OracleResult& r) {
    return {{"best_x", r.best_x},
            {"best_value", r.best_value},
            {"sample_count", r.sample_count},
            {"resolution", r.resolution},
            {"continuity_modulus", r.continuity_modulus}};
}

json to_json(const OracleVerdict& v) {
    return {{"oracle", to_json(v.oracle)},
            {"candidate_value", v.candidate_value},
            {"gap_to_oracle", v.gap_to_oracle}};
}

json to_json(const ValueSample& s) {
    return {{"x", s.x}, {"phi", s.phi}, {"grad_phi", s.grad_phi}};
}

std::string path_csv(const PathTrace& t) {
    std::ostringstream os;
    os << "k,eps,upper_value,gap,alpha,lower_distance,proof_bound,step_x,step_u,"
          "r_x,r_z,r_y,r_u,r_comp,r_lambda,r_feas\n";
    for (const PathRecord& r : t.records) {
        const RelaxedKktResiduals& q = r.residuals;
        os << r.k << ',' << num(r.eps) << ',' << num(r.relaxed.upper_value) << ','
           << num(r.relaxed.gap) << ',' << num(r.relaxed.alpha) << ',' << num(r.lower_distance)
           << ',' << num(r.proof_bound) << ',' << num(r.step_x) << ',' << num(r.step_u) << ','
           << num(q.r_x) << ',' << num(q.r_z) << ',' << num(q.r_y) << ',' << num(q.r_u) << ','
           << num(q.r_comp) << ',' << num(q.r_lambda) << ',' << num(q.r_feas) << '\n';
    }
    return os.str();
}

std::string landscape_csv(const std::vector<OracleSample>& samples) {
    std::ostringstream os;
    const std::size_t n = samples.empty() ? 0 : samples.front().x.size();
    for (std::size_t i = 0; i < n; ++i) os << "x_" << i + 1 << ',';
    os << "value\n";
    for (const OracleSample& s : samples) {
        for (double v : s.x) os << num(v) << ',';
        os << num(s.value) << '\n';
    }
    return os.str();
}

std::string value_slice_csv(const std::vector<ValueSample>& samples) {
    std::ostringstream os;
    const std::size_t n = samples.empty() ? 0 : samples.front().x.size();
    os << 't';
    for (std::size_t i = 0; i < n; ++i) os << ",x_" << i + 1;
    os << ",phi";
    for (std::size_t i = 0; i < n; ++i) os << ",grad_" << i + 1;
    os << '\n';
    // A single sample is a degenerate slice: header only.
    if (samples.size() < 2) return os.str();
    const double last = static_cast<double>(samples.size() - 1);
    for (std::size_t k = 0; k < samples.size(); ++k) {
        const ValueSample& s = samples[k];
        os << num(static_cast<double>(k) / last);
        for (double v : s.x) os << ',' << num(v);
        os << ',' << num(s.phi);
        for (double v : s.grad_phi) os << ',' << num(v);
        os << '\n';
    }
    return os.str();
}

std::string fnv1a_hex(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
    return buf;
}

std::string dump(const json& doc) { return doc.dump(2) + "\n"; }

std::string utc_timestamp() {
    std::time_t now = std::time(nullptr);
    if (const char* env = std::getenv("SOURCE_DATE_EPOCH"); env != nullptr && *env != '\0') {
        char* end = nullptr;
        const long long v = std::strtoll(env, &end, 10);
        if (end != env && *end == '\0') now = static_cast<std::time_t>(v);
    }
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::ostringstream os;
    os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return os.str();
}

json RunManifest::to_json() const {
    return {{"command", command},
            {"problem_digest", problem_digest},
            {"parameters", parameters},
            {"tool_version", tool_version},
            {"timestamp", timestamp},
            {"outputs", outputs}};
}

}  // namespace ioc
