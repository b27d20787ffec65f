#pragma once

// JSON and CSV renderings of every result type, the inverse parsers that the
// certify command needs, and the run manifest.

#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "ioc/oracle.hpp"
#include "ioc/path_driver.hpp"
#include "ioc/stationarity.hpp"
#include "ioc/value_function.hpp"

namespace ioc {

nlohmann::json to_json(const LowerSolution& s);
nlohmann::json to_json(const LowerKktResiduals& r);
nlohmann::json to_json(const RelaxedSolution& s);
nlohmann::json to_json(const RelaxedKktResiduals& r);
nlohmann::json to_json(const PathTrace& t);
nlohmann::json to_json(const CandidatePoint& p);
nlohmann::json to_json(const StationarityMultipliers& m);
nlohmann::json to_json(const ActiveSets& s);
nlohmann::json to_json(const StationarityCertificate& c);
nlohmann::json to_json(const OracleResult& r);
nlohmann::json to_json(const OracleVerdict& v);
nlohmann::json to_json(const ValueSample& s);

CandidatePoint candidate_point_from_json(const nlohmann::json& doc);
StationarityMultipliers multipliers_from_json(const nlohmann::json& doc);

/// k, eps, upper_value, gap, alpha, lower_distance, proof_bound, step_x, step_u, residuals.
std::string path_csv(const PathTrace& t);
/// x_1..x_n, value
std::string landscape_csv(const std::vector<OracleSample>& samples);
/// t, x_1..x_n, phi, grad_1..grad_n
std::string value_slice_csv(const std::vector<ValueSample>& samples);

/// 64-bit FNV-1a, rendered as 16 lowercase hex digits.
std::string fnv1a_hex(std::string_view bytes);

/// Fixed-precision JSON text (two-space indent, trailing newline).
std::string dump(const nlohmann::json& doc);

struct RunManifest {
    std::string command;
    std::string problem_digest;
    nlohmann::json parameters = nlohmann::json::object();
    std::string tool_version;
    std::string timestamp;  // UTC, ISO 8601; honours SOURCE_DATE_EPOCH
    std::vector<std::string> outputs;

    nlohmann::json to_json() const;
};

/// Current UTC time, or SOURCE_DATE_EPOCH when set, formatted as ISO 8601.
std::string utc_timestamp();

}  // namespace ioc
