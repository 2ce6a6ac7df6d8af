#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

#include "rsgame/model.hpp"

namespace rsgame {

// Run parameters carried inside a scenario file alongside the model.
struct RunParams {
    int n_steps = 0;          // 0 = pick the default step density for the horizon
    long n_paths = 100000;
    std::uint64_t seed = 12345;
    double tol_res = 1e-6;    // residual tolerance used by verification
};

struct Scenario {
    MarketModel model;
    GameSpec spec;
    RunParams run;
    int declared_m = 0;  // the m/n stated in the file, checked against array shapes
    int declared_n = 0;
};

// Strict parsing: every field must have the documented type, unknown fields
// are rejected, and malformed structure throws ScenarioParseError.  Shape or
// range inconsistencies that still produce a well-formed model (e.g. theta
// out of range, declared m disagreeing with len(a)) are left for validation.
Scenario scenario_from_json(const nlohmann::json& doc);
Scenario load_scenario(const std::string& path);

nlohmann::ordered_json scenario_to_json(const Scenario& sc);

// validate() on the model/spec plus declared-dimension cross-checks.
ValidationReport validate_scenario(const Scenario& sc, const ValidationOptions& opts = {});

}  // namespace rsgame
