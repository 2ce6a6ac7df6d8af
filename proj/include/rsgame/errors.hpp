#pragma once

#include <stdexcept>
#include <string>

namespace rsgame {

// Domain failures surfaced as typed exceptions so callers (and the CLI) can
// distinguish "the input is bad" from "the computation broke down".

struct SingularSaddleSystem : std::runtime_error {
    explicit SingularSaddleSystem(const std::string& what) : std::runtime_error(what) {}
};

struct NonFiniteCoefficients : std::runtime_error {
    explicit NonFiniteCoefficients(const std::string& what) : std::runtime_error(what) {}
};

struct TimeOutOfRange : std::out_of_range {
    explicit TimeOutOfRange(const std::string& what) : std::out_of_range(what) {}
};

struct BudgetExceeded : std::runtime_error {
    explicit BudgetExceeded(const std::string& what) : std::runtime_error(what) {}
};

struct NonFinitePath : std::runtime_error {
    explicit NonFinitePath(const std::string& what) : std::runtime_error(what) {}
};

struct DegenerateSample : std::runtime_error {
    explicit DegenerateSample(const std::string& what) : std::runtime_error(what) {}
};

struct NoConvergence : std::runtime_error {
    explicit NoConvergence(const std::string& what) : std::runtime_error(what) {}
};

// Raised when a scenario file cannot be parsed into a model at all
// (malformed JSON, unknown field, wrong element type).
struct ScenarioParseError : std::runtime_error {
    explicit ScenarioParseError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace rsgame
