#pragma once

#include <string>

#include <json.hpp>

namespace rsgame {

// Deterministic JSON writer for CLI output: keys keep insertion order and
// every floating-point number is printed with 17 significant digits, so a
// rerun with identical inputs produces byte-identical text and every double
// round-trips exactly.
std::string dump_json17(const nlohmann::ordered_json& doc, int indent = 2);

}  // namespace rsgame
