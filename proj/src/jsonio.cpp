#include "rsgame/jsonio.hpp"

#include <cmath>
#include <cstdio>

namespace rsgame {

namespace {

using nlohmann::ordered_json;

void append_number(std::string& out, double v) {
    if (!std::isfinite(v)) {  // JSON has no literal for these; keep output parseable
        out += v > 0 ? "1e999" : (v < 0 ? "-1e999" : "null");
        return;
    }
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    out += buf;
}

void append(std::string& out, const ordered_json& v, int indent, int depth) {
    const std::string pad(static_cast<std::size_t>(indent) * (depth + 1), ' ');
    const std::string pad_close(static_cast<std::size_t>(indent) * depth, ' ');
    switch (v.type()) {
        case ordered_json::value_t::object: {
            if (v.empty()) {
                out += "{}";
                return;
            }
            out += "{\n";
            bool first = true;
            for (const auto& item : v.items()) {
                if (!first) out += ",\n";
                first = false;
                out += pad;
                out += ordered_json(item.key()).dump();  // escaped key
                out += ": ";
                append(out, item.value(), indent, depth + 1);
            }
            out += "\n" + pad_close + "}";
            return;
        }
        case ordered_json::value_t::array: {
            if (v.empty()) {
                out += "[]";
                return;
            }
            out += "[\n";
            for (std::size_t i = 0; i < v.size(); ++i) {
                if (i) out += ",\n";
                out += pad;
                append(out, v[i], indent, depth + 1);
            }
            out += "\n" + pad_close + "]";
            return;
        }
        case ordered_json::value_t::number_float:
            append_number(out, v.get<double>());
            return;
        default:
            out += v.dump();  // strings, integers, booleans, null
            return;
    }
}

}  // namespace

std::string dump_json17(const ordered_json& doc, int indent) {
    std::string out;
    append(out, doc, indent, 0);
    out += "\n";
    return out;
}

}  // namespace rsgame
