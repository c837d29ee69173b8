#pragma once

#include <cmath>
#include <cstdio>
#include <string>

#include <json.hpp>

namespace depwatch {

namespace detail {

inline std::string format_fixed6(double value) {
    if (!std::isfinite(value)) return "null";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", value);
    std::string out = buf;
    if (out == "-0.000000") out = "0.000000";
    return out;
}

inline void write_canonical(const nlohmann::json& value, std::string& out, int depth, int indent) {
    const auto newline = [&](int d) {
        if (indent < 0) return;
        out += '\n';
        out.append(static_cast<std::size_t>(d * indent), ' ');
    };
    switch (value.type()) {
    case nlohmann::json::value_t::object: {
        if (value.empty()) {
            out += "{}";
            return;
        }
        out += '{';
        bool first = true;
        // nlohmann::json objects are backed by std::map, so iteration is already key-sorted.
        for (auto it = value.begin(); it != value.end(); ++it) {
            if (!first) out += ',';
            first = false;
            newline(depth + 1);
            out += nlohmann::json(it.key()).dump();
            out += indent < 0 ? ":" : ": ";
            write_canonical(it.value(), out, depth + 1, indent);
        }
        newline(depth);
        out += '}';
        return;
    }
    case nlohmann::json::value_t::array: {
        if (value.empty()) {
            out += "[]";
            return;
        }
        out += '[';
        bool first = true;
        for (const auto& item : value) {
            if (!first) out += ',';
            first = false;
            newline(depth + 1);
            write_canonical(item, out, depth + 1, indent);
        }
        newline(depth);
        out += ']';
        return;
    }
    case nlohmann::json::value_t::number_float:
        out += format_fixed6(value.get<double>());
        return;
    default:
        out += value.dump();
        return;
    }
}

} // namespace detail

/// Deterministic JSON text: keys sorted, floats fixed to 6 decimals, integers verbatim.
/// `indent < 0` produces the compact form.
inline std::string canonical_dump(const nlohmann::json& value, int indent = 2) {
    std::string out;
    detail::write_canonical(value, out, 0, indent);
    if (indent >= 0) out += '\n';
    return out;
}

} // namespace depwatch
