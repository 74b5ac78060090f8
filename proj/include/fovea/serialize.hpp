#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fovea/error.hpp"
#include "fovea/pipeline.hpp"

namespace fovea {

using json = nlohmann::json;

namespace detail {

inline void dump_canonical(const json& j, std::string& out)
{
    switch (j.type()) {
    case json::value_t::null:
        out += "null";
        break;
    case json::value_t::boolean:
        out += j.get<bool>() ? "true" : "false";
        break;
    case json::value_t::number_integer:
    case json::value_t::number_unsigned:
        out += j.dump();
        break;
    case json::value_t::number_float: {
        double v = j.get<double>();
        if (!std::isfinite(v)) {
            out += "null";
            break;
        }
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%.3f", v);
        // "-0.000" and "0.000" must serialize the same way.
        if (std::string_view(buf) == "-0.000")
            out += "0.000";
        else
            out += buf;
        break;
    }
    case json::value_t::string:
        out += j.dump();
        break;
    case json::value_t::array: {
        out += '[';
        bool first = true;
        for (const auto& e : j) {
            if (!first)
                out += ',';
            first = false;
            dump_canonical(e, out);
        }
        out += ']';
        break;
    }
    case json::value_t::object: {
        // nlohmann::json objects iterate in sorted key order.
        out += '{';
        bool first = true;
        for (auto it = j.begin(); it != j.end(); ++it) {
            if (!first)
                out += ',';
            first = false;
            out += json(it.key()).dump();
            out += ':';
            dump_canonical(it.value(), out);
        }
        out += '}';
        break;
    }
    default:
        throw Error("cannot serialize json value");
    }
}

} // namespace detail

/// Compact JSON with sorted keys and every float printed with 3 decimals.
/// Parsing the output and dumping it again reproduces it byte for byte.
inline std::string canonical_dump(const json& j)
{
    std::string out;
    detail::dump_canonical(j, out);
    return out;
}

inline const char* to_string(Equalization e)
{
    return e == Equalization::global ? "global" : "tiled";
}

inline Equalization equalization_from_string(const std::string& s)
{
    if (s == "global")
        return Equalization::global;
    if (s == "tiled")
        return Equalization::tiled;
    throw ConfigError("equalization must be \"global\" or \"tiled\", got \"" + s + "\"");
}

inline json to_json(const PipelineConfig& c)
{
    return json{
        {"enhance_radius", c.enhance_radius},
        {"denoise_radius", c.denoise_radius},
        {"equalization", to_string(c.equalization)},
        {"tiles", c.tiles},
        {"clip", c.clip},
        {"otsu_offset", c.otsu_offset},
        {"area_min", c.area_min},
        {"area_max", c.area_max},
        {"circ_min", c.circ_min},
        {"connectivity", c.connectivity},
        {"fov_tol", c.fov_tol},
        {"repeat_enhance_after_eq", c.repeat_enhance_after_eq},
    };
}

namespace detail {

template <typename T>
T config_value(const json& v, const std::string& key)
{
    try {
        if constexpr (std::is_same_v<T, bool>) {
            if (!v.is_boolean())
                throw ConfigError(key + " must be a boolean");
        } else if constexpr (std::is_integral_v<T>) {
            if (!v.is_number_integer())
                throw ConfigError(key + " must be an integer");
        } else {
            if (!v.is_number())
                throw ConfigError(key + " must be a number");
        }
        return v.get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(key + ": " + e.what());
    }
}

} // namespace detail

/// Sets one named field from a JSON value. Unknown keys are rejected.
inline void set_config_field(PipelineConfig& c, const std::string& key, const json& v)
{
    using detail::config_value;
    if (key == "enhance_radius")
        c.enhance_radius = config_value<int>(v, key);
    else if (key == "denoise_radius")
        c.denoise_radius = config_value<int>(v, key);
    else if (key == "equalization") {
        if (!v.is_string())
            throw ConfigError("equalization must be a string");
        c.equalization = equalization_from_string(v.get<std::string>());
    } else if (key == "tiles")
        c.tiles = config_value<int>(v, key);
    else if (key == "clip")
        c.clip = config_value<double>(v, key);
    else if (key == "otsu_offset")
        c.otsu_offset = config_value<double>(v, key);
    else if (key == "area_min")
        c.area_min = config_value<long long>(v, key);
    else if (key == "area_max")
        c.area_max = config_value<long long>(v, key);
    else if (key == "circ_min")
        c.circ_min = config_value<double>(v, key);
    else if (key == "connectivity")
        c.connectivity = config_value<int>(v, key);
    else if (key == "fov_tol")
        c.fov_tol = config_value<int>(v, key);
    else if (key == "repeat_enhance_after_eq")
        c.repeat_enhance_after_eq = config_value<bool>(v, key);
    else
        throw ConfigError("unknown config key \"" + key + "\"");
}

/// Missing keys keep their defaults.
inline PipelineConfig config_from_json(const json& j)
{
    if (!j.is_object())
        throw ConfigError("config must be a JSON object");
    PipelineConfig c;
    for (auto it = j.begin(); it != j.end(); ++it)
        set_config_field(c, it.key(), it.value());
    c.validate();
    return c;
}

/// Applies a `key=value` override. The value is read as JSON when it
/// parses, otherwise as a bare string (so `equalization=global` works).
inline void apply_override(PipelineConfig& c, const std::string& assignment)
{
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0)
        throw ConfigError("override must look like key=value: " + assignment);
    const std::string key = assignment.substr(0, eq);
    const std::string text = assignment.substr(eq + 1);
    json value = json::parse(text, nullptr, false);
    if (value.is_discarded())
        value = text;
    set_config_field(c, key, value);
}

inline PipelineConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw FileNotFound(path);
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded())
        throw ConfigError("config is not valid JSON: " + path);
    return config_from_json(j);
}

inline json to_json(const DetectionResult& r)
{
    json j;
    j["source"] = r.source;
    j["width"] = r.width;
    j["height"] = r.height;
    j["detected"] = r.detected;
    j["fovea"] = r.fovea ? json{{"x", r.fovea->x}, {"y", r.fovea->y}} : json(nullptr);
    if (r.candidate) {
        j["candidate"] = json{
            {"area", r.candidate->area},
            {"circularity", r.candidate->circularity},
            {"otsu_level", r.candidate->otsu_level},
            {"effective_t", r.candidate->effective_t},
        };
    } else {
        j["candidate"] = nullptr;
    }
    json stages = json::array();
    for (const auto& t : r.timings)
        stages.push_back(json{{"stage", t.stage}, {"ms", t.ms}});
    j["timings"] = std::move(stages);
    j["total_ms"] = r.total_ms;
    j["error"] = r.error ? json(*r.error) : json(nullptr);
    return j;
}

inline DetectionResult detection_from_json(const json& j)
{
    try {
        DetectionResult r;
        r.source = j.at("source").get<std::string>();
        r.width = j.at("width").get<int>();
        r.height = j.at("height").get<int>();
        r.detected = j.at("detected").get<bool>();
        if (const auto& f = j.at("fovea"); !f.is_null())
            r.fovea = Point{f.at("x").get<int>(), f.at("y").get<int>()};
        if (const auto& c = j.at("candidate"); !c.is_null())
            r.candidate = CandidateStats{c.at("area").get<long long>(), c.at("circularity").get<double>(),
                                         c.at("otsu_level").get<int>(), c.at("effective_t").get<double>()};
        for (const auto& t : j.at("timings"))
            r.timings.push_back({t.at("stage").get<std::string>(), t.at("ms").get<double>()});
        r.total_ms = j.at("total_ms").get<double>();
        if (const auto& e = j.at("error"); !e.is_null())
            r.error = e.get<std::string>();
        if (r.detected != r.fovea.has_value() || r.detected != r.candidate.has_value())
            throw Error("detected, fovea and candidate disagree for " + r.source);
        return r;
    } catch (const json::exception& e) {
        throw Error(std::string("malformed detection result: ") + e.what());
    }
}

inline std::string results_to_string(const std::vector<DetectionResult>& results)
{
    json arr = json::array();
    for (const auto& r : results)
        arr.push_back(to_json(r));
    return canonical_dump(arr) + "\n";
}

inline std::vector<DetectionResult> results_from_string(const std::string& text)
{
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded() || !j.is_array())
        throw Error("results must be a JSON array");
    std::vector<DetectionResult> out;
    for (const auto& e : j)
        out.push_back(detection_from_json(e));
    return out;
}

inline std::vector<DetectionResult> load_results(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw FileNotFound(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return results_from_string(ss.str());
}

inline void save_results(const std::vector<DetectionResult>& results, const std::string& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw WriteError(path, "cannot open for writing");
    out << results_to_string(results);
    if (!out)
        throw WriteError(path, "write failed");
}

} // namespace fovea
