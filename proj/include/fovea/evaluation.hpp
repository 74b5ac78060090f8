#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "fovea/error.hpp"
#include "fovea/image.hpp"
#include "fovea/pipeline.hpp"

namespace fovea {

struct GroundTruthRecord
{
    std::string source;
    bool has_macula = false;
    std::optional<Point> fovea;
};

struct Summary
{
    std::size_t count = 0;
    double mean = 0.0;
    double median = 0.0;
    double p95 = 0.0;
    double max = 0.0;
};

struct MetricsReport
{
    long long tp = 0;
    long long fp = 0;
    long long tn = 0;
    long long fn = 0;
    std::optional<double> sensitivity;
    std::optional<double> specificity;
    std::optional<double> false_positive_rate;
    /// Pixel distances for true positives where both coordinates exist, ascending.
    std::vector<double> centroid_errors;
    Summary centroid_error;
    /// Total milliseconds over results that carry no error.
    Summary timing;

    long long evaluated() const noexcept { return tp + fp + tn + fn; }
};

/// Mean, median (midpoint of the middle pair for even counts), nearest-rank
/// 95th percentile and maximum.
inline Summary summarize(std::vector<double> values)
{
    Summary s;
    s.count = values.size();
    if (values.empty())
        return s;
    std::sort(values.begin(), values.end());
    double sum = 0.0;
    for (double v : values)
        sum += v;
    s.mean = sum / static_cast<double>(values.size());
    const std::size_t n = values.size();
    s.median = n % 2 ? values[n / 2] : (values[n / 2 - 1] + values[n / 2]) / 2.0;
    const auto rank = static_cast<std::size_t>(std::ceil(0.95 * static_cast<double>(n)));
    s.p95 = values[std::max<std::size_t>(rank, 1) - 1];
    s.max = values.back();
    return s;
}

/// Presence/absence confusion counts. A result with an error counts as "not
/// detected". Centroid distance never affects the counts.
inline MetricsReport score(const std::vector<DetectionResult>& results, const std::vector<GroundTruthRecord>& truth)
{
    std::map<std::string, const GroundTruthRecord*> by_source;
    for (const auto& t : truth)
        if (!by_source.emplace(t.source, &t).second)
            throw DuplicateTruth(t.source);

    MetricsReport m;
    std::vector<double> totals;
    for (const auto& r : results) {
        const auto it = by_source.find(r.source);
        if (it == by_source.end())
            throw MissingTruth(r.source);
        const GroundTruthRecord& t = *it->second;
        const bool predicted = r.detected && !r.error;
        if (predicted && t.has_macula)
            ++m.tp;
        else if (predicted)
            ++m.fp;
        else if (t.has_macula)
            ++m.fn;
        else
            ++m.tn;

        if (predicted && t.has_macula && r.fovea && t.fovea)
            m.centroid_errors.push_back(std::hypot(r.fovea->x - t.fovea->x, r.fovea->y - t.fovea->y));
        if (!r.error)
            totals.push_back(r.total_ms);
    }

    if (m.tp + m.fn > 0)
        m.sensitivity = static_cast<double>(m.tp) / static_cast<double>(m.tp + m.fn);
    if (m.tn + m.fp > 0) {
        m.specificity = static_cast<double>(m.tn) / static_cast<double>(m.tn + m.fp);
        m.false_positive_rate = 1.0 - *m.specificity;
    }
    std::sort(m.centroid_errors.begin(), m.centroid_errors.end());
    m.centroid_error = summarize(m.centroid_errors);
    m.timing = summarize(std::move(totals));
    return m;
}

inline std::string format_rate(const std::optional<double>& rate)
{
    if (!rate)
        return "n/a";
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3f", *rate);
    return buf;
}

inline std::string format_report(const MetricsReport& m)
{
    std::ostringstream out;
    char buf[256];
    out << "tp " << m.tp << " fp " << m.fp << " tn " << m.tn << " fn " << m.fn << '\n';
    out << "sensitivity " << format_rate(m.sensitivity) << '\n';
    out << "specificity " << format_rate(m.specificity) << '\n';
    out << "false_positive_rate " << format_rate(m.false_positive_rate) << '\n';
    std::snprintf(buf, sizeof(buf), "centroid_error_px n=%zu mean=%.3f median=%.3f p95=%.3f max=%.3f\n",
                  m.centroid_error.count, m.centroid_error.mean, m.centroid_error.median, m.centroid_error.p95,
                  m.centroid_error.max);
    out << buf;
    std::snprintf(buf, sizeof(buf), "total_ms n=%zu mean=%.3f median=%.3f p95=%.3f\n", m.timing.count,
                  m.timing.mean, m.timing.median, m.timing.p95);
    out << buf;
    return out.str();
}

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line)
{
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    fields.push_back(cur);
    return fields;
}

inline std::optional<int> parse_coordinate(const std::string& s, std::size_t line)
{
    if (s.empty())
        return std::nullopt;
    std::size_t used = 0;
    int v = 0;
    try {
        v = std::stoi(s, &used);
    } catch (const std::exception&) {
        throw ParseError(line, "bad coordinate \"" + s + "\"");
    }
    if (used != s.size())
        throw ParseError(line, "bad coordinate \"" + s + "\"");
    return v;
}

} // namespace detail

inline constexpr const char* kTruthHeader = "source,has_macula,fovea_x,fovea_y";

/// Parses `source,has_macula,fovea_x,fovea_y` rows (header required, no
/// quoting). Blank coordinates mean "no fovea".
inline std::vector<GroundTruthRecord> parse_truth(std::istream& in)
{
    std::vector<GroundTruthRecord> records;
    std::string line;
    std::size_t line_no = 0;
    bool header = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line_no == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0)
            line.erase(0, 3);
        if (!header) {
            if (line != kTruthHeader)
                throw ParseError(line_no, std::string("expected header \"") + kTruthHeader + "\"");
            header = true;
            continue;
        }
        if (line.empty())
            continue;
        const auto f = detail::split_csv_line(line);
        if (f.size() != 4)
            throw ParseError(line_no, "expected 4 fields, got " + std::to_string(f.size()));
        GroundTruthRecord r;
        r.source = f[0];
        if (r.source.empty())
            throw ParseError(line_no, "empty source");
        if (f[1] == "1")
            r.has_macula = true;
        else if (f[1] != "0")
            throw ParseError(line_no, "has_macula must be 0 or 1");
        const auto x = detail::parse_coordinate(f[2], line_no);
        const auto y = detail::parse_coordinate(f[3], line_no);
        if (x.has_value() != y.has_value())
            throw ParseError(line_no, "fovea needs both coordinates or neither");
        if (x) {
            if (!r.has_macula)
                throw SemanticError(line_no, "fovea given for an image without macula");
            r.fovea = Point{*x, *y};
        }
        records.push_back(std::move(r));
    }
    if (!header)
        throw ParseError(line_no + 1, "missing header");
    return records;
}

inline std::vector<GroundTruthRecord> load_truth(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw FileNotFound(path);
    return parse_truth(in);
}

} // namespace fovea
