#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "hdtac/core/errors.hpp"
#include "hdtac/core/window.hpp"

namespace hdtac::dataset {

struct AccelRecord {
    std::int64_t time = 0;  // epoch ms
    std::string pid;
    double x = 0.0, y = 0.0, z = 0.0;  // g
};

struct TacRecord {
    double timestamp = 0.0;  // epoch s
    double tac = 0.0;
};

struct LabeledSample {
    RawWindow window;
    FeatureVector features;
    double tac = 0.0;
    int label = 0;  // 0 sober, 1 drunk
    std::string pid;
    std::int64_t window_start = 0;  // epoch ms
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

template <typename T>
bool parse_number(std::string_view s, T& out) {
    s = trim(s);
    if (s.empty()) return false;
    if (s.front() == '+') s.remove_prefix(1);
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && ptr == s.data() + s.size();
}

/// Splits on commas into at most `n` fields; returns the number found.
inline std::size_t split_csv(std::string_view line, std::string_view* fields, std::size_t n) {
    std::size_t count = 0;
    while (count < n) {
        const auto pos = line.find(',');
        fields[count++] = line.substr(0, pos);
        if (pos == std::string_view::npos) return count;
        line.remove_prefix(pos + 1);
    }
    return count + 1;  // more fields than expected
}

}  // namespace detail

struct AccelLoadStats {
    std::size_t rows = 0;
    std::size_t skipped = 0;
};

/// Streams `time,pid,x,y,z` rows in file order. Malformed rows (wrong field
/// count, unparsable or non-finite numbers, empty pid) are skipped and counted.
inline AccelLoadStats read_accel(const std::string& path,
                                 const std::function<void(std::int64_t, std::string_view, double, double, double)>& sink) {
    std::ifstream in(path);
    if (!in) throw IngestError("cannot open accelerometer file '" + path + "'");
    std::string line;
    if (!std::getline(in, line)) throw IngestError("accelerometer file '" + path + "' has no header");
    if (detail::trim(line) != "time,pid,x,y,z")
        throw IngestError("accelerometer file '" + path + "': expected header 'time,pid,x,y,z'");

    AccelLoadStats stats;
    std::string_view f[5];
    while (std::getline(in, line)) {
        if (detail::trim(line).empty()) continue;
        ++stats.rows;
        std::int64_t t = 0;
        double x = 0, y = 0, z = 0;
        if (detail::split_csv(line, f, 5) != 5 || !detail::parse_number(f[0], t) || !detail::parse_number(f[2], x) ||
            !detail::parse_number(f[3], y) || !detail::parse_number(f[4], z) || !std::isfinite(x) ||
            !std::isfinite(y) || !std::isfinite(z) || detail::trim(f[1]).empty()) {
            ++stats.skipped;
            continue;
        }
        sink(t, detail::trim(f[1]), x, y, z);
    }
    return stats;
}

inline std::vector<AccelRecord> load_accel(const std::string& path, AccelLoadStats* stats = nullptr) {
    std::vector<AccelRecord> out;
    const auto s = read_accel(path, [&](std::int64_t t, std::string_view pid, double x, double y, double z) {
        out.push_back({t, std::string(pid), x, y, z});
    });
    if (stats) *stats = s;
    return out;
}

inline std::string tac_path(const std::string& dir, const std::string& pid) {
    return dir + "/" + pid + "_clean_TAC.csv";
}

/// `timestamp,TAC_Reading` rows, returned sorted by timestamp.
inline std::vector<TacRecord> load_tac(const std::string& dir, const std::string& pid) {
    const std::string path = tac_path(dir, pid);
    std::ifstream in(path);
    if (!in) throw IngestError("missing TAC file for pid " + pid + " ('" + path + "')");
    std::string line;
    if (!std::getline(in, line) || detail::trim(line) != "timestamp,TAC_Reading")
        throw IngestError("TAC file '" + path + "': expected header 'timestamp,TAC_Reading'");
    std::vector<TacRecord> out;
    std::string_view f[2];
    while (std::getline(in, line)) {
        if (detail::trim(line).empty()) continue;
        TacRecord r;
        if (detail::split_csv(line, f, 2) != 2 || !detail::parse_number(f[0], r.timestamp) ||
            !detail::parse_number(f[1], r.tac) || !std::isfinite(r.timestamp) || !std::isfinite(r.tac))
            continue;
        out.push_back(r);
    }
    std::stable_sort(out.begin(), out.end(),
                     [](const TacRecord& a, const TacRecord& b) { return a.timestamp < b.timestamp; });
    return out;
}

}  // namespace hdtac::dataset
