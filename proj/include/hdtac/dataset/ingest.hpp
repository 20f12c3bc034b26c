#pragma once

// End-to-end ingest of the Bar Crawl layout:
//   <dir>/all_accelerometer_data_pids_13.csv          time,pid,x,y,z
//   <dir>/clean_tac/<PID>_clean_TAC.csv               timestamp,TAC_Reading
// followed by TAC filtering + shift, windowing, labeling and featurization.
// The sample cache keeps the full feature catalog so any selection can be
// projected at load time without re-featurizing.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hdtac/core/binary_io.hpp"
#include "hdtac/core/errors.hpp"
#include "hdtac/core/parallel.hpp"
#include "hdtac/dataset/processing.hpp"
#include "hdtac/dataset/records.hpp"
#include "hdtac/features/catalog.hpp"

namespace hdtac::dataset {

inline constexpr const char* kAccelFile = "all_accelerometer_data_pids_13.csv";
inline constexpr const char* kTacDir = "clean_tac";
inline constexpr char kCacheMagic[9] = "HDTACSMP";
inline constexpr std::uint32_t kCacheVersion = 1;

struct IngestOptions {
    WindowingOptions windowing;
    double filter_tau_s = kDefaultFilterTauS;
    double shift_minutes = kDefaultShiftMinutes;
    double threshold = kDefaultThreshold;
    features::MfccParams mfcc;
    std::size_t jobs = default_jobs();
};

struct IngestReport {
    std::size_t participants = 0;
    std::vector<std::string> pids;
    std::size_t accel_rows = 0;
    std::size_t accel_records = 0;
    std::size_t accel_skipped = 0;
    std::vector<std::string> tac_missing;
    std::size_t tac_readings = 0;
    std::size_t windows_total = 0;
    std::size_t windows_dropped_gap = 0;
    std::size_t windows_dropped_coverage = 0;
    std::size_t samples = 0;
    std::size_t label_sober = 0;
    std::size_t label_drunk = 0;
    std::vector<std::string> warnings;

    [[nodiscard]] nlohmann::json to_json() const {
        return {{"participants", participants},
                {"pids", pids},
                {"accel_rows", accel_rows},
                {"accel_records", accel_records},
                {"accel_skipped", accel_skipped},
                {"tac_missing", tac_missing},
                {"tac_readings", tac_readings},
                {"windows_total", windows_total},
                {"windows_dropped_gap", windows_dropped_gap},
                {"windows_dropped_coverage", windows_dropped_coverage},
                {"samples", samples},
                {"label_sober", label_sober},
                {"label_drunk", label_drunk},
                {"warnings", warnings}};
    }
};

/// Labeled windows carrying the full feature catalog in `features`.
struct IngestResult {
    std::vector<LabeledSample> samples;
    IngestReport report;
};

inline IngestResult ingest(const std::string& data_dir, const IngestOptions& opt = {}) {
    namespace fs = std::filesystem;
    const fs::path accel_path = fs::path(data_dir) / kAccelFile;
    if (!fs::exists(accel_path)) throw IngestError("dataset not found: missing '" + accel_path.string() + "'");

    IngestResult result;
    auto& rep = result.report;

    std::map<std::string, std::vector<Sample>> streams;
    const auto stats = read_accel(accel_path.string(),
                                  [&](std::int64_t t, std::string_view pid, double x, double y, double z) {
                                      auto it = streams.find(std::string(pid));
                                      if (it == streams.end()) it = streams.emplace(std::string(pid), std::vector<Sample>{}).first;
                                      it->second.push_back({t, {static_cast<float>(x), static_cast<float>(y),
                                                                static_cast<float>(z)}});
                                  });
    rep.accel_rows = stats.rows;
    rep.accel_skipped = stats.skipped;
    rep.accel_records = stats.rows - stats.skipped;
    if (rep.accel_records == 0) rep.warnings.push_back("accelerometer file contains zero samples");
    if (stats.skipped) rep.warnings.push_back(std::to_string(stats.skipped) + " malformed accelerometer rows skipped");

    const std::string tac_dir = (fs::path(data_dir) / kTacDir).string();
    for (auto& [pid, samples] : streams) {
        std::vector<TacRecord> tac;
        try {
            tac = load_tac(tac_dir, pid);
        } catch (const IngestError& e) {
            rep.tac_missing.push_back(pid);
            rep.warnings.push_back(e.what());
            continue;
        }
        rep.tac_readings += tac.size();
        if (tac.size() < 3) rep.warnings.push_back("TAC series for " + pid + " has < 3 points; filter skipped");
        tac = shift_tac(filter_tac(std::move(tac), opt.filter_tau_s), opt.shift_minutes);

        std::stable_sort(samples.begin(), samples.end(), [](const Sample& a, const Sample& b) { return a.time < b.time; });
        auto windowed = window_stream(samples, pid, opt.windowing);
        rep.windows_total += windowed.windows.size() + windowed.dropped_gap;
        rep.windows_dropped_gap += windowed.dropped_gap;
        auto labeled = label_windows(std::move(windowed.windows), tac, opt.threshold);
        rep.windows_dropped_coverage += labeled.dropped_coverage;
        for (auto& s : labeled.samples) result.samples.push_back(std::move(s));
        rep.pids.push_back(pid);
        std::vector<Sample>().swap(samples);
    }
    rep.participants = rep.pids.size();

    parallel_for(result.samples.size(), opt.jobs, [&](std::size_t i) {
        result.samples[i].features.values = features::compute_catalog(result.samples[i].window, kSampleRateHz, opt.mfcc);
    });

    rep.samples = result.samples.size();
    for (const auto& s : result.samples) (s.label ? rep.label_drunk : rep.label_sober)++;
    return result;
}

// ---- sample cache -----------------------------------------------------------------

/// Layout (little-endian):
///   magic "HDTACSMP", u32 version, u32 mfcc frame, hop, filters, coefficients,
///   u32 catalog size, u64 sample count, then per sample:
///   str pid, i64 window_start, f64 tac, u8 label, u32 n, n x (i64 t, f32 x, y, z),
///   catalog x f64.  Strings are u16 length + bytes.
inline void write_cache(const std::string& path, const std::vector<LabeledSample>& samples,
                        const features::MfccParams& mfcc) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IngestError("cannot write cache '" + path + "'");
    const std::size_t catalog = features::catalog_ids(mfcc).size();
    io::write_magic(out, kCacheMagic);
    io::write_le<std::uint32_t>(out, kCacheVersion);
    for (std::size_t v : {mfcc.frame, mfcc.hop, mfcc.filters, mfcc.coefficients})
        io::write_le<std::uint32_t>(out, static_cast<std::uint32_t>(v));
    io::write_le<std::uint32_t>(out, static_cast<std::uint32_t>(catalog));
    io::write_le<std::uint64_t>(out, samples.size());
    for (const auto& s : samples) {
        if (s.features.size() != catalog) throw InvalidValue("write_cache: sample lacks the full feature catalog");
        io::write_string(out, s.pid);
        io::write_le<std::int64_t>(out, s.window_start);
        io::write_le<double>(out, s.tac);
        io::write_le<std::uint8_t>(out, static_cast<std::uint8_t>(s.label));
        io::write_le<std::uint32_t>(out, static_cast<std::uint32_t>(s.window.size()));
        for (std::size_t i = 0; i < s.window.size(); ++i) {
            io::write_le<std::int64_t>(out, s.window.times[i]);
            for (float v : s.window.samples[i]) io::write_le<float>(out, v);
        }
        for (double v : s.features.values) io::write_le<double>(out, v);
    }
    if (!out) throw IngestError("failed writing cache '" + path + "'");
}

/// Reads a cache and projects each catalog onto `spec`'s selection.
inline std::vector<LabeledSample> read_cache(const std::string& path, const features::FeatureSpec& spec) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IngestError("cannot open cache '" + path + "'");
    io::expect_magic(in, kCacheMagic, "sample cache");
    if (io::read_le<std::uint32_t>(in) != kCacheVersion) throw IngestError("sample cache: unsupported version");
    const auto& m = spec.mfcc();
    for (std::size_t v : {m.frame, m.hop, m.filters, m.coefficients})
        if (io::read_le<std::uint32_t>(in) != v) throw IngestError("sample cache: MFCC parameters differ from config");
    const auto catalog = io::read_le<std::uint32_t>(in);
    if (catalog != spec.catalog_size()) throw IngestError("sample cache: catalog size differs from config");
    const auto count = io::read_le<std::uint64_t>(in);

    std::vector<LabeledSample> out;
    out.reserve(count);
    std::vector<double> row(catalog);
    for (std::uint64_t k = 0; k < count; ++k) {
        LabeledSample s;
        s.pid = io::read_string(in);
        s.window_start = io::read_le<std::int64_t>(in);
        s.tac = io::read_le<double>(in);
        s.label = io::read_le<std::uint8_t>(in);
        const auto n = io::read_le<std::uint32_t>(in);
        s.window.pid = s.pid;
        s.window.times.resize(n);
        s.window.samples.resize(n);
        for (std::uint32_t i = 0; i < n; ++i) {
            s.window.times[i] = io::read_le<std::int64_t>(in);
            for (auto& v : s.window.samples[i]) v = io::read_le<float>(in);
        }
        for (auto& v : row) v = io::read_le<double>(in);
        s.features = features::project(row, spec);
        out.push_back(std::move(s));
    }
    return out;
}

inline std::vector<LabeledSample> project_samples(std::vector<LabeledSample> samples, const features::FeatureSpec& spec) {
    for (auto& s : samples) s.features = features::project(s.features.values, spec);
    return samples;
}

}  // namespace hdtac::dataset
