#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "repscore/benchmarks.hpp"
#include "repscore/metrics.hpp"
#include "repscore/montecarlo.hpp"
#include "repscore/survey.hpp"

namespace repscore {

inline constexpr int kScorecardSchemaVersion = 1;
inline constexpr std::string_view kToolVersion = "0.1.0";

struct StrataCounts {
    std::size_t benchmark = 0;
    std::size_t sample = 0;
    std::size_t overlap = 0;
    bool operator==(const StrataCounts&) const = default;
};

struct DimensionMetrics {
    std::int64_t n = 0;  // usable respondents for this dimension
    double gri = 0.0;
    std::optional<double> diversity;
    double sri = 0.0;
    std::optional<DesignEffectReport> deff;  // empty when no stratum is covered
    std::optional<MaxGriEstimate> max_gri;
    std::optional<EfficiencyRatio> efficiency;
    Band band = Band::Poor;
    StrataCounts strata;
    std::map<std::string, std::int64_t> excluded;

    bool operator==(const DimensionMetrics&) const = default;
};

struct DimensionResult {
    std::string dimension;
    std::optional<DimensionMetrics> metrics;
    std::string error;  // set when the dimension could not be scored

    bool ok() const noexcept { return metrics.has_value(); }
    bool operator==(const DimensionResult&) const = default;
};

struct RunProvenance {
    std::string tool_version{kToolVersion};
    std::uint64_t seed = 0;
    std::int64_t iterations = 0;
    bool max_gri_enabled = false;
    std::string rng_algorithm{kRngAlgorithm};
    std::string config_digest;
    std::vector<std::string> country_filter;
    std::map<std::string, std::int64_t> dropped_rows;
    std::map<std::string, std::map<std::string, std::int64_t>> quarantined_values;
    std::map<std::string, std::vector<std::string>> benchmark_quarantine;  // source -> country labels

    bool operator==(const RunProvenance&) const = default;
};

struct Scorecard {
    int schema_version = kScorecardSchemaVersion;
    std::string survey_id;
    std::int64_t n_total = 0;
    std::string source_digest;
    std::map<std::string, int> benchmark_vintages;  // source id -> year
    std::vector<DimensionResult> results;
    RunProvenance provenance;

    bool complete() const;
    bool operator==(const Scorecard&) const = default;
};

struct ScoreOptions {
    bool include_max_gri = false;
    std::int64_t iterations = kDefaultIterations;
    std::uint64_t seed = 0;
    std::optional<std::set<std::string>> countries;  // regional mode: filter benchmarks to these countries
    std::string survey_id;
    std::string config_digest;
};

// A dimension that fails is recorded with its error; the run continues.
Scorecard compute_scorecard(const SurveyMicrodata& survey, const BenchmarkSuite& suite,
                            const DimensionRegistry& registry, const ScoreOptions& options);

// Sample and benchmark for one registry dimension, aligned.
AlignedPair dimension_pair(const SurveyMicrodata& survey, const BenchmarkSuite& suite, const DimensionEntry& entry,
                           const std::set<std::string>* countries = nullptr);

enum class Direction { Over, Under, Missing };
std::string_view to_string(Direction direction) noexcept;

struct SegmentDeviation {
    StratumKey key;
    double p = 0.0;
    double q = 0.0;
    double delta = 0.0;              // p - q
    double tvd_contribution = 0.0;   // |p - q| / 2
    Direction direction = Direction::Over;
};

// All strata ranked by contribution (descending), ties in key order.
std::vector<SegmentDeviation> segment_deviations(const AlignedPair& pair);
std::vector<SegmentDeviation> top_segments(const AlignedPair& pair, std::size_t top_k);

struct WaveSeries {
    std::string dimension;
    std::vector<std::optional<double>> gri;  // one entry per wave
    std::optional<double> mean;
    std::optional<double> range;  // max - min
};

struct LongitudinalTable {
    std::vector<std::string> waves;
    std::vector<WaveSeries> series;
};

LongitudinalTable compare_waves(std::span<const Scorecard> scorecards);

enum class Format { Table, Json, Csv, SvgHeatmap };
Format parse_format(std::string_view name);
std::string_view format_extension(Format format) noexcept;

std::string render(const Scorecard& scorecard, Format format);
std::string render_heatmap(std::span<const Scorecard> scorecards);
std::string render_segments(const std::string& dimension, std::span<const SegmentDeviation> segments, Format format);
std::string render_longitudinal(const LongitudinalTable& table, Format format);

nlohmann::json to_json(const Scorecard& scorecard);
Scorecard scorecard_from_json(const nlohmann::json& json);
nlohmann::json to_json(const MaxGriEstimate& estimate);

}  // namespace repscore
