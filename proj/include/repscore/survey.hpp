#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "repscore/benchmarks.hpp"
#include "repscore/csv.hpp"
#include "repscore/distribution.hpp"

namespace repscore {

struct AgeBracket {
    std::string label;
    int lower = 0;                     // inclusive
    std::optional<int> upper;          // exclusive; open-ended when empty
};

struct AgeBracketing {
    std::vector<AgeBracket> brackets;

    // 18-25, 26-35, 36-45, 46-55, 56-65, 65+ over whole years.
    static AgeBracketing standard();

    int minimum() const;
    std::set<std::string> labels() const;
    void validate() const;
};

// Label of the bracket containing `age_years`; OutOfRange outside the brackets.
std::string bracket_age(int age_years, const AgeBracketing& brackets);

enum class AgeMode { RawYears, PreBracketed };

struct ColumnMapping {
    // Axis -> source column. In RawYears mode the "age_group" column holds ages.
    std::map<std::string, std::string> columns;
    // Axis -> raw label -> canonical label. Matching is exact, then case-insensitive.
    std::map<std::string, std::map<std::string, std::string>> aliases;
    // Axis -> accepted canonical labels; an absent or empty set accepts anything.
    std::map<std::string, std::set<std::string>> domains;
    AgeMode age_mode = AgeMode::PreBracketed;
    AgeBracketing brackets = AgeBracketing::standard();
    bool strict = true;  // unknown labels are errors rather than quarantined rows
    std::set<std::string> missing_tokens{"", "NA", "N/A", "na", "n/a", "null", "NULL", "."};

    // Accept exactly the benchmark labels for each mapped axis.
    void restrict_to_benchmarks(const BenchmarkSuite& suite);
};

struct SurveyMicrodata {
    std::vector<std::string> axes;
    std::vector<std::vector<std::string>> rows;  // one label per axis, "" when missing
    std::int64_t n_total = 0;                    // usable rows
    std::int64_t n_dropped = 0;
    std::map<std::string, std::int64_t> dropped;  // reason -> rows
    std::map<std::string, std::map<std::string, std::int64_t>> quarantined_values;  // axis -> raw label -> rows
    std::string source_digest;

    bool has_axis(std::string_view axis) const;
};

// Country labels go through the explicit aliases, then the rollup (codes and
// English names) when one is given.
SurveyMicrodata load_survey(const std::filesystem::path& path, const ColumnMapping& mapping,
                            const GeoRollup* rollup = nullptr);
SurveyMicrodata parse_survey(const CsvTable& table, const ColumnMapping& mapping, const GeoRollup* rollup = nullptr);

struct SampleProjection {
    Distribution distribution;
    std::map<std::string, std::int64_t> excluded;  // "missing_<axis>" -> rows left out of this dimension
};

// Rows missing a needed value are excluded from this dimension only.
SampleProjection project_sample(const SurveyMicrodata& data, const DimensionSpec& spec, const GeoRollup& rollup);
Distribution to_sample_distribution(const SurveyMicrodata& data, const DimensionSpec& spec, const GeoRollup& rollup);

}  // namespace repscore
