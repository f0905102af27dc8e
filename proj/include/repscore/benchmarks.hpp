#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "repscore/csv.hpp"
#include "repscore/distribution.hpp"

namespace repscore {

enum class BenchmarkSchema { CountryGenderAge, CountryReligion, CountryEnvironment };

inline constexpr BenchmarkSchema kAllSchemas[] = {BenchmarkSchema::CountryGenderAge, BenchmarkSchema::CountryReligion,
                                                  BenchmarkSchema::CountryEnvironment};

std::string_view schema_name(BenchmarkSchema schema) noexcept;
BenchmarkSchema parse_schema(std::string_view name);
const std::vector<std::string>& schema_axes(BenchmarkSchema schema);
// Published stratum counts of the reference tables (2,699 / 1,607 / 449).
std::size_t expected_strata(BenchmarkSchema schema) noexcept;

// Country -> (UN sub-region, continent). Countries are ISO 3166-1 alpha-3;
// an optional `name` column supplies English-name aliases.
class GeoRollup {
public:
    struct Entry {
        std::string region;
        std::string continent;
    };

    static const std::set<std::string>& region_domain();     // 22 labels
    static const std::set<std::string>& continent_domain();  // 6 labels

    static GeoRollup load(const std::filesystem::path& path);
    static GeoRollup from_table(const CsvTable& table);

    // ISO3 code for a code or alias (case-insensitive), if known.
    std::optional<std::string> resolve(std::string_view label) const;
    const Entry* find(std::string_view iso3) const;
    const std::map<std::string, Entry>& countries() const noexcept { return countries_; }
    std::optional<int> vintage() const noexcept { return vintage_; }

private:
    std::map<std::string, Entry> countries_;
    std::map<std::string, std::string> aliases_;  // lowercased alias -> ISO3
    std::optional<int> vintage_;
};

struct QuarantineEntry {
    std::string label;
    std::size_t line = 0;
    double weight = 0.0;
};

struct BenchmarkTable {
    std::string source_id;
    BenchmarkSchema schema = BenchmarkSchema::CountryGenderAge;
    DimensionSpec spec;
    std::map<StratumKey, double> rows;  // raw population weights
    int vintage = 0;
    std::string provenance;
    std::vector<QuarantineEntry> quarantine;  // rows with unknown countries
    std::vector<std::string> warnings;

    std::size_t strata() const noexcept { return rows.size(); }
    double total_population() const;
    double quarantined_population() const;
};

struct BenchmarkLoadOptions {
    const GeoRollup* rollup = nullptr;  // when set, countries are resolved and unknowns quarantined
    std::optional<int> vintage;         // overrides the file's "# vintage:" line
    std::string source_id;              // overrides "# source:" (defaults to the file stem)
    double count_slack = 0.10;          // relative slack for the stratum-count warning
};

// Columns: country, <schema axes...>, population. Rows are validated and
// keyed by resolved country code.
BenchmarkTable load_benchmark(const std::filesystem::path& path, BenchmarkSchema schema,
                              const BenchmarkLoadOptions& options = {});
BenchmarkTable parse_benchmark(const CsvTable& table, BenchmarkSchema schema,
                               const BenchmarkLoadOptions& options = {});

// Aggregates the table onto `spec`. Spec axes must be table axes, or
// region/continent reached from country through the rollup. An optional
// country filter is applied before aggregation.
Distribution build_dimension(const BenchmarkTable& table, const DimensionSpec& spec, const GeoRollup& rollup,
                             const std::set<std::string>* countries = nullptr);

// Restricts a country-level distribution to `countries` and renormalizes.
Distribution filter_benchmark(const Distribution& dist, const std::set<std::string>& countries);

struct DimensionEntry {
    DimensionSpec spec;
    BenchmarkSchema source = BenchmarkSchema::CountryGenderAge;
};

struct DimensionRegistry {
    std::vector<DimensionEntry> dimensions;

    const DimensionEntry& find(std::string_view name) const;
    std::vector<std::string> names() const;
    void validate() const;

    nlohmann::json to_json() const;
    static DimensionRegistry from_json(const nlohmann::json& json);
    static DimensionRegistry load(const std::filesystem::path& path);
};

// The 13 default dimensions, most to least demanding.
DimensionRegistry default_dimensions();

class BenchmarkSuite {
public:
    BenchmarkSuite(GeoRollup rollup, std::map<BenchmarkSchema, BenchmarkTable> tables);

    // Reads <schema>.csv for each schema present in `dir`. The rollup defaults
    // to <dir>/geo_rollup.csv.
    static BenchmarkSuite load_dir(const std::filesystem::path& dir,
                                   const std::optional<std::filesystem::path>& rollup_path = std::nullopt);

    bool has(BenchmarkSchema schema) const { return tables_.contains(schema); }
    const BenchmarkTable& table(BenchmarkSchema schema) const;
    const std::map<BenchmarkSchema, BenchmarkTable>& tables() const noexcept { return tables_; }
    const GeoRollup& rollup() const noexcept { return rollup_; }

    Distribution dimension(const DimensionEntry& entry, const std::set<std::string>* countries = nullptr) const;
    Distribution dimension(const DimensionSpec& spec, const std::set<std::string>* countries = nullptr) const;

private:
    GeoRollup rollup_;
    std::map<BenchmarkSchema, BenchmarkTable> tables_;
};

// Default registry, checked against the suite. Throws RegistryIncomplete
// when a source table is missing.
DimensionRegistry default_registry(const BenchmarkSuite& suite);

}  // namespace repscore
