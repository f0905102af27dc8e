#include "repscore/benchmarks.hpp"

#include <cstdio>
#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>

#include "repscore/error.hpp"

namespace repscore {

namespace {

std::string at_line(const CsvTable& table, std::size_t row) {
    return table.source + ":" + std::to_string(table.line_numbers[row]);
}

std::optional<double> parse_number(const std::string& text) {
    if (text.empty()) return std::nullopt;
    errno = 0;
    char* end = nullptr;
    const double value = std::strtod(text.c_str(), &end);
    if (end != text.c_str() + text.size() || errno == ERANGE) return std::nullopt;
    return value;
}

std::optional<int> parse_year(const std::string& text) {
    if (text.empty()) return std::nullopt;
    char* end = nullptr;
    const long value = std::strtol(text.c_str(), &end, 10);
    if (end != text.c_str() + text.size()) return std::nullopt;
    return static_cast<int>(value);
}

bool is_geo_axis(std::string_view axis) { return axis == "region" || axis == "continent"; }

void check_derivable(const DimensionSpec& spec, const std::vector<std::string>& source_axes, std::string_view source) {
    const bool has_country = std::find(source_axes.begin(), source_axes.end(), "country") != source_axes.end();
    for (const auto& axis : spec.axes) {
        const bool direct = std::find(source_axes.begin(), source_axes.end(), axis) != source_axes.end();
        if (!direct && !(has_country && is_geo_axis(axis)))
            throw Error(ErrorCode::UnderivableDimension,
                        "axis '" + axis + "' of '" + spec.name + "' not derivable from " + std::string(source));
    }
}

DimensionSpec named_spec(std::string name, std::vector<std::string> axes) {
    DimensionSpec spec;
    spec.name = std::move(name);
    spec.axes = std::move(axes);
    return spec;
}

}  // namespace

std::string_view schema_name(BenchmarkSchema schema) noexcept {
    switch (schema) {
    case BenchmarkSchema::CountryGenderAge: return "country_gender_age";
    case BenchmarkSchema::CountryReligion: return "country_religion";
    case BenchmarkSchema::CountryEnvironment: return "country_environment";
    }
    return "";
}

BenchmarkSchema parse_schema(std::string_view name) {
    for (auto schema : kAllSchemas)
        if (schema_name(schema) == name) return schema;
    throw Error(ErrorCode::SchemaError, "unknown benchmark schema '" + std::string(name) + "'");
}

const std::vector<std::string>& schema_axes(BenchmarkSchema schema) {
    static const std::vector<std::string> cga{"country", "gender", "age_group"};
    static const std::vector<std::string> religion{"country", "religion"};
    static const std::vector<std::string> environment{"country", "environment"};
    switch (schema) {
    case BenchmarkSchema::CountryGenderAge: return cga;
    case BenchmarkSchema::CountryReligion: return religion;
    case BenchmarkSchema::CountryEnvironment: return environment;
    }
    return cga;
}

std::size_t expected_strata(BenchmarkSchema schema) noexcept {
    switch (schema) {
    case BenchmarkSchema::CountryGenderAge: return 2699;
    case BenchmarkSchema::CountryReligion: return 1607;
    case BenchmarkSchema::CountryEnvironment: return 449;
    }
    return 0;
}

// ---------------------------------------------------------------------------
// GeoRollup

const std::set<std::string>& GeoRollup::region_domain() {
    static const std::set<std::string> regions{
        "Eastern Africa",  "Middle Africa",      "Northern Africa", "Southern Africa",  "Western Africa",
        "Central Asia",    "Eastern Asia",       "South-eastern Asia", "Southern Asia", "Western Asia",
        "Eastern Europe",  "Northern Europe",    "Southern Europe", "Western Europe",   "Caribbean",
        "Central America", "South America",      "Northern America", "Australia and New Zealand",
        "Melanesia",       "Micronesia",         "Polynesia"};
    return regions;
}

const std::set<std::string>& GeoRollup::continent_domain() {
    static const std::set<std::string> continents{"Africa", "Asia", "Europe", "Latin America and the Caribbean",
                                                  "Northern America", "Oceania"};
    return continents;
}

GeoRollup GeoRollup::from_table(const CsvTable& table) {
    GeoRollup rollup;
    const auto c_country = table.column("country");
    const auto c_region = table.column("region");
    const auto c_continent = table.column("continent");
    const auto c_name = table.find_column("name");
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        const auto& code = row[c_country];
        if (code.empty()) throw Error(ErrorCode::SchemaError, at_line(table, r) + ": empty country");
        if (!region_domain().contains(row[c_region]))
            throw Error(ErrorCode::SchemaError, at_line(table, r) + ": unknown region '" + row[c_region] + "'");
        if (!continent_domain().contains(row[c_continent]))
            throw Error(ErrorCode::SchemaError, at_line(table, r) + ": unknown continent '" + row[c_continent] + "'");
        if (!rollup.countries_.emplace(code, Entry{row[c_region], row[c_continent]}).second)
            throw Error(ErrorCode::DuplicateStratum, at_line(table, r) + ": country '" + code + "' listed twice");
        rollup.aliases_.emplace(lowercase(code), code);
        if (c_name && !row[*c_name].empty()) rollup.aliases_.emplace(lowercase(row[*c_name]), code);
    }
    if (auto it = table.metadata.find("vintage"); it != table.metadata.end()) rollup.vintage_ = parse_year(it->second);
    return rollup;
}

GeoRollup GeoRollup::load(const std::filesystem::path& path) { return from_table(read_csv(path)); }

std::optional<std::string> GeoRollup::resolve(std::string_view label) const {
    if (countries_.contains(std::string(label))) return std::string(label);
    auto it = aliases_.find(lowercase(trim(label)));
    if (it == aliases_.end()) return std::nullopt;
    return it->second;
}

const GeoRollup::Entry* GeoRollup::find(std::string_view iso3) const {
    auto it = countries_.find(std::string(iso3));
    return it == countries_.end() ? nullptr : &it->second;
}

// ---------------------------------------------------------------------------
// Benchmark tables

double BenchmarkTable::total_population() const {
    double total = 0.0;
    for (const auto& [key, weight] : rows) total += weight;
    return total;
}

double BenchmarkTable::quarantined_population() const {
    double total = 0.0;
    for (const auto& entry : quarantine) total += entry.weight;
    return total;
}

BenchmarkTable parse_benchmark(const CsvTable& csv, BenchmarkSchema schema, const BenchmarkLoadOptions& options) {
    const auto& axes = schema_axes(schema);
    std::vector<std::size_t> columns;
    for (const auto& axis : axes) columns.push_back(csv.column(axis));
    const auto c_population = csv.column("population");

    BenchmarkTable table;
    table.schema = schema;
    table.spec = named_spec(std::string(schema_name(schema)), axes);

    if (options.vintage) {
        table.vintage = *options.vintage;
    } else if (auto it = csv.metadata.find("vintage"); it != csv.metadata.end() && parse_year(it->second)) {
        table.vintage = *parse_year(it->second);
    } else {
        throw Error(ErrorCode::SchemaError, csv.source + ": benchmark vintage missing (add '# vintage: <year>')");
    }
    if (!options.source_id.empty())
        table.source_id = options.source_id;
    else if (auto it = csv.metadata.find("source"); it != csv.metadata.end())
        table.source_id = it->second;
    else
        table.source_id = std::filesystem::path(csv.source).stem().string();
    for (const char* key : {"provenance", "citation"})
        if (auto it = csv.metadata.find(key); it != csv.metadata.end()) table.provenance = it->second;

    for (std::size_t r = 0; r < csv.rows.size(); ++r) {
        const auto& row = csv.rows[r];
        const auto weight = parse_number(row[c_population]);
        if (!weight)
            throw Error(ErrorCode::SchemaError, at_line(csv, r) + ": invalid population '" + row[c_population] + "'");
        if (!std::isfinite(*weight) || *weight < 0.0)
            throw Error(ErrorCode::InvalidWeight, at_line(csv, r) + ": population must be finite and non-negative");

        StratumKey key;
        for (std::size_t a = 0; a < axes.size(); ++a) {
            const auto& label = row[columns[a]];
            if (label.empty()) throw Error(ErrorCode::SchemaError, at_line(csv, r) + ": empty " + axes[a]);
            key.push_back(label);
        }
        if (options.rollup) {
            auto code = options.rollup->resolve(key[0]);
            if (!code) {
                table.quarantine.push_back({key[0], csv.line_numbers[r], *weight});
                continue;
            }
            key[0] = *code;
        }
        if (!table.rows.emplace(key, *weight).second)
            throw Error(ErrorCode::DuplicateStratum, at_line(csv, r) + ": duplicate stratum (" + format_key(key, ", ") + ")");
    }

    for (std::size_t a = 0; a < axes.size(); ++a) {
        auto& domain = table.spec.domains[axes[a]];
        for (const auto& [key, weight] : table.rows) domain.insert(key[a]);
    }

    if (!table.quarantine.empty()) {
        std::set<std::string> labels;
        for (const auto& entry : table.quarantine) labels.insert(entry.label);
        std::string list;
        for (const auto& label : labels) list += (list.empty() ? "" : ", ") + label;
        table.warnings.push_back("quarantined " + std::to_string(table.quarantine.size()) +
                                 " rows with unknown geography: " + list);
    }
    const double expected = static_cast<double>(expected_strata(schema));
    const double found = static_cast<double>(table.strata());
    if (std::abs(found - expected) > options.count_slack * expected)
        table.warnings.push_back("stratum count " + std::to_string(table.strata()) + " differs from expected " +
                                 std::to_string(expected_strata(schema)) + " by more than " +
                                 std::to_string(static_cast<int>(std::lround(options.count_slack * 100))) + "%");
    return table;
}

BenchmarkTable load_benchmark(const std::filesystem::path& path, BenchmarkSchema schema,
                              const BenchmarkLoadOptions& options) {
    return parse_benchmark(read_csv(path), schema, options);
}

Distribution build_dimension(const BenchmarkTable& table, const DimensionSpec& spec, const GeoRollup& rollup,
                             const std::set<std::string>* countries) {
    spec.validate();
    check_derivable(spec, table.spec.axes, table.source_id);

    DimensionSpec out_spec = spec;
    std::vector<std::size_t> source_index;
    for (const auto& axis : spec.axes) {
        if (axis == "region") {
            out_spec.domains[axis] = GeoRollup::region_domain();
            source_index.push_back(0);
        } else if (axis == "continent") {
            out_spec.domains[axis] = GeoRollup::continent_domain();
            source_index.push_back(0);
        } else {
            source_index.push_back(table.spec.axis_index(axis));
            if (auto dom = table.spec.domains.find(axis); dom != table.spec.domains.end())
                out_spec.domains[axis] = dom->second;
        }
    }

    std::map<StratumKey, double> weights;
    double retained = 0.0;
    for (const auto& [row_key, weight] : table.rows) {
        const auto& country = row_key[0];
        if (countries && !countries->contains(country)) continue;
        retained += weight;
        StratumKey key;
        key.reserve(spec.axes.size());
        for (std::size_t a = 0; a < spec.axes.size(); ++a) {
            const auto& axis = spec.axes[a];
            if (is_geo_axis(axis)) {
                const auto* entry = rollup.find(country);
                if (!entry)
                    throw Error(ErrorCode::UnknownGeography, "country '" + country + "' missing from rollup");
                key.push_back(axis == "region" ? entry->region : entry->continent);
            } else {
                key.push_back(row_key[source_index[a]]);
            }
        }
        weights[key] += weight;
    }
    if (weights.empty())
        throw Error(ErrorCode::DegenerateBenchmark, "country filter leaves no strata in '" + spec.name + "'");

    Provenance prov{table.source_id, table.vintage, table.provenance, {}};
    if (countries) {
        const double total = table.total_population();
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.12g", total > 0.0 ? retained / total : 0.0);
        prov.notes.push_back("country filter of " + std::to_string(countries->size()) + " retained mass " + buf);
    }
    return normalize(weights, std::move(out_spec), std::move(prov));
}

Distribution filter_benchmark(const Distribution& dist, const std::set<std::string>& countries) {
    if (countries.empty()) throw Error(ErrorCode::DegenerateBenchmark, "empty country filter");
    return restrict_to(dist, "country", countries);
}

// ---------------------------------------------------------------------------
// Registry

const DimensionEntry& DimensionRegistry::find(std::string_view name) const {
    for (const auto& entry : dimensions)
        if (entry.spec.name == name) return entry;
    throw Error(ErrorCode::InvalidArgument, "unknown dimension '" + std::string(name) + "'");
}

std::vector<std::string> DimensionRegistry::names() const {
    std::vector<std::string> out;
    for (const auto& entry : dimensions) out.push_back(entry.spec.name);
    return out;
}

void DimensionRegistry::validate() const {
    if (dimensions.empty()) throw Error(ErrorCode::InvalidArgument, "registry has no dimensions");
    std::set<std::string> seen;
    for (const auto& entry : dimensions) {
        entry.spec.validate();
        if (entry.spec.name.empty()) throw Error(ErrorCode::InvalidArgument, "registry dimension without a name");
        if (!seen.insert(entry.spec.name).second)
            throw Error(ErrorCode::InvalidArgument, "duplicate dimension '" + entry.spec.name + "'");
        check_derivable(entry.spec, schema_axes(entry.source), schema_name(entry.source));
    }
}

nlohmann::json DimensionRegistry::to_json() const {
    nlohmann::json list = nlohmann::json::array();
    for (const auto& entry : dimensions)
        list.push_back({{"name", entry.spec.name}, {"axes", entry.spec.axes}, {"source", schema_name(entry.source)}});
    return {{"dimensions", list}};
}

DimensionRegistry DimensionRegistry::from_json(const nlohmann::json& json) {
    DimensionRegistry registry;
    try {
        for (const auto& item : json.at("dimensions")) {
            DimensionEntry entry;
            entry.spec = DimensionSpec::from_axes(item.at("axes").get<std::vector<std::string>>());
            if (item.contains("name")) entry.spec.name = item.at("name").get<std::string>();
            entry.source = parse_schema(item.at("source").get<std::string>());
            registry.dimensions.push_back(std::move(entry));
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::SchemaError, std::string("registry: ") + e.what());
    }
    registry.validate();
    return registry;
}

DimensionRegistry DimensionRegistry::load(const std::filesystem::path& path) {
    nlohmann::json json;
    try {
        json = nlohmann::json::parse(read_file(path));
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::SchemaError, path.string() + ": " + e.what());
    }
    return from_json(json);
}

DimensionRegistry default_dimensions() {
    using S = BenchmarkSchema;
    DimensionRegistry registry;
    auto add = [&](std::string name, std::vector<std::string> axes, S source) {
        registry.dimensions.push_back({named_spec(std::move(name), std::move(axes)), source});
    };
    for (const char* geo : {"country", "region", "continent"}) {
        const std::string g = geo;
        add(g + "_gender_age", {g, "gender", "age_group"}, S::CountryGenderAge);
        add(g + "_religion", {g, "religion"}, S::CountryReligion);
        add(g + "_environment", {g, "environment"}, S::CountryEnvironment);
    }
    add("country", {"country"}, S::CountryGenderAge);
    add("region", {"region"}, S::CountryGenderAge);
    add("continent", {"continent"}, S::CountryGenderAge);
    add("gender", {"gender"}, S::CountryGenderAge);
    return registry;
}

DimensionRegistry default_registry(const BenchmarkSuite& suite) {
    std::string missing;
    for (auto schema : kAllSchemas)
        if (!suite.has(schema)) missing += (missing.empty() ? "" : ", ") + std::string(schema_name(schema));
    if (!missing.empty()) throw Error(ErrorCode::RegistryIncomplete, "missing benchmark tables: " + missing);
    return default_dimensions();
}

// ---------------------------------------------------------------------------
// Suite

BenchmarkSuite::BenchmarkSuite(GeoRollup rollup, std::map<BenchmarkSchema, BenchmarkTable> tables)
    : rollup_(std::move(rollup)), tables_(std::move(tables)) {}

BenchmarkSuite BenchmarkSuite::load_dir(const std::filesystem::path& dir,
                                        const std::optional<std::filesystem::path>& rollup_path) {
    if (!std::filesystem::is_directory(dir))
        throw Error(ErrorCode::IoError, "benchmark directory not found: " + dir.string());
    GeoRollup rollup = GeoRollup::load(rollup_path.value_or(dir / "geo_rollup.csv"));
    std::map<BenchmarkSchema, BenchmarkTable> tables;
    BenchmarkLoadOptions options;
    options.rollup = &rollup;
    for (auto schema : kAllSchemas) {
        const auto path = dir / (std::string(schema_name(schema)) + ".csv");
        if (std::filesystem::exists(path)) tables.emplace(schema, load_benchmark(path, schema, options));
    }
    return BenchmarkSuite(std::move(rollup), std::move(tables));
}

const BenchmarkTable& BenchmarkSuite::table(BenchmarkSchema schema) const {
    auto it = tables_.find(schema);
    if (it == tables_.end())
        throw Error(ErrorCode::RegistryIncomplete, "benchmark table '" + std::string(schema_name(schema)) + "' not loaded");
    return it->second;
}

Distribution BenchmarkSuite::dimension(const DimensionEntry& entry, const std::set<std::string>* countries) const {
    return build_dimension(table(entry.source), entry.spec, rollup_, countries);
}

Distribution BenchmarkSuite::dimension(const DimensionSpec& spec, const std::set<std::string>* countries) const {
    for (const auto& [schema, table] : tables_) {
        try {
            check_derivable(spec, table.spec.axes, table.source_id);
        } catch (const Error&) {
            continue;
        }
        return build_dimension(table, spec, rollup_, countries);
    }
    throw Error(ErrorCode::UnderivableDimension, "no loaded table can produce '" + spec.name + "'");
}

}  // namespace repscore
