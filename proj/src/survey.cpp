#include "repscore/survey.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "repscore/error.hpp"

namespace repscore {

AgeBracketing AgeBracketing::standard() {
    return {{{"18-25", 18, 26}, {"26-35", 26, 36}, {"36-45", 36, 46}, {"46-55", 46, 56}, {"56-65", 56, 66},
             {"65+", 66, std::nullopt}}};
}

int AgeBracketing::minimum() const {
    if (brackets.empty()) throw Error(ErrorCode::InvalidArgument, "no age brackets");
    return brackets.front().lower;
}

std::set<std::string> AgeBracketing::labels() const {
    std::set<std::string> out;
    for (const auto& b : brackets) out.insert(b.label);
    return out;
}

void AgeBracketing::validate() const {
    if (brackets.empty()) throw Error(ErrorCode::InvalidArgument, "no age brackets");
    for (std::size_t i = 0; i < brackets.size(); ++i) {
        const auto& b = brackets[i];
        if (b.upper && *b.upper <= b.lower)
            throw Error(ErrorCode::InvalidArgument, "empty age bracket '" + b.label + "'");
        if (i + 1 < brackets.size() && (!b.upper || *b.upper != brackets[i + 1].lower))
            throw Error(ErrorCode::InvalidArgument, "age brackets must be contiguous at '" + b.label + "'");
    }
    if (labels().size() != brackets.size()) throw Error(ErrorCode::InvalidArgument, "duplicate age bracket labels");
}

std::string bracket_age(int age_years, const AgeBracketing& brackets) {
    for (const auto& b : brackets.brackets)
        if (age_years >= b.lower && (!b.upper || age_years < *b.upper)) return b.label;
    throw Error(ErrorCode::OutOfRange, "age " + std::to_string(age_years) + " outside configured brackets");
}

void ColumnMapping::restrict_to_benchmarks(const BenchmarkSuite& suite) {
    for (const auto& [axis, column] : columns) {
        std::set<std::string> domain;
        for (const auto& [schema, table] : suite.tables())
            if (auto it = table.spec.domains.find(axis); it != table.spec.domains.end())
                domain.insert(it->second.begin(), it->second.end());
        if (axis == "country")
            for (const auto& [code, entry] : suite.rollup().countries()) domain.insert(code);
        if (!domain.empty()) domains[axis] = std::move(domain);
    }
}

bool SurveyMicrodata::has_axis(std::string_view axis) const {
    return std::find(axes.begin(), axes.end(), axis) != axes.end();
}

namespace {

std::optional<int> parse_age(const std::string& text) {
    char* end = nullptr;
    const double value = std::strtod(text.c_str(), &end);
    if (end != text.c_str() + text.size() || !std::isfinite(value)) return std::nullopt;
    return static_cast<int>(std::floor(value));
}

struct AxisHarmonizer {
    std::map<std::string, std::string> exact;
    std::map<std::string, std::string> folded;  // lowercased raw -> canonical
    std::map<std::string, std::string> domain_folded;
    const std::set<std::string>* domain = nullptr;

    std::optional<std::string> operator()(const std::string& raw, bool is_country, const GeoRollup* rollup) const {
        std::string value = raw;
        if (auto it = exact.find(raw); it != exact.end()) {
            value = it->second;
        } else if (auto f = folded.find(lowercase(raw)); f != folded.end()) {
            value = f->second;
        } else if (is_country && rollup) {
            if (auto code = rollup->resolve(raw)) value = *code;
        }
        if (!domain || domain->empty() || domain->contains(value)) return value;
        if (auto d = domain_folded.find(lowercase(value)); d != domain_folded.end()) return d->second;
        return std::nullopt;
    }
};

}  // namespace

SurveyMicrodata parse_survey(const CsvTable& table, const ColumnMapping& mapping, const GeoRollup* rollup) {
    if (mapping.columns.empty()) throw Error(ErrorCode::SchemaError, "column mapping is empty");

    SurveyMicrodata data;
    std::vector<std::size_t> source_columns;
    std::vector<AxisHarmonizer> harmonizers;
    for (const auto& [axis, column] : mapping.columns) {
        auto index = table.find_column(column);
        if (!index)
            throw Error(ErrorCode::SchemaError,
                        table.source + ": column '" + column + "' mapped to " + axis + " not found");
        data.axes.push_back(axis);
        source_columns.push_back(*index);

        AxisHarmonizer h;
        if (auto it = mapping.aliases.find(axis); it != mapping.aliases.end()) {
            h.exact = it->second;
            for (const auto& [raw, canonical] : it->second) h.folded.emplace(lowercase(raw), canonical);
        }
        if (auto it = mapping.domains.find(axis); it != mapping.domains.end()) {
            h.domain = &it->second;
            for (const auto& label : it->second) h.domain_folded.emplace(lowercase(label), label);
        }
        harmonizers.push_back(std::move(h));
    }

    const bool raw_ages = mapping.age_mode == AgeMode::RawYears && mapping.columns.contains("age_group");
    if (raw_ages) {
        mapping.brackets.validate();
        if (auto it = mapping.domains.find("age_group"); it != mapping.domains.end() && !it->second.empty()) {
            for (const auto& label : mapping.brackets.labels())
                if (!it->second.contains(label))
                    throw Error(ErrorCode::SchemaError,
                                "age bracket '" + label + "' does not match the benchmark age groups");
        }
    }

    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        std::vector<std::string> values(data.axes.size());
        std::string drop_reason;
        for (std::size_t a = 0; a < data.axes.size() && drop_reason.empty(); ++a) {
            const auto& axis = data.axes[a];
            const std::string raw = trim(table.rows[r][source_columns[a]]);
            if (mapping.missing_tokens.contains(raw)) continue;

            if (raw_ages && axis == "age_group") {
                const auto years = parse_age(raw);
                if (!years) {
                    drop_reason = "unmappable_age_group";
                } else if (*years < mapping.brackets.minimum()) {
                    drop_reason = "age_out_of_range";
                } else {
                    values[a] = bracket_age(*years, mapping.brackets);
                    continue;
                }
                if (mapping.strict && drop_reason == "unmappable_age_group")
                    throw Error(ErrorCode::HarmonizationError,
                                table.source + ":" + std::to_string(table.line_numbers[r]) + ": invalid age '" + raw + "'");
                data.quarantined_values[axis][raw] += 1;
                continue;
            }

            if (auto value = harmonizers[a](raw, axis == "country", rollup)) {
                values[a] = *value;
                continue;
            }
            if (mapping.strict)
                throw Error(ErrorCode::HarmonizationError, table.source + ":" + std::to_string(table.line_numbers[r]) +
                                                               ": unknown " + axis + " label '" + raw + "'");
            drop_reason = "unmappable_" + axis;
            data.quarantined_values[axis][raw] += 1;
        }
        if (!drop_reason.empty()) {
            data.dropped[drop_reason] += 1;
            ++data.n_dropped;
            continue;
        }
        data.rows.push_back(std::move(values));
    }
    data.n_total = static_cast<std::int64_t>(data.rows.size());
    if (data.n_total == 0) throw Error(ErrorCode::EmptySample, table.source + ": no usable respondents");
    return data;
}

SurveyMicrodata load_survey(const std::filesystem::path& path, const ColumnMapping& mapping, const GeoRollup* rollup) {
    const std::string text = read_file(path);
    auto data = parse_survey(parse_csv(text, path.string()), mapping, rollup);
    data.source_digest = sha256_hex(text);
    return data;
}

SampleProjection project_sample(const SurveyMicrodata& data, const DimensionSpec& spec, const GeoRollup& rollup) {
    spec.validate();
    std::vector<std::size_t> source;
    for (const auto& axis : spec.axes) {
        const bool geo = axis == "region" || axis == "continent";
        const std::string needed = geo && !data.has_axis(axis) ? "country" : axis;
        auto it = std::find(data.axes.begin(), data.axes.end(), needed);
        if (it == data.axes.end())
            throw Error(ErrorCode::SchemaError, "dimension '" + spec.name + "' needs unmapped axis '" + needed + "'");
        source.push_back(static_cast<std::size_t>(it - data.axes.begin()));
    }

    std::map<StratumKey, std::int64_t> counts;
    std::map<std::string, std::int64_t> excluded;
    for (const auto& row : data.rows) {
        StratumKey key;
        std::string reason;
        for (std::size_t a = 0; a < spec.axes.size() && reason.empty(); ++a) {
            const auto& value = row[source[a]];
            const auto& axis = spec.axes[a];
            if (value.empty()) {
                reason = "missing_" + data.axes[source[a]];
            } else if (data.axes[source[a]] == "country" && axis != "country") {
                const auto* entry = rollup.find(value);
                if (!entry)
                    reason = "unknown_geography";
                else
                    key.push_back(axis == "region" ? entry->region : entry->continent);
            } else {
                key.push_back(value);
            }
        }
        if (!reason.empty()) {
            excluded[reason] += 1;
            continue;
        }
        counts[key] += 1;
    }
    if (counts.empty()) throw Error(ErrorCode::EmptySample, "no usable respondents for '" + spec.name + "'");
    DimensionSpec out = spec;
    out.domains.clear();
    return {from_counts(counts, std::move(out)), std::move(excluded)};
}

Distribution to_sample_distribution(const SurveyMicrodata& data, const DimensionSpec& spec, const GeoRollup& rollup) {
    return project_sample(data, spec, rollup).distribution;
}

}  // namespace repscore
