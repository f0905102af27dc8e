#include "repscore/cli.hpp"

#include <filesystem>
#include <iostream>
#include <optional>
#include <random>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "repscore/benchmarks.hpp"
#include "repscore/csv.hpp"
#include "repscore/error.hpp"
#include "repscore/montecarlo.hpp"
#include "repscore/scorecard.hpp"
#include "repscore/survey.hpp"

#ifndef REPSCORE_DATA_DIR
#define REPSCORE_DATA_DIR "data"
#endif

namespace repscore::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const std::vector<std::string> kSurveyAxes{"country", "gender", "age_group", "religion", "environment"};

struct RunConfig {
    std::string command;
    std::string benchmarks;
    std::string rollup;
    std::string registry;
    std::string out_dir;
    std::vector<std::string> formats{"table"};
    std::vector<std::string> countries;
    bool strict = true;
    std::optional<std::uint64_t> seed;

    std::string survey;
    std::string survey_id;
    std::vector<std::string> columns;  // axis=column
    std::vector<std::string> aliases;  // axis:raw=canonical
    std::string age_mode = "bracketed";
    bool max_gri = false;
    std::int64_t iterations = kDefaultIterations;

    std::string dimension;
    std::vector<std::int64_t> n;
    std::int64_t top_k = 10;
    std::vector<std::string> scorecards;

    // Output location is left out so the digest only tracks what shapes the numbers.
    json canonical() const {
        return {{"command", command},       {"benchmarks", benchmarks}, {"rollup", rollup},
                {"registry", registry},     {"formats", formats},
                {"countries", countries},   {"strict", strict},         {"seed", seed ? json(*seed) : json(nullptr)},
                {"survey", survey},         {"survey_id", survey_id},   {"columns", columns},
                {"aliases", aliases},       {"age_mode", age_mode},     {"max_gri", max_gri},
                {"iterations", iterations}, {"dimension", dimension},   {"n", n},
                {"top_k", top_k},           {"scorecards", scorecards}};
    }
};

// State shared by one subcommand invocation.
struct Context {
    RunConfig cfg;
    std::vector<Format> formats;
    std::string digest;
    std::ostream& out;
    std::ostream& err;
};

std::string vintage_text(const std::map<std::string, int>& vintages) {
    std::string text;
    for (const auto& [source, year] : vintages) text += (text.empty() ? "" : ", ") + source + " (" + std::to_string(year) + ")";
    return text.empty() ? "none" : text;
}

std::string stamp(const std::string& content, Format format, const std::string& digest,
                  const std::map<std::string, int>& vintages) {
    if (format == Format::Json) {
        json j = json::parse(content);
        j["provenance"] = {{"tool_version", kToolVersion}, {"config_digest", digest}, {"benchmark_vintages", vintages}};
        return j.dump(2) + "\n";
    }
    if (format == Format::SvgHeatmap) return content;
    std::string header = "# tool_version: " + std::string(kToolVersion) + "\n# config_digest: " + digest +
                         "\n# benchmark_vintages: " + vintage_text(vintages) + "\n";
    return header + content;
}

void emit(Context& ctx, const std::string& stem, Format format, const std::string& content) {
    if (ctx.cfg.out_dir.empty()) {
        ctx.out << content;
        return;
    }
    fs::create_directories(ctx.cfg.out_dir);
    const fs::path path = fs::path(ctx.cfg.out_dir) / (stem + "." + std::string(format_extension(format)));
    write_file_atomic(path, content);
    ctx.out << "wrote " << path.string() << "\n";
}

std::uint64_t resolve_seed(Context& ctx) {
    if (!ctx.cfg.seed) {
        std::random_device device;
        ctx.cfg.seed = (static_cast<std::uint64_t>(device()) << 32) ^ device();
        ctx.err << "seed: " << *ctx.cfg.seed << " (pass --seed " << *ctx.cfg.seed << " to reproduce)\n";
    }
    return *ctx.cfg.seed;
}

void finalize(Context& ctx) {
    ctx.formats.clear();
    for (const auto& name : ctx.cfg.formats) ctx.formats.push_back(parse_format(name));
    if (ctx.cfg.iterations < 1) throw Error(ErrorCode::InvalidArgument, "--iterations must be at least 1");
    if (ctx.cfg.age_mode != "bracketed" && ctx.cfg.age_mode != "years")
        throw Error(ErrorCode::InvalidArgument, "--age-mode must be 'bracketed' or 'years'");
    ctx.digest = sha256_hex(ctx.cfg.canonical().dump());
}

BenchmarkSuite load_suite(const RunConfig& cfg) {
    if (cfg.benchmarks.empty()) throw Error(ErrorCode::InvalidArgument, "--benchmarks DIR is required");
    const fs::path dir = cfg.benchmarks;
    std::optional<fs::path> rollup;
    if (!cfg.rollup.empty())
        rollup = cfg.rollup;
    else if (!fs::exists(dir / "geo_rollup.csv"))
        rollup = fs::path(REPSCORE_DATA_DIR) / "geo_rollup.csv";
    return BenchmarkSuite::load_dir(dir, rollup);
}

DimensionRegistry load_registry(const RunConfig& cfg) {
    return cfg.registry.empty() ? default_dimensions() : DimensionRegistry::load(cfg.registry);
}

std::optional<std::set<std::string>> country_filter(const RunConfig& cfg, const GeoRollup& rollup) {
    if (cfg.countries.empty()) return std::nullopt;
    std::set<std::string> codes;
    for (const auto& label : cfg.countries) {
        auto code = rollup.resolve(label);
        if (!code) throw Error(ErrorCode::UnknownGeography, "unknown country in --countries: '" + label + "'");
        codes.insert(*code);
    }
    return codes;
}

std::pair<std::string, std::string> split_pair(const std::string& text, char sep, const char* flag) {
    const auto pos = text.find(sep);
    if (pos == std::string::npos || pos == 0 || pos + 1 == text.size())
        throw Error(ErrorCode::InvalidArgument, std::string(flag) + " expects A" + sep + "B, got '" + text + "'");
    return {trim(text.substr(0, pos)), trim(text.substr(pos + 1))};
}

SurveyMicrodata load_survey_for(const RunConfig& cfg, const BenchmarkSuite& suite) {
    if (cfg.survey.empty()) throw Error(ErrorCode::InvalidArgument, "--survey FILE is required");
    const std::string text = read_file(cfg.survey);
    const CsvTable table = parse_csv(text, cfg.survey);

    ColumnMapping mapping;
    for (const auto& entry : cfg.columns) {
        auto [axis, column] = split_pair(entry, '=', "--column");
        mapping.columns[axis] = column;
    }
    // Unmapped axes are picked up by name when the survey has such a column.
    for (const auto& axis : kSurveyAxes)
        if (!mapping.columns.contains(axis) && table.find_column(axis)) mapping.columns[axis] = axis;
    for (const auto& entry : cfg.aliases) {
        auto [axis, rest] = split_pair(entry, ':', "--alias");
        auto [raw, canonical] = split_pair(rest, '=', "--alias");
        mapping.aliases[axis][raw] = canonical;
    }
    mapping.age_mode = cfg.age_mode == "years" ? AgeMode::RawYears : AgeMode::PreBracketed;
    mapping.strict = cfg.strict;
    mapping.restrict_to_benchmarks(suite);

    auto data = parse_survey(table, mapping, &suite.rollup());
    data.source_digest = sha256_hex(text);
    return data;
}

std::map<std::string, int> suite_vintages(const BenchmarkSuite& suite) {
    std::map<std::string, int> out;
    for (const auto& [schema, table] : suite.tables()) out[table.source_id] = table.vintage;
    return out;
}

int cmd_score(Context& ctx) {
    const auto suite = load_suite(ctx.cfg);
    const auto registry = load_registry(ctx.cfg);
    const auto survey = load_survey_for(ctx.cfg, suite);

    ScoreOptions options;
    options.include_max_gri = ctx.cfg.max_gri;
    options.iterations = ctx.cfg.iterations;
    if (ctx.cfg.max_gri) options.seed = resolve_seed(ctx);
    options.countries = country_filter(ctx.cfg, suite.rollup());
    options.survey_id = ctx.cfg.survey_id.empty() ? fs::path(ctx.cfg.survey).stem().string() : ctx.cfg.survey_id;
    finalize(ctx);
    options.config_digest = ctx.digest;

    const Scorecard card = compute_scorecard(survey, suite, registry, options);
    for (auto format : ctx.formats) emit(ctx, "scorecard", format, render(card, format));
    for (const auto& r : card.results)
        if (!r.ok()) ctx.err << "dimension " << r.dimension << " not scored: " << r.error << "\n";
    return card.complete() ? kExitOk : kExitPartial;
}

int cmd_max_gri(Context& ctx) {
    if (ctx.cfg.n.empty()) throw Error(ErrorCode::InvalidArgument, "--n is required");
    const auto suite = load_suite(ctx.cfg);
    const auto registry = load_registry(ctx.cfg);
    const auto& entry = registry.find(ctx.cfg.dimension);
    const auto filter = country_filter(ctx.cfg, suite.rollup());
    const std::uint64_t seed = resolve_seed(ctx);
    finalize(ctx);

    const Distribution q = suite.dimension(entry, filter ? &*filter : nullptr);
    const auto& table = suite.table(entry.source);
    json estimates = json::array();
    for (auto n : ctx.cfg.n) {
        json j = to_json(max_gri(q, n, ctx.cfg.iterations, seed));
        j["dimension"] = entry.spec.name;
        j["benchmark_vintage"] = table.vintage;
        j["benchmark_source"] = table.source_id;
        estimates.push_back(std::move(j));
    }
    json doc = estimates.size() == 1 ? estimates.front() : json{{"estimates", estimates}};
    doc["tool_version"] = kToolVersion;
    doc["config_digest"] = ctx.digest;
    emit(ctx, "max_gri_" + entry.spec.name, Format::Json, doc.dump(2) + "\n");
    return kExitOk;
}

int cmd_segments(Context& ctx) {
    if (ctx.cfg.top_k < 1) throw Error(ErrorCode::InvalidArgument, "--top-k must be at least 1");
    const auto suite = load_suite(ctx.cfg);
    const auto registry = load_registry(ctx.cfg);
    const auto& entry = registry.find(ctx.cfg.dimension);
    const auto survey = load_survey_for(ctx.cfg, suite);
    const auto filter = country_filter(ctx.cfg, suite.rollup());
    finalize(ctx);
    for (auto format : ctx.formats)
        if (format == Format::SvgHeatmap)
            throw Error(ErrorCode::UnsupportedFormat, "segments support table, json and csv output");

    const AlignedPair pair = dimension_pair(survey, suite, entry, filter ? &*filter : nullptr);
    auto segments = top_segments(pair, static_cast<std::size_t>(ctx.cfg.top_k));
    // Strata that match their benchmark share are not deviations worth listing.
    std::erase_if(segments, [](const auto& s) { return s.tvd_contribution <= 1e-12; });
    const auto vintages = suite_vintages(suite);
    for (auto format : ctx.formats)
        emit(ctx, "segments_" + entry.spec.name, format,
             stamp(render_segments(entry.spec.name, segments, format), format, ctx.digest, vintages));
    return kExitOk;
}

int cmd_validate(Context& ctx) {
    finalize(ctx);
    const auto suite = load_suite(ctx.cfg);
    const auto& rollup = suite.rollup();
    bool partial = false;
    json report = {{"rollup", {{"countries", rollup.countries().size()},
                               {"vintage", rollup.vintage() ? json(*rollup.vintage()) : json(nullptr)}}},
                   {"tables", json::array()}};
    std::ostringstream text;
    text << "rollup: " << rollup.countries().size() << " countries, vintage "
         << (rollup.vintage() ? std::to_string(*rollup.vintage()) : "unknown") << "\n";
    for (auto schema : kAllSchemas) {
        const std::string name{schema_name(schema)};
        if (!suite.has(schema)) {
            partial = true;
            text << name << ": missing\n";
            report["tables"].push_back({{"schema", name}, {"status", "missing"}});
            continue;
        }
        const auto& t = suite.table(schema);
        json quarantine = json::array();
        for (const auto& q : t.quarantine) quarantine.push_back({{"label", q.label}, {"line", q.line}, {"weight", q.weight}});
        partial = partial || !t.quarantine.empty();
        report["tables"].push_back({{"schema", name},
                                    {"status", "ok"},
                                    {"source", t.source_id},
                                    {"strata", t.strata()},
                                    {"expected_strata", expected_strata(schema)},
                                    {"total_population", t.total_population()},
                                    {"vintage", t.vintage},
                                    {"quarantine", quarantine},
                                    {"warnings", t.warnings}});
        text << name << ": source " << t.source_id << ", K=" << t.strata() << " (reference " << expected_strata(schema)
             << "), population " << t.total_population() << ", vintage " << t.vintage << "\n";
        for (const auto& q : t.quarantine)
            text << "  quarantined line " << q.line << ": " << q.label << " (" << q.weight << ")\n";
        for (const auto& w : t.warnings) text << "  warning: " << w << "\n";
    }
    const auto vintages = suite_vintages(suite);
    for (auto format : ctx.formats) {
        if (format == Format::Json)
            emit(ctx, "validation", format, stamp(report.dump(2), format, ctx.digest, vintages));
        else if (format == Format::Table)
            emit(ctx, "validation", format, stamp(text.str(), format, ctx.digest, vintages));
        else
            throw Error(ErrorCode::UnsupportedFormat, "validate supports table and json output");
    }
    if (partial) ctx.err << "validation finished with warnings\n";
    return partial ? kExitPartial : kExitOk;
}

int cmd_compare(Context& ctx) {
    finalize(ctx);
    std::vector<Scorecard> cards;
    for (const auto& path : ctx.cfg.scorecards) {
        try {
            cards.push_back(scorecard_from_json(json::parse(read_file(path))));
        } catch (const json::parse_error& e) {
            throw Error(ErrorCode::SchemaError, path + ": " + e.what());
        }
    }
    const auto table = compare_waves(cards);
    std::map<std::string, int> vintages;
    for (const auto& card : cards) vintages.insert(card.benchmark_vintages.begin(), card.benchmark_vintages.end());
    for (auto format : ctx.formats) {
        const std::string body =
            format == Format::SvgHeatmap ? render_heatmap(cards) : render_longitudinal(table, format);
        emit(ctx, "comparison", format, stamp(body, format, ctx.digest, vintages));
    }
    return kExitOk;
}

void add_survey_options(CLI::App* sub, RunConfig& cfg) {
    sub->add_option("--survey", cfg.survey, "Survey CSV (one row per respondent)");
    sub->add_option("--survey-id", cfg.survey_id, "Identifier recorded in outputs (default: file stem)");
    sub->add_option("--column", cfg.columns, "Axis to column mapping, axis=column (repeatable)")->delimiter(',');
    sub->add_option("--alias", cfg.aliases, "Label alias, axis:raw=canonical (repeatable)")->delimiter(',');
    sub->add_option("--age-mode", cfg.age_mode, "'bracketed' labels or raw 'years'")->capture_default_str();
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    Context ctx{RunConfig{}, {}, {}, out, err};
    RunConfig& cfg = ctx.cfg;

    CLI::App app{"Representativeness scoring of survey samples against population benchmarks", "repscore"};
    app.set_version_flag("--version", std::string(kToolVersion));
    app.set_config("--config", "", "key = value config file; flags override file values");
    app.require_subcommand(1);
    app.fallthrough();

    std::uint64_t seed = 0;
    auto* seed_opt = app.add_option("--seed", seed, "RNG seed; a random one is chosen and printed if omitted");
    app.add_flag("--strict,!--lenient", cfg.strict, "Unknown labels are errors (strict) or dropped rows (lenient)");
    app.add_option("--format", cfg.formats, "Output formats: table, json, csv, svg-heatmap")->delimiter(',');
    app.add_option("--out-dir", cfg.out_dir, "Write outputs here instead of stdout");
    app.add_option("--countries", cfg.countries, "Restrict benchmarks to these countries")->delimiter(',');
    app.add_option("--benchmarks", cfg.benchmarks, "Directory of benchmark tables");
    app.add_option("--rollup", cfg.rollup, "Country to region/continent table");
    app.add_option("--registry", cfg.registry, "Custom dimension registry (JSON)");

    auto* score = app.add_subcommand("score", "Score a survey on every registry dimension");
    add_survey_options(score, cfg);
    score->add_flag("--max-gri", cfg.max_gri, "Estimate max achievable GRI and efficiency per dimension");
    score->add_option("--iterations", cfg.iterations, "Monte Carlo iterations")->capture_default_str();

    auto* maxgri = app.add_subcommand("max-gri", "Monte Carlo max achievable GRI for one dimension (JSON)");
    maxgri->add_option("--dimension", cfg.dimension, "Registry dimension name")->required();
    maxgri->add_option("--n", cfg.n, "Sample size(s), comma separated")->delimiter(',')->required();
    maxgri->add_option("--iterations", cfg.iterations, "Monte Carlo iterations")->capture_default_str();

    auto* segments = app.add_subcommand("segments", "Rank the strata driving one dimension's TVD");
    add_survey_options(segments, cfg);
    segments->add_option("--dimension", cfg.dimension, "Registry dimension name")->required();
    segments->add_option("--top-k", cfg.top_k, "Number of strata to list")->capture_default_str();

    auto* validate = app.add_subcommand("validate", "Check benchmark tables and rollup");
    auto* compare = app.add_subcommand("compare", "Compare scorecards across waves");
    compare->add_option("scorecards", cfg.scorecards, "Scorecard JSON files")->required()->expected(2, -1);

    std::vector<std::string> argv_store{"repscore"};
    argv_store.insert(argv_store.end(), args.begin(), args.end());
    std::vector<const char*> argv;
    for (const auto& a : argv_store) argv.push_back(a.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {  // --help, --version
            app.exit(e, out, err);
            return kExitOk;
        }
        err << "usage error: " << e.what() << "\nrun 'repscore --help' for usage\n";
        return kExitFatal;
    }
    if (seed_opt->count() > 0) cfg.seed = seed;

    try {
        if (score->parsed()) {
            cfg.command = "score";
            return cmd_score(ctx);
        }
        if (maxgri->parsed()) {
            cfg.command = "max-gri";
            return cmd_max_gri(ctx);
        }
        if (segments->parsed()) {
            cfg.command = "segments";
            return cmd_segments(ctx);
        }
        if (validate->parsed()) {
            cfg.command = "validate";
            return cmd_validate(ctx);
        }
        cfg.command = "compare";
        return cmd_compare(ctx);
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
    }
    return kExitFatal;
}

int run(int argc, const char* const* argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return run(args, std::cout, std::cerr);
}

}  // namespace repscore::cli
