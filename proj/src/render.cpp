#include <cstdio>
#include <sstream>

#include "repscore/csv.hpp"
#include "repscore/error.hpp"
#include "repscore/scorecard.hpp"

namespace repscore {

using nlohmann::json;

namespace {

std::string fixed(double value, int digits = 3) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, value);
    return buf;
}

std::string general(double value) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", value);
    return buf;
}

std::string pad(std::string text, std::size_t width) {
    if (text.size() < width) text.append(width - text.size(), ' ');
    return text;
}

std::string lpad(std::string text, std::size_t width) {
    if (text.size() < width) text.insert(0, width - text.size(), ' ');
    return text;
}

std::string xml_escape(std::string_view text) {
    std::string out;
    for (char c : text) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
        }
    }
    return out;
}

std::string_view band_label(Band band) {
    switch (band) {
    case Band::Poor: return "Poor";
    case Band::Moderate: return "Moderate";
    case Band::Good: return "Good";
    case Band::Excellent: return "Excellent";
    }
    return "";
}

Band parse_band(std::string_view label) {
    for (auto b : {Band::Poor, Band::Moderate, Band::Good, Band::Excellent})
        if (band_label(b) == label) return b;
    throw Error(ErrorCode::SchemaError, "unknown band '" + std::string(label) + "'");
}

std::string_view band_color(Band band) {
    switch (band) {
    case Band::Poor: return "#d7301f";
    case Band::Moderate: return "#fdd835";
    case Band::Good: return "#a6d96a";
    case Band::Excellent: return "#1a9641";
    }
    return "#bdbdbd";
}

std::string vintages_line(const std::map<std::string, int>& vintages) {
    std::string out;
    for (const auto& [source, year] : vintages) out += (out.empty() ? "" : ", ") + source + " (" + std::to_string(year) + ")";
    return out.empty() ? "none" : out;
}

template <typename T>
json optional_json(const std::optional<T>& value) {
    return value ? json(*value) : json(nullptr);
}

json deff_json(const DesignEffectReport& d) {
    return {{"deff", d.deff},
            {"coverage_fraction", d.coverage_fraction},
            {"n_eff", d.n_eff},
            {"precision_retained", d.precision_retained},
            {"covered_strata", d.covered_strata},
            {"weight_cv2", d.weight_cv2}};
}

DesignEffectReport deff_from(const json& j) {
    DesignEffectReport d;
    d.deff = j.at("deff").get<double>();
    d.coverage_fraction = j.at("coverage_fraction").get<double>();
    d.n_eff = j.at("n_eff").get<double>();
    d.precision_retained = j.at("precision_retained").get<double>();
    d.covered_strata = j.at("covered_strata").get<std::size_t>();
    d.weight_cv2 = j.at("weight_cv2").get<double>();
    return d;
}

MaxGriEstimate max_gri_from(const json& j) {
    MaxGriEstimate m;
    m.dimension = j.at("dimension").get<std::string>();
    m.mean = j.at("mean").get<double>();
    m.std = j.at("std").get<double>();
    m.n = j.at("n").get<std::int64_t>();
    m.iterations = j.at("T").get<std::int64_t>();
    m.seed = j.at("seed").get<std::uint64_t>();
    return m;
}

json efficiency_json(const EfficiencyRatio& e) {
    return {{"actual", e.actual}, {"max", e.max}, {"ratio", e.ratio}, {"exceeds_noise", e.exceeds_noise}};
}

EfficiencyRatio efficiency_from(const json& j) {
    return {j.at("actual").get<double>(), j.at("max").get<double>(), j.at("ratio").get<double>(),
            j.at("exceeds_noise").get<bool>()};
}

std::string render_table(const Scorecard& card) {
    std::ostringstream out;
    out << "survey: " << (card.survey_id.empty() ? "-" : card.survey_id) << "  N=" << card.n_total << "\n";
    out << pad("dimension", 24) << lpad("N", 7) << lpad("GRI", 8) << lpad("Div", 8) << lpad("SRI", 8)
        << lpad("MaxGRI", 8) << lpad("Eff", 8) << lpad("deff", 9) << lpad("f", 7) << lpad("N_eff", 10) << "  band\n";
    for (const auto& r : card.results) {
        out << pad(r.dimension, 24);
        if (!r.ok()) {
            out << "  error: " << r.error << "\n";
            continue;
        }
        const auto& m = *r.metrics;
        out << lpad(std::to_string(m.n), 7) << lpad(fixed(m.gri), 8)
            << lpad(m.diversity ? fixed(*m.diversity) : "-", 8) << lpad(fixed(m.sri), 8)
            << lpad(m.max_gri ? fixed(m.max_gri->mean) : "-", 8)
            << lpad(m.efficiency ? fixed(m.efficiency->ratio * 100.0, 1) + "%" : "-", 8)
            << lpad(m.deff ? fixed(m.deff->deff, 2) : "-", 9) << lpad(m.deff ? fixed(m.deff->coverage_fraction) : "-", 7)
            << lpad(m.deff ? fixed(m.deff->n_eff, 1) : "-", 10) << "  " << band_label(m.band) << "\n";
    }
    out << "benchmarks: " << vintages_line(card.benchmark_vintages) << "\n";
    out << "tool " << card.provenance.tool_version << ", config " << card.provenance.config_digest << "\n";
    return out.str();
}

std::string render_csv(const Scorecard& card) {
    std::ostringstream out;
    out << "# tool_version: " << card.provenance.tool_version << "\n";
    out << "# config_digest: " << card.provenance.config_digest << "\n";
    out << "# benchmark_vintages: " << vintages_line(card.benchmark_vintages) << "\n";
    out << "dimension,n,gri,diversity,sri,max_gri_mean,max_gri_std,efficiency,deff,coverage_f,n_eff,"
           "precision_retained,band,error\n";
    for (const auto& r : card.results) {
        out << csv_field(r.dimension) << ',';
        if (!r.ok()) {
            out << ",,,,,,,,,,,," << csv_field(r.error) << "\n";
            continue;
        }
        const auto& m = *r.metrics;
        out << m.n << ',' << general(m.gri) << ',' << (m.diversity ? general(*m.diversity) : "") << ','
            << general(m.sri) << ',' << (m.max_gri ? general(m.max_gri->mean) : "") << ','
            << (m.max_gri ? general(m.max_gri->std) : "") << ',' << (m.efficiency ? general(m.efficiency->ratio) : "")
            << ',' << (m.deff ? general(m.deff->deff) : "") << ',' << (m.deff ? general(m.deff->coverage_fraction) : "")
            << ',' << (m.deff ? general(m.deff->n_eff) : "") << ','
            << (m.deff ? general(m.deff->precision_retained) : "") << ',' << band_label(m.band) << ",\n";
    }
    return out.str();
}

}  // namespace

Format parse_format(std::string_view name) {
    if (name == "table") return Format::Table;
    if (name == "json") return Format::Json;
    if (name == "csv") return Format::Csv;
    if (name == "svg-heatmap" || name == "svg") return Format::SvgHeatmap;
    throw Error(ErrorCode::UnsupportedFormat, "unsupported output format '" + std::string(name) + "'");
}

std::string_view format_extension(Format format) noexcept {
    switch (format) {
    case Format::Table: return "txt";
    case Format::Json: return "json";
    case Format::Csv: return "csv";
    case Format::SvgHeatmap: return "svg";
    }
    return "out";
}

json to_json(const MaxGriEstimate& m) {
    return {{"dimension", m.dimension}, {"mean", m.mean}, {"std", m.std},
            {"n", m.n},                 {"T", m.iterations}, {"seed", m.seed}};
}

json to_json(const Scorecard& card) {
    json dims = json::array();
    for (const auto& r : card.results) {
        json d = {{"dimension", r.dimension}};
        if (!r.ok()) {
            d["status"] = "error";
            d["error"] = r.error;
            dims.push_back(std::move(d));
            continue;
        }
        const auto& m = *r.metrics;
        d["status"] = "ok";
        d["n"] = m.n;
        d["gri"] = m.gri;
        d["diversity"] = optional_json(m.diversity);
        d["sri"] = m.sri;
        d["band"] = band_label(m.band);
        d["design_effect"] = m.deff ? deff_json(*m.deff) : json(nullptr);
        d["max_gri"] = m.max_gri ? to_json(*m.max_gri) : json(nullptr);
        d["efficiency"] = m.efficiency ? efficiency_json(*m.efficiency) : json(nullptr);
        d["strata"] = {{"benchmark", m.strata.benchmark}, {"sample", m.strata.sample}, {"overlap", m.strata.overlap}};
        d["excluded"] = m.excluded;
        dims.push_back(std::move(d));
    }
    const auto& p = card.provenance;
    return {{"schema_version", card.schema_version},
            {"survey", {{"id", card.survey_id}, {"n_total", card.n_total}, {"source_digest", card.source_digest}}},
            {"benchmark_vintages", card.benchmark_vintages},
            {"dimensions", std::move(dims)},
            {"provenance",
             {{"tool_version", p.tool_version},
              {"seed", p.seed},
              {"iterations", p.iterations},
              {"max_gri_enabled", p.max_gri_enabled},
              {"rng_algorithm", p.rng_algorithm},
              {"config_digest", p.config_digest},
              {"country_filter", p.country_filter},
              {"dropped_rows", p.dropped_rows},
              {"quarantined_values", p.quarantined_values},
              {"benchmark_quarantine", p.benchmark_quarantine}}}};
}

Scorecard scorecard_from_json(const json& j) {
    try {
        Scorecard card;
        card.schema_version = j.at("schema_version").get<int>();
        if (card.schema_version != kScorecardSchemaVersion)
            throw Error(ErrorCode::SchemaError, "unsupported scorecard schema_version " + std::to_string(card.schema_version));
        const auto& survey = j.at("survey");
        card.survey_id = survey.at("id").get<std::string>();
        card.n_total = survey.at("n_total").get<std::int64_t>();
        card.source_digest = survey.at("source_digest").get<std::string>();
        card.benchmark_vintages = j.at("benchmark_vintages").get<std::map<std::string, int>>();
        for (const auto& d : j.at("dimensions")) {
            DimensionResult r;
            r.dimension = d.at("dimension").get<std::string>();
            if (d.at("status").get<std::string>() != "ok") {
                r.error = d.at("error").get<std::string>();
                card.results.push_back(std::move(r));
                continue;
            }
            DimensionMetrics m;
            m.n = d.at("n").get<std::int64_t>();
            m.gri = d.at("gri").get<double>();
            if (!d.at("diversity").is_null()) m.diversity = d.at("diversity").get<double>();
            m.sri = d.at("sri").get<double>();
            m.band = parse_band(d.at("band").get<std::string>());
            if (!d.at("design_effect").is_null()) m.deff = deff_from(d.at("design_effect"));
            if (!d.at("max_gri").is_null()) m.max_gri = max_gri_from(d.at("max_gri"));
            if (!d.at("efficiency").is_null()) m.efficiency = efficiency_from(d.at("efficiency"));
            const auto& s = d.at("strata");
            m.strata = {s.at("benchmark").get<std::size_t>(), s.at("sample").get<std::size_t>(),
                        s.at("overlap").get<std::size_t>()};
            m.excluded = d.at("excluded").get<std::map<std::string, std::int64_t>>();
            r.metrics = std::move(m);
            card.results.push_back(std::move(r));
        }
        const auto& p = j.at("provenance");
        auto& prov = card.provenance;
        prov.tool_version = p.at("tool_version").get<std::string>();
        prov.seed = p.at("seed").get<std::uint64_t>();
        prov.iterations = p.at("iterations").get<std::int64_t>();
        prov.max_gri_enabled = p.at("max_gri_enabled").get<bool>();
        prov.rng_algorithm = p.at("rng_algorithm").get<std::string>();
        prov.config_digest = p.at("config_digest").get<std::string>();
        prov.country_filter = p.at("country_filter").get<std::vector<std::string>>();
        prov.dropped_rows = p.at("dropped_rows").get<std::map<std::string, std::int64_t>>();
        prov.quarantined_values =
            p.at("quarantined_values").get<std::map<std::string, std::map<std::string, std::int64_t>>>();
        prov.benchmark_quarantine = p.at("benchmark_quarantine").get<std::map<std::string, std::vector<std::string>>>();
        return card;
    } catch (const json::exception& e) {
        throw Error(ErrorCode::SchemaError, std::string("scorecard json: ") + e.what());
    }
}

std::string render(const Scorecard& card, Format format) {
    switch (format) {
    case Format::Table: return render_table(card);
    case Format::Json: return to_json(card).dump(2) + "\n";
    case Format::Csv: return render_csv(card);
    case Format::SvgHeatmap: return render_heatmap(std::span<const Scorecard>(&card, 1));
    }
    throw Error(ErrorCode::UnsupportedFormat, "unsupported output format");
}

std::string render_heatmap(std::span<const Scorecard> cards) {
    if (cards.empty()) throw Error(ErrorCode::InvalidArgument, "heatmap needs at least one scorecard");
    constexpr int label_w = 220, cell_w = 90, cell_h = 28, top = 48, margin = 12;

    std::vector<std::string> rows;
    for (const auto& r : cards.front().results) rows.push_back(r.dimension);
    for (const auto& card : cards) {
        if (card.results.size() != rows.size())
            throw Error(ErrorCode::RegistryMismatch, "heatmap scorecards use different registries");
        for (std::size_t i = 0; i < rows.size(); ++i)
            if (card.results[i].dimension != rows[i])
                throw Error(ErrorCode::RegistryMismatch, "heatmap scorecards use different registries");
    }

    const int grid_h = static_cast<int>(rows.size()) * cell_h;
    const int width = margin * 2 + label_w + static_cast<int>(cards.size()) * cell_w;
    const int legend_y = top + grid_h + 20;
    const int height = legend_y + 60;

    std::map<std::string, int> vintages;
    for (const auto& card : cards) vintages.insert(card.benchmark_vintages.begin(), card.benchmark_vintages.end());

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
        << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    svg << "<rect width=\"" << width << "\" height=\"" << height << "\" fill=\"#ffffff\"/>\n";
    for (std::size_t c = 0; c < cards.size(); ++c) {
        const std::string name = cards[c].survey_id.empty() ? "wave" + std::to_string(c + 1) : cards[c].survey_id;
        svg << "<text x=\"" << margin + label_w + static_cast<int>(c) * cell_w + cell_w / 2 << "\" y=\"" << top - 12
            << "\" text-anchor=\"middle\" font-weight=\"bold\">" << xml_escape(name) << "</text>\n";
    }
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const int y = top + static_cast<int>(r) * cell_h;
        svg << "<text x=\"" << margin << "\" y=\"" << y + cell_h / 2 + 4 << "\">" << xml_escape(rows[r]) << "</text>\n";
        for (std::size_t c = 0; c < cards.size(); ++c) {
            const int x = margin + label_w + static_cast<int>(c) * cell_w;
            const auto& result = cards[c].results[r];
            std::string fill = "#bdbdbd", text = "n/a", band = "none";
            if (result.ok()) {
                const auto b = interpret(result.metrics->gri).band;
                fill = band_color(b);
                band = band_label(b);
                text = fixed(result.metrics->gri);
            }
            svg << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << cell_w << "\" height=\"" << cell_h
                << "\" fill=\"" << fill << "\" stroke=\"#ffffff\" data-dimension=\"" << xml_escape(rows[r])
                << "\" data-band=\"" << band << "\"/>\n";
            svg << "<text x=\"" << x + cell_w / 2 << "\" y=\"" << y + cell_h / 2 + 4 << "\" text-anchor=\"middle\">"
                << text << "</text>\n";
        }
    }
    const std::pair<Band, const char*> legend[] = {{Band::Poor, "Poor (&lt;0.4)"},
                                                   {Band::Moderate, "Moderate (0.4-0.6)"},
                                                   {Band::Good, "Good (0.6-0.8)"},
                                                   {Band::Excellent, "Excellent (&gt;=0.8)"}};
    for (int i = 0; i < 4; ++i) {
        const int x = margin + i * 150;
        svg << "<rect x=\"" << x << "\" y=\"" << legend_y << "\" width=\"14\" height=\"14\" fill=\""
            << band_color(legend[i].first) << "\"/>\n";
        svg << "<text x=\"" << x + 20 << "\" y=\"" << legend_y + 12 << "\">" << legend[i].second << "</text>\n";
    }
    svg << "<text x=\"" << margin << "\" y=\"" << legend_y + 40 << "\" font-size=\"10\">benchmarks: "
        << xml_escape(vintages_line(vintages)) << "; tool " << xml_escape(cards.front().provenance.tool_version)
        << "</text>\n";
    svg << "</svg>\n";
    return svg.str();
}

std::string render_segments(const std::string& dimension, std::span<const SegmentDeviation> segments, Format format) {
    switch (format) {
    case Format::Table: {
        std::ostringstream out;
        out << "dimension: " << dimension << "\n";
        out << pad("stratum", 40) << lpad("p", 10) << lpad("q", 10) << lpad("delta", 10) << lpad("tvd_part", 10)
            << "  direction\n";
        for (const auto& s : segments)
            out << pad(format_key(s.key), 40) << lpad(fixed(s.p, 4), 10) << lpad(fixed(s.q, 4), 10)
                << lpad(fixed(s.delta, 4), 10) << lpad(fixed(s.tvd_contribution, 4), 10) << "  "
                << to_string(s.direction) << "\n";
        return out.str();
    }
    case Format::Csv: {
        std::ostringstream out;
        out << "stratum,p,q,delta,tvd_contribution,direction\n";
        for (const auto& s : segments)
            out << csv_field(format_key(s.key)) << ',' << general(s.p) << ',' << general(s.q) << ','
                << general(s.delta) << ',' << general(s.tvd_contribution) << ',' << to_string(s.direction) << "\n";
        return out.str();
    }
    case Format::Json: {
        json list = json::array();
        for (const auto& s : segments)
            list.push_back({{"stratum", s.key},
                            {"p", s.p},
                            {"q", s.q},
                            {"delta", s.delta},
                            {"tvd_contribution", s.tvd_contribution},
                            {"direction", to_string(s.direction)}});
        return json{{"dimension", dimension}, {"segments", list}}.dump(2) + "\n";
    }
    case Format::SvgHeatmap: break;
    }
    throw Error(ErrorCode::UnsupportedFormat, "segments cannot be rendered as a heatmap");
}

std::string render_longitudinal(const LongitudinalTable& table, Format format) {
    auto cell = [](const std::optional<double>& v, int digits) { return v ? fixed(*v, digits) : std::string("-"); };
    switch (format) {
    case Format::Table: {
        std::ostringstream out;
        out << pad("dimension", 24);
        for (const auto& w : table.waves) out << lpad(w, 10);
        out << lpad("mean", 8) << lpad("range", 8) << "\n";
        for (const auto& s : table.series) {
            out << pad(s.dimension, 24);
            for (const auto& v : s.gri) out << lpad(cell(v, 3), 10);
            out << lpad(cell(s.mean, 3), 8) << lpad(cell(s.range, 2), 8) << "\n";
        }
        return out.str();
    }
    case Format::Csv: {
        std::ostringstream out;
        out << "dimension";
        for (const auto& w : table.waves) out << ',' << csv_field(w);
        out << ",mean,range\n";
        for (const auto& s : table.series) {
            out << csv_field(s.dimension);
            for (const auto& v : s.gri) out << ',' << (v ? general(*v) : "");
            out << ',' << (s.mean ? general(*s.mean) : "") << ',' << (s.range ? general(*s.range) : "") << "\n";
        }
        return out.str();
    }
    case Format::Json: {
        json series = json::array();
        for (const auto& s : table.series) {
            json values = json::array();
            for (const auto& v : s.gri) values.push_back(optional_json(v));
            series.push_back({{"dimension", s.dimension}, {"gri", values}, {"mean", optional_json(s.mean)},
                              {"range", optional_json(s.range)}});
        }
        return json{{"waves", table.waves}, {"series", series}}.dump(2) + "\n";
    }
    case Format::SvgHeatmap: break;
    }
    throw Error(ErrorCode::UnsupportedFormat, "use render_heatmap for longitudinal heatmaps");
}

}  // namespace repscore
