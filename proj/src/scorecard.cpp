#include "repscore/scorecard.hpp"

#include <algorithm>
#include <cmath>

#include "repscore/error.hpp"

namespace repscore {

bool Scorecard::complete() const {
    return std::all_of(results.begin(), results.end(), [](const auto& r) { return r.ok(); });
}

AlignedPair dimension_pair(const SurveyMicrodata& survey, const BenchmarkSuite& suite, const DimensionEntry& entry,
                           const std::set<std::string>* countries) {
    const Distribution benchmark = suite.dimension(entry, countries);
    const Distribution sample = to_sample_distribution(survey, entry.spec, suite.rollup());
    return align(sample, benchmark);
}

namespace {

DimensionMetrics score_dimension(const SurveyMicrodata& survey, const BenchmarkSuite& suite,
                                 const DimensionEntry& entry, const ScoreOptions& options) {
    const auto* filter = options.countries ? &*options.countries : nullptr;
    const Distribution benchmark = suite.dimension(entry, filter);
    auto projection = project_sample(survey, entry.spec, suite.rollup());
    const AlignedPair pair = align(projection.distribution, benchmark);

    DimensionMetrics m;
    m.n = pair.n();
    m.gri = gri(pair).value;
    if (auto diversity = diversity_score(pair)) m.diversity = diversity->value;
    m.sri = sri(pair).value;
    try {
        m.deff = design_effect(pair);
    } catch (const Error& e) {
        if (e.code() != ErrorCode::NoOverlap) throw;
    }
    m.band = interpret(m.gri).band;
    m.strata.benchmark = benchmark.size();
    m.strata.sample = projection.distribution.size();
    m.strata.overlap = static_cast<std::size_t>(((pair.p().array() > 0.0) && (pair.q().array() > 0.0)).count());
    m.excluded = std::move(projection.excluded);

    if (options.include_max_gri) {
        m.max_gri = max_gri(benchmark, m.n, options.iterations, options.seed);
        m.efficiency = efficiency(m.gri, *m.max_gri);
    }
    return m;
}

}  // namespace

Scorecard compute_scorecard(const SurveyMicrodata& survey, const BenchmarkSuite& suite,
                            const DimensionRegistry& registry, const ScoreOptions& options) {
    Scorecard card;
    card.survey_id = options.survey_id;
    card.n_total = survey.n_total;
    card.source_digest = survey.source_digest;
    for (const auto& [schema, table] : suite.tables()) {
        card.benchmark_vintages[table.source_id] = table.vintage;
        if (!table.quarantine.empty()) {
            auto& labels = card.provenance.benchmark_quarantine[table.source_id];
            for (const auto& q : table.quarantine) labels.push_back(q.label);
            std::sort(labels.begin(), labels.end());
            labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
        }
    }

    auto& prov = card.provenance;
    prov.seed = options.seed;
    prov.iterations = options.include_max_gri ? options.iterations : 0;
    prov.max_gri_enabled = options.include_max_gri;
    prov.config_digest = options.config_digest;
    if (options.countries) prov.country_filter.assign(options.countries->begin(), options.countries->end());
    prov.dropped_rows = survey.dropped;
    prov.quarantined_values = survey.quarantined_values;

    for (const auto& entry : registry.dimensions) {
        DimensionResult result;
        result.dimension = entry.spec.name;
        try {
            result.metrics = score_dimension(survey, suite, entry, options);
        } catch (const Error& e) {
            result.error = e.what();
        }
        card.results.push_back(std::move(result));
    }
    return card;
}

std::string_view to_string(Direction direction) noexcept {
    switch (direction) {
    case Direction::Over: return "over";
    case Direction::Under: return "under";
    case Direction::Missing: return "missing";
    }
    return "";
}

std::vector<SegmentDeviation> segment_deviations(const AlignedPair& pair) {
    std::vector<SegmentDeviation> out;
    out.reserve(pair.size());
    for (std::size_t i = 0; i < pair.size(); ++i) {
        const auto idx = static_cast<Eigen::Index>(i);
        SegmentDeviation s;
        s.key = pair.keys()[i];
        s.p = pair.p()[idx];
        s.q = pair.q()[idx];
        s.delta = s.p - s.q;
        s.tvd_contribution = 0.5 * std::abs(s.delta);
        if (s.p == 0.0 && s.q > 0.0)
            s.direction = Direction::Missing;
        else
            s.direction = s.delta < 0.0 ? Direction::Under : Direction::Over;
        out.push_back(std::move(s));
    }
    // Keys arrive sorted, so a stable sort keeps ties in key order.
    std::stable_sort(out.begin(), out.end(),
                     [](const auto& a, const auto& b) { return a.tvd_contribution > b.tvd_contribution; });
    return out;
}

std::vector<SegmentDeviation> top_segments(const AlignedPair& pair, std::size_t top_k) {
    if (top_k == 0) throw Error(ErrorCode::InvalidArgument, "top_k must be at least 1");
    auto all = segment_deviations(pair);
    if (all.size() > top_k) all.resize(top_k);
    return all;
}

LongitudinalTable compare_waves(std::span<const Scorecard> scorecards) {
    if (scorecards.size() < 2) throw Error(ErrorCode::InvalidArgument, "comparison needs at least two scorecards");
    auto names = [](const Scorecard& card) {
        std::vector<std::string> out;
        for (const auto& r : card.results) out.push_back(r.dimension);
        return out;
    };
    const auto reference = names(scorecards.front());
    for (const auto& card : scorecards)
        if (names(card) != reference)
            throw Error(ErrorCode::RegistryMismatch, "scorecard '" + card.survey_id + "' uses a different registry");

    LongitudinalTable table;
    for (std::size_t w = 0; w < scorecards.size(); ++w)
        table.waves.push_back(scorecards[w].survey_id.empty() ? "wave" + std::to_string(w + 1) : scorecards[w].survey_id);

    for (std::size_t d = 0; d < reference.size(); ++d) {
        WaveSeries series;
        series.dimension = reference[d];
        double sum = 0.0;
        double lo = 0.0;
        double hi = 0.0;
        std::size_t present = 0;
        for (const auto& card : scorecards) {
            const auto& r = card.results[d];
            if (!r.ok()) {
                series.gri.emplace_back();
                continue;
            }
            const double v = r.metrics->gri;
            series.gri.emplace_back(v);
            lo = present ? std::min(lo, v) : v;
            hi = present ? std::max(hi, v) : v;
            sum += v;
            ++present;
        }
        if (present) {
            series.mean = sum / static_cast<double>(present);
            series.range = hi - lo;
        }
        table.series.push_back(std::move(series));
    }
    return table;
}

}  // namespace repscore
