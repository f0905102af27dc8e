#include "repscore/metrics.hpp"

#include <cmath>
#include <vector>

#include "repscore/error.hpp"
#include "repscore/kernels.hpp"

namespace repscore {

namespace {

// Slack for the divergence inequalities, which are tight at p = q and at
// disjoint supports.
constexpr double kBoundSlack = 1e-12;

}  // namespace

MetricScore tvd(const AlignedPair& pair) {
    return {"tvd", kernels::total_variation(pair.p(), pair.q())};
}

MetricScore gri(const AlignedPair& pair) {
    return {"gri", kernels::representativeness(pair.p(), pair.q())};
}

std::optional<MetricScore> diversity_score(const AlignedPair& pair) {
    if (pair.n() <= 0) throw Error(ErrorCode::InvalidCount, "diversity score needs a positive sample size");
    const double threshold = 1.0 / static_cast<double>(pair.n());
    const auto relevant = (pair.q().array() > threshold);
    const auto relevant_count = relevant.count();
    if (relevant_count == 0) return std::nullopt;
    const auto reached = (relevant && (pair.p().array() > 0.0)).count();
    return MetricScore{"diversity", static_cast<double>(reached) / static_cast<double>(relevant_count)};
}

Distribution sri_target(const Distribution& q) {
    Eigen::VectorXd values(static_cast<Eigen::Index>(q.size()));
    Eigen::Index i = 0;
    for (const auto& [key, value] : q.mass()) values[i++] = value;
    const Eigen::VectorXd target = kernels::sqrt_target(values);

    Distribution::MassMap mass;
    i = 0;
    for (const auto& [key, value] : q.mass()) mass.emplace(key, target[i++]);
    return Distribution(q.spec(), std::move(mass), q.source_size(), q.provenance());
}

MetricScore sri(const AlignedPair& pair) {
    const Eigen::VectorXd target = kernels::sqrt_target(pair.q());
    return {"sri", kernels::representativeness(pair.p(), target)};
}

DesignEffectReport design_effect(const AlignedPair& pair) {
    std::vector<Eigen::Index> covered;
    bool all_sample_covered = true;
    for (Eigen::Index i = 0; i < pair.p().size(); ++i) {
        if (pair.p()[i] > 0.0 && pair.q()[i] > 0.0)
            covered.push_back(i);
        else if (pair.p()[i] > 0.0)
            all_sample_covered = false;
    }
    if (covered.empty()) throw Error(ErrorCode::NoOverlap, "no stratum has both sample and benchmark mass");
    if (pair.n() <= 0) throw Error(ErrorCode::InvalidCount, "design effect needs a positive sample size");

    const Eigen::VectorXd p = pair.p()(covered);
    const Eigen::VectorXd q = pair.q()(covered);
    // With nothing uncovered f is 1 by definition; summing would leave rounding in N f / deff.
    const double f = all_sample_covered ? 1.0 : p.sum();
    const Eigen::VectorXd p_cov = p / p.sum();
    const Eigen::VectorXd q_cov = q / q.sum();

    DesignEffectReport report;
    report.coverage_fraction = f;
    report.covered_strata = covered.size();
    report.deff = kernels::quadratic_ratio(p_cov, q_cov);
    const Eigen::VectorXd weights = q_cov.cwiseQuotient(p_cov);
    report.weight_cv2 = kernels::weighted_cv2(weights, p_cov);
    const double n = static_cast<double>(pair.n());
    report.n_eff = n * f / report.deff;
    report.precision_retained = report.n_eff / n;
    return report;
}

InterpretationBand interpret(double score) {
    if (!(score >= 0.0 && score <= 1.0))
        throw Error(ErrorCode::OutOfRange, "score outside [0, 1]: " + std::to_string(score));
    if (score >= 0.8) return {Band::Excellent, "Excellent", 0.8, 1.0};
    if (score >= 0.6) return {Band::Good, "Good", 0.6, 0.8};
    if (score >= 0.4) return {Band::Moderate, "Moderate", 0.4, 0.6};
    return {Band::Poor, "Poor", 0.0, 0.4};
}

DivergenceDiagnostics divergence_diagnostics(const AlignedPair& pair) {
    DivergenceDiagnostics out;
    out.tvd = kernels::total_variation(pair.p(), pair.q());
    out.hellinger = kernels::hellinger(pair.p(), pair.q());
    out.kl = kernels::kl_divergence(pair.p(), pair.q());

    const double h = out.hellinger;
    out.sandwich_ok = h * h <= out.tvd + kBoundSlack && out.tvd <= h * std::sqrt(2.0) + kBoundSlack;
    if (out.kl) out.sandwich_ok = out.sandwich_ok && out.tvd <= std::sqrt(*out.kl / 2.0) + kBoundSlack;
    return out;
}

}  // namespace repscore
