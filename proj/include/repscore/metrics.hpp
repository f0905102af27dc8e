#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

#include "repscore/distribution.hpp"

namespace repscore {

struct MetricScore {
    std::string metric_name;
    double value = 0.0;
};

MetricScore tvd(const AlignedPair& pair);
MetricScore gri(const AlignedPair& pair);

// Share of relevant benchmark strata (q > 1/N) that the sample reaches.
// Empty when no stratum is relevant, since the ratio has no denominator.
std::optional<MetricScore> diversity_score(const AlignedPair& pair);

Distribution sri_target(const Distribution& q);
MetricScore sri(const AlignedPair& pair);

struct DesignEffectReport {
    double deff = 1.0;
    double coverage_fraction = 1.0;  // f: sample mass in strata present on both sides
    double n_eff = 0.0;              // N * f / deff
    double precision_retained = 0.0; // n_eff / N
    std::size_t covered_strata = 0;
    double weight_cv2 = 0.0;         // CV^2 of q~/p~ under p~, over covered strata

    bool operator==(const DesignEffectReport&) const = default;
};

// Post-stratification design effect over the covered strata, with both sides
// renormalized there. Throws NoOverlap when no stratum is covered.
DesignEffectReport design_effect(const AlignedPair& pair);

enum class Band { Poor, Moderate, Good, Excellent };

struct InterpretationBand {
    Band band;
    std::string_view label;
    double lower;
    double upper;
};

// [0, 0.4) Poor, [0.4, 0.6) Moderate, [0.6, 0.8) Good, [0.8, 1] Excellent.
InterpretationBand interpret(double score);
inline InterpretationBand interpret(const MetricScore& score) { return interpret(score.value); }

struct DivergenceDiagnostics {
    double tvd = 0.0;
    double hellinger = 0.0;
    std::optional<double> kl;  // KL(P||Q); empty unless supports coincide
    bool sandwich_ok = false;  // H^2 <= TVD <= sqrt(2) H, and Pinsker when KL is defined
};

DivergenceDiagnostics divergence_diagnostics(const AlignedPair& pair);

}  // namespace repscore
