#include "repscore/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "repscore/error.hpp"

namespace repscore {

namespace {

double total_mass(const Distribution::MassMap& mass) {
    double sum = 0.0;
    for (const auto& [key, value] : mass) sum += value;
    return sum;
}

std::string format_fraction(double value) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", value);
    return buf;
}

}  // namespace

std::string format_key(const StratumKey& key, std::string_view sep) {
    std::string out;
    for (std::size_t i = 0; i < key.size(); ++i) {
        if (i) out += sep;
        out += key[i];
    }
    return out;
}

DimensionSpec DimensionSpec::from_axes(std::vector<std::string> axes) {
    DimensionSpec spec;
    for (std::size_t i = 0; i < axes.size(); ++i) {
        if (i) spec.name += '_';
        spec.name += axes[i];
    }
    spec.axes = std::move(axes);
    return spec;
}

bool DimensionSpec::has_axis(std::string_view axis) const {
    return std::find(axes.begin(), axes.end(), axis) != axes.end();
}

std::size_t DimensionSpec::axis_index(std::string_view axis) const {
    auto it = std::find(axes.begin(), axes.end(), axis);
    if (it == axes.end())
        throw Error(ErrorCode::UnknownAxis, "axis '" + std::string(axis) + "' not in dimension '" + name + "'");
    return static_cast<std::size_t>(it - axes.begin());
}

void DimensionSpec::validate() const {
    if (axes.empty()) throw Error(ErrorCode::InvalidArgument, "dimension '" + name + "' has no axes");
    std::set<std::string> seen;
    for (const auto& axis : axes) {
        if (axis.empty()) throw Error(ErrorCode::InvalidArgument, "empty axis name in '" + name + "'");
        if (!seen.insert(axis).second)
            throw Error(ErrorCode::InvalidArgument, "duplicate axis '" + axis + "' in '" + name + "'");
    }
}

Distribution::Distribution(DimensionSpec spec, MassMap mass, std::optional<std::int64_t> source_size,
                           Provenance provenance)
    : spec_(std::move(spec)), source_size_(source_size), provenance_(std::move(provenance)) {
    spec_.validate();
    if (mass.empty()) throw Error(ErrorCode::InvalidDistribution, "no strata in '" + spec_.name + "'");
    for (auto it = mass.begin(); it != mass.end();) {
        const auto& [key, value] = *it;
        if (key.size() != spec_.axes.size())
            throw Error(ErrorCode::InvalidDistribution,
                        "stratum '" + format_key(key) + "' has wrong arity for '" + spec_.name + "'");
        for (std::size_t a = 0; a < key.size(); ++a) {
            auto dom = spec_.domains.find(spec_.axes[a]);
            if (dom != spec_.domains.end() && !dom->second.empty() && !dom->second.contains(key[a]))
                throw Error(ErrorCode::InvalidDistribution,
                            "label '" + key[a] + "' outside domain of axis '" + spec_.axes[a] + "'");
        }
        if (!std::isfinite(value) || value < 0.0)
            throw Error(ErrorCode::InvalidDistribution, "invalid proportion for '" + format_key(key) + "'");
        it = value == 0.0 ? mass.erase(it) : std::next(it);
    }
    const double sum = total_mass(mass);
    if (std::abs(sum - 1.0) > kMassTolerance)
        throw Error(ErrorCode::InvalidDistribution, "proportions sum to " + format_fraction(sum));
    if (source_size_ && *source_size_ <= 0)
        throw Error(ErrorCode::InvalidCount, "source size must be positive");
    mass_ = std::move(mass);
}

double Distribution::operator[](const StratumKey& key) const {
    auto it = mass_.find(key);
    return it == mass_.end() ? 0.0 : it->second;
}

Distribution Distribution::with_provenance(Provenance provenance) const {
    Distribution copy = *this;
    copy.provenance_ = std::move(provenance);
    return copy;
}

Distribution Distribution::with_source_size(std::optional<std::int64_t> n) const {
    return Distribution(spec_, mass_, n, provenance_);
}

AlignedPair::AlignedPair(DimensionSpec spec, std::vector<StratumKey> keys, Eigen::VectorXd p, Eigen::VectorXd q,
                         std::int64_t n)
    : spec_(std::move(spec)), keys_(std::move(keys)), p_(std::move(p)), q_(std::move(q)), n_(n) {
    const auto k = static_cast<Eigen::Index>(keys_.size());
    if (k == 0 || p_.size() != k || q_.size() != k)
        throw Error(ErrorCode::DimensionMismatch, "aligned vectors must be non-empty and of equal length");
    if (n_ < 0) throw Error(ErrorCode::InvalidCount, "sample size must be non-negative");
    if (!p_.allFinite() || !q_.allFinite() || (p_.array() < 0.0).any() || (q_.array() < 0.0).any())
        throw Error(ErrorCode::InvalidDistribution, "aligned proportions must be finite and non-negative");
    if (std::abs(p_.sum() - 1.0) > kMassTolerance || std::abs(q_.sum() - 1.0) > kMassTolerance)
        throw Error(ErrorCode::InvalidDistribution, "aligned proportions must each sum to one");
}

AlignedPair AlignedPair::from_vectors(Eigen::VectorXd p, Eigen::VectorXd q, std::int64_t n) {
    std::vector<StratumKey> keys;
    keys.reserve(static_cast<std::size_t>(p.size()));
    char buf[32];
    for (Eigen::Index i = 0; i < p.size(); ++i) {
        std::snprintf(buf, sizeof buf, "s%04ld", static_cast<long>(i));
        keys.push_back({buf});
    }
    return AlignedPair(DimensionSpec::from_axes({"stratum"}), std::move(keys), std::move(p), std::move(q), n);
}

Distribution from_counts(const std::map<StratumKey, std::int64_t>& counts, DimensionSpec spec) {
    if (counts.empty()) throw Error(ErrorCode::EmptySample, "no strata counted for '" + spec.name + "'");
    std::int64_t total = 0;
    for (const auto& [key, count] : counts) {
        if (count < 0) throw Error(ErrorCode::InvalidCount, "negative count for '" + format_key(key) + "'");
        total += count;
    }
    if (total == 0) throw Error(ErrorCode::EmptySample, "all counts are zero for '" + spec.name + "'");
    Distribution::MassMap mass;
    for (const auto& [key, count] : counts)
        if (count > 0) mass.emplace(key, static_cast<double>(count) / static_cast<double>(total));
    return Distribution(std::move(spec), std::move(mass), total);
}

Distribution normalize(const std::map<StratumKey, double>& weights, DimensionSpec spec, Provenance provenance) {
    double total = 0.0;
    std::size_t dropped = 0;
    for (const auto& [key, weight] : weights) {
        if (!std::isfinite(weight) || weight < 0.0)
            throw Error(ErrorCode::InvalidWeight, "invalid weight for '" + format_key(key) + "'");
        total += weight;
        if (weight == 0.0) ++dropped;
    }
    if (!(total > 0.0)) throw Error(ErrorCode::DegenerateBenchmark, "no positive weight in '" + spec.name + "'");
    Distribution::MassMap mass;
    for (const auto& [key, weight] : weights)
        if (weight > 0.0) mass.emplace(key, weight / total);
    if (dropped) provenance.notes.push_back("dropped " + std::to_string(dropped) + " zero-weight strata");
    return Distribution(std::move(spec), std::move(mass), std::nullopt, std::move(provenance));
}

AlignedPair align(const Distribution& sample, const Distribution& benchmark) {
    if (!(sample.spec() == benchmark.spec()))
        throw Error(ErrorCode::DimensionMismatch,
                    "sample '" + sample.spec().name + "' vs benchmark '" + benchmark.spec().name + "'");
    if (!sample.source_size()) throw Error(ErrorCode::InvalidArgument, "sample distribution has no source size");

    std::vector<StratumKey> keys;
    keys.reserve(sample.size() + benchmark.size());
    // Both maps iterate in key order, so a merge yields the sorted union.
    auto s = sample.mass().begin();
    auto b = benchmark.mass().begin();
    while (s != sample.mass().end() || b != benchmark.mass().end()) {
        if (b == benchmark.mass().end() || (s != sample.mass().end() && s->first < b->first)) {
            keys.push_back(s++->first);
        } else if (s == sample.mass().end() || b->first < s->first) {
            keys.push_back(b++->first);
        } else {
            keys.push_back(s->first);
            ++s;
            ++b;
        }
    }

    Eigen::VectorXd p(static_cast<Eigen::Index>(keys.size()));
    Eigen::VectorXd q(p.size());
    for (std::size_t i = 0; i < keys.size(); ++i) {
        p[static_cast<Eigen::Index>(i)] = sample[keys[i]];
        q[static_cast<Eigen::Index>(i)] = benchmark[keys[i]];
    }
    return AlignedPair(sample.spec(), std::move(keys), std::move(p), std::move(q), *sample.source_size());
}

Distribution marginalize(const Distribution& dist, std::span<const std::string> keep_axes) {
    if (keep_axes.empty()) throw Error(ErrorCode::UnknownAxis, "no axes to keep");
    std::vector<std::size_t> index;
    for (const auto& axis : keep_axes) index.push_back(dist.spec().axis_index(axis));

    DimensionSpec spec = DimensionSpec::from_axes({keep_axes.begin(), keep_axes.end()});
    if (spec.axes == dist.spec().axes) spec.name = dist.spec().name;
    for (const auto& axis : spec.axes) {
        auto dom = dist.spec().domains.find(axis);
        if (dom != dist.spec().domains.end()) spec.domains.insert(*dom);
    }
    spec.validate();

    Distribution::MassMap mass;
    for (const auto& [key, value] : dist.mass()) {
        StratumKey reduced;
        reduced.reserve(index.size());
        for (auto i : index) reduced.push_back(key[i]);
        mass[reduced] += value;
    }
    return Distribution(std::move(spec), std::move(mass), dist.source_size(), dist.provenance());
}

RestrictedMass restricted_mass(const Distribution& dist, std::string_view axis, const std::set<std::string>& allowed) {
    const auto a = dist.spec().axis_index(axis);
    RestrictedMass out{dist.spec(), {}, 0.0};
    for (const auto& [key, value] : dist.mass()) {
        if (allowed.contains(key[a])) {
            out.mass.emplace(key, value);
            out.retained_fraction += value;
        }
    }
    if (out.mass.empty() || !(out.retained_fraction > 0.0))
        throw Error(ErrorCode::DegenerateBenchmark,
                    "restriction on '" + std::string(axis) + "' leaves no mass in '" + dist.spec().name + "'");
    return out;
}

Distribution restrict_to(const Distribution& dist, std::string_view axis, const std::set<std::string>& allowed) {
    auto kept = restricted_mass(dist, axis, allowed);
    for (auto& [key, value] : kept.mass) value /= kept.retained_fraction;
    Provenance prov = dist.provenance();
    prov.notes.push_back("restricted " + std::string(axis) + " to " + std::to_string(allowed.size()) +
                         " labels, retained mass " + format_fraction(kept.retained_fraction));
    return Distribution(std::move(kept.spec), std::move(kept.mass), dist.source_size(), std::move(prov));
}

}  // namespace repscore
